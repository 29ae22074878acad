#pragma once

#include <string>

#include "pohozaev/errors.hpp"

namespace pohozaev {

// Problem data for the constrained equation
//   -Delta_p u = lambda |u|^{p-2}u + mu |u|^{q1-2}u + |u|^{q2-2}u,  ||u||_p = a,
// in the exponent regime p < q1 < p + p^2/N < q2 <= p* = pN/(N-p).
struct ProblemParams {
    int N = 3;
    double p = 2.0;
    double q1 = 2.5;
    double q2 = 4.0;
    double a = 1.0;   // prescribed mass ||u||_p
    double mu = 0.1;  // coupling in front of the q1 term

    double p_star() const { return p * N / (N - p); }
    bool critical() const;  // q2 sits at the Sobolev-critical exponent

    // gamma_q = N/p - N/q; q*gamma_q is the dilation exponent of ||u||_q^q.
    double gamma(double q) const { return double(N) / p - double(N) / q; }
    double x_exp() const { return q1 * gamma(q1); }  // q1*gamma_{q1} < p
    double y_exp() const { return q2 * gamma(q2); }  // q2*gamma_{q2} > p

    // Throws InvalidRegimeError naming the violated inequality.
    void validate() const;
};

// gamma exponent with domain checking (q must lie in [p, p*]).
double gamma_exponent(double q, const ProblemParams& params);

// Scaling exponent kappa in mu*(a) = mu*(1) * a^{-kappa}.
double kappa_exponent(const ProblemParams& params);

}  // namespace pohozaev
