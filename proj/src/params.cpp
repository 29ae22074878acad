#include "pohozaev/params.hpp"

#include <cmath>
#include <sstream>

namespace pohozaev {

bool ProblemParams::critical() const {
    return std::abs(q2 - p_star()) <= 1e-12 * p_star();
}

void ProblemParams::validate() const {
    std::ostringstream msg;
    if (N < 2) {
        throw InvalidRegimeError("N must be at least 2");
    }
    if (!(p > 1.0) || !(p < N)) {
        msg << "p must satisfy 1 < p < N (got p=" << p << ", N=" << N << ")";
        throw InvalidRegimeError(msg.str());
    }
    if (!(q1 > p)) {
        msg << "q1 must exceed p (got q1=" << q1 << ", p=" << p << ")";
        throw InvalidRegimeError(msg.str());
    }
    const double qsplit = p + p * p / N;
    if (!(q1 < qsplit)) {
        msg << "q1 must lie below p + p^2/N = " << qsplit << " (got q1=" << q1
            << ")";
        throw InvalidRegimeError(msg.str());
    }
    if (!(q2 > qsplit)) {
        msg << "q2 must exceed p + p^2/N = " << qsplit << " (got q2=" << q2
            << ")";
        throw InvalidRegimeError(msg.str());
    }
    if (!(q2 <= p_star() * (1.0 + 1e-12))) {
        msg << "q2 must not exceed p* = " << p_star() << " (got q2=" << q2
            << ")";
        throw InvalidRegimeError(msg.str());
    }
    if (!(a > 0.0)) {
        msg << "mass a must be positive (got a=" << a << ")";
        throw InvalidRegimeError(msg.str());
    }
    if (!(mu > 0.0)) {
        msg << "coupling mu must be positive (got mu=" << mu << ")";
        throw InvalidRegimeError(msg.str());
    }
}

double gamma_exponent(double q, const ProblemParams& params) {
    const double ps = params.p_star();
    if (!(q >= params.p * (1.0 - 1e-14)) || !(q <= ps * (1.0 + 1e-14))) {
        std::ostringstream msg;
        msg << "q=" << q << " outside [p, p*] = [" << params.p << ", " << ps
            << "]";
        throw InvalidArgumentError(msg.str());
    }
    return params.gamma(q);
}

double kappa_exponent(const ProblemParams& params) {
    const double y = params.y_exp();
    return params.N * (params.q2 - params.q1) * (params.q2 - params.p) /
           (y * (y - params.p));
}

}  // namespace pohozaev
