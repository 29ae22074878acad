#pragma once

#include <optional>
#include <string>

#include "pohozaev/grid.hpp"
#include "pohozaev/params.hpp"

namespace pohozaev {

// Scalar moments of a profile: everything the dilation analysis needs.
//   A  = ||grad u||_p^p,  B1 = ||u||_{q1}^{q1},  B2 = ||u||_{q2}^{q2},
//   mass = ||u||_p^p.
struct FiberMoments {
    double A = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
    double mass = 0.0;
};

// Trapezoid (reported) moments.
FiberMoments moments(const RadialFunction& u, const ProblemParams& params);

// Classification of the dilation energy s -> Psi((u)_s).
enum class FiberingCase { TwoRoots, Degenerate, NoRoots };

std::string to_string(FiberingCase c);

struct FiberingReport {
    double mu_threshold = 0.0;  // mu(u)
    double s_star = 0.0;        // peak location of the reduced root function
    FiberingCase kase = FiberingCase::NoRoots;
    std::optional<double> t_plus;   // local-minimum root (TwoRoots)
    std::optional<double> t_minus;  // local-maximum root (TwoRoots)
    std::optional<double> t_zero;   // degenerate critical point
    std::optional<double> phi_plus;
    std::optional<double> phi_minus;
};

// Mass-preserving dilation (u)_s = s^{N/p} u(s r), resampled by monotone
// cubic interpolation onto u's grid. Throws ResolutionLossError when the
// rescaled support would cover fewer than 4 grid cells.
RadialFunction mass_scale(const RadialFunction& u, double s,
                          const ProblemParams& params);

// Energy (1/p)A - (mu/q1)B1 - (1/q2)B2.
double energy(const RadialFunction& u, const ProblemParams& params);
double energy(const FiberMoments& m, const ProblemParams& params);

// Dilation energy Phi(s) = energy((u)_s) evaluated from scalar moments.
double fibering_value(const FiberMoments& m, double s,
                      const ProblemParams& params);
double fibering_deriv(const FiberMoments& m, double s,
                      const ProblemParams& params);
double fibering_second(const FiberMoments& m, double s,
                       const ProblemParams& params);

// P(u) = A - mu gamma_{q1} B1 - gamma_{q2} B2  (= Phi'(1)).
double pohozaev(const RadialFunction& u, const ProblemParams& params);
double pohozaev(const FiberMoments& m, const ProblemParams& params);

// D(u) = pA - mu q1 gamma_{q1}^2 B1 - q2 gamma_{q2}^2 B2; on P = 0 this is
// Phi''(1), so its sign separates the branches.
double second_fibering_form(const FiberMoments& m, const ProblemParams& params);

// Threshold mu(u): the coupling at which the two dilation critical points
// merge. Throws DegenerateInputError when a needed norm vanishes.
double mu_of_u(const RadialFunction& u, const ProblemParams& params);
double mu_of_u(const FiberMoments& m, const ProblemParams& params);

// Peak location s(u) of the reduced root function.
double s_star(const FiberMoments& m, const ProblemParams& params);

// Full classification with root-finding (bisection brackets + Newton polish).
// Relative degeneracy tolerance 1e-8 on |mu - mu(u)| / mu(u).
FiberingReport classify_fibering(const RadialFunction& u,
                                 const ProblemParams& params);
FiberingReport classify_fibering(const FiberMoments& m,
                                 const ProblemParams& params);

enum class Branch { plus, minus, zero };

std::string to_string(Branch b);

// Dilate u onto the requested branch of the constraint manifold. Throws
// ProjectionUnavailableError unless the classification is TwoRoots.
RadialFunction project_to_manifold(const RadialFunction& u, Branch branch,
                                   const ProblemParams& params);

}  // namespace pohozaev
