#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pohozaev/fibering.hpp"
#include "pohozaev/grid.hpp"
#include "pohozaev/params.hpp"

namespace pohozaev {

struct SolverOptions {
    // Truncation radius of the final grid; 0 selects it from the decay law
    // R = 12 / ((-lambda)/(p-1))^{1/p} once a coarse multiplier is known,
    // clamped to [8, 60].
    double R = 0.0;
    std::size_t n = 4000;  // intervals of the final grid
    int max_iter = 4000;   // projected-descent iteration cap per stage
    int newton_max = 60;   // Newton iteration cap
    double grad_tol = 1e-7;   // descent stop: |grad| < grad_tol * (1 + |g|)
    double el_tol = 1e-11;    // Newton stop on the relative equation residual
    double sigma = 0.0;       // seed width; 0 = branch default (1.0 / 0.2)
    // When non-null, receives the reduced energy at every accepted descent
    // step of the final stage (monotone decreasing).
    std::vector<double>* energy_trace = nullptr;
};

struct Residuals {
    double pohozaev = 0.0;        // |P(u)| / ||grad u||_p^p
    double euler_lagrange = 0.0;  // relative L2 residual of the equation
    double mass = 0.0;            // | ||u||_p - a | / a
};

struct SolutionRecord {
    ProblemParams params;
    Branch branch = Branch::plus;
    double lambda = 0.0;
    double energy = 0.0;
    Residuals residuals;
    double positivity_min = 0.0;  // min of u over nodes 0..n-1
    bool converged = false;
    std::optional<int> morse_index;  // filled by the spectral module
    RadialFunction profile;
    std::string profile_path;  // set when the profile is persisted
};

// Local minimum of the dilation energy: minimizes the reduced functional
// u -> Psi(projection of u onto the plus branch) over the mass sphere by
// tangential descent, then polishes with a damped Newton solve of the
// discrete equation. Non-convergence is reported through `converged`
// (the best iterate is still returned).
SolutionRecord minimize_ground(const ProblemParams& params,
                               const SolverOptions& opts = {});

// Same reduction for the minus branch (the local maximum along dilations);
// seeds a concentrated Gaussian. In the Sobolev-critical regime a
// concentrating non-convergent iterate raises ConcentrationDiagnosedError.
SolutionRecord minimize_mountain(const ProblemParams& params,
                                 const SolverOptions& opts = {});

// Minimizes the energy over the degenerate set {P = 0, second dilation form
// = 0}: feasibility by driving the threshold functional to the requested
// coupling, then an augmented-Lagrangian descent, then a constraint polish.
// Throws EmptyManifoldError when the coupling lies below the attainable
// threshold. The record's euler_lagrange residual is the least-squares
// defect of the degenerate stationarity equation with the fitted multiplier.
SolutionRecord minimize_degenerate(const ProblemParams& params,
                                   const SolverOptions& opts = {});

// Testing-identity multiplier (||grad u||_p^p - mu ||u||_{q1}^{q1}
// - ||u||_{q2}^{q2}) / a^p from reported moments.
double lagrange_multiplier(const RadialFunction& u,
                           const ProblemParams& params);

// Damped Newton on the discrete system -Delta_p u = lambda |u|^{p-2}u
// + mu |u|^{q1-2}u + |u|^{q2-2}u with u(R) = 0 and the mass row
// ||u||_p^p = a^p; unknowns are the nodal values and lambda. An input
// already below tolerance is returned unchanged (zero steps).
std::pair<RadialFunction, double> refine_euler_lagrange(
    const RadialFunction& u, double lambda, const ProblemParams& params,
    const SolverOptions& opts = {});

// Relative defect of the integral identity
//   (N-p) ||grad u||_p^p = lambda N a^p + (mu N p / q1) ||u||_{q1}^{q1}
//                          + (N p / q2) ||u||_{q2}^{q2}
// normalized by the largest participating term.
double pohozaev_identity_check(const RadialFunction& u, double lambda,
                               const ProblemParams& params);

}  // namespace pohozaev
