#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pohozaev/fibering.hpp"
#include "pohozaev/grid.hpp"
#include "pohozaev/params.hpp"
#include "pohozaev/solver.hpp"

namespace pohozaev {

struct ExtremalOptions {
    double R = 20.0;
    std::size_t n = 1600;
    int max_iter = 4000;  // descent iterations per seed
    int seeds = 5;        // deterministic multi-start count (>= 5)
    // Periodically re-dilate iterates so the gradient norm stays near 1;
    // the threshold functional is dilation-invariant, so this only improves
    // conditioning.
    bool normalize_gradient = true;
};

struct ExtremalReport {
    double mu_star = 0.0;
    double kappa_exponent = 0.0;
    double scaling_defect = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    RadialFunction witness;
    std::string witness_path;  // set when the witness is persisted
};

// Single-seed projected descent on the threshold functional mu(u) over the
// mass sphere. Stops at the iteration cap, at stagnation, or as soon as the
// reported (trapezoid) mu(u) falls to stop_below or less (stop_below = 0
// disables early exit). `u_above` keeps the last iterate whose mu(u) still
// exceeded stop_below, so callers can bracket a level set.
struct MuDescentResult {
    RadialFunction u;
    double mu = 0.0;
    RadialFunction u_above;
    double mu_above = 0.0;
    bool crossed = false;
    bool stalled = false;
};
MuDescentResult mu_descent(const RadialFunction& seed,
                           const ProblemParams& params, int max_iter,
                           double stop_below = 0.0);

// First extremal value: multi-start minimization of mu(u) over the mass
// sphere (Gaussian seeds of widths 0.5, 1, 2 plus two two-bump mixtures).
// The witness is re-dilated so its gradient norm is near 1 whenever that
// dilation is resolution-safe.
ExtremalReport mu_star(const ProblemParams& params,
                       const ExtremalOptions& opts = {});

// Runs mu_star independently at masses a1 and a2 and returns
// |mu*(a2) - mu*(a1) (a2/a1)^{-kappa}| / mu*(a2).
double scaling_law_check(double a1, double a2, const ProblemParams& params,
                         const ExtremalOptions& opts = {});

// Energies of the three branch minimizations at the given (a, mu) together
// with the ordering flags the theory asserts near the extremal value.
struct EnergyGapReport {
    double m_plus = 0.0;
    double m_minus = 0.0;
    double m_zero = 0.0;
    bool plus_below_minus = false;  // m^+ <= m^-
    bool plus_below_zero = false;   // m^+ <  m^0
    bool minus_below_zero = false;  // m^- <  m^0 (reported, not asserted)
};
EnergyGapReport energy_gap_report(double a, double mu,
                                  const ProblemParams& params,
                                  const SolverOptions& solver_opts = {});

// Least-squares residual of the degenerate stationarity equation
//   -Delta_p u = lambda ||u||_{q1}^{q1} |u|^{p-2}u
//                + (mu q1 gamma_{q1}/p) |u|^{q1-2}u
//                + (q2 gamma_{q2}/p) |u|^{q2-2}u
// at the profile dilated onto the degenerate point of its fiber; only the
// multiplier lambda is fitted. Returns the relative L2 residual and, when
// lambda_out is non-null, the fitted multiplier.
double check_degenerate_el(const RadialFunction& u,
                           const ProblemParams& params,
                           double* lambda_out = nullptr);

}  // namespace pohozaev
