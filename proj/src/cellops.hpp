#pragma once

// Internal helpers shared by the manifold solver and the extremal-value
// module: cell-weighted moments and norms that pair exactly with the
// finite-volume operator, plus small pointwise nonlinearities.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pohozaev/errors.hpp"
#include "pohozaev/fibering.hpp"
#include "pohozaev/grid.hpp"
#include "pohozaev/params.hpp"

namespace pohozaev::detail {

// |u|^{q-2} u, continuous at 0 for q > 1.
inline double phi_pow(double u, double q) {
    if (u == 0.0) return 0.0;
    if (q == 2.0) return u;
    return std::pow(std::abs(u), q - 2.0) * u;
}

// d/du phi_q(u) = (q-1)|u|^{q-2}, guarded against overflow when q < 2.
inline double dphi_pow(double u, double q) {
    if (q == 2.0) return 1.0;
    double au = std::abs(u);
    if (q < 2.0 && au < 1e-150) au = 1e-150;
    if (au == 0.0) return 0.0;
    return (q - 1.0) * std::pow(au, q - 2.0);
}

// Moments under cell weights: gradient part from face differences (the exact
// discrete-parts partner of the finite-volume operator), bulk parts from the
// strictly positive cell volumes. Solver-internal dynamics only; every
// reported quantity is re-evaluated with trapezoid weights.
inline FiberMoments cell_moments_raw(const RadialGrid& g,
                                     const std::vector<double>& u,
                                     const ProblemParams& pp) {
    FiberMoments m;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double s = (u[i + 1] - u[i]) / g.h;
        acc += g.fpow[i] * std::pow(std::abs(s), pp.p);
    }
    m.A = g.omega * g.h * acc;
    for (std::size_t i = 0; i <= g.n; ++i) {
        const double au = std::abs(u[i]);
        if (au == 0.0) continue;
        m.B1 += g.cw[i] * std::pow(au, pp.q1);
        m.B2 += g.cw[i] * std::pow(au, pp.q2);
        m.mass += g.cw[i] * std::pow(au, pp.p);
    }
    return m;
}

inline double cell_mass(const RadialGrid& g, const std::vector<double>& u,
                        double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= g.n; ++i) {
        acc += g.cw[i] * std::pow(std::abs(u[i]), p);
    }
    return acc;
}

inline void renorm_cell(const RadialGrid& g, std::vector<double>& u,
                        const ProblemParams& pp) {
    const double m = cell_mass(g, u, pp.p);
    if (m <= 0.0) {
        throw DegenerateInputError("cannot renormalize a zero profile");
    }
    const double c = std::pow(std::pow(pp.a, pp.p) / m, 1.0 / pp.p);
    for (double& v : u) v *= c;
}

inline void renorm_trap(RadialFunction& f, const ProblemParams& pp) {
    double acc = 0.0;
    const auto& w = f.grid->w;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        acc += w[i] * std::pow(std::abs(f.u[i]), pp.p);
    }
    if (acc <= 0.0) {
        throw DegenerateInputError("cannot renormalize a zero profile");
    }
    const double c = std::pow(std::pow(pp.a, pp.p) / acc, 1.0 / pp.p);
    for (double& v : f.u) v *= c;
    for (double& v : f.du) v *= c;
}

inline std::vector<double> gaussian_seed(const RadialGrid& g, double sigma,
                                         const ProblemParams& pp) {
    std::vector<double> u(g.n + 1);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = 0; i <= g.n; ++i) {
        u[i] = std::exp(-g.r[i] * g.r[i] * inv2s2);
    }
    u[g.n] = 0.0;
    renorm_cell(g, u, pp);
    return u;
}

inline double dot_cw(const RadialGrid& g, const std::vector<double>& x,
                     const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= g.n; ++i) acc += g.cw[i] * x[i] * y[i];
    return acc;
}

// Tridiagonal rows of the linearized finite-volume p-Laplacian in the cell
// scaling (rows divided by cell volumes, matching the nodal operator). For
// p < 2 the face conductance is regularized near zero slope.
inline void plap_jacobian_rows(const RadialGrid& g,
                               const std::vector<double>& u, double p,
                               std::vector<double>& sub,
                               std::vector<double>& diag,
                               std::vector<double>& sup) {
    const std::size_t n = g.n;
    double dmax = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
        dmax = std::max(dmax, std::abs((u[f + 1] - u[f]) / g.h));
    }
    const double delta = (p < 2.0) ? 1e-10 * dmax : 0.0;
    const double delta2 = delta * delta;
    std::vector<double> cond(n);
    for (std::size_t f = 0; f < n; ++f) {
        const double s = (u[f + 1] - u[f]) / g.h;
        double gp;
        if (p == 2.0) {
            gp = 1.0;
        } else if (p > 2.0) {
            gp = (p - 1.0) * std::pow(std::abs(s), p - 2.0);
        } else {
            gp = std::pow(s * s + delta2, 0.5 * p - 2.0) *
                 ((p - 1.0) * s * s + delta2);
        }
        cond[f] = g.fpow[f] * gp / g.h;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double invcv = g.omega / g.cw[j];
        if (j == 0) {
            sub[j] = 0.0;
            diag[j] = invcv * cond[0];
            sup[j] = -invcv * cond[0];
        } else {
            sub[j] = -invcv * cond[j - 1];
            diag[j] = invcv * (cond[j] + cond[j - 1]);
            sup[j] = (j + 1 < n) ? -invcv * cond[j] : 0.0;
        }
    }
}

// Mass-preserving dilation (u)_t represented exactly: node i of the grid
// scaled to R/t maps to node i of the original, so no interpolation occurs
// and only the amplitude changes.
inline std::pair<GridPtr, std::vector<double>> dilate_to_grid(
    const GridPtr& grid, const std::vector<double>& u, double t,
    const ProblemParams& pp) {
    GridPtr g2 = make_grid(grid->R / t, grid->n, pp.N);
    const double amp = std::pow(t, static_cast<double>(pp.N) / pp.p);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = amp * u[i];
    return {std::move(g2), std::move(v)};
}

// Radius enclosing all but `tail` of the constraint mass; measures the
// iterate's own support scale independently of the grid gauge.
inline double mass_radius(const RadialGrid& g, const std::vector<double>& u,
                          double p, double tail = 1e-9) {
    const double total = cell_mass(g, u, p);
    const double target = (1.0 - tail) * total;
    double acc = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        acc += g.cw[j] * std::pow(std::abs(u[j]), p);
        if (acc >= target) return g.r[j + 1];
    }
    return g.R;
}

// Resamples (monotone cubic, same node count) whenever the mass radius
// leaves the band [0.35, 0.85] of the domain, placing it back at 0.6.
// Keeps the number of nodes across the support roughly constant so that
// discrete functionals keep tracking their continuum values. The band
// follows the bulk of the mass (0.999 quantile): a descent iterate can
// leak a sliver of mass far outward, and chasing that sliver would coarsen
// the grid under the bulk until single-cell spikes turn artificially
// cheap. Returns true when the grid changed; the profile is renormalized
// onto the cell sphere.
inline bool band_resample(GridPtr& grid, std::vector<double>& u,
                          const ProblemParams& pp) {
    const double rm = mass_radius(*grid, u, pp.p, 1e-3);
    const double ratio = rm / grid->R;
    if (ratio >= 0.35 && ratio <= 0.85) return false;
    const std::size_t n = grid->n;
    GridPtr g3 = make_grid(std::max(rm, 1e-6 * grid->R) / 0.6, n, pp.N);
    MonotoneCubic interp(*grid, u);
    std::vector<double> w3(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w3[i] = (g3->r[i] >= grid->R) ? 0.0 : interp(g3->r[i]);
    }
    renorm_cell(*g3, w3, pp);
    grid = std::move(g3);
    u = std::move(w3);
    return true;
}

// Threshold value of u rescaled onto the trapezoid mass sphere, computed by
// scaling the moments in closed form instead of resampling.
inline double mu_on_sphere(const RadialFunction& f, const ProblemParams& pp) {
    FiberMoments m = moments(f, pp);
    if (m.mass <= 0.0) {
        throw DegenerateInputError("zero profile has no threshold value");
    }
    const double c = std::pow(std::pow(pp.a, pp.p) / m.mass, 1.0 / pp.p);
    m.A *= std::pow(c, pp.p);
    m.B1 *= std::pow(c, pp.q1);
    m.B2 *= std::pow(c, pp.q2);
    m.mass = std::pow(pp.a, pp.p);
    return mu_of_u(m, pp);
}

}  // namespace pohozaev::detail
