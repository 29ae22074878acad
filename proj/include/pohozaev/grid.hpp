#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pohozaev/errors.hpp"

namespace pohozaev {

// Uniform radial grid on [0, R] carrying the measure omega_{N-1} r^{N-1} dr.
//
// Nodes r_i = i*h, i = 0..n (so n is the interval count and there are n+1
// nodes, with r_n = R exactly). Two weight families are stored:
//   w  : trapezoid weights (halved at the ends; w_0 = 0 for N >= 2), used for
//        every reported norm and functional;
//   cw : cell volumes |{r : |r - r_i| < h/2}| under the same measure, strictly
//        positive at every node including r = 0, used by solvers that need a
//        positive-definite discrete L^2 metric.
struct RadialGrid {
    int N = 3;
    double R = 20.0;
    std::size_t n = 4000;  // interval count; nodes are 0..n
    double h = 0.0;
    double omega = 0.0;  // surface measure of the unit sphere S^{N-1}

    std::vector<double> r;      // size n+1
    std::vector<double> w;      // trapezoid weights, size n+1
    std::vector<double> cw;     // cell-volume weights, size n+1
    std::vector<double> rface;  // face radii r_{i+1/2}, size n
    std::vector<double> fpow;   // rface^{N-1}, size n

    std::size_t size() const { return n + 1; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Surface measure of S^{N-1}: 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int N);

// Build a uniform grid; throws InvalidArgumentError for R <= 0 or n < 64.
GridPtr make_grid(double R, std::size_t n, int N);

// Radial profile sampled on a grid, with cached centered-difference derivative
// (du_0 = 0 by radial symmetry, second-order one-sided at r = R).
struct RadialFunction {
    GridPtr grid;
    std::vector<double> u;
    std::vector<double> du;

    std::size_t size() const { return u.size(); }
};

// Wrap samples (recomputes the derivative cache).
RadialFunction make_function(GridPtr grid, std::vector<double> samples);

// Wrap samples together with externally supplied derivative samples.
RadialFunction make_function_with_derivative(GridPtr grid,
                                             std::vector<double> samples,
                                             std::vector<double> derivative);

// Sample a callable f(r) on the grid.
template <typename F>
RadialFunction sample(GridPtr grid, F&& f) {
    std::vector<double> vals(grid->size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(grid->r[i]);
    return make_function(std::move(grid), std::move(vals));
}

// Centered-difference derivative of raw samples.
std::vector<double> centered_derivative(const RadialGrid& g,
                                        const std::vector<double>& u);

// (sum_i w_i |u_i|^q)^{1/q}; q <= 0 -> InvalidArgumentError.
double lq_norm(const RadialFunction& u, double q);

// (sum_i w_i |u'_i|^p)^{1/p}; p <= 1 -> InvalidArgumentError.
double grad_lp_norm(const RadialFunction& u, double p);

// Integral of f against the grid measure (trapezoid weights).
double integrate(const RadialFunction& u);

// Conservative finite-volume application of -Delta_p (returned WITH the minus
// sign): -r^{1-N} (r^{N-1} |u'|^{p-2} u')'. Face gradients (u_{i+1}-u_i)/h,
// symmetric stencil at r = 0, half cell at r = R with a one-sided boundary
// flux. For p < 2 the diffusivity is regularized as (s^2 + delta^2)^{(p-2)/2}
// with delta = 1e-10 * max|face gradient|.
RadialFunction p_laplacian_apply(const RadialFunction& u, double p);

// Same operator on raw samples; writes into `out` (size n+1).
void p_laplacian_apply_raw(const RadialGrid& g, const std::vector<double>& u,
                           double p, std::vector<double>& out);

// <-Delta_p u, u> under cell weights; equals the face-based gradient energy
// sum_faces omega h rface^{N-1} |du_face|^p exactly (discrete parts
// integration), hence is nonnegative.
double p_dirichlet_cell_energy(const RadialFunction& u, double p);

// Monotone cubic (Fritsch-Carlson) interpolant evaluation: samples y on the
// uniform grid of g, queried at x (clamped to 0 beyond R).
class MonotoneCubic {
public:
    MonotoneCubic(const RadialGrid& g, const std::vector<double>& y);
    double operator()(double x) const;

private:
    double h_;
    double R_;
    std::vector<double> y_;
    std::vector<double> m_;  // node slopes
};

}  // namespace pohozaev
