#include "pohozaev/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pohozaev {

double unit_sphere_area(int N) {
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

GridPtr make_grid(double R, std::size_t n, int N) {
    if (!(R > 0.0)) {
        throw InvalidArgumentError("grid radius R must be positive");
    }
    if (n < 64) {
        std::ostringstream msg;
        msg << "grid resolution n=" << n << " is below the minimum of 64";
        throw InvalidArgumentError(msg.str());
    }
    if (N < 2) {
        throw InvalidArgumentError("dimension N must be at least 2");
    }
    auto g = std::make_shared<RadialGrid>();
    g->N = N;
    g->R = R;
    g->n = n;
    g->h = R / static_cast<double>(n);
    g->omega = unit_sphere_area(N);

    const double h = g->h;
    g->r.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        g->r[i] = (i == n) ? R : h * static_cast<double>(i);
    }

    // Trapezoid weights for int_0^R f(r) omega r^{N-1} dr.
    g->w.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double factor = (i == 0 || i == n) ? 0.5 : 1.0;
        g->w[i] = g->omega * std::pow(g->r[i], N - 1) * h * factor;
    }

    // Face radii and powers for the finite-volume operator.
    g->rface.resize(n);
    g->fpow.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g->rface[i] = h * (static_cast<double>(i) + 0.5);
        g->fpow[i] = std::pow(g->rface[i], N - 1);
    }

    // Exact cell volumes: cell_i = [max(r_i - h/2, 0), min(r_i + h/2, R)].
    g->cw.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double lo = std::max(g->r[i] - 0.5 * h, 0.0);
        const double hi = std::min(g->r[i] + 0.5 * h, R);
        g->cw[i] = g->omega * (std::pow(hi, N) - std::pow(lo, N)) / N;
    }
    return g;
}

std::vector<double> centered_derivative(const RadialGrid& g,
                                        const std::vector<double>& u) {
    const std::size_t n = g.n;
    std::vector<double> du(n + 1);
    du[0] = 0.0;  // radial symmetry
    const double inv2h = 0.5 / g.h;
    for (std::size_t i = 1; i < n; ++i) du[i] = (u[i + 1] - u[i - 1]) * inv2h;
    // Second-order one-sided at r = R.
    du[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) * inv2h;
    return du;
}

RadialFunction make_function(GridPtr grid, std::vector<double> samples) {
    if (samples.size() != grid->size()) {
        throw InvalidArgumentError("sample count does not match grid size");
    }
    RadialFunction f;
    f.du = centered_derivative(*grid, samples);
    f.grid = std::move(grid);
    f.u = std::move(samples);
    return f;
}

RadialFunction make_function_with_derivative(GridPtr grid,
                                             std::vector<double> samples,
                                             std::vector<double> derivative) {
    if (samples.size() != grid->size() || derivative.size() != grid->size()) {
        throw InvalidArgumentError("sample count does not match grid size");
    }
    RadialFunction f;
    f.grid = std::move(grid);
    f.u = std::move(samples);
    f.du = std::move(derivative);
    return f;
}

double lq_norm(const RadialFunction& f, double q) {
    if (!(q > 0.0)) {
        throw InvalidArgumentError("lq_norm requires q > 0");
    }
    const auto& w = f.grid->w;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        acc += w[i] * std::pow(std::abs(f.u[i]), q);
    }
    return std::pow(acc, 1.0 / q);
}

double grad_lp_norm(const RadialFunction& f, double p) {
    if (!(p > 1.0)) {
        throw InvalidArgumentError("grad_lp_norm requires p > 1");
    }
    const auto& w = f.grid->w;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.du.size(); ++i) {
        acc += w[i] * std::pow(std::abs(f.du[i]), p);
    }
    return std::pow(acc, 1.0 / p);
}

double integrate(const RadialFunction& f) {
    const auto& w = f.grid->w;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) acc += w[i] * f.u[i];
    return acc;
}

namespace {

// |s|^{p-2} s with the p < 2 regularization (delta frozen by the caller).
inline double flux_phi(double s, double p, double delta2) {
    if (p == 2.0) return s;
    if (p > 2.0) return std::pow(std::abs(s), p - 2.0) * s;
    return s * std::pow(s * s + delta2, 0.5 * (p - 2.0));
}

}  // namespace

void p_laplacian_apply_raw(const RadialGrid& g, const std::vector<double>& u,
                           double p, std::vector<double>& out) {
    if (!(p > 1.0)) {
        throw InvalidArgumentError("p_laplacian_apply requires p > 1");
    }
    const std::size_t n = g.n;
    const double h = g.h;
    out.assign(n + 1, 0.0);

    std::vector<double> dface(n);
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dface[i] = (u[i + 1] - u[i]) / h;
        dmax = std::max(dmax, std::abs(dface[i]));
    }
    const double delta = (p < 2.0) ? 1e-10 * dmax : 0.0;
    const double delta2 = delta * delta;

    // Face fluxes r^{N-1} phi_p(u') on interior faces.
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        flux[i] = g.fpow[i] * flux_phi(dface[i], p, delta2);
    }

    // Node 0: half cell [0, h/2], no flux through r = 0.
    out[0] = -flux[0] / (g.cw[0] / g.omega);
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = -(flux[i] - flux[i - 1]) / (g.cw[i] / g.omega);
    }
    // Node n: half cell [R - h/2, R] with a one-sided boundary flux.
    const double duR =
        (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) * (0.5 / h);
    const double fluxR = std::pow(g.R, g.N - 1) * flux_phi(duR, p, delta2);
    out[n] = -(fluxR - flux[n - 1]) / (g.cw[n] / g.omega);
}

RadialFunction p_laplacian_apply(const RadialFunction& f, double p) {
    std::vector<double> out;
    p_laplacian_apply_raw(*f.grid, f.u, p, out);
    return make_function(f.grid, std::move(out));
}

double p_dirichlet_cell_energy(const RadialFunction& f, double p) {
    const RadialGrid& g = *f.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double s = (f.u[i + 1] - f.u[i]) / g.h;
        acc += g.fpow[i] * std::pow(std::abs(s), p);
    }
    return g.omega * g.h * acc;
}

MonotoneCubic::MonotoneCubic(const RadialGrid& g, const std::vector<double>& y)
    : h_(g.h), R_(g.R), y_(y) {
    // Fritsch-Carlson slope limiting on the uniform grid.
    const std::size_t n = g.n;
    std::vector<double> d(n);  // secant slopes
    for (std::size_t i = 0; i < n; ++i) d[i] = (y_[i + 1] - y_[i]) / h_;
    m_.assign(n + 1, 0.0);
    m_[0] = d[0];
    m_[n] = d[n - 1];
    for (std::size_t i = 1; i < n; ++i) m_[i] = 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] == 0.0) {
            m_[i] = 0.0;
            m_[i + 1] = 0.0;
            continue;
        }
        const double alpha = m_[i] / d[i];
        const double beta = m_[i + 1] / d[i];
        if (alpha < 0.0) m_[i] = 0.0;
        if (beta < 0.0) m_[i + 1] = 0.0;
        const double s = alpha * alpha + beta * beta;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m_[i] = tau * alpha * d[i];
            m_[i + 1] = tau * beta * d[i];
        }
    }
}

double MonotoneCubic::operator()(double x) const {
    if (x <= 0.0) return y_.front();
    if (x >= R_) return 0.0;  // profiles are truncated to 0 beyond the grid
    const std::size_t n = y_.size() - 1;
    std::size_t i = static_cast<std::size_t>(x / h_);
    if (i >= n) i = n - 1;
    const double t = (x - h_ * static_cast<double>(i)) / h_;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h_ * m_[i] + h01 * y_[i + 1] +
           h11 * h_ * m_[i + 1];
}

}  // namespace pohozaev
