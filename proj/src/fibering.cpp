#include "pohozaev/fibering.hpp"

#include <algorithm>
#include <cmath>

namespace pohozaev {

namespace {

constexpr double kDegeneracyTolRel = 1e-8;

}  // namespace

FiberMoments moments(const RadialFunction& f, const ProblemParams& params) {
    const auto& w = f.grid->w;
    FiberMoments m;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        const double au = std::abs(f.u[i]);
        const double ad = std::abs(f.du[i]);
        m.A += w[i] * std::pow(ad, params.p);
        m.B1 += w[i] * std::pow(au, params.q1);
        m.B2 += w[i] * std::pow(au, params.q2);
        m.mass += w[i] * std::pow(au, params.p);
    }
    return m;
}

std::string to_string(FiberingCase c) {
    switch (c) {
        case FiberingCase::TwoRoots: return "TwoRoots";
        case FiberingCase::Degenerate: return "Degenerate";
        case FiberingCase::NoRoots: return "NoRoots";
    }
    return "NoRoots";
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::plus: return "plus";
        case Branch::minus: return "minus";
        case Branch::zero: return "zero";
    }
    return "plus";
}

RadialFunction mass_scale(const RadialFunction& f, double s,
                          const ProblemParams& params) {
    if (!(s > 0.0)) {
        throw InvalidArgumentError("mass_scale requires s > 0");
    }
    if (s == 1.0) return f;
    const RadialGrid& g = *f.grid;

    // Support of the result shrinks by 1/s; demand at least 4 cells.
    double supp = 0.0;
    double umax = 0.0;
    for (double v : f.u) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) {
        throw DegenerateInputError("mass_scale of the zero profile");
    }
    for (std::size_t i = g.n + 1; i-- > 0;) {
        if (std::abs(f.u[i]) > 1e-14 * umax) {
            supp = g.r[i];
            break;
        }
    }
    if (supp / s < 4.0 * g.h) {
        throw ResolutionLossError(
            "dilation collapses the profile below 4 grid cells");
    }

    MonotoneCubic interp(g, f.u);
    const double amp = std::pow(s, double(g.N) / params.p);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = amp * interp(s * g.r[i]);
    }
    return make_function(f.grid, std::move(out));
}

double energy(const FiberMoments& m, const ProblemParams& params) {
    return m.A / params.p - params.mu * m.B1 / params.q1 - m.B2 / params.q2;
}

double energy(const RadialFunction& u, const ProblemParams& params) {
    return energy(moments(u, params), params);
}

double fibering_value(const FiberMoments& m, double s,
                      const ProblemParams& params) {
    const double x = params.x_exp();
    const double y = params.y_exp();
    return std::pow(s, params.p) * m.A / params.p -
           params.mu * std::pow(s, x) * m.B1 / params.q1 -
           std::pow(s, y) * m.B2 / params.q2;
}

double fibering_deriv(const FiberMoments& m, double s,
                      const ProblemParams& params) {
    const double x = params.x_exp();
    const double y = params.y_exp();
    const double g1 = params.gamma(params.q1);
    const double g2 = params.gamma(params.q2);
    return std::pow(s, params.p - 1.0) * m.A -
           params.mu * g1 * std::pow(s, x - 1.0) * m.B1 -
           g2 * std::pow(s, y - 1.0) * m.B2;
}

double fibering_second(const FiberMoments& m, double s,
                       const ProblemParams& params) {
    const double x = params.x_exp();
    const double y = params.y_exp();
    const double g1 = params.gamma(params.q1);
    const double g2 = params.gamma(params.q2);
    return (params.p - 1.0) * std::pow(s, params.p - 2.0) * m.A -
           params.mu * g1 * (x - 1.0) * std::pow(s, x - 2.0) * m.B1 -
           g2 * (y - 1.0) * std::pow(s, y - 2.0) * m.B2;
}

double pohozaev(const FiberMoments& m, const ProblemParams& params) {
    return m.A - params.mu * params.gamma(params.q1) * m.B1 -
           params.gamma(params.q2) * m.B2;
}

double pohozaev(const RadialFunction& u, const ProblemParams& params) {
    return pohozaev(moments(u, params), params);
}

double second_fibering_form(const FiberMoments& m,
                            const ProblemParams& params) {
    const double g1 = params.gamma(params.q1);
    const double g2 = params.gamma(params.q2);
    return params.p * m.A - params.mu * params.q1 * g1 * g1 * m.B1 -
           params.q2 * g2 * g2 * m.B2;
}

double s_star(const FiberMoments& m, const ProblemParams& params) {
    const double x = params.x_exp();
    const double y = params.y_exp();
    const double g2 = params.gamma(params.q2);
    return std::pow((params.p - x) * m.A / (g2 * (y - x) * m.B2),
                    1.0 / (y - params.p));
}

double mu_of_u(const FiberMoments& m, const ProblemParams& params) {
    if (!(m.A > 0.0) || !(m.B1 > 0.0) || !(m.B2 > 0.0)) {
        throw DegenerateInputError(
            "threshold coupling undefined: a required norm vanishes");
    }
    const double p = params.p;
    const double x = params.x_exp();
    const double y = params.y_exp();
    const double g1 = params.gamma(params.q1);
    const double g2 = params.gamma(params.q2);
    const double theta = (p - x) / (y - p);  // exponent pairing A with B2
    const double pref = (y - p) * std::pow(p - x, theta) /
                        (g1 * std::pow(g2, theta) *
                         std::pow(y - x, theta + 1.0));
    return pref * std::pow(m.A, theta + 1.0) / (m.B1 * std::pow(m.B2, theta));
}

double mu_of_u(const RadialFunction& u, const ProblemParams& params) {
    return mu_of_u(moments(u, params), params);
}

namespace {

// Reduced root function g(t) = t^{1-x} Phi'(t): strictly negative at 0+ and
// +infinity, single interior maximum at s_star. Its roots are the dilation
// critical points.
struct ReducedRoot {
    double A, B1, B2;
    double p, x, y, g1, g2, mu;

    double operator()(double t) const {
        return A * std::pow(t, p - x) - g2 * B2 * std::pow(t, y - x) -
               mu * g1 * B1;
    }
    double deriv(double t) const {
        return (p - x) * A * std::pow(t, p - x - 1.0) -
               (y - x) * g2 * B2 * std::pow(t, y - x - 1.0);
    }
};

// Bisection bracket [lo, hi] with f(lo), f(hi) of opposite sign, then Newton
// polish. Assumes monotonicity of f on the bracket.
double refine_root(const ReducedRoot& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if ((hi - lo) < 1e-9 * hi) break;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double ft = f(t);
        const double dft = f.deriv(t);
        if (dft == 0.0) break;
        const double step = ft / dft;
        double tn = t - step;
        if (tn <= lo || tn >= hi) tn = 0.5 * (lo + hi);  // keep the bracket
        if ((f(tn) < 0.0) == (flo < 0.0)) {
            lo = tn;
        } else {
            hi = tn;
        }
        if (std::abs(tn - t) <= 1e-15 * t) {
            t = tn;
            break;
        }
        t = tn;
    }
    return t;
}

}  // namespace

FiberingReport classify_fibering(const FiberMoments& m,
                                 const ProblemParams& params) {
    FiberingReport rep;
    rep.mu_threshold = mu_of_u(m, params);
    rep.s_star = s_star(m, params);

    const double gap = params.mu - rep.mu_threshold;
    if (std::abs(gap) <= kDegeneracyTolRel * rep.mu_threshold) {
        rep.kase = FiberingCase::Degenerate;
        rep.t_zero = rep.s_star;
        return rep;
    }
    if (gap > 0.0) {
        rep.kase = FiberingCase::NoRoots;
        return rep;
    }

    rep.kase = FiberingCase::TwoRoots;
    ReducedRoot f{m.A,
                  m.B1,
                  m.B2,
                  params.p,
                  params.x_exp(),
                  params.y_exp(),
                  params.gamma(params.q1),
                  params.gamma(params.q2),
                  params.mu};

    // Left root: g < 0 near 0, g(s_star) > 0.
    double lo = rep.s_star;
    do {
        lo *= 0.5;
    } while (f(lo) > 0.0 && lo > 1e-300);
    const double t_plus = refine_root(f, lo, rep.s_star);

    // Right root: g(s_star) > 0, g -> -inf.
    double hi = 2.0 * rep.s_star;
    while (f(hi) > 0.0 && hi < 1e300) hi *= 2.0;
    const double t_minus = refine_root(f, rep.s_star, hi);

    rep.t_plus = t_plus;
    rep.t_minus = t_minus;
    rep.phi_plus = fibering_value(m, t_plus, params);
    rep.phi_minus = fibering_value(m, t_minus, params);
    return rep;
}

FiberingReport classify_fibering(const RadialFunction& u,
                                 const ProblemParams& params) {
    return classify_fibering(moments(u, params), params);
}

RadialFunction project_to_manifold(const RadialFunction& u, Branch branch,
                                   const ProblemParams& params) {
    if (branch == Branch::zero) {
        throw ProjectionUnavailableError(
            "dilation projection targets the plus/minus branches only");
    }
    const FiberingReport rep = classify_fibering(u, params);
    if (rep.kase != FiberingCase::TwoRoots) {
        throw ProjectionUnavailableError(
            "no dilation critical points at this coupling (case " +
            to_string(rep.kase) + ")");
    }
    const double t = (branch == Branch::plus) ? *rep.t_plus : *rep.t_minus;
    return mass_scale(u, t, params);
}

}  // namespace pohozaev
