#include "pohozaev/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "cellops.hpp"
#include "trilu.hpp"
#include "pohozaev/extremal.hpp"

namespace pohozaev {

namespace {

using detail::cell_moments_raw;
using detail::dot_cw;
using detail::dphi_pow;
using detail::gaussian_seed;
using detail::phi_pow;
using detail::renorm_cell;
using detail::renorm_trap;

// ---------------------------------------------------------------------------
// Projected descent of the reduced branch energy over the mass sphere.
// ---------------------------------------------------------------------------

enum class DescentStatus { ok, no_roots, stalled };

struct DescentOut {
    GridPtr grid;  // may differ from the seed grid (adaptive dilation)
    std::vector<double> u;
    DescentStatus status = DescentStatus::stalled;
    bool converged = false;
    double g = 0.0;
    double amp_growth = 1.0;  // manifold amplitude relative to the seed
};

double branch_root(const FiberingReport& rep, Branch br) {
    return (br == Branch::plus) ? *rep.t_plus : *rep.t_minus;
}

// Amplitude of the manifold representative (u)_t = t^{N/p} u(t r).
double manifold_amp(const std::vector<double>& u, double t,
                    const ProblemParams& pp) {
    double amp = 0.0;
    for (double v : u) amp = std::max(amp, std::abs(v));
    return std::pow(t, double(pp.N) / pp.p) * amp;
}

// Descends the fibered envelope u -> Phi_u(t_branch(u)) over the mass sphere
// and returns the final iterate dilated onto the manifold (t = 1 up to
// classification round-off). The envelope value is dilation-invariant, so
// iterates are re-dilated exactly onto a rescaled grid whenever the branch
// root drifts from 1, and the grid is resampled whenever the mass radius
// leaves a fixed band: dilation alone preserves nodes-per-width, so a shape
// that narrows intrinsically would otherwise fall below the resolution at
// which the discrete Gagliardo-Nirenberg quotient tracks the continuum one
// (under-resolved spikes open a spurious descent channel).
DescentOut descend_branch(GridPtr grid, std::vector<double> u,
                          const ProblemParams& pp, Branch br, int max_iter,
                          double grad_tol, std::vector<double>* trace,
                          bool rescale = true) {
    DescentOut out;
    if (trace) trace->clear();
    const std::size_t n = grid->n;
    const double x = pp.x_exp();
    const double y = pp.y_exp();
    const bool cap_growth = pp.critical() && br == Branch::minus;

    renorm_cell(*grid, u, pp);

    std::vector<double> lap(n + 1), dir(n + 1, 0.0), nrm(n + 1), trial(n + 1);
    double step = 1.0;

    FiberMoments m = cell_moments_raw(*grid, u, pp);
    FiberingReport rep = classify_fibering(m, pp);
    if (rep.kase != FiberingCase::TwoRoots) {
        out.grid = std::move(grid);
        out.u = std::move(u);
        out.status = DescentStatus::no_roots;
        return out;
    }
    double t = branch_root(rep, br);
    double gcur = fibering_value(m, t, pp);
    const double amp0 = manifold_amp(u, t, pp);
    double amp_max = amp0;
    if (trace) trace->push_back(gcur);

    auto regauge = [&](double dilate_band) {
        if (!rescale) return;
        GridPtr g2 = grid;
        std::vector<double> w = u;
        bool dilated = false;
        if (std::abs(t - 1.0) > dilate_band) {
            auto [gd, wd] = detail::dilate_to_grid(grid, u, t, pp);
            g2 = std::move(gd);
            w = std::move(wd);
            renorm_cell(*g2, w, pp);
            dilated = true;
        }
        const bool resampled = detail::band_resample(g2, w, pp);
        if (!dilated && !resampled) return;
        const FiberMoments mw = cell_moments_raw(*g2, w, pp);
        const FiberingReport rw = classify_fibering(mw, pp);
        if (rw.kase != FiberingCase::TwoRoots) return;  // keep current
        const bool reset = resampled || std::abs(t - 1.0) > 0.3;
        grid = std::move(g2);
        u = std::move(w);
        m = mw;
        rep = rw;
        t = branch_root(rep, br);
        gcur = fibering_value(m, t, pp);
        if (reset) step = 1.0;
    };
    regauge(1e-12);

    for (int iter = 0; iter < max_iter; ++iter) {
        if (t < 0.7 || t > 1.5 || iter % 10 == 9) regauge(0.05);
        const RadialGrid& g = *grid;
        p_laplacian_apply_raw(g, u, pp.p, lap);
        const double tp = std::pow(t, pp.p);
        const double tx = std::pow(t, x);
        const double ty = std::pow(t, y);
        for (std::size_t j = 0; j < n; ++j) {
            dir[j] = tp * lap[j] - pp.mu * tx * phi_pow(u[j], pp.q1) -
                     ty * phi_pow(u[j], pp.q2);
            nrm[j] = phi_pow(u[j], pp.p);
        }
        dir[n] = 0.0;
        nrm[n] = 0.0;
        const double nn = dot_cw(g, nrm, nrm);
        if (nn > 0.0) {
            const double alpha = dot_cw(g, dir, nrm) / nn;
            for (std::size_t j = 0; j < n; ++j) dir[j] -= alpha * nrm[j];
        }
        for (std::size_t j = 0; j < n; ++j) dir[j] = -dir[j];
        const double gnorm = std::sqrt(dot_cw(g, dir, dir));
        if (gnorm < grad_tol * (1.0 + std::abs(gcur))) {
            out.converged = true;
            break;
        }

        const double slope = -gnorm * gnorm;
        double s = step;
        bool accepted = false;
        const double amp_cur = manifold_amp(u, t, pp);
        for (int k = 0; k < 50; ++k) {
            for (std::size_t j = 0; j <= n; ++j) trial[j] = u[j] + s * dir[j];
            trial[n] = 0.0;
            renorm_cell(g, trial, pp);
            FiberMoments mt = cell_moments_raw(g, trial, pp);
            FiberingReport rt = classify_fibering(mt, pp);
            if (rt.kase != FiberingCase::TwoRoots) {
                s *= 0.5;
                continue;
            }
            const double tt = branch_root(rt, br);
            if (cap_growth && manifold_amp(trial, tt, pp) > 1.05 * amp_cur) {
                s *= 0.5;
                continue;
            }
            const double gt = fibering_value(mt, tt, pp);
            if (gt <= gcur + 1e-4 * s * slope) {
                u.swap(trial);
                m = mt;
                rep = rt;
                t = tt;
                gcur = gt;
                if (trace) trace->push_back(gcur);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;  // step collapse: stalled (Newton takes over)
        amp_max = std::max(amp_max, manifold_amp(u, t, pp));
        step = std::min(s * 2.0, 1e4);
    }

    regauge(1e-12);
    amp_max = std::max(amp_max, manifold_amp(u, t, pp));
    out.amp_growth = (amp0 > 0.0) ? amp_max / amp0 : 1.0;
    out.grid = std::move(grid);
    out.u = std::move(u);
    out.status = DescentStatus::ok;
    out.g = gcur;
    return out;
}

DescentOut descend_with_restarts(GridPtr grid, const ProblemParams& pp,
                                 Branch br, double sigma, int max_iter,
                                 double grad_tol, std::vector<double>* trace) {
    double sig = sigma;
    DescentOut out;
    for (int attempt = 0; attempt < 4; ++attempt) {
        out = descend_branch(grid, gaussian_seed(*grid, sig, pp), pp, br,
                             max_iter, grad_tol, trace);
        if (out.status != DescentStatus::no_roots) return out;
        sig *= 0.5;  // tighter seed raises the threshold mu(u)
    }
    return out;
}


// ---------------------------------------------------------------------------
// Damped Newton on the equation + mass system.
// ---------------------------------------------------------------------------

// Residual rows F_j, j = 0..n-1 (node n is the Dirichlet value 0).
void equation_rows(const RadialGrid& g, const std::vector<double>& u,
                   double lambda, const ProblemParams& pp,
                   std::vector<double>& lap, std::vector<double>& F) {
    p_laplacian_apply_raw(g, u, pp.p, lap);
    F.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        F[j] = lap[j] - lambda * phi_pow(u[j], pp.p) -
               pp.mu * phi_pow(u[j], pp.q1) - phi_pow(u[j], pp.q2);
    }
}

double trap_mass_defect(const RadialGrid& g, const std::vector<double>& u,
                        const ProblemParams& pp) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= g.n; ++i) {
        acc += g.w[i] * std::pow(std::abs(u[i]), pp.p);
    }
    return acc - std::pow(pp.a, pp.p);
}

// Forcing norm used to fix the Newton merit scale once per solve; a scale
// that tracked the current lambda would let the merit shrink while the
// absolute residual diverges.
double forcing_scale(const RadialGrid& g, const std::vector<double>& u,
                     double lambda, const ProblemParams& pp) {
    double den = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double au = std::abs(u[j]);
        const double forcing = std::abs(lambda) * std::pow(au, pp.p - 1.0) +
                               pp.mu * std::pow(au, pp.q1 - 1.0) +
                               std::pow(au, pp.q2 - 1.0);
        den += g.cw[j] * forcing * forcing;
    }
    return std::sqrt(den) + 1e-300;
}

// Merit relative to a frozen forcing scale, plus the mass defect.
double newton_merit(const RadialGrid& g, const std::vector<double>& u,
                    double lambda, const ProblemParams& pp, double scale0,
                    std::vector<double>& lap, std::vector<double>& F) {
    equation_rows(g, u, lambda, pp, lap, F);
    double num = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        num += g.cw[j] * F[j] * F[j];
    }
    return std::sqrt(num) / scale0 +
           std::abs(trap_mass_defect(g, u, pp)) / std::pow(pp.a, pp.p);
}

struct NewtonOut {
    std::vector<double> u;
    double lambda = 0.0;
    double merit = 0.0;
    int steps = 0;
    bool converged = false;
};

NewtonOut newton_refine(const RadialGrid& g, std::vector<double> u,
                        double lambda, const ProblemParams& pp,
                        const SolverOptions& opts) {
    NewtonOut out;
    const std::size_t n = g.n;
    const double p = pp.p;

    std::vector<double> lap, F;
    std::vector<double> sub(n), diag(n), sup(n);
    std::vector<double> bcol(n), crow(n), z1(n), z2(n);
    std::vector<double> trial(n + 1), lap_t, F_t;

    u[n] = 0.0;
    const double scale0 = forcing_scale(g, u, lambda, pp);
    double merit = newton_merit(g, u, lambda, pp, scale0, lap, F);

    for (int it = 0; it < opts.newton_max; ++it) {
        if (merit < opts.el_tol) break;

        detail::plap_jacobian_rows(g, u, p, sub, diag, sup);
        for (std::size_t j = 0; j < n; ++j) {
            diag[j] += -lambda * dphi_pow(u[j], p) -
                       pp.mu * dphi_pow(u[j], pp.q1) -
                       dphi_pow(u[j], pp.q2);
            bcol[j] = -phi_pow(u[j], p);
            crow[j] = p * g.w[j] * phi_pow(u[j], p);
        }
        // Pin rows that are identically zero (dead tail for p > 2): the zero
        // profile solves the equation there, so hold those nodes at 0.
        for (std::size_t j = 0; j < n; ++j) {
            if (diag[j] == 0.0 && sub[j] == 0.0 && sup[j] == 0.0 &&
                bcol[j] == 0.0) {
                diag[j] = 1.0;
                F[j] = 0.0;
            }
        }

        detail::TriLU lu;
        if (!lu.factor(sub, diag, sup)) break;  // singular Jacobian
        for (std::size_t j = 0; j < n; ++j) z1[j] = -F[j];
        z2 = bcol;
        lu.solve(z1);
        lu.solve(z2);

        double cz1 = 0.0, cz2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cz1 += crow[j] * z1[j];
            cz2 += crow[j] * z2[j];
        }
        if (std::abs(cz2) < 1e-300) break;
        const double massg = trap_mass_defect(g, u, pp);
        const double dlambda = (cz1 + massg) / cz2;

        double s = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                trial[j] = u[j] + s * (z1[j] - dlambda * z2[j]);
            }
            trial[n] = 0.0;
            const double lt = lambda + s * dlambda;
            const double mt =
                newton_merit(g, trial, lt, pp, scale0, lap_t, F_t);
            if (mt < merit * (1.0 - 1e-4 * s)) {
                u.swap(trial);
                lambda = lt;
                merit = mt;
                lap.swap(lap_t);
                F.swap(F_t);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;
        ++out.steps;
    }

    out.u = std::move(u);
    out.lambda = lambda;
    out.merit = merit;
    out.converged = merit < std::max(opts.el_tol, 1e-8);
    return out;
}

double cell_testing_multiplier(const RadialGrid& g,
                               const std::vector<double>& u,
                               const ProblemParams& pp) {
    const FiberMoments m = cell_moments_raw(g, u, pp);
    return (m.A - pp.mu * m.B1 - m.B2) / m.mass;
}

// Relative L2(trapezoid) residual of the equation with the given multiplier.
double trap_el_residual(const RadialGrid& g, const std::vector<double>& u,
                        double lambda, const ProblemParams& pp) {
    std::vector<double> lap, F;
    equation_rows(g, u, lambda, pp, lap, F);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        num += g.w[j] * F[j] * F[j];
        const double au = std::abs(u[j]);
        const double forcing = std::abs(lambda) * std::pow(au, pp.p - 1.0) +
                               pp.mu * std::pow(au, pp.q1 - 1.0) +
                               std::pow(au, pp.q2 - 1.0);
        den += g.w[j] * forcing * forcing;
    }
    return std::sqrt(num) / (std::sqrt(den) + 1e-300);
}

// Relative defect of the four-term dilation identity tying the multiplier
// to the trapezoid moments; near round-off only for genuine solutions.
double identity_defect(const FiberMoments& m, double lambda,
                       const ProblemParams& pp) {
    const double N = pp.N;
    const double T1 = (N - pp.p) * m.A;
    const double T2 = lambda * N * std::pow(pp.a, pp.p);
    const double T3 = pp.mu * N * pp.p / pp.q1 * m.B1;
    const double T4 = N * pp.p / pp.q2 * m.B2;
    const double scale = std::max(
        {std::abs(T1), std::abs(T2), std::abs(T3), std::abs(T4), 1e-300});
    return std::abs(T1 - T2 - T3 - T4) / scale;
}

SolutionRecord build_record(GridPtr grid, std::vector<double> u, double lambda,
                            const ProblemParams& pp, Branch br,
                            bool converged) {
    SolutionRecord rec;
    rec.residuals.euler_lagrange = trap_el_residual(*grid, u, lambda, pp);
    double umin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid->n; ++j) umin = std::min(umin, u[j]);
    RadialFunction f = make_function(std::move(grid), std::move(u));
    const FiberMoments mt = moments(f, pp);
    rec.params = pp;
    rec.branch = br;
    rec.lambda = lambda;
    rec.energy = energy(mt, pp);
    rec.residuals.pohozaev = identity_defect(mt, lambda, pp);
    rec.residuals.mass =
        std::abs(std::pow(mt.mass, 1.0 / pp.p) - pp.a) / pp.a;
    rec.positivity_min = umin;
    rec.converged = converged;
    rec.profile = std::move(f);
    return rec;
}

SolutionRecord solve_pm(const ProblemParams& pp, Branch br,
                        const SolverOptions& opts) {
    pp.validate();
    const double sigma =
        opts.sigma > 0.0 ? opts.sigma : (br == Branch::plus ? 1.0 : 0.2);

    const double R1 = opts.R > 0.0 ? opts.R : 20.0;
    const std::size_t n1 = std::min<std::size_t>(opts.n, 1000);
    GridPtr g1 = make_grid(R1, n1, pp.N);

    // Stage 1: coarse descent with self-scaling grid, then a first Newton
    // refinement to estimate the multiplier (hence the decay rate).
    DescentOut d1 = descend_with_restarts(g1, pp, br, sigma, opts.max_iter,
                                          opts.grad_tol, opts.energy_trace);
    if (d1.status == DescentStatus::no_roots) {
        throw ProjectionUnavailableError(
            "no seed admits the requested branch at this coupling");
    }
    if (std::getenv("POHO_DEBUG")) {
        std::fprintf(stderr,
                     "[stage1] R=%.4g desc conv=%d g=%.8g amp=%.3g "
                     "lam_est=%.8g\n",
                     d1.grid->R, d1.converged ? 1 : 0, d1.g, d1.amp_growth,
                     cell_testing_multiplier(*d1.grid, d1.u, pp));
    }
    NewtonOut nw1 = newton_refine(
        *d1.grid, d1.u, cell_testing_multiplier(*d1.grid, d1.u, pp), pp,
        opts);
    if (std::getenv("POHO_DEBUG")) {
        std::fprintf(stderr,
                     "[stage1] newton conv=%d lam=%.8g merit=%.3e steps=%d\n",
                     nw1.converged ? 1 : 0, nw1.lambda, nw1.merit, nw1.steps);
    }

    // Stage 2: final grid sized from the decay rate (or pinned by the
    // caller), full resolution.
    double R2 = d1.grid->R;
    if (opts.R > 0.0) {
        R2 = opts.R;
    } else if (nw1.lambda < 0.0) {
        const double rate = std::pow(-nw1.lambda / (pp.p - 1.0), 1.0 / pp.p);
        R2 = std::clamp(14.0 / rate, 0.1, 1000.0);
    }
    GridPtr g2 = d1.grid;
    NewtonOut nw2 = nw1;
    bool descent_ok = d1.status == DescentStatus::ok;
    double amp_growth = d1.amp_growth;
    if (std::abs(R2 - d1.grid->R) > 1e-12 * R2 || opts.n != d1.grid->n) {
        GridPtr gt = make_grid(R2, opts.n, pp.N);
        MonotoneCubic interp(*d1.grid, nw1.u);
        std::vector<double> u2(opts.n + 1);
        for (std::size_t i = 0; i <= opts.n; ++i) {
            const double r = gt->r[i];
            u2[i] = (r >= d1.grid->R) ? 0.0 : interp(r);
        }
        u2[opts.n] = 0.0;
        renorm_cell(*gt, u2, pp);
        // When the stage-1 multiplier is trusted the decay-rate rule above
        // already sizes the grid; keep it fixed so the reported record sits
        // on a deterministic, self-similar mesh (R * rate invariant).
        DescentOut d2 = descend_branch(gt, std::move(u2), pp, br,
                                       std::min(opts.max_iter, 400),
                                       opts.grad_tol, opts.energy_trace,
                                       /*rescale=*/opts.R <= 0.0 &&
                                           !nw1.converged);
        if (d2.status == DescentStatus::no_roots) {
            descent_ok = false;  // keep the stage-1 result
        } else {
            if (std::getenv("POHO_DEBUG")) {
                std::fprintf(stderr,
                             "[stage2] R2=%.4g desc conv=%d g=%.8g "
                             "lam_est=%.8g\n",
                             d2.grid->R, d2.converged ? 1 : 0, d2.g,
                             cell_testing_multiplier(*d2.grid, d2.u, pp));
            }
            g2 = d2.grid;
            nw2 = newton_refine(*g2, d2.u, nw1.lambda, pp, opts);
            if (std::getenv("POHO_DEBUG")) {
                std::fprintf(stderr,
                             "[stage2] newton conv=%d lam=%.8g merit=%.3e "
                             "steps=%d\n",
                             nw2.converged ? 1 : 0, nw2.lambda, nw2.merit,
                             nw2.steps);
            }
            amp_growth = std::max(amp_growth, d2.amp_growth);
        }
    }

    // Bubbling diagnosis in the Sobolev-critical regime: a strongly
    // concentrating non-convergent minus iterate signals escaping mass.
    if (pp.critical() && br == Branch::minus && !nw2.converged &&
        amp_growth > 1e4) {
        throw ConcentrationDiagnosedError(
            "minus-branch iterates concentrate without converging; energy "
            "is escaping toward the bubble threshold");
    }

    // A-posteriori branch certificate: the second dilation form at the
    // solution must carry the branch sign.
    RadialFunction f_chk = make_function(g2, nw2.u);
    const double D = second_fibering_form(moments(f_chk, pp), pp);
    const bool branch_ok = (br == Branch::plus) ? (D > 0.0) : (D < 0.0);
    const bool conv =
        nw2.converged && branch_ok && nw2.lambda < 0.0 && descent_ok;
    return build_record(g2, std::move(f_chk.u), nw2.lambda, pp, br, conv);
}

// ---------------------------------------------------------------------------
// Degenerate branch.
// ---------------------------------------------------------------------------

RadialFunction blend_profiles(const RadialFunction& u0,
                              const RadialFunction& u1, double tau,
                              const ProblemParams& pp) {
    std::vector<double> v(u0.u.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = (1.0 - tau) * u0.u[i] + tau * u1.u[i];
    }
    RadialFunction f = make_function(u0.grid, std::move(v));
    renorm_trap(f, pp);
    return f;
}

// Bisect the blend between profiles with mu(.) above and at-or-below the
// target until the reported threshold matches mu to near round-off.
RadialFunction level_bisect(const RadialFunction& above,
                            const RadialFunction& below, double mu,
                            const ProblemParams& pp) {
    RadialFunction above_rs = above;
    if (above.grid->n != below.grid->n || above.grid->R != below.grid->R) {
        // The descent regauges its grid mid-run, so the bracket endpoints
        // may live on different grids; pull the upper one over.
        MonotoneCubic interp(*above.grid, above.u);
        std::vector<double> w(below.grid->n + 1, 0.0);
        for (std::size_t i = 0; i < below.grid->n; ++i) {
            w[i] = std::max(0.0, interp(below.grid->r[i]));
        }
        above_rs = make_function(below.grid, std::move(w));
        renorm_trap(above_rs, pp);
    }
    double lo = 0.0, hi = 1.0;  // tau: 0 -> above, 1 -> below
    RadialFunction best = below;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        RadialFunction f = blend_profiles(above_rs, below, mid, pp);
        const double m = mu_of_u(moments(f, pp), pp);
        if (std::abs(m - mu) / mu < 1e-13) return f;
        if (m > mu) {
            lo = mid;
        } else {
            hi = mid;
            best = std::move(f);
        }
    }
    return best;
}

SolutionRecord degenerate_record(GridPtr grid, RadialFunction f, bool conv,
                                 const ProblemParams& pp) {
    double lam_fit = 0.0;
    const double el = check_degenerate_el(f, pp, &lam_fit);
    double umin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid->n; ++j) umin = std::min(umin, f.u[j]);
    const FiberMoments mt = moments(f, pp);
    SolutionRecord rec;
    rec.params = pp;
    rec.branch = Branch::zero;
    rec.lambda = lam_fit;
    rec.energy = energy(mt, pp);
    rec.residuals.pohozaev = identity_defect(mt, lam_fit, pp);
    rec.residuals.euler_lagrange = el;
    rec.residuals.mass =
        std::abs(std::pow(mt.mass, 1.0 / pp.p) - pp.a) / pp.a;
    rec.positivity_min = umin;
    rec.converged = conv;
    rec.profile = std::move(f);
    return rec;
}

}  // namespace

SolutionRecord minimize_ground(const ProblemParams& params,
                               const SolverOptions& opts) {
    return solve_pm(params, Branch::plus, opts);
}

SolutionRecord minimize_mountain(const ProblemParams& params,
                                 const SolverOptions& opts) {
    return solve_pm(params, Branch::minus, opts);
}

SolutionRecord minimize_degenerate(const ProblemParams& params,
                                   const SolverOptions& opts) {
    params.validate();
    const ProblemParams& pp = params;
    const double mu = pp.mu;
    const double R = opts.R > 0.0 ? opts.R : 20.0;
    GridPtr g = make_grid(R, opts.n, pp.N);
    const std::size_t n = g->n;
    const double x = pp.x_exp();
    const double y = pp.y_exp();

    // Stage A: find a profile on the mass sphere whose threshold functional
    // equals the requested coupling. Below the attainable minimum the
    // degenerate set is empty.
    RadialFunction seed = make_function(g, gaussian_seed(*g, 1.0, pp));
    renorm_trap(seed, pp);
    const double mu0 = mu_of_u(moments(seed, pp), pp);

    RadialFunction level = seed;
    bool exact_level = false;
    if (mu0 > mu) {
        MuDescentResult md =
            mu_descent(seed, pp, std::max(opts.max_iter, 2000), mu);
        if (md.crossed) {
            level = level_bisect(md.u_above, md.u, mu, pp);
            exact_level = true;
        } else if (md.mu <= mu * (1.0 + 2e-3)) {
            // Within grid noise of the attainable minimum: proceed with the
            // nearest reachable level and report the true residuals.
            level = md.u;
        } else {
            std::ostringstream msg;
            msg << "degenerate set is empty: coupling " << mu
                << " lies below the attainable threshold (about " << md.mu
                << ")";
            throw EmptyManifoldError(msg.str());
        }
    } else {
        // Raise the threshold with an oscillatory blend partner.
        RadialFunction high = seed;
        bool found = false;
        for (double freq = 8.0; freq <= 512.0; freq *= 2.0) {
            std::vector<double> v(seed.u.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = seed.u[i] *
                       (1.0 + 0.6 * std::sin(freq * M_PI * g->r[i] / g->R));
            }
            RadialFunction cand = make_function(g, std::move(v));
            renorm_trap(cand, pp);
            if (mu_of_u(moments(cand, pp), pp) > 1.5 * mu) {
                high = std::move(cand);
                found = true;
                break;
            }
        }
        if (!found) {
            throw NumericError(
                "could not bracket the requested threshold level");
        }
        level = level_bisect(high, seed, mu, pp);
        exact_level = true;
    }

    // Dilate onto the degenerate point of the fiber.
    const double s = s_star(moments(level, pp), pp);
    RadialFunction v = mass_scale(level, s, pp);
    renorm_trap(v, pp);

    // Stage B: augmented-Lagrangian descent of the energy subject to the two
    // degeneracy constraints (cell metric; reported residuals are polished
    // against trapezoid values afterwards).
    std::vector<double> u = v.u;
    u[n] = 0.0;
    const double A0 = cell_moments_raw(*g, u, pp).A;
    double rho = 10.0, y1 = 0.0, y2 = 0.0;
    double cprev = std::numeric_limits<double>::infinity();

    std::vector<double> lap(n + 1), dir(n + 1), nrm(n + 1), trial(n + 1);
    auto constraints = [&](const std::vector<double>& w, FiberMoments& m) {
        m = cell_moments_raw(*g, w, pp);
        const double c1 = pohozaev(m, pp) / A0;
        const double c2 = second_fibering_form(m, pp) / (pp.p * A0);
        return std::pair<double, double>(c1, c2);
    };
    auto al_value = [&](const std::vector<double>& w, FiberMoments& m) {
        auto [c1, c2] = constraints(w, m);
        return energy(m, pp) + y1 * c1 + y2 * c2 +
               0.5 * rho * (c1 * c1 + c2 * c2);
    };

    bool al_ok = true;
    for (int outer = 0; outer < 15; ++outer) {
        double step = 1.0;
        FiberMoments m;
        double Lcur = al_value(u, m);
        for (int iter = 0; iter < 400; ++iter) {
            auto [c1, c2] = constraints(u, m);
            const double w1 = y1 + rho * c1;
            const double w2 = y2 + rho * c2;
            p_laplacian_apply_raw(*g, u, pp.p, lap);
            for (std::size_t j = 0; j < n; ++j) {
                const double f1 = phi_pow(u[j], pp.q1);
                const double f2 = phi_pow(u[j], pp.q2);
                const double gpsi = lap[j] - pp.mu * f1 - f2;
                const double gc1 =
                    (pp.p * lap[j] - pp.mu * x * f1 - y * f2) / A0;
                const double gc2 = (pp.p * pp.p * lap[j] -
                                    pp.mu * x * x * f1 - y * y * f2) /
                                   (pp.p * A0);
                dir[j] = gpsi + w1 * gc1 + w2 * gc2;
                nrm[j] = phi_pow(u[j], pp.p);
            }
            dir[n] = 0.0;
            nrm[n] = 0.0;
            const double nn = dot_cw(*g, nrm, nrm);
            if (nn > 0.0) {
                const double alpha = dot_cw(*g, dir, nrm) / nn;
                for (std::size_t j = 0; j < n; ++j) dir[j] -= alpha * nrm[j];
            }
            for (std::size_t j = 0; j < n; ++j) dir[j] = -dir[j];
            const double gnorm = std::sqrt(dot_cw(*g, dir, dir));
            if (gnorm < 1e-9 * (1.0 + std::abs(Lcur))) break;

            const double slope = -gnorm * gnorm;
            double st = step;
            bool accepted = false;
            for (int k = 0; k < 45; ++k) {
                for (std::size_t j = 0; j <= n; ++j) {
                    trial[j] = u[j] + st * dir[j];
                }
                trial[n] = 0.0;
                renorm_cell(*g, trial, pp);
                FiberMoments mt;
                const double Lt = al_value(trial, mt);
                if (Lt <= Lcur + 1e-4 * st * slope) {
                    u.swap(trial);
                    Lcur = Lt;
                    accepted = true;
                    break;
                }
                st *= 0.5;
            }
            if (!accepted) break;
            step = std::min(st * 2.0, 1e4);
        }
        auto [c1, c2] = constraints(u, m);
        const double cn = std::max(std::abs(c1), std::abs(c2));
        if (cn < 1e-10) break;
        y1 += rho * c1;
        y2 += rho * c2;
        if (cn > 0.3 * cprev) rho = std::min(rho * 5.0, 1e9);
        cprev = cn;
        if (outer == 14) al_ok = cn < 1e-6;
    }

    // Stage C: Newton polish of the reported (trapezoid) constraint values
    // along the span of the constraint gradients and the sphere normal.
    {
        const double ap = std::pow(pp.a, pp.p);
        auto trap_c = [&](const std::vector<double>& w, double* c) {
            RadialFunction f = make_function(g, w);
            const FiberMoments m = moments(f, pp);
            c[0] = pohozaev(m, pp) / A0;
            c[1] = second_fibering_form(m, pp) / (pp.p * A0);
            c[2] = (m.mass - ap) / ap;
        };
        std::vector<std::vector<double>> dirs(3,
                                              std::vector<double>(n + 1, 0.0));
        for (int polish = 0; polish < 8; ++polish) {
            p_laplacian_apply_raw(*g, u, pp.p, lap);
            for (std::size_t j = 0; j < n; ++j) {
                const double f1 = phi_pow(u[j], pp.q1);
                const double f2 = phi_pow(u[j], pp.q2);
                dirs[0][j] = pp.p * lap[j] - pp.mu * x * f1 - y * f2;
                dirs[1][j] =
                    pp.p * pp.p * lap[j] - pp.mu * x * x * f1 - y * y * f2;
                dirs[2][j] = phi_pow(u[j], pp.p);
            }
            double c0[3];
            trap_c(u, c0);
            if (std::max({std::abs(c0[0]), std::abs(c0[1]),
                          std::abs(c0[2])}) < 1e-12) {
                break;
            }
            // Jacobian d c_i / d alpha_k by central differences.
            double J[3][3];
            std::vector<double> wtmp(n + 1);
            double unorm = std::sqrt(dot_cw(*g, u, u));
            for (int k = 0; k < 3; ++k) {
                const double dn = std::sqrt(dot_cw(*g, dirs[k], dirs[k]));
                const double eps = 1e-7 * (unorm + 1.0) / (dn + 1e-300);
                double cp[3], cm[3];
                for (std::size_t j = 0; j <= n; ++j) {
                    wtmp[j] = u[j] + eps * dirs[k][j];
                }
                trap_c(wtmp, cp);
                for (std::size_t j = 0; j <= n; ++j) {
                    wtmp[j] = u[j] - eps * dirs[k][j];
                }
                trap_c(wtmp, cm);
                for (int i = 0; i < 3; ++i) {
                    J[i][k] = (cp[i] - cm[i]) / (2.0 * eps);
                }
            }
            // Solve J alpha = -c0 (3x3 Gaussian elimination with pivoting).
            double M[3][4];
            for (int i = 0; i < 3; ++i) {
                for (int k = 0; k < 3; ++k) M[i][k] = J[i][k];
                M[i][3] = -c0[i];
            }
            bool ok = true;
            for (int col = 0; col < 3 && ok; ++col) {
                int piv = col;
                for (int r = col + 1; r < 3; ++r) {
                    if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
                }
                if (std::abs(M[piv][col]) < 1e-300) {
                    ok = false;
                    break;
                }
                if (piv != col) std::swap(M[piv], M[col]);
                for (int r = 0; r < 3; ++r) {
                    if (r == col) continue;
                    const double fct = M[r][col] / M[col][col];
                    for (int k = col; k < 4; ++k) M[r][k] -= fct * M[col][k];
                }
            }
            if (!ok) break;
            for (std::size_t j = 0; j <= n; ++j) {
                double upd = 0.0;
                for (int k = 0; k < 3; ++k) {
                    upd += (M[k][3] / M[k][k]) * dirs[k][j];
                }
                u[j] += upd;
            }
            u[n] = 0.0;
        }
    }

    RadialFunction f = make_function(g, std::move(u));
    return degenerate_record(g, std::move(f), exact_level && al_ok, pp);
}

double lagrange_multiplier(const RadialFunction& u,
                           const ProblemParams& params) {
    const FiberMoments m = moments(u, params);
    return (m.A - params.mu * m.B1 - m.B2) / std::pow(params.a, params.p);
}

std::pair<RadialFunction, double> refine_euler_lagrange(
    const RadialFunction& u, double lambda, const ProblemParams& params,
    const SolverOptions& opts) {
    params.validate();
    std::vector<double> w = u.u;
    w[u.grid->n] = 0.0;
    NewtonOut nw = newton_refine(*u.grid, std::move(w), lambda, params, opts);
    return {make_function(u.grid, std::move(nw.u)), nw.lambda};
}

double pohozaev_identity_check(const RadialFunction& u, double lambda,
                               const ProblemParams& params) {
    const FiberMoments m = moments(u, params);
    const double N = params.N;
    const double T1 = (N - params.p) * m.A;
    const double T2 = lambda * N * std::pow(params.a, params.p);
    const double T3 = params.mu * N * params.p / params.q1 * m.B1;
    const double T4 = N * params.p / params.q2 * m.B2;
    const double scale = std::max(
        {std::abs(T1), std::abs(T2), std::abs(T3), std::abs(T4), 1e-300});
    return std::abs(T1 - T2 - T3 - T4) / scale;
}

}  // namespace pohozaev
