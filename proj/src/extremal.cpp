#include "pohozaev/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "cellops.hpp"
#include "trilu.hpp"

namespace pohozaev {

namespace {

using detail::cell_moments_raw;
using detail::dot_cw;
using detail::dphi_pow;
using detail::gaussian_seed;
using detail::phi_pow;
using detail::renorm_cell;
using detail::renorm_trap;

// Deterministic multi-start seeds: Gaussian widths plus two-bump mixtures.
std::vector<double> extremal_seed(const RadialGrid& g, int k,
                                  const ProblemParams& pp) {
    std::vector<double> u(g.n + 1, 0.0);
    auto bump = [&](double center, double sigma, double amp) {
        for (std::size_t i = 0; i <= g.n; ++i) {
            const double d = g.r[i] - center;
            u[i] += amp * std::exp(-d * d / (2.0 * sigma * sigma));
        }
    };
    if (k < 5) {
        switch (k) {
            case 0: bump(0.0, 1.0, 1.0); break;
            case 1: bump(0.0, 0.5, 1.0); break;
            case 2: bump(0.0, 2.0, 1.0); break;
            case 3:
                bump(0.0, 1.0, 1.0);
                bump(3.0, 0.5, 0.7);
                break;
            default:
                bump(0.0, 2.0, 1.0);
                bump(5.0, 0.7, 0.5);
                break;
        }
    } else {
        // Extra starts widen the basic Gaussian.
        bump(0.0, 1.0 + 0.3 * (k - 4), 1.0);
    }
    u[g.n] = 0.0;
    renorm_cell(g, u, pp);
    return u;
}

struct PolishOut {
    std::vector<double> u;
    double merit = 0.0;
    bool converged = false;
};

// Newton corrector for the threshold minimizer: solves the stationarity
// system of the threshold value on the cell mass sphere,
//   (theta+1) p (-Delta_p u)_j / A
//     - q1 phi_{q1}(u_j)/B1 - theta q2 phi_{q2}(u_j)/B2
//     - lam p phi_p(u_j) = 0,   cell mass = a^p,
// whose Jacobian is tridiagonal plus three rank-one moment couplings plus
// the multiplier border; the low-rank part is folded in by the
// Sherman-Morrison-Woodbury identity over the tridiagonal factorization.
PolishOut witness_polish(const RadialGrid& g, std::vector<double> u,
                         const ProblemParams& pp, int max_it) {
    const std::size_t n = g.n;
    const double p = pp.p;
    const double x = pp.x_exp();
    const double y = pp.y_exp();
    const double theta = (p - x) / (y - p);
    const double c0 = (theta + 1.0) * p;
    const double ap = std::pow(pp.a, p);

    u[n] = 0.0;
    renorm_cell(g, u, pp);
    // Testing the stationarity equation with u itself pins the multiplier.
    double lam = (c0 - pp.q1 - theta * pp.q2) / (p * ap);

    std::vector<double> lap(n + 1), F(n), sub(n), diag(n), sup(n);
    std::vector<double> bcol(n), crow(n);
    std::vector<double> v[3], w[3];
    for (auto& vi : v) vi.assign(n, 0.0);
    for (auto& wi : w) wi.assign(n, 0.0);
    std::vector<double> trial(n + 1, 0.0);

    auto residual = [&](const std::vector<double>& uu, double ll,
                        std::vector<double>& lp, std::vector<double>& FF,
                        FiberMoments& mm) {
        p_laplacian_apply_raw(g, uu, p, lp);
        mm = cell_moments_raw(g, uu, pp);
        for (std::size_t j = 0; j < n; ++j) {
            FF[j] = c0 * lp[j] / mm.A - pp.q1 * phi_pow(uu[j], pp.q1) / mm.B1 -
                    theta * pp.q2 * phi_pow(uu[j], pp.q2) / mm.B2 -
                    ll * p * phi_pow(uu[j], p);
        }
    };
    FiberMoments m;
    residual(u, lam, lap, F, m);
    // Scale frozen at entry so the merit cannot shrink by drifting moments.
    double scale0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double f0 = c0 * lap[j] / m.A;
        scale0 += g.cw[j] * f0 * f0;
    }
    scale0 = std::sqrt(scale0) + 1e-300;

    auto merit_of = [&](const std::vector<double>& FF,
                        const FiberMoments& mm) {
        double num = 0.0;
        for (std::size_t j = 0; j < n; ++j) num += g.cw[j] * FF[j] * FF[j];
        return std::sqrt(num) / scale0 + std::abs(mm.mass - ap) / ap;
    };

    double merit = merit_of(F, m);

    PolishOut out;
    std::vector<double> z1(n), z2(n), z3(n), yv(n), lap_t(n + 1), F_t(n);
    std::vector<double> gcol(n);

    // The quotient is dilation-invariant up to the O(h^2) resolution
    // artifact, so on a fixed grid the stationarity system has a residual
    // floor along the dilation field xi = (N/p) u + r u': the achievable
    // merit equals the artifact slope, which shrinks quadratically under
    // refinement. A second (gauge) border keeps the Newton step transversal
    // to xi so the iteration reaches that floor instead of riding the
    // nearly flat valley in huge, always-rejected steps.
    for (int it = 0; it < max_it; ++it) {
        if (merit < 1e-11) break;

        detail::plap_jacobian_rows(g, u, p, sub, diag, sup);
        for (std::size_t j = 0; j < n; ++j) {
            sub[j] *= c0 / m.A;
            sup[j] *= c0 / m.A;
            diag[j] = diag[j] * c0 / m.A -
                      pp.q1 * dphi_pow(u[j], pp.q1) / m.B1 -
                      theta * pp.q2 * dphi_pow(u[j], pp.q2) / m.B2 -
                      lam * p * dphi_pow(u[j], p);
            v[0][j] = c0 * lap[j] / (m.A * m.A);
            w[0][j] = p * g.cw[j] * lap[j];
            v[1][j] = -pp.q1 * phi_pow(u[j], pp.q1) / (m.B1 * m.B1);
            w[1][j] = pp.q1 * g.cw[j] * phi_pow(u[j], pp.q1);
            v[2][j] = -theta * pp.q2 * phi_pow(u[j], pp.q2) / (m.B2 * m.B2);
            w[2][j] = pp.q2 * g.cw[j] * phi_pow(u[j], pp.q2);
            bcol[j] = -p * phi_pow(u[j], p);
            crow[j] = p * g.cw[j] * phi_pow(u[j], p);
        }
        // Pin identically-zero rows (dead tail: the zero profile is
        // stationary there).
        for (std::size_t j = 0; j < n; ++j) {
            if (diag[j] == 0.0 && sub[j] == 0.0 && sup[j] == 0.0 &&
                bcol[j] == 0.0) {
                diag[j] = 1.0;
                F[j] = 0.0;
            }
        }

        detail::TriLU lu;
        if (!lu.factor(sub, diag, sup)) break;

        // Y = T^{-1} V and the 3x3 capacitance M = I - W^T Y.
        std::vector<double> Y[3];
        double M[3][3];
        for (int c = 0; c < 3; ++c) {
            Y[c] = v[c];
            lu.solve(Y[c]);
        }
        for (int rr = 0; rr < 3; ++rr) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += w[rr][j] * Y[c][j];
                M[rr][c] = (rr == c ? 1.0 : 0.0) - acc;
            }
        }
        auto solveJ = [&](std::vector<double>& rhs) {
            lu.solve(rhs);
            double q[3];
            for (int rr = 0; rr < 3; ++rr) {
                q[rr] = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    q[rr] += w[rr][j] * rhs[j];
            }
            // Solve M s = q by Gaussian elimination with partial pivoting.
            double Mloc[3][4];
            for (int rr = 0; rr < 3; ++rr) {
                for (int c = 0; c < 3; ++c) Mloc[rr][c] = M[rr][c];
                Mloc[rr][3] = q[rr];
            }
            for (int c = 0; c < 3; ++c) {
                int pr = c;
                for (int rr = c + 1; rr < 3; ++rr)
                    if (std::abs(Mloc[rr][c]) > std::abs(Mloc[pr][c]))
                        pr = rr;
                for (int k = 0; k < 4; ++k)
                    std::swap(Mloc[c][k], Mloc[pr][k]);
                if (Mloc[c][c] == 0.0) return false;
                for (int rr = c + 1; rr < 3; ++rr) {
                    const double f = Mloc[rr][c] / Mloc[c][c];
                    for (int k = c; k < 4; ++k) Mloc[rr][k] -= f * Mloc[c][k];
                }
            }
            double s[3];
            for (int c = 3; c-- > 0;) {
                s[c] = Mloc[c][3];
                for (int k = c + 1; k < 3; ++k) s[c] -= Mloc[c][k] * s[k];
                s[c] /= Mloc[c][c];
            }
            for (std::size_t j = 0; j < n; ++j) {
                rhs[j] += Y[0][j] * s[0] + Y[1][j] * s[1] + Y[2][j] * s[2];
            }
            return true;
        };

        for (std::size_t j = 0; j < n; ++j) {
            const double dun =
                (j == 0) ? 0.0 : (u[j + 1] - u[j - 1]) / (2.0 * g.h);
            gcol[j] = g.cw[j] * ((g.N / p) * u[j] + g.r[j] * dun);
        }
        for (std::size_t j = 0; j < n; ++j) z1[j] = -F[j];
        z2 = bcol;
        z3 = gcol;
        if (!solveJ(z1) || !solveJ(z2) || !solveJ(z3)) break;
        double c1 = 0.0, c2 = 0.0, c3 = 0.0;
        double x1 = 0.0, x2 = 0.0, x3 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            c1 += crow[j] * z1[j];
            c2 += crow[j] * z2[j];
            c3 += crow[j] * z3[j];
            x1 += gcol[j] * z1[j];
            x2 += gcol[j] * z2[j];
            x3 += gcol[j] * z3[j];
        }
        const double G = m.mass - ap;
        const double det = c2 * x3 - c3 * x2;
        if (det == 0.0) break;
        const double dlam = ((c1 + G) * x3 - c3 * x1) / det;
        const double nu = (c2 * x1 - x2 * (c1 + G)) / det;
        yv = z1;
        for (std::size_t j = 0; j < n; ++j)
            yv[j] -= dlam * z2[j] + nu * z3[j];

        double s = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k) {
            for (std::size_t j = 0; j < n; ++j)
                trial[j] = std::abs(u[j] + s * yv[j]);
            trial[n] = 0.0;
            FiberMoments mt;
            residual(trial, lam + s * dlam, lap_t, F_t, mt);
            const double mt_val = merit_of(F_t, mt);
            if (mt_val < merit * (1.0 - 1e-4 * s)) {
                u.swap(trial);
                lam += s * dlam;
                lap.swap(lap_t);
                F.swap(F_t);
                m = mt;
                merit = mt_val;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (std::getenv("POHO_DEBUG")) {
            std::size_t jm = 0;
            double best = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double c = g.cw[j] * F[j] * F[j];
                if (c > best) {
                    best = c;
                    jm = j;
                }
            }
            std::fprintf(stderr,
                         "[polish] it=%d merit=%.3e s=%.3e dlam=%.3e "
                         "lam=%.6f G=%.3e acc=%d jm=%zu r=%.4g u=%.4g "
                         "F=%.4g\n",
                         it, merit, s, dlam, lam, m.mass - ap,
                         int(accepted), jm, g.r[jm], u[jm], F[jm]);
        }
        if (!accepted) break;
    }

    out.u = std::move(u);
    out.merit = merit;
    out.converged = merit < 1e-4;
    return out;
}

}  // namespace

MuDescentResult mu_descent(const RadialFunction& seed,
                           const ProblemParams& params, int max_iter,
                           double stop_below) {
    const ProblemParams& pp = params;
    GridPtr grid = seed.grid;
    const std::size_t n = grid->n;
    const double x = pp.x_exp();
    const double y = pp.y_exp();
    const double theta = (pp.p - x) / (y - pp.p);

    std::vector<double> u = seed.u;
    u[n] = 0.0;
    renorm_cell(*grid, u, pp);

    auto sphere_mu = [&](const std::vector<double>& w) {
        RadialFunction f = make_function(grid, w);
        const FiberMoments m = moments(f, pp);
        if (!(m.mass > 0.0) || !(m.A > 0.0) || !(m.B1 > 0.0) ||
            !(m.B2 > 0.0) || !std::isfinite(m.A + m.B1 + m.B2 + m.mass)) {
            return std::numeric_limits<double>::infinity();
        }
        return detail::mu_on_sphere(f, pp);
    };

    MuDescentResult out;
    double mu_tr = sphere_mu(u);
    out.u_above = make_function(grid, u);
    out.mu_above = mu_tr;
    if (stop_below > 0.0 && mu_tr <= stop_below) {
        out.u = make_function(grid, u);
        renorm_trap(out.u, pp);
        out.mu = mu_tr;
        out.crossed = true;
        return out;
    }

    // Log parameterization of the interior nodes: u_j = exp(phi_j) keeps
    // the profile strictly positive without a constraint; the Dirichlet
    // node stays pinned at zero. Deep-tail nodes are floored well above
    // exp underflow so every trial stays representable.
    constexpr double kLogFloor = -600.0;
    std::vector<double> phi(n);
    auto phi_from_u = [&]() {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::abs(u[j]);
            phi[j] = std::max(kLogFloor,
                              a > 0.0 ? std::log(a) : kLogFloor);
        }
    };
    auto u_from_phi = [&]() {
        for (std::size_t j = 0; j < n; ++j) u[j] = std::exp(phi[j]);
        u[n] = 0.0;
    };
    // Normal form of an iterate: the gradient moment is dilated back to 1
    // when it drifts far and the support is held inside a fixed band of the
    // domain. The threshold quotient is dilation-invariant, so both moves
    // shift its value only by interpolation error. On a fixed grid the
    // discrete quotient keeps decreasing along ever-narrower spikes, so
    // every line-search trial is measured in normal form; the spike channel
    // then gains nothing and backtracking skips it.
    auto normal_form = [&pp](GridPtr& g, std::vector<double>& w) {
        const double A = cell_moments_raw(*g, w, pp).A;
        if (!(A > 0.0) || !std::isfinite(A)) return;
        const double t = std::pow(A, -1.0 / pp.p);
        if (t < 0.75 || t > 1.3) {
            auto [g2, w2] = detail::dilate_to_grid(g, w, t, pp);
            g = std::move(g2);
            w = std::move(w2);
            renorm_cell(*g, w, pp);
        }
        detail::band_resample(g, w, pp);
    };
    normal_form(grid, u);
    phi_from_u();
    u_from_phi();

    std::vector<double> lap(n + 1), dir(n + 1, 0.0), nrm(n + 1),
        trial(n + 1), trial_phi(n);
    double step = 1.0;
    bool finished = false;
    double slow_ref = std::numeric_limits<double>::infinity();
    int slow_count = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const RadialGrid& g = *grid;
        FiberMoments m = cell_moments_raw(g, u, pp);
        const double logmu = std::log(mu_of_u(m, pp));

        // Progress stop: Armijo accepts noise-level decreases forever once
        // the iterate is pinned, so stagnation over a window is the
        // reliable convergence signal.
        if (logmu > slow_ref - 1e-13 * (1.0 + std::abs(logmu))) {
            if (++slow_count >= 50) {
                finished = true;
                break;
            }
        } else {
            slow_count = 0;
            slow_ref = logmu;
        }

        // Gradient of log mu(u) = (theta+1) log A - log B1 - theta log B2
        // (up to constants), pulled back through u = exp(phi) by the chain
        // rule, then projected off the sphere-constraint gradient in the
        // same variables.
        p_laplacian_apply_raw(g, u, pp.p, lap);
        for (std::size_t j = 0; j < n; ++j) {
            const double du_grad =
                (theta + 1.0) * pp.p * lap[j] / m.A -
                pp.q1 * phi_pow(u[j], pp.q1) / m.B1 -
                theta * pp.q2 * phi_pow(u[j], pp.q2) / m.B2;
            dir[j] = du_grad * u[j];
            nrm[j] = std::pow(u[j], pp.p);
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
        if (gnorm < 1e-10 * (1.0 + std::abs(logmu))) {
            finished = true;
            break;
        }

        if (std::getenv("POHO_DEBUG") && iter % 200 == 0) {
            std::size_t jmax = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (u[j] > u[jmax]) jmax = j;
            }
            const double rm = detail::mass_radius(g, u, pp.p);
            RadialFunction ff = make_function(grid, u);
            const FiberMoments tm = moments(ff, pp);
            if (iter == 200) {
                if (FILE* fp = std::fopen("/tmp/mu_freeze.txt", "w")) {
                    for (std::size_t j = 0; j <= n; ++j) {
                        std::fprintf(fp, "%zu %.17g %.17g %.17g %.17g\n", j,
                                     g.r[j], u[j], g.w[j], g.cw[j]);
                    }
                    std::fclose(fp);
                }
            }
            std::fprintf(stderr,
                         "[mu] iter=%d cellmu=%.6f trapmu=%.4g R=%.4g "
                         "rm/R=%.3g umax=%.4g@r=%.4g u0=%.4g step=%.3e "
                         "gnorm=%.3e\n"
                         "[mu]   cell A=%.4g B1=%.4g B2=%.4g mass=%.4g | "
                         "trap A=%.4g B1=%.4g B2=%.4g mass=%.4g\n",
                         iter, std::exp(logmu), sphere_mu(u), g.R, rm / g.R,
                         u[jmax], g.r[jmax], u[0], step, gnorm, m.A, m.B1,
                         m.B2, m.mass, tm.A, tm.B1, tm.B2, tm.mass);
        }
        const double slope = -gnorm * gnorm;
        double s = step;
        bool accepted = false;
        for (int k = 0; k < 50; ++k) {
            // Shift by the max before exponentiating: a uniform shift is a
            // pure amplitude factor that the renormalization removes, and
            // it keeps every exp within range for any step size.
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                trial_phi[j] = phi[j] + s * dir[j];
                shift = std::max(shift, trial_phi[j]);
            }
            if (!std::isfinite(shift)) {
                s *= 0.5;
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                trial[j] = std::exp(std::max(trial_phi[j] - shift, kLogFloor));
            }
            trial[n] = 0.0;
            renorm_cell(g, trial, pp);
            const FiberMoments mt0 = cell_moments_raw(g, trial, pp);
            if (!(mt0.A > 0.0) || !(mt0.B1 > 0.0) || !(mt0.B2 > 0.0) ||
                !std::isfinite(mt0.A + mt0.B1 + mt0.B2)) {
                s *= 0.5;
                continue;
            }
            GridPtr gt = grid;
            std::vector<double> wt = trial;
            normal_form(gt, wt);
            const FiberMoments mt = cell_moments_raw(*gt, wt, pp);
            if (!(mt.A > 0.0) || !(mt.B1 > 0.0) || !(mt.B2 > 0.0) ||
                !std::isfinite(mt.A + mt.B1 + mt.B2)) {
                s *= 0.5;
                continue;
            }
            const double lt = std::log(mu_of_u(mt, pp));
            if (lt <= logmu + 1e-4 * s * slope) {
                grid = std::move(gt);
                u = std::move(wt);
                phi_from_u();
                u_from_phi();
                accepted = true;
                break;
            }
            s *= 0.5;
        }

        if (!accepted) {
            if (std::getenv("POHO_DEBUG")) {
                std::fprintf(stderr,
                             "[mu] stall iter=%d gnorm=%.3e step=%.3e "
                             "logmu=%.10f R=%.4g\n",
                             iter, gnorm, step, logmu, grid->R);
            }
            out.stalled = true;
            break;
        }
        // The step cap is deliberately modest: steps act multiplicatively
        // on the profile, and a huge cap lets one step inflate the far tail
        // by many orders of magnitude.
        step = std::min(s * 2.0, 8.0);

        // Level bracketing happens on the accepted normal-form iterate, so
        // the most recent above-level snapshot shares its grid unless a
        // regauge intervened; the bisection resamples in that case.
        if (stop_below > 0.0) {
            mu_tr = sphere_mu(u);
            if (mu_tr > stop_below) {
                out.u_above = make_function(grid, u);
                out.mu_above = mu_tr;
            } else {
                out.crossed = true;
                break;
            }
        }
    }

    if (!out.crossed) out.stalled = out.stalled || !finished;
    out.u = make_function(grid, u);
    renorm_trap(out.u, pp);
    out.mu = sphere_mu(out.u.u);
    if (stop_below > 0.0 && !out.crossed && out.mu <= stop_below) {
        out.crossed = true;
    }
    return out;
}

ExtremalReport mu_star(const ProblemParams& params,
                       const ExtremalOptions& opts) {
    params.validate();
    const ProblemParams& pp = params;
    GridPtr grid = make_grid(opts.R, opts.n, pp.N);

    ExtremalReport rep;
    rep.mu_star = std::numeric_limits<double>::infinity();
    rep.kappa_exponent = kappa_exponent(pp);

    const int nseeds = std::max(opts.seeds, 1);
    for (int k = 0; k < nseeds; ++k) {
        RadialFunction seed =
            make_function(grid, extremal_seed(*grid, k, pp));
        MuDescentResult md = mu_descent(seed, pp, opts.max_iter, 0.0);
        if (md.mu < rep.mu_star) {
            rep.mu_star = md.mu;
            rep.witness = std::move(md.u);
            rep.converged = !md.stalled;
        }
    }

    // Newton corrector on a refined grid: the first-order descent crawls
    // near the flat minimum, and on the descent grid the stationarity
    // residual bottoms out at the dilation artifact slope. Refining 4x
    // shrinks that floor ~16x, so the polished witness satisfies the
    // degenerate Euler-Lagrange equation well below the reporting
    // tolerance.
    {
        const GridPtr& gc = rep.witness.grid;
        GridPtr gf = make_grid(gc->R, 4 * gc->n, pp.N);
        MonotoneCubic interp(*gc, rep.witness.u);
        std::vector<double> uf(gf->n + 1, 0.0);
        for (std::size_t i = 0; i < gf->n; ++i) {
            uf[i] = std::max(0.0, interp(gf->r[i]));
        }
        PolishOut po = witness_polish(*gf, std::move(uf), pp, 60);
        RadialFunction f = make_function(std::move(gf), std::move(po.u));
        renorm_trap(f, pp);
        const double mu_new = detail::mu_on_sphere(f, pp);
        if (std::getenv("POHO_DEBUG")) {
            std::fprintf(stderr,
                         "[mu*] polish conv=%d merit=%.3e mu=%.10g "
                         "(descent %.10g)\n",
                         po.converged ? 1 : 0, po.merit, mu_new,
                         rep.mu_star);
        }
        if (po.converged && std::isfinite(mu_new)) {
            rep.witness = std::move(f);
            rep.mu_star = mu_new;
            rep.converged = true;
        }
    }

    if (opts.normalize_gradient) {
        // Re-dilate the witness so its gradient moment is exactly 1. The
        // dilation is exact (rescaled grid), so the threshold value is
        // preserved to round-off.
        const FiberMoments m = moments(rep.witness, pp);
        if (m.A > 0.0) {
            const double t = std::pow(m.A, -1.0 / pp.p);
            auto [g2, w] =
                detail::dilate_to_grid(rep.witness.grid, rep.witness.u, t, pp);
            RadialFunction f = make_function(std::move(g2), std::move(w));
            renorm_trap(f, pp);
            const double mu_new = mu_of_u(moments(f, pp), pp);
            if (std::abs(mu_new - rep.mu_star) < 1e-6 * rep.mu_star) {
                rep.witness = std::move(f);
                rep.mu_star = mu_new;
            }
        }
    }
    return rep;
}

double scaling_law_check(double a1, double a2, const ProblemParams& params,
                         const ExtremalOptions& opts) {
    ProblemParams p1 = params;
    p1.a = a1;
    ProblemParams p2 = params;
    p2.a = a2;
    const ExtremalReport r1 = mu_star(p1, opts);
    const ExtremalReport r2 = mu_star(p2, opts);
    const double kappa = kappa_exponent(params);
    const double predicted = r1.mu_star * std::pow(a2 / a1, -kappa);
    return std::abs(r2.mu_star - predicted) / r2.mu_star;
}

EnergyGapReport energy_gap_report(double a, double mu,
                                  const ProblemParams& params,
                                  const SolverOptions& solver_opts) {
    ProblemParams pp = params;
    pp.a = a;
    pp.mu = mu;
    EnergyGapReport rep;
    rep.m_plus = minimize_ground(pp, solver_opts).energy;
    rep.m_minus = minimize_mountain(pp, solver_opts).energy;
    rep.m_zero = minimize_degenerate(pp, solver_opts).energy;
    rep.plus_below_minus = rep.m_plus <= rep.m_minus;
    rep.plus_below_zero = rep.m_plus < rep.m_zero;
    rep.minus_below_zero = rep.m_minus < rep.m_zero;
    return rep;
}

double check_degenerate_el(const RadialFunction& u,
                           const ProblemParams& params, double* lambda_out) {
    const ProblemParams& pp = params;
    const FiberMoments m0 = moments(u, pp);
    if (!(m0.A > 0.0) || !(m0.B1 > 0.0) || !(m0.B2 > 0.0)) {
        throw DegenerateInputError("zero profile admits no multiplier fit");
    }

    // Dilation scale: root of the second fiber derivative. Near threshold
    // the two first-derivative roots split like sqrt of the gap, so the
    // inflection point is the well-conditioned anchor.
    const double x = pp.x_exp();
    const double y = pp.y_exp();
    auto fiber_d2 = [&](double t) {
        return (pp.p - 1.0) * std::pow(t, pp.p - 2.0) * m0.A -
               pp.mu * (x / pp.q1) * (x - 1.0) * std::pow(t, x - 2.0) * m0.B1 -
               (y / pp.q2) * (y - 1.0) * std::pow(t, y - 2.0) * m0.B2;
    };
    double s = 1.0;
    {
        const double step = std::pow(2.0, 1.0 / 3.0);
        double tl = 1e-6, fl = fiber_d2(tl);
        for (double tr = tl * step; tr < 1e6; tr *= step) {
            const double fr = fiber_d2(tr);
            if (fl > 0.0 && fr <= 0.0) {
                double lo = tl, hi = tr;
                for (int k = 0; k < 200; ++k) {
                    const double mid = std::sqrt(lo * hi);
                    (fiber_d2(mid) > 0.0 ? lo : hi) = mid;
                }
                s = std::sqrt(lo * hi);
                break;
            }
            tl = tr;
            fl = fr;
        }
    }

    auto [gs, us] = detail::dilate_to_grid(u.grid, u.u, s, pp);
    RadialFunction v = make_function(std::move(gs), std::move(us));
    const RadialGrid& g = *v.grid;
    const std::size_t n = g.n;

    const double c1 = pp.mu * pp.q1 * pp.gamma(pp.q1) / pp.p;
    const double c2 = pp.q2 * pp.gamma(pp.q2) / pp.p;

    std::vector<double> lap(n + 1);
    p_laplacian_apply_raw(g, v.u, pp.p, lap);

    // Fit only the multiplier coefficient c_p in
    //   (-Delta_p v) - c1 phi_{q1}(v) - c2 phi_{q2}(v) = c_p phi_p(v).
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double base = phi_pow(v.u[j], pp.p);
        const double rhs =
            lap[j] - c1 * phi_pow(v.u[j], pp.q1) - c2 * phi_pow(v.u[j], pp.q2);
        num += g.w[j] * rhs * base;
        den += g.w[j] * base * base;
    }
    if (den <= 0.0) {
        throw DegenerateInputError("zero profile admits no multiplier fit");
    }
    const double cp = num / den;

    double rnum = 0.0, rden = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double au = std::abs(v.u[j]);
        const double rhs = lap[j] - c1 * phi_pow(v.u[j], pp.q1) -
                           c2 * phi_pow(v.u[j], pp.q2) -
                           cp * phi_pow(v.u[j], pp.p);
        const double forcing = std::abs(cp) * std::pow(au, pp.p - 1.0) +
                               c1 * std::pow(au, pp.q1 - 1.0) +
                               c2 * std::pow(au, pp.q2 - 1.0);
        rnum += g.w[j] * rhs * rhs;
        rden += g.w[j] * forcing * forcing;
    }
    if (lambda_out) {
        const double B1 = moments(v, pp).B1;
        *lambda_out = (B1 > 0.0) ? cp / B1 : 0.0;
    }
    return std::sqrt(rnum) / (std::sqrt(rden) + 1e-300);
}

}  // namespace pohozaev
