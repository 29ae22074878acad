#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pohozaev/fibering.hpp"
#include "pohozaev/grid.hpp"

using namespace pohozaev;

namespace {

ProblemParams base_params() {
    ProblemParams pp;
    pp.N = 3;
    pp.p = 2.0;
    pp.q1 = 2.5;
    pp.q2 = 4.0;
    pp.a = 1.0;
    pp.mu = 0.1;
    return pp;
}

RadialFunction gaussian(GridPtr g, double sigma) {
    return sample(g, [sigma](double r) {
        return std::exp(-0.5 * r * r / (sigma * sigma));
    });
}

// Dilation-derivative oracle: dense log-spaced sign scan of Phi'.
oracle::ScanResult scan_phi_prime(const FiberMoments& m,
                                  const ProblemParams& pp,
                                  std::size_t points = 100000) {
    return oracle::sign_scan(
        [&](double s) { return fibering_deriv(m, s, pp); }, 1e-6, 1e6, points);
}

}  // namespace

TEST_SUITE("fibering") {

TEST_CASE("gamma exponent values and domain") {
    auto pp = base_params();
    CHECK(gamma_exponent(pp.p, pp) == 0.0);
    ProblemParams p34 = pp;
    p34.q2 = 4.0;
    CHECK(gamma_exponent(4.0, p34) == doctest::Approx(0.75).epsilon(1e-15));
    // q at the mass-critical split: q gamma_q = p exactly.
    const double qc = pp.p + pp.p * pp.p / pp.N;
    CHECK(qc * gamma_exponent(qc, pp) == doctest::Approx(pp.p).epsilon(1e-14));
    CHECK_THROWS_AS((void)gamma_exponent(1.0, pp), InvalidArgumentError);
    CHECK_THROWS_AS((void)gamma_exponent(7.0, pp), InvalidArgumentError);
}

TEST_CASE("mass_scale identity and derivative scaling") {
    auto pp = base_params();
    auto g = make_grid(16.0, 3200, 3);
    auto f = gaussian(g, 1.0);
    auto f1 = mass_scale(f, 1.0, pp);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f1.u[i] == f.u[i]);

    auto f2 = mass_scale(f, 2.0, pp);
    const double lhs = std::pow(grad_lp_norm(f2, pp.p), pp.p);
    const double rhs = std::pow(2.0, pp.p) * std::pow(grad_lp_norm(f, pp.p), pp.p);
    CHECK(std::abs(lhs - rhs) / rhs < 1e-4);

    // q1-norm scaling against an 8x-refined independent quadrature.
    auto g8 = make_grid(16.0, 25600, 3);
    auto f8 = gaussian(g8, 1.0);
    const double s = 0.5;
    auto fs8 = mass_scale(f8, s, pp);
    const double lhs8 = std::pow(lq_norm(fs8, pp.q1), pp.q1);
    const double rhs8 = std::pow(s, pp.q1 * pp.gamma(pp.q1)) *
                        std::pow(lq_norm(f8, pp.q1), pp.q1);
    CHECK(std::abs(lhs8 - rhs8) / rhs8 < 1e-7);

    // Excessive contraction: support below 4 cells.
    CHECK_THROWS_AS((void)mass_scale(f, 5000.0, pp), ResolutionLossError);
}

TEST_CASE("energy: zero profile, dilation identity, fibering_value") {
    auto pp = base_params();
    auto g = make_grid(16.0, 3200, 3);
    auto z = sample(g, [](double) { return 0.0; });
    CHECK(energy(z, pp) == 0.0);

    auto f = gaussian(g, 1.0);
    const auto m = moments(f, pp);
    for (double s : {0.5, 1.0, 2.0}) {
        const double direct = energy(mass_scale(f, s, pp), pp);
        const double fib = fibering_value(m, s, pp);
        CHECK(std::abs(direct - fib) <=
              1e-4 * (std::abs(fib) + std::abs(m.A)));
    }
}

TEST_CASE("pohozaev functional basics") {
    auto pp = base_params();
    auto g = make_grid(16.0, 3200, 3);
    auto z = sample(g, [](double) { return 0.0; });
    CHECK(pohozaev::pohozaev(z, pp) == 0.0);

    // P equals Phi'(1) by construction.
    auto f = gaussian(g, 0.8);
    const auto m = moments(f, pp);
    CHECK(pohozaev::pohozaev(m, pp) ==
          doctest::Approx(fibering_deriv(m, 1.0, pp)).epsilon(1e-14));

    // After projection the dilation derivative vanishes.
    ProblemParams small_mu = pp;
    small_mu.mu = 0.5 * mu_of_u(f, pp);
    auto proj = project_to_manifold(f, Branch::plus, small_mu);
    CHECK(std::abs(pohozaev::pohozaev(proj, small_mu)) <
          1e-4 * std::pow(grad_lp_norm(proj, pp.p), pp.p));
    // Scalar-moment projection is exact by construction.
    auto rep = classify_fibering(m, small_mu);
    CHECK(std::abs(fibering_deriv(m, *rep.t_plus, small_mu)) <=
          1e-10 * m.A);
}

TEST_CASE("mu_of_u: homogeneity, trichotomy edge, dense-scan maximum") {
    auto pp = base_params();
    auto g = make_grid(18.0, 3600, 3);
    auto f = gaussian(g, 1.0);
    const double mu_f = mu_of_u(f, pp);
    CHECK(mu_f > 0.0);

    // 0-homogeneity along dilations.
    for (double s : {0.3, 3.0}) {
        auto fs = mass_scale(f, s, pp);
        CHECK(std::abs(mu_of_u(fs, pp) - mu_f) / mu_f < 1e-8 + 1e-4);
    }
    // Exact in scalar moments (the resampling is the only error source).
    const auto m = moments(f, pp);
    FiberMoments ms = m;
    const double s = 1.7;
    ms.A *= std::pow(s, pp.p);
    ms.B1 *= std::pow(s, pp.q1 * pp.gamma(pp.q1));
    ms.B2 *= std::pow(s, pp.q2 * pp.gamma(pp.q2));
    CHECK(std::abs(mu_of_u(ms, pp) - mu_f) / mu_f < 1e-12);

    // Slightly above the threshold: no critical points.
    ProblemParams above = pp;
    above.mu = 1.0001 * mu_f;
    CHECK(classify_fibering(f, above).kase == FiberingCase::NoRoots);

    // Dense-scan oracle: mu(u) equals max_s h(s) / (gamma_{q1} B1) where
    // h(s) = (A s^{p-x} - gamma_{q2} B2 s^{y-x}).
    const double x = pp.x_exp(), y = pp.y_exp();
    const double g2 = pp.gamma(pp.q2);
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double sv = std::exp(-8.0 + 16.0 * i / 200000.0);
        const double h = m.A * std::pow(sv, pp.p - x) -
                         g2 * m.B2 * std::pow(sv, y - x);
        best = std::max(best, h);
    }
    const double mu_scan = best / (pp.gamma(pp.q1) * m.B1);
    CHECK(std::abs(mu_scan - mu_f) / mu_f < 1e-6);

    auto z = sample(g, [](double) { return 0.0; });
    CHECK_THROWS_AS((void)mu_of_u(z, pp), DegenerateInputError);
}

TEST_CASE("classification trichotomy with dense sign-scan oracle") {
    auto pp = base_params();
    auto g = make_grid(18.0, 1800, 3);
    auto f = gaussian(g, 1.2);
    const auto m = moments(f, pp);
    const double mu_f = mu_of_u(m, pp);

    SUBCASE("two roots at half threshold") {
        ProblemParams half = pp;
        half.mu = 0.5 * mu_f;
        auto rep = classify_fibering(m, half);
        REQUIRE(rep.kase == FiberingCase::TwoRoots);
        CHECK(0.0 < *rep.t_plus);
        CHECK(*rep.t_plus < rep.s_star);
        CHECK(rep.s_star < *rep.t_minus);

        auto scan = scan_phi_prime(m, half);
        REQUIRE(scan.roots_lo.size() == 2);
        const double r1 = oracle::bisect(
            [&](double s) { return fibering_deriv(m, s, half); },
            scan.roots_lo[0], scan.roots_hi[0]);
        const double r2 = oracle::bisect(
            [&](double s) { return fibering_deriv(m, s, half); },
            scan.roots_lo[1], scan.roots_hi[1]);
        CHECK(std::abs(r1 - *rep.t_plus) / r1 < 1e-6);
        CHECK(std::abs(r2 - *rep.t_minus) / r2 < 1e-6);

        // Energy ordering at the roots.
        CHECK(*rep.phi_plus < 0.0);
        CHECK(*rep.phi_plus < *rep.phi_minus);
    }

    SUBCASE("degenerate exactly at the threshold") {
        ProblemParams at = pp;
        at.mu = mu_f;
        auto rep = classify_fibering(m, at);
        REQUIRE(rep.kase == FiberingCase::Degenerate);
        CHECK(*rep.t_zero == doctest::Approx(rep.s_star).epsilon(1e-12));
        // Phi' at s_star vanishes to conditioning precision.
        CHECK(std::abs(fibering_deriv(m, rep.s_star, at)) < 1e-8 * m.A);
    }

    SUBCASE("no roots above the threshold") {
        ProblemParams twice = pp;
        twice.mu = 2.0 * mu_f;
        CHECK(classify_fibering(m, twice).kase == FiberingCase::NoRoots);
        auto scan = scan_phi_prime(m, twice);
        CHECK(scan.roots_lo.empty());
    }
}

TEST_CASE("projection: second-derivative signs and energy") {
    auto pp = base_params();
    auto g = make_grid(18.0, 1800, 3);
    // Gaussian mixture profile.
    auto f = sample(g, [](double r) {
        return std::exp(-0.5 * r * r) +
               0.4 * std::exp(-2.0 * (r - 1.5) * (r - 1.5));
    });
    const auto m = moments(f, pp);
    ProblemParams mm = pp;
    mm.mu = 0.5 * mu_of_u(m, pp);

    auto rep = classify_fibering(m, mm);
    REQUIRE(rep.kase == FiberingCase::TwoRoots);

    // Finite-difference second derivative of the dilation energy at roots.
    auto phi = [&](double s) { return fibering_value(m, s, mm); };
    const double d2p = oracle::fd_second(phi, *rep.t_plus, 1e-4 * *rep.t_plus);
    const double d2m =
        oracle::fd_second(phi, *rep.t_minus, 1e-4 * *rep.t_minus);
    CHECK(d2p > 0.0);
    CHECK(d2m < 0.0);
    CHECK(fibering_second(m, *rep.t_plus, mm) > 0.0);
    CHECK(fibering_second(m, *rep.t_minus, mm) < 0.0);

    // Projected profiles: Pohozaev ~ 0, energy of plus branch negative.
    auto up = project_to_manifold(f, Branch::plus, mm);
    CHECK(energy(up, mm) < 0.0);

    ProblemParams big = pp;
    big.mu = 2.0 * mu_of_u(m, pp);
    CHECK_THROWS_AS((void)project_to_manifold(f, Branch::plus, big),
                    ProjectionUnavailableError);
}

TEST_CASE("derivative consistency: Phi' matches finite differences") {
    auto pp = base_params();
    auto g = make_grid(18.0, 1800, 3);
    auto f = gaussian(g, 0.9);
    const auto m = moments(f, pp);
    auto phi = [&](double s) { return fibering_value(m, s, pp); };
    for (double s : {0.4, 1.0, 2.3}) {
        const double fd = oracle::fd_derivative(phi, s, 1e-5 * s);
        const double an = fibering_deriv(m, s, pp);
        CHECK(std::abs(fd - an) <= 1e-6 * (std::abs(an) + m.A));
    }
}

TEST_CASE("randomized oracle equivalence over parameter draws") {
    // Scaled-down version of the acceptance sweep: 40 draws here.
    oracle::Rng rng(12345);
    auto g = make_grid(18.0, 900, 3);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        ProblemParams pp;
        pp.N = 3;
        pp.p = 1.6 + rng.uniform(0.0, 1.2);           // p in (1.6, 2.8)
        const double split = pp.p + pp.p * pp.p / 3.0;
        pp.q1 = pp.p + rng.uniform(0.05, 0.95) * (split - pp.p);
        const double pstar = pp.p_star();
        pp.q2 = split + rng.uniform(0.1, 0.9) * (pstar - split);
        pp.a = 1.0;
        pp.mu = 1.0;
        pp.validate();

        const double s1 = rng.uniform(0.4, 1.6);
        const double s2 = rng.uniform(0.2, 1.0);
        const double c2 = rng.uniform(0.0, 0.6);
        auto f = sample(g, [&](double r) {
            return std::exp(-0.5 * r * r / (s1 * s1)) +
                   c2 * std::exp(-(r - 1.0) * (r - 1.0) / (s2 * s2));
        });
        const auto m = moments(f, pp);
        const double mu_f = mu_of_u(m, pp);

        for (double frac : {0.5, 1.0, 2.0}) {
            ProblemParams q = pp;
            q.mu = frac * mu_f;
            auto rep = classify_fibering(m, q);
            auto scan = scan_phi_prime(m, q, 20000);
            if (frac == 0.5) {
                REQUIRE(rep.kase == FiberingCase::TwoRoots);
                REQUIRE(scan.roots_lo.size() == 2);
                const double r1 = oracle::bisect(
                    [&](double s) { return fibering_deriv(m, s, q); },
                    scan.roots_lo[0], scan.roots_hi[0]);
                const double r2 = oracle::bisect(
                    [&](double s) { return fibering_deriv(m, s, q); },
                    scan.roots_lo[1], scan.roots_hi[1]);
                CHECK(std::abs(r1 - *rep.t_plus) / r1 < 1e-6);
                CHECK(std::abs(r2 - *rep.t_minus) / r2 < 1e-6);
            } else if (frac == 1.0) {
                CHECK(rep.kase == FiberingCase::Degenerate);
            } else {
                CHECK(rep.kase == FiberingCase::NoRoots);
                CHECK(scan.roots_lo.empty());
            }
            ++checked;
        }
    }
    CHECK(checked == 120);
}

TEST_CASE("regime validation messages") {
    ProblemParams pp = base_params();
    pp.q1 = pp.p;  // violates p < q1
    CHECK_THROWS_WITH_AS(pp.validate(),
                         doctest::Contains("q1 must exceed p"),
                         InvalidRegimeError);
    pp = base_params();
    pp.q2 = 20.0;  // above p*
    CHECK_THROWS_AS(pp.validate(), InvalidRegimeError);
    pp = base_params();
    pp.validate();  // baseline point is admissible
}

}  // TEST_SUITE
