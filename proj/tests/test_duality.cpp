#include "oracles.hpp"
#include "srm/duality.hpp"
#include "srm/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace srm;

TEST_CASE("densities validate unit mass") {
    CHECK_NOTHROW(DualDensity({0, 5, 10}, {1, 1}));
    CHECK_THROWS_AS(DualDensity({0, 5, 10}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(DualDensity({0, 5, 5}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(DualDensity({1, 5, 10}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(DualDensity({0, 5, 10}, {-1, 3}), ValidationError);
    CHECK_THROWS_AS(ReferenceMeasure(0.0), ValidationError);

    const auto z = DualDensity::indicator(3, 3.5, 10);
    CHECK(z(3.0) == 0.0);
    CHECK(z(3.2) == 20.0);
    CHECK(z(3.5) == 20.0);
    CHECK(z(3.6) == 0.0);
}

TEST_CASE("expected value examples") {
    const ReferenceMeasure mu(10);
    const auto x = construct_curve({8, 6, 4, 2});
    CHECK(expected_value(DualDensity::uniform(10), x, mu) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(expected_value(DualDensity::indicator(0, 1, 10), x, mu) == 8.0);
    CHECK(expected_value(DualDensity::indicator(4, 4.5, 10), x, mu) == 0.0);
    // The tail covers the rest of the measure.
    const auto shifted = shift_citations(x, 1);
    CHECK(expected_value(DualDensity::uniform(10), shifted, mu) ==
          doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("gamma examples") {
    const ReferenceMeasure mu(10);
    const auto first = DualDensity::indicator(0, 1, 10);
    for (double q : {1.0, 2.0, 7.5}) {
        CHECK(gamma(first, q, PerformanceFamily::h_real(), mu) == doctest::Approx(q));
    }
    CHECK(gamma(DualDensity::uniform(10), 4, PerformanceFamily::w_index(), mu) ==
          doctest::Approx(1.2).epsilon(1e-15));
    for (const auto& spec : standard_catalog()) {
        CHECK(gamma(DualDensity::uniform(10), 0, spec.family(), mu) == 0.0);
    }
    // 1/x^1.62 is not integrable at 0.
    CHECK(gamma(DualDensity::uniform(10), 1, PerformanceFamily::power(1.62), mu) == kInfinity);
    // Away from 0: (1/10) * integral_1^10 x^-1 dx.
    CHECK(gamma(DualDensity({0, 1, 10}, {0, 10.0 / 9}), 1, PerformanceFamily::power(1.0), mu) ==
          doctest::Approx(std::log(10.0) / 9).epsilon(1e-14));
}

TEST_CASE("h_plus examples") {
    const ReferenceMeasure mu(10);
    const auto first = DualDensity::indicator(0, 1, 10);
    for (double t : {0.0, 1.0, 3.25, 8.0}) {
        CHECK(h_plus(first, t, PerformanceFamily::c_max().with_levels(LevelKind::reals), mu) ==
              doctest::Approx(t).epsilon(1e-9));
    }
    const auto beyond = DualDensity::indicator(4, 4.5, 10);
    CHECK(h_plus(beyond, 0, PerformanceFamily::publications(), mu) == 4);
    CHECK(h_plus(DualDensity::uniform(10), -1, PerformanceFamily::h_index(), mu) == 0);
    // gamma vanishes for every level when Z sits past the support of c_max.
    CHECK(h_plus(DualDensity::indicator(2, 3, 10), 0, PerformanceFamily::c_max(), mu) ==
          kInfinity);
}

TEST_CASE("dual values at constructed minimizers") {
    const ReferenceMeasure mu(10);
    const auto x = construct_curve({8, 6, 4, 2});

    const auto zc = constructed_minimizer(IndexKind::c_max, x, 1, mu);
    CHECK(zc.breakpoints() == std::vector<double>{0, 1, 10});
    CHECK(zc.heights() == std::vector<double>{10, 0});
    CHECK(dual_value(x, PerformanceFamily::c_max(), {zc}, mu) == 8);

    const auto zp = constructed_minimizer(IndexKind::pubs, x, 0.5, mu);
    CHECK(zp(4.25) == 20.0);
    for (double delta : {1.0, 0.5, 0.01}) {
        CHECK(dual_value(x, PerformanceFamily::publications(),
                         {constructed_minimizer(IndexKind::pubs, x, delta, mu)}, mu) == 4);
    }

    const auto zh = constructed_minimizer(IndexKind::h, x, 0.1, mu);
    CHECK(zh(3.05) == doctest::Approx(100.0));
    CHECK(zh(3.0) == 0.0);
    for (double delta : {1.0, 0.1}) {
        const double gap = minimizer_gap(IndexKind::h, x, delta, mu);
        CHECK(gap >= 0.0);
        CHECK(gap <= delta * 2 / 3 + 1e-9);
    }
    CHECK_THROWS_AS(constructed_minimizer(IndexKind::w, x, 0.1, mu), UnsupportedError);
    CHECK_THROWS_AS(constructed_minimizer(IndexKind::pubs, shift_citations(x, 1), 0.1, mu),
                    UnsupportedError);
}

TEST_CASE("h gap matches the quadratic solution") {
    // gamma(Z, q) = q (q - h) / delta on (h, h + delta); the sup level solves
    // q (q - h) = delta * x_{h+1}.
    const ReferenceMeasure mu(10);
    const auto x = construct_curve({8, 6, 4, 2});
    const double delta = 0.5;
    const double h = 3, t = 2;
    const double root = (h + std::sqrt(h * h + 4 * delta * t)) / 2;
    CHECK(minimizer_gap(IndexKind::h, x, delta, mu) == doctest::Approx(root - h).epsilon(1e-8));
}

TEST_CASE("weak duality on random instances") {
    const ReferenceMeasure mu(30);
    std::mt19937_64 rng(19);
    const auto zs = random_densities(40, 30, 99);
    for (int trial = 0; trial < 40; ++trial) {
        const auto x = construct_curve(testing::random_counts(rng, 0, 20, 0, 25));
        for (const auto& spec : standard_catalog()) {
            for (const auto& z : zs) {
                CHECK(weak_duality_margin(x, spec.family(), z, mu) >= -1e-9);
            }
        }
    }
    CHECK(weak_duality_margin(CitationCurve{}, PerformanceFamily::h_index(),
                              DualDensity::uniform(30), mu) >= 0.0);
}

TEST_CASE("random densities are deterministic and normalized") {
    const auto a = random_densities(10, 12, 4);
    const auto b = random_densities(10, 12, 4);
    REQUIRE(a.size() == 10);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].breakpoints() == b[k].breakpoints());
        CHECK(a[k].heights() == b[k].heights());
        double mass = 0;
        for (std::size_t c = 0; c < a[k].cells(); ++c) {
            mass += a[k].heights()[c] * (a[k].breakpoints()[c + 1] - a[k].breakpoints()[c]);
        }
        CHECK(mass / 12 == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (const auto& z : random_densities(10, 12, 4, 8, 0.5)) {
        CHECK(z(0.25) == 0.0);
    }
}

TEST_CASE("gamma is monotone and invariant under refinement") {
    const ReferenceMeasure mu(16);
    const auto zs = random_densities(25, 16, 8);
    for (const auto& spec : standard_catalog()) {
        const auto f = dual_family_for(construct_curve({9, 5, 3, 3, 1}), spec.family());
        for (const auto& z : zs) {
            const auto fine = z.refined({0.5, 1.5, 2, 7.25, 11});
            double prev = 0;
            for (double q = 0; q <= 12; q += 0.75) {
                const double g = gamma(z, q, f, mu);
                CHECK(g >= prev - 1e-12);
                prev = g;
                const double gf = gamma(fine, q, f, mu);
                if (std::isinf(g)) {
                    CHECK(std::isinf(gf));
                } else {
                    CHECK(gf == doctest::Approx(g).epsilon(1e-12));
                }
            }
            const double coarse_h = h_plus(z, 3.0, f, mu);
            const double fine_h = h_plus(fine, 3.0, f, mu);
            if (std::isinf(coarse_h)) {
                CHECK(std::isinf(fine_h));
            } else {
                CHECK(fine_h == doctest::Approx(coarse_h).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("gamma against a Riemann sum") {
    const ReferenceMeasure mu(10);
    const auto dens = DualDensity({0, 0.5, 2.5, 6, 10}, {4, 1, 0.5, 1.0625});
    // Zero on (0, 0.5]: a midpoint rule cannot follow x^-0.8 into the origin.
    const auto away = DualDensity({0, 0.5, 2.5, 6, 10}, {0, 2, 0.5, 1.0625});
    const auto fams = {PerformanceFamily::h_real(), PerformanceFamily::w_index(),
                       PerformanceFamily::power(0.8)};
    for (const auto& f : fams) {
        const double q = 3.5;
        const auto& z = f.shape() == Shape::power ? away : dens;
        const double oracle = testing::riemann_expectation(
            [&](double x) { return z(x); }, [&](double x) { return f(q, x); }, 10, 200'000);
        CHECK(gamma(z, q, f, mu) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("gamma tables and the robust dual") {
    const ReferenceMeasure mu(10);
    std::vector<NamedDensity> single{{"q", DualDensity::uniform(10)}};
    GammaTable identity;
    for (double beta : {0.0, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        identity.set("q", beta, beta);
    }
    // E_Q[X] = 2 for X = [8,6,4,2] under the uniform density on (0,10].
    CHECK(robust_dual_srm(construct_curve({8, 6, 4, 2}), identity, single, mu) == 2.0);

    GammaTable high;
    high.set("q", 5, 5);
    CHECK(robust_dual_srm(construct_curve({8, 6, 4, 2}), high, single, mu) == -kInfinity);

    GammaTable gap;
    gap.set("other", 1, 1);
    CHECK_THROWS_AS(robust_dual_srm(construct_curve({8}), gap, single, mu), LookupError);
    CHECK_THROWS_AS(gap.at("q", 1), LookupError);

    GammaTable bad;
    bad.set("q", 1, 2);
    bad.set("q", 2, 1);
    CHECK_THROWS_AS(robust_dual_srm(construct_curve({8}), bad, single, mu), ValidationError);

    // Consistency with dual_value on the h family at the constructed minimizers.
    const auto x = construct_curve({8, 6, 4, 2});
    std::vector<NamedDensity> cands{
        {"c_max", constructed_minimizer(IndexKind::c_max, x, 1, mu)},
        {"h", constructed_minimizer(IndexKind::h, x, 0.5, mu)},
    };
    std::vector<double> levels;
    for (int q = 0; q <= 12; ++q) {
        levels.push_back(q);
    }
    const auto f = PerformanceFamily::h_index();
    const auto table = build_gamma_table(f, cands, levels, mu, CurveSampling::rank_step);
    std::vector<DualDensity> plain;
    for (const auto& c : cands) {
        plain.push_back(c.density);
    }
    CHECK(robust_dual_srm(x, table, cands, mu) ==
          dual_value(x, f, plain, mu, CurveSampling::rank_step));

    std::stringstream csv;
    table.to_csv(csv);
    const auto back = GammaTable::from_csv(csv);
    CHECK(back.entries() == table.entries());

    std::istringstream inf_row("candidate_id,beta,gamma\nq,1,inf\n");
    CHECK(GammaTable::from_csv(inf_row).at("q", 1) == kInfinity);
    std::istringstream bad_header("id,beta,gamma\n");
    CHECK_THROWS(GammaTable::from_csv(bad_header));
}
