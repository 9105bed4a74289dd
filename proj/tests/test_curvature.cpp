#include <doctest.h>

#include <cmath>

#include "bcrt/curvature.hpp"
#include "bcrt/excursion.hpp"
#include "bcrt/tree.hpp"
#include "helpers.hpp"

using namespace bcrt;

TEST_SUITE("curvature") {

TEST_CASE("scale-free curvature") {
    CHECK(scale_free_kappa(-0.0024, 0.02) == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(kLowerConstant == doctest::Approx(0.1384375).epsilon(1e-15));
}

TEST_CASE("curvature between the two peaks of the W") {
    // Balls of radius 0.1 at the peaks are segments of length 0.1; mass sits on
    // average 0.05 from each peak towards the saddle, so W1 = 1.6 - 0.1.
    const MetricTree w(testing::w_shape(8000));
    const double kappa = ollivier_kappa(w, GridIndex{2000}, GridIndex{6000}, 0.1);
    CHECK(std::abs(kappa - (1.0 - 1.5 / 1.6)) <= 1e-3);
    CHECK_THROWS(ollivier_kappa(w, GridIndex{2000}, GridIndex{2000}, 0.1));
    CHECK_THROWS(ollivier_kappa(w, GridIndex{2000}, GridIndex{6000}, 2.0));
}

TEST_CASE("three-term bound on the tent has slack delta^2 / 2") {
    // x at height 0.2, y at the peak; mass density 2 per unit height.
    // LHS = 4 delta ell, RHS = 4 delta ell - delta^2 / 2.
    const std::size_t n = 10000;
    const MetricTree t(tent_excursion(n));
    for (double delta : {0.05, 0.1, 0.2}) {
        const double slack = recursive_bound_check(t, GridIndex{2000}, GridIndex{5000}, delta);
        CHECK(std::abs(slack - 0.5 * delta * delta) <= 10.0 / n);
    }
    const double near_end = recursive_bound_check(t, GridIndex{2000}, GridIndex{5000}, 0.2999);
    CHECK(std::isfinite(near_end));
    CHECK(near_end >= -10.0 / n);
    CHECK_THROWS(recursive_bound_check(t, GridIndex{2000}, GridIndex{5000}, 0.3));
}

TEST_CASE("pathwise sweeps find no violations on small trees") {
    PathwiseConfig c;
    c.n = 512;
    c.seed = 3;
    c.instances = 300;
    c.threads = 2;
    const auto up = w1_upper_bound_sweep(c);
    CHECK(up.instances == 300);
    CHECK(up.violations == 0);
    CHECK(up.worst_margin >= -up.tolerance);
    const auto rec = recursive_bound_sweep(c);
    CHECK(rec.instances == 300);
    CHECK(rec.violations == 0);

    const auto broken = w1_upper_bound_sweep(c, 1.0);
    CHECK(broken.violations > 0);
}

TEST_CASE("curvature runs do not depend on the thread count") {
    CurvatureConfig c;
    c.n = 1024;
    c.seed = 5;
    c.replicas = 16;
    c.threads = 1;
    const auto a = run_curvature_experiment(c);
    c.threads = 4;
    const auto b = run_curvature_experiment(c);
    REQUIRE(a.samples.size() == 16);
    REQUIRE(b.samples.size() == 16);
    CHECK(a.attempts == b.attempts);
    for (std::size_t k = 0; k < 16; ++k) {
        CHECK(a.samples[k].replica == b.samples[k].replica);
        CHECK(a.samples[k].kappa == b.samples[k].kappa);
        CHECK(a.samples[k].gap == b.samples[k].gap);
        CHECK(a.samples[k].ell >= 0.45);
        CHECK(a.samples[k].ell < 0.55);
        CHECK(a.samples[k].gap <= a.samples[k].w1 + 1e-9);
    }
    const auto est = summarize_curvature(a);
    CHECK(est.replicas == 16);
    CHECK(est.band_lo < est.band_hi);
    const auto ks = summarize_kantorovich(a);
    CHECK(ks.threshold == doctest::Approx(kLowerConstant * 0.02));
}

TEST_CASE("curvature config validation") {
    CurvatureConfig c;
    c.ell_lo = 0.6;
    c.ell_hi = 0.5;
    CHECK_THROWS(run_curvature_experiment(c));
    c = CurvatureConfig{};
    c.delta = 0.5;
    CHECK_THROWS(run_curvature_experiment(c));
}

}  // TEST_SUITE
