#include <doctest.h>

#include <cmath>
#include <set>

#include "bcrt/analysis.hpp"

using namespace bcrt;

TEST_SUITE("analysis") {

TEST_CASE("alpha") {
    CHECK(alpha(0.0) == 0.0);
    CHECK(alpha(0.5) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-15));
    CHECK(alpha(1e-9) == doctest::Approx(2e-18).epsilon(1e-9));
    CHECK(alpha(-0.3) == alpha(0.3));
}

TEST_CASE("f at and near zero") {
    CHECK(f_limit_at_zero() == Rational{19, 128});
    CHECK(f_limit_at_zero().decimal() == "0.1484375");
    CHECK(Rational{1, 8}.decimal() == "0.125");
    CHECK(Rational{3, 1}.decimal() == "3");
    CHECK_THROWS(Rational{1, 3}.decimal());
    CHECK(f(0.0) == 19.0 / 128.0);
    CHECK(std::abs(f(1e-3) - 19.0 / 128.0) < 1e-6);
    CHECK(f(0.1) < 19.0 / 128.0);
    CHECK(f(0.1) > 0.147);
    CHECK(f(0.2) == f(-0.2));
    CHECK(std::abs(f_central_derivative()) < 1e-12);
}

TEST_CASE("second-order coefficient of f") {
    // Series oracle: f = 19/128 - (183/2048) delta^2 + O(delta^4).
    for (double d : {0.05, 0.02}) {
        const double c2 = (19.0 / 128.0 - f(d)) / (d * d);
        CHECK(c2 == doctest::Approx(183.0 / 2048.0).epsilon(0.02));
    }
}

TEST_CASE("slope ratio expansion") {
    CHECK(slope_ratio(0.01) == doctest::Approx(1.0 - 183.0 / 208.0 * 1e-4).epsilon(1e-8));
    CHECK(slope_ratio_remainder(183.0 / 208.0) <= 0.25);
    // A wrong quadratic coefficient blows the remainder up by orders of magnitude.
    CHECK(slope_ratio_remainder(283.0 / 208.0) > 100.0);
    CHECK_THROWS(slope_ratio(0.0));
}

TEST_CASE("constants report") {
    const auto rep = appendix_report();
    CHECK(rep.f_at_zero == Rational{19, 128});
    CHECK(rep.numeric_f.size() == 101);
    CHECK(rep.max_location == 0.0);
    CHECK(rep.max_value == 19.0 / 128.0);
    CHECK(rep.dominated);
    CHECK(std::abs(rep.derivative_at_zero_numeric) < 1e-12);
    CHECK(rep.ratio_remainder <= 0.25);
}

TEST_CASE("closed-form volumes") {
    CHECK(expected_ball_volume(0.2) == doctest::Approx(1.0 - std::exp(-0.08)).epsilon(1e-15));
    CHECK(expected_half_volume(0.2) == 0.5 * expected_ball_volume(0.2));
    CHECK_THROWS(expected_ball_volume(0.0));
}

TEST_CASE("small volume experiment has the expected shape") {
    VolumeConfig c;
    c.n = 1024;
    c.replicas = 200;
    c.seed = 2;
    c.threads = 2;
    const auto rows = volume_law_experiment(c);
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].eps == c.eps[k]);
        CHECK(rows[k].mc_mean > 0.0);
        CHECK(rows[k].mc_mean < 1.0);
        CHECK(rows[k].se > 0.0);
        CHECK(rows[k].ancestry_mean + rows[k].offspring_mean == doctest::Approx(rows[k].mc_mean).epsilon(1e-9));
    }
    c.threads = 1;
    const auto again = volume_law_experiment(c);
    for (std::size_t k = 0; k < rows.size(); ++k) CHECK(again[k].mc_mean == rows[k].mc_mean);

    const auto lemma = fundamental_lemma_tests(c);
    std::set<std::string> parts;
    for (const auto& r : lemma) parts.insert(r.part);
    CHECK(parts == std::set<std::string>{"i", "ii", "iii", "iv"});
    CHECK(lemma.size() == 4 * 3 * c.eps.size());
}

}  // TEST_SUITE
