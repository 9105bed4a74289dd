#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bcrt/excursion.hpp"
#include "bcrt/parallel.hpp"
#include "bcrt/stats.hpp"
#include "bcrt/tree.hpp"

using namespace bcrt;

namespace {

// Uniform Dyck path of length 2m by the cycle lemma: a shuffled sequence of
// m+1 up steps and m down steps has exactly one rotation whose partial sums
// stay positive; dropping its first (up) step leaves a Dyck path.
int dyck_height(std::size_t m, Engine& rng) {
    const std::size_t len = 2 * m + 1;
    std::vector<int> steps(len, -1);
    std::fill(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(m + 1), 1);
    for (std::size_t i = len - 1; i > 0; --i) std::swap(steps[i], steps[uniform_index(rng, i + 1)]);
    int s = 0, lowest = 0;
    std::size_t cut = 0;
    for (std::size_t j = 0; j < len; ++j) {
        if (s <= lowest) {
            lowest = s;
            cut = j;
        }
        s += steps[j];
    }
    int h = 0, top = 0;
    for (std::size_t j = 1; j < len; ++j) {
        h += steps[(cut + j) % len];
        REQUIRE(h >= 0);
        top = std::max(top, h);
    }
    REQUIRE(h == 0);
    return top;
}

}  // namespace

TEST_SUITE("excursion") {

TEST_CASE("sampled paths vanish at the ends and are positive inside") {
    for (auto kind : {SamplerKind::kBesselBridge, SamplerKind::kVervaat}) {
        const Excursion e = sample_excursion(SamplerConfig{16384, 1, 0, kind});
        CHECK(e.steps() == 16384);
        CHECK(e.lifetime() == 1.0);
        CHECK(e.values().front() == 0.0);
        CHECK(e.values().back() == 0.0);
        const auto v = e.values();
        CHECK(std::all_of(v.begin() + 1, v.end() - 1, [](double x) { return x > 0.0; }));
        CHECK(e.grid_step() * 16384 == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("replica streams are distinct and reproducible") {
    const Excursion a = sample_excursion(SamplerConfig{1024, 9, 0});
    const Excursion b = sample_excursion(SamplerConfig{1024, 9, 1});
    const Excursion c = sample_excursion(SamplerConfig{1024, 9, 0});
    CHECK(sup_distance(a, b) > 0.0);
    CHECK(sup_distance(a, c) == 0.0);
}

TEST_CASE("small grids sample without trouble") {
    Engine rng = make_engine(3, 0);
    for (int k = 0; k < 100; ++k) {
        const Excursion e = sample_excursion(2, SamplerKind::kBesselBridge, rng);
        CHECK(e[1] > 0.0);
        const Excursion v = sample_excursion(2, SamplerKind::kVervaat, rng);
        CHECK(v[1] > 0.0);
    }
    CHECK_THROWS(sample_excursion(1, SamplerKind::kBesselBridge, rng));
}

TEST_CASE("expected height matches sqrt(pi/2) and an independent Dyck-path sampler") {
    constexpr std::size_t kReplicas = 4000;
    std::vector<double> h(kReplicas), dyck(kReplicas);
    parallel_for(0, kReplicas, default_thread_count(), [&](std::size_t r) {
        h[r] = height(sample_excursion(SamplerConfig{16384, 1, r}));
        Engine rng = make_engine(77, r);
        constexpr std::size_t m = 8192;
        // Known expansion: E[height of a Dyck path of length 2m] = sqrt(pi m) - 3/2 + o(1).
        dyck[r] = (dyck_height(m, rng) + 1.5) / std::sqrt(2.0 * m);
    });
    const auto s = summarize(h);
    const auto d = summarize(dyck);
    const double target = std::sqrt(std::numbers::pi / 2.0);
    MESSAGE("E[H] = " << s.mean << " +- " << s.std_error << ", Dyck oracle " << d.mean << " +- " << d.std_error);
    CHECK(std::abs(s.mean - target) <= 4.0 * s.std_error);
    CHECK(std::abs(d.mean - target) <= 4.0 * d.std_error);
    CHECK(std::abs(s.mean - d.mean) <= 4.0 * pooled_error(s, d));
}

TEST_CASE("scaling") {
    const Excursion e = sample_excursion(SamplerConfig{4096, 5, 0});
    const Excursion same = scale(e, 1.0);
    CHECK(sup_distance(e, same) == 0.0);
    CHECK(same.lifetime() == e.lifetime());

    const Excursion big = scale(e, 4.0);
    CHECK(big.lifetime() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(height(big) == doctest::Approx(2.0 * height(e)).epsilon(1e-12));
    CHECK(big.steps() == e.steps());

    const Excursion back = scale(scale(e, 2.0), 0.5);
    CHECK(back.lifetime() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sup_distance(e, back) < 1e-12);
    CHECK_THROWS(scale(e, 0.0));
    CHECK_THROWS(scale(e, -1.0));
}

TEST_CASE("rerooting the tent at its peak gives the tent back") {
    const std::size_t n = 1000;
    const Excursion tent = tent_excursion(n);
    const Excursion r = reroot(tent, 0.5);
    CHECK(r.lifetime() == 1.0);
    for (std::size_t i = 0; i <= n; ++i) CHECK(r[i] == doctest::Approx(tent[i]).epsilon(1e-12));
    CHECK(height(r) == doctest::Approx(0.5));
}

TEST_CASE("rerooting maps grid distances isometrically") {
    const Excursion e = sample_excursion(SamplerConfig{2048, 11, 0});
    const std::size_t n = e.steps();
    Engine rng = make_engine(12, 0);
    for (double s : {0.01, 0.37, 0.5, 0.99}) {
        const std::size_t k = reroot_index(e, s);
        const MetricTree a(e), b(reroot(e, s));
        for (int p = 0; p < 1000; ++p) {
            const std::size_t i = uniform_index(rng, n + 1), j = uniform_index(rng, n + 1);
            CHECK(std::abs(a.distance(i, j) - b.distance(rerooted_index(i, k, n), rerooted_index(j, k, n))) <= 1e-12);
        }
    }
}

TEST_CASE("rerooting rejects endpoints and unnormalized paths") {
    const Excursion tent = tent_excursion(100);
    CHECK_THROWS(reroot(tent, 0.0));
    CHECK_THROWS(reroot(tent, 1.0));
    CHECK_THROWS(reroot(scale(tent, 2.0), 0.5));
    CHECK_THROWS(reroot_at_index(tent, 0));
    CHECK_THROWS(reroot_at_index(tent, 100));
    CHECK(reroot_index(tent, 1e-6) == 1);
}

TEST_CASE("height and sup distance") {
    CHECK(height(tent_excursion(64)) == 0.5);
    const Excursion tent = tent_excursion(64);
    std::vector<double> bumped(tent.values().begin(), tent.values().end());
    for (std::size_t i = 1; i < 64; ++i) bumped[i] += 0.01;
    const Excursion b(bumped, 1.0);
    CHECK(sup_distance(tent, tent) == 0.0);
    CHECK(sup_distance(tent, b) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS(sup_distance(tent, tent_excursion(32)));
}

TEST_CASE("perturbation stays positive and within its bound") {
    Engine rng = make_engine(21, 0);
    const Excursion e = sample_excursion(SamplerConfig{1024, 21, 0});
    for (double sigma : {1e-3, 1e-2, 0.1}) {
        const Excursion p = perturb(e, sigma, 2.0 * sigma, rng);
        double largest = 0.0;
        for (std::size_t i = 0; i <= e.steps(); ++i) largest = std::max(largest, std::abs(p[i] - e[i]));
        for (std::size_t i = 0; i < e.steps(); ++i)
            largest = std::max(largest, std::abs(p.valleys()[i] - e.valleys()[i]));
        CHECK(sup_distance(e, p) == largest);
        CHECK(sup_distance(e, p) < 2.0 * sigma);
        const auto v = p.values();
        CHECK(std::all_of(v.begin() + 1, v.end() - 1, [](double x) { return x > 0.0; }));
    }
}

TEST_CASE("constructor validation") {
    CHECK_THROWS(Excursion({0.0, 1.0}, 1.0));
    CHECK_THROWS(Excursion({0.0, -1.0, 0.0}, 1.0));
    CHECK_THROWS(Excursion({0.0, 1.0, 0.0}, 0.0));
    CHECK_THROWS(Excursion({0.0, 1.0, 0.0}, {0.0, 2.0}, 1.0));
    CHECK_THROWS(Excursion({0.0, 1.0, 0.0}, {0.0}, 1.0));
    CHECK_NOTHROW(Excursion({0.0, 1.0, 0.0}, {0.0, 0.0}, 1.0));
}

}  // TEST_SUITE
