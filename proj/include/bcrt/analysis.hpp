#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bcrt/excursion.hpp"

namespace bcrt {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    /// Exact decimal expansion; the denominator must have no prime factors
    /// other than 2 and 5.
    std::string decimal() const;
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// 1 - exp(-2 delta^2).
double alpha(double delta);

/// 1/4 - (alpha(delta/2) + 9 alpha(delta/4)) / (8 alpha(delta)); delta = 0
/// returns the limit.
double f(double delta);

/// The limit of f at 0, 19/128.
Rational f_limit_at_zero();

/// (f(h) - f(-h)) / (2h).
double f_central_derivative(double h = 1e-4);

/// Ratio A/B in the factorization f'(delta) = delta (A - B), with
/// A = (1 - alpha(d)) (alpha(d/2) + 9 alpha(d/4)) / (2 alpha(d)^2) and
/// B = (4 (1 - alpha(d/2)) + 9 (1 - alpha(d/4))) / (32 alpha(d)).
double slope_ratio(double delta);

/// max over delta in [lo, hi] (sampled at `points` points) of
/// |slope_ratio(delta) - (1 - coefficient delta^2)| / delta^4.
double slope_ratio_remainder(double coefficient, double lo = 0.01, double hi = 0.2, std::size_t points = 96);

struct AppendixReport {
    Rational f_at_zero;
    std::vector<std::pair<double, double>> numeric_f;  // (delta, f(delta)) for |delta| <= 0.5, step 0.01
    double max_location = 0.0;
    double max_value = 0.0;
    double derivative_at_zero_numeric = 0.0;
    bool dominated = false;  // every tabulated f <= 19/128 + 1e-12
    double ratio_remainder = 0.0;  // slope_ratio_remainder(183/208)
};

AppendixReport appendix_report();

double expected_ball_volume(double eps);
double expected_half_volume(double eps);

struct VolumeConfig {
    std::size_t n = 16384;
    std::uint64_t seed = 0;
    std::size_t replicas = 4000;
    std::vector<double> eps{0.1, 0.2, 0.3, 0.5};
    unsigned threads = 1;
    SamplerKind sampler = SamplerKind::kBesselBridge;
};

struct VolumeRow {
    double eps = 0.0;
    double closed_form = 0.0;
    double mc_mean = 0.0;  // ball at a uniform point
    double se = 0.0;
    double root_mean = 0.0;  // ball at the root
    double root_se = 0.0;
    double reroot_diff_se = 0.0;
    double ancestry_mean = 0.0;
    double ancestry_se = 0.0;
    double offspring_mean = 0.0;
    double offspring_se = 0.0;
    bool volume_pass = false;     // |mc_mean - closed_form| <= 4 se + 2/n
    bool reroot_pass = false;     // root and uniform-point means agree within 4 se
    bool ancestry_pass = false;   // within 4 se of closed_form / 2
    bool offspring_pass = false;  // within 4 se of closed_form / 2
};

std::vector<VolumeRow> volume_law_experiment(const VolumeConfig& config);

struct LemmaRow {
    std::string part;      // "i", "ii", "iii", "iv"
    std::string function;  // "1", "r", "r2"
    double eps = 0.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double se = 0.0;  // standard error of the paired difference
    bool pass = false;
};

/// Paired expectations of integrals of f(rho(x, .)) over balls and their
/// ancestry/offspring parts:
///   i   ball at x            vs ball at x'
///   ii  offspring at (x, y)  vs offspring at (x', y')
///   iii ancestry at (x, y)   vs ancestry at (x', y')
///   iv  offspring at (x, y)  vs ancestry at (x, y)
/// with x, y, x', y' independent uniform atoms of the same tree.
std::vector<LemmaRow> fundamental_lemma_tests(const VolumeConfig& config);

}  // namespace bcrt
