#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bcrt/excursion.hpp"
#include "bcrt/stats.hpp"
#include "bcrt/tree.hpp"

namespace bcrt {

/// The lower curvature constant 19/128 minus the fixed slack 0.01.
inline constexpr double kLowerConstant = 19.0 / 128.0 - 0.01;

struct ScalePair {
    double delta = 0.0;
    double ell = 0.0;
};

/// 1 - W1(mu_x^delta, mu_y^delta) / rho(x, y).
double ollivier_kappa(const MetricTree& t, const TreePoint& x, const TreePoint& y, double delta);

inline double scale_free_kappa(double kappa, double delta) { return kappa / (delta * delta); }

struct CurvatureConfig {
    std::size_t n = 16384;
    std::uint64_t seed = 0;
    std::size_t replicas = 4000;  // accepted pairs wanted
    double delta = 0.02;
    double ell_lo = 0.45;
    double ell_hi = 0.55;
    unsigned threads = 1;
    SamplerKind sampler = SamplerKind::kBesselBridge;
    std::size_t max_attempts = 0;  // 0: 1000 * replicas
};

/// One accepted (tree, x, y) draw.
struct CurvatureSample {
    std::uint64_t replica = 0;
    std::size_t x = 0;
    std::size_t y = 0;
    double ell = 0.0;
    double w1 = 0.0;
    double gap = 0.0;
    double kappa = 0.0;
};

struct CurvatureRun {
    CurvatureConfig config;
    std::vector<CurvatureSample> samples;
    std::uint64_t attempts = 0;
};

/// Draws one tree and one uniform grid pair per replica index, keeps the draw
/// when rho(x, y) falls in [ell_lo, ell_hi), and stops at the first
/// `replicas` accepted indices. The result depends only on the config.
CurvatureRun run_curvature_experiment(const CurvatureConfig& config);

struct CurvatureEstimate {
    ScalePair scale;  // ell is the bin midpoint
    double mean_ell = 0.0;
    double mean_kappa = 0.0;
    double std_error = 0.0;
    std::size_t replicas = 0;
    double mean_w1 = 0.0;
    double w1_std_error = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    bool in_band = false;
};

CurvatureEstimate summarize_curvature(const CurvatureRun& run);
CurvatureEstimate mc_expected_curvature(const CurvatureConfig& config);

struct KantorovichStat {
    double mean_excess = 0.0;  // mean of gap - ell
    double std_error = 0.0;
    double threshold = 0.0;    // kLowerConstant * delta
    double mean_w1_excess = 0.0;
    std::size_t replicas = 0;
    bool pass = false;
};

KantorovichStat summarize_kantorovich(const CurvatureRun& run);
KantorovichStat kantorovich_lower_stat(const CurvatureConfig& config);

/// LHS - RHS of the three-term lower bound on the integral of rho(., y) over
/// the delta-ball at x, with z the point of [[x, y]] at distance delta/2.
double recursive_bound_check(const MetricTree& t, const TreePoint& x, const TreePoint& y, double delta);

struct PathwiseConfig {
    std::size_t n = 4096;
    std::uint64_t seed = 0;
    std::size_t instances = 10000;
    std::size_t pairs_per_tree = 10;
    double delta_min = 0.01;
    double delta_max = 0.25;
    unsigned threads = 1;
};

struct PathwiseReport {
    std::size_t instances = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;  // smallest observed margin; negative means a violation
    double tolerance = 0.0;
};

/// W1(mu_x^delta, mu_y^delta) <= rho(x, y) + 2 delta, and the matching
/// kappa >= -2 delta / rho(x, y), on random instances.
PathwiseReport w1_upper_bound_sweep(const PathwiseConfig& config, double fault = 0.0);

/// recursive_bound_check >= -10 grid steps on random instances with
/// delta uniform in (0, rho(x, y)).
PathwiseReport recursive_bound_sweep(const PathwiseConfig& config);

}  // namespace bcrt
