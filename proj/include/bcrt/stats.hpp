#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace bcrt {

/// Mean and standard error of the mean of a sample, reduced in index order.
struct SampleSummary {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        s.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return s;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) carry_ += (sum_ - t) + x;
        else carry_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Standard error of the difference of two independent sample means.
inline double pooled_error(const SampleSummary& a, const SampleSummary& b) {
    return std::hypot(a.std_error, b.std_error);
}

}  // namespace bcrt
