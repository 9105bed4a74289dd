#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bcrt {

/// Static range-minimum structure: O(n log n) build, O(1) query.
class SparseTable {
public:
    SparseTable() = default;

    explicit SparseTable(std::span<const double> data) : size_(data.size()) {
        if (size_ == 0) return;
        const std::size_t levels = static_cast<std::size_t>(std::bit_width(size_));
        table_.resize(levels);
        table_[0].assign(data.begin(), data.end());
        for (std::size_t k = 1; k < levels; ++k) {
            const std::size_t half = std::size_t{1} << (k - 1);
            const std::size_t count = size_ - (std::size_t{1} << k) + 1;
            auto& row = table_[k];
            const auto& prev = table_[k - 1];
            row.resize(count);
            for (std::size_t i = 0; i < count; ++i) row[i] = std::min(prev[i], prev[i + half]);
        }
    }

    std::size_t size() const noexcept { return size_; }

    /// Minimum over the closed index range [lo, hi]; requires lo <= hi < size().
    double min(std::size_t lo, std::size_t hi) const noexcept {
        const std::size_t k = static_cast<std::size_t>(std::bit_width(hi - lo + 1)) - 1;
        return std::min(table_[k][lo], table_[k][hi + 1 - (std::size_t{1} << k)]);
    }

    double checked_min(std::size_t lo, std::size_t hi) const {
        if (lo > hi || hi >= size_) throw std::out_of_range("SparseTable: bad range");
        return min(lo, hi);
    }

private:
    std::size_t size_ = 0;
    std::vector<std::vector<double>> table_;
};

}  // namespace bcrt
