#pragma once

#include <array>

#include "bcrt/excursion.hpp"

namespace bcrt::testing {

// Peaks at t = 1/4 and 3/4 (height 1) with a saddle of height 0.2 at t = 1/2.
inline Excursion w_shape(std::size_t n) {
    static constexpr std::array<double, 5> times{0.0, 0.25, 0.5, 0.75, 1.0};
    static constexpr std::array<double, 5> heights{0.0, 1.0, 0.2, 1.0, 0.0};
    return piecewise_linear_excursion(times, heights, n);
}

}  // namespace bcrt::testing
