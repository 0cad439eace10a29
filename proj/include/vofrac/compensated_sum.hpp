#pragma once

#include <cmath>

namespace vofrac {

/// Neumaier's variant of Kahan summation. Unlike the plain Kahan loop it stays
/// accurate when an addend is larger in magnitude than the running sum.
template <typename Real = double>
struct CompensatedSum {
    Real sum = Real{0};
    Real compensation = Real{0};

    constexpr CompensatedSum& operator+=(Real value) noexcept
    {
        const Real t = sum + value;
        if (std::abs(sum) >= std::abs(value))
            compensation += (sum - t) + value;
        else
            compensation += (value - t) + sum;
        sum = t;
        return *this;
    }

    [[nodiscard]] constexpr Real value() const noexcept { return sum + compensation; }
};

} // namespace vofrac
