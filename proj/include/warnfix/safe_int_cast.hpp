#pragma once

#include <limits>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace safecast {

// Checked integral conversion: throws when the value is outside the target
// type's representable range. std::cmp_* keep mixed-signedness comparisons
// mathematically exact.
template <typename To, typename From>
To safe_int_cast(From value) {
    static_assert(std::is_integral_v<To> && std::is_integral_v<From> &&
                      !std::is_same_v<To, bool> && !std::is_same_v<From, bool>,
                  "safe_int_cast handles non-bool integral types");
    if (std::cmp_greater(value, std::numeric_limits<To>::max()) ||
        std::cmp_less(value, std::numeric_limits<To>::min())) {
        throw std::runtime_error("safe_int_cast: value out of range for target type");
    }
    return static_cast<To>(value);
}

}  // namespace safecast
