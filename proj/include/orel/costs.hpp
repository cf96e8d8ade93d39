#pragma once

#include <string>

#include "orel/common.hpp"

namespace orel {

struct Cost {
    u64 bits;
    u64 rounds;
    bool operator==(const Cost&) const = default;
};

/// Closed-form 3PC communication/round model. `l_sigma` is fixed at 32.
/// Primitives: shuffle, applySharded, applyElementwise, compose,
/// invertElementwise, convertElementwise, radixsort_ours, radixsort_ahi22.
Cost predict_cost(const std::string& primitive, u64 n, u64 width);

}  // namespace orel
