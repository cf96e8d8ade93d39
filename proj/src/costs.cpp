#include "orel/costs.hpp"

namespace orel {

Cost predict_cost(const std::string& primitive, u64 n, u64 width) {
    const u64 ls = kPermWidth;
    const u64 l = width;
    if (primitive == "shuffle" || primitive == "applySharded") return {6 * l * n, 3};
    if (primitive == "applyElementwise") return {6 * l * n + 7 * ls * n, 7};
    if (primitive == "compose" || primitive == "invertElementwise" || primitive == "convertElementwise")
        return {13 * ls * n, 7};
    if (primitive == "radixsort_ours") return {(17 * l * ls + 13 * ls + 6 * l * l - 6 * l) * n, 11 * l + 7};
    if (primitive == "radixsort_ahi22") return {(24 * l * ls - 20 * ls + 6 * (l - 1)) * n, 18 * l - 14};
    throw ProtocolError("predict_cost: unknown primitive '" + primitive + "'");
}

}  // namespace orel
