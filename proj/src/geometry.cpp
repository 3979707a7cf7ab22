#include "pcmsim/geometry.hpp"

#include <string>
#include <utility>

namespace pcmsim {

void Geometry::validate() const {
    const std::pair<const char*, std::uint32_t> counts[] = {
        {"channels", channels},
        {"ranks_per_channel", ranks_per_channel},
        {"banks_per_rank", banks_per_rank},
        {"partitions_per_bank", partitions_per_bank},
        {"rows_per_partition", rows_per_partition},
        {"columns_per_row", columns_per_row},
        {"line_bits", line_bits},
    };
    for (const auto& [name, v] : counts) {
        if (!is_pow2(v)) {
            throw ConfigError(std::string("geometry.") + name + " must be a power of two >= 1, got " +
                              std::to_string(v));
        }
    }
}

std::uint64_t Geometry::capacity_bytes(unsigned line_offset_bits) const {
    return std::uint64_t{total_banks()} * partitions_per_bank * rows_per_partition *
           columns_per_row * (std::uint64_t{1} << line_offset_bits);
}

}  // namespace pcmsim
