#pragma once

#include "pcmsim/common.hpp"

namespace pcmsim {

/// Organization of the PCM main memory. Every count must be a power of two.
struct Geometry {
    std::uint32_t channels = 4;
    std::uint32_t ranks_per_channel = 4;
    std::uint32_t banks_per_rank = 8;
    std::uint32_t partitions_per_bank = 8;
    std::uint32_t rows_per_partition = 4096;
    std::uint32_t columns_per_row = 512;
    std::uint32_t line_bits = 128;

    /// Throws ConfigError when a count is zero or not a power of two.
    void validate() const;

    std::uint32_t total_banks() const { return channels * ranks_per_channel * banks_per_rank; }

    /// Capacity in bytes, given the width of the byte-in-line address field
    /// (6 bits = 64 B lines under the default mapping).
    std::uint64_t capacity_bytes(unsigned line_offset_bits = 6) const;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

}  // namespace pcmsim
