#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcmsim {

/// Absolute or relative memory-clock cycle count.
using Cycle = std::uint64_t;

/// Physical address (byte granularity).
using Address = std::uint64_t;

/// Flattened channel/rank/bank index.
using BankId = std::uint32_t;

enum class AccessKind { Read, Write };

inline constexpr char access_letter(AccessKind k) { return k == AccessKind::Read ? 'R' : 'W'; }

/// Base class for every recoverable error raised by the library. The CLI maps
/// these to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline constexpr unsigned log2_exact(std::uint64_t v) {
    unsigned n = 0;
    while (v > 1) {
        v >>= 1;
        ++n;
    }
    return n;
}

}  // namespace pcmsim
