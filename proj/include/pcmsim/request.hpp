#pragma once

#include <optional>
#include <string_view>

#include "pcmsim/address_map.hpp"
#include "pcmsim/common.hpp"

namespace pcmsim {

using RequestId = std::uint64_t;

enum class PairKind { None, Rww, Rwr };

std::string_view to_string(PairKind k);

struct MemoryRequest {
    RequestId id = 0;  // strictly increasing in arrival order
    Cycle arrival_cycle = 0;
    AccessKind kind = AccessKind::Read;
    DecodedAddress address;
    BankId bank = 0;  // address.global_bank(geometry), cached at enqueue
    Cycle enqueue_cycle = 0;
    // Number of younger requests scheduled while this one waited.
    std::uint32_t bypass_count = 0;

    bool is_read() const { return kind == AccessKind::Read; }
    std::uint32_t partition() const { return address.partition; }
};

/// A single request or a legal pair, as chosen by a policy.
struct ScheduleDecision {
    MemoryRequest primary;
    std::optional<MemoryRequest> paired;
    PairKind pair_kind = PairKind::None;
    Cycle decision_cycle = 0;

    bool is_pair() const { return pair_kind != PairKind::None; }
};

}  // namespace pcmsim
