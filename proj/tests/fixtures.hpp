#pragma once

#include <vector>

#include "pcmsim/simulator.hpp"

namespace fixtures {

using namespace pcmsim;

inline Address addr_of(BankId bank, std::uint32_t partition, std::uint32_t row, std::uint32_t column = 0,
                       const Geometry& g = {}) {
    DecodedAddress d;
    d.bank = bank % g.banks_per_rank;
    d.rank = (bank / g.banks_per_rank) % g.ranks_per_channel;
    d.channel = bank / (g.banks_per_rank * g.ranks_per_channel);
    d.partition = partition;
    d.row = row;
    d.column = column;
    return encode(d, MappingScheme{}, g);
}

// Six requests queued at bank 3 in cycle 0: R1/127, W3/120, R4/12, W1/89, R3/7, R1/22
// (partition/row).
inline Trace six_request_trace() {
    return {
        {0, AccessKind::Read, addr_of(3, 1, 127)},  {0, AccessKind::Write, addr_of(3, 3, 120)},
        {0, AccessKind::Read, addr_of(3, 4, 12)},   {0, AccessKind::Write, addr_of(3, 1, 89)},
        {0, AccessKind::Read, addr_of(3, 3, 7)},    {0, AccessKind::Read, addr_of(3, 1, 22)},
    };
}

inline SimConfig config_for(Policy p, double rapl = 1.0) {
    SimConfig cfg;
    cfg.scheduler.policy = p;
    cfg.scheduler.rapl_limit = rapl;
    return cfg;
}

inline MemoryRequest request(RequestId id, AccessKind k, BankId bank, std::uint32_t partition,
                             Cycle arrival = 0, std::uint32_t row = 0) {
    MemoryRequest r;
    r.id = id;
    r.kind = k;
    r.arrival_cycle = arrival;
    r.enqueue_cycle = arrival;
    r.bank = bank;
    r.address.bank = bank % 8;
    r.address.rank = (bank / 8) % 4;
    r.address.channel = bank / 32;
    r.address.partition = partition;
    r.address.row = row;
    return r;
}

}  // namespace fixtures
