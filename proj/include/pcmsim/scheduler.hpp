#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcmsim/common.hpp"
#include "pcmsim/device.hpp"
#include "pcmsim/request.hpp"

namespace pcmsim {

class EmptyQueue : public Error {
public:
    EmptyQueue() : Error("read-write queue is empty") {}
};

enum class Policy { BaselineFcfs, MultiPartition, Palp };

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view name);

/// Unit in which the backlogging threshold th_b is measured.
enum class ThbUnit { Cycles, BypassCount };

std::string_view to_string(ThbUnit u);
std::optional<ThbUnit> parse_thb_unit(std::string_view name);

struct SchedulerConfig {
    Policy policy = Policy::Palp;
    std::uint64_t th_b = 8;
    ThbUnit th_b_unit = ThbUnit::Cycles;
    double rapl_limit = 0.3;  // pJ/access
    // MultiPartition only promotes a younger pairable request over the oldest
    // one while the oldest is below th_b. Off: always promote.
    bool multipartition_thb_guard = true;
    std::size_t queue_capacity = 0;  // 0 = unbounded

    void validate() const;
};

/// The controller's FIFO read-write queue, indexed by bank for the policies.
class RwQueue {
public:
    explicit RwQueue(std::size_t capacity = 0) : capacity_(capacity) {}

    /// Appends in arrival order; throws Error if full or ids are not increasing.
    void push(const MemoryRequest& r);
    void erase(RequestId id);

    /// Increments bypass_count of every queued request older than `scheduled`.
    void mark_bypassed(RequestId scheduled);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool full() const { return capacity_ != 0 && entries_.size() >= capacity_; }
    std::size_t capacity() const { return capacity_; }

    const MemoryRequest* find(RequestId id) const;

    /// Entries ordered oldest first.
    const std::map<RequestId, MemoryRequest>& entries() const { return entries_; }

    /// Ids queued for one bank, oldest first (empty set if none).
    const std::set<RequestId>& bank_entries(BankId bank) const;

    /// Banks with at least one queued request.
    const std::unordered_map<BankId, std::set<RequestId>>& by_bank() const { return by_bank_; }

    /// Queued requests of `kind` in `bank`, and how many of them target `partition`.
    std::size_t count(BankId bank, AccessKind kind) const;
    std::size_t count(BankId bank, AccessKind kind, std::uint32_t partition) const;

private:
    struct BankCounts {
        std::array<std::size_t, 2> total{};
        std::array<std::map<std::uint32_t, std::size_t>, 2> per_partition;
    };

    std::size_t capacity_;
    std::map<RequestId, MemoryRequest> entries_;
    std::unordered_map<BankId, std::set<RequestId>> by_bank_;
    std::unordered_map<BankId, BankCounts> counts_;
};

/// Per-bank busy_until view used by the policies.
struct BankAvailability {
    std::vector<Cycle> busy_until;

    explicit BankAvailability(std::size_t banks = 0) : busy_until(banks, 0) {}
    bool is_free(BankId b, Cycle now) const { return b >= busy_until.size() || busy_until[b] <= now; }
};

/// Running-average power state, in pJ/access.
struct PowerLedger {
    Cycle n = 0;        // service cycles committed so far
    double p = 0.0;     // running average
    double p_sa = 0.12; // sense-amplifier energy parameter
    double p_wd = 0.24; // write-driver energy parameter
    double peak = 0.0;
};

Cycle outstanding_age(const MemoryRequest& r, Cycle now);

/// Age compared against th_b: cycles outstanding, or times bypassed.
std::uint64_t backlog_age(const MemoryRequest& r, Cycle now, ThbUnit unit);

/// (N*P + d*P_SA + d*P_WD) / (N + d), with d the pair's service latency
/// (30 cycles for RWR, 48 for RWW under default timing).
double estimate_pair_power(PairKind kind, const PowerLedger& ledger, const TimingParams& timing = {});

/// Folds a scheduled decision into the ledger. Pairs take the pair estimate;
/// single accesses average in p_sa (read) or p_wd (write) over their service
/// cycles.
PowerLedger commit_power(PowerLedger ledger, const ScheduleDecision& decision, Cycle service_cycles);

/// Oldest eligible request, always alone. Eligible means arrived by `now`
/// and targeting a bank that is free at `now`. Returns nullopt if nothing is
/// eligible; throws EmptyQueue if the queue is empty.
std::optional<ScheduleDecision> select_fcfs(const RwQueue& q, const BankAvailability& banks, Cycle now);

/// Oldest eligible request paired read<->write (RWW only) with the oldest
/// opposite-kind request to another partition of its bank. No power check.
std::optional<ScheduleDecision> select_multipartition(const RwQueue& q, const BankAvailability& banks,
                                                      const SchedulerConfig& cfg, Cycle now);

/// Partition-aware policy with backlog and running-average power guards:
///  1. take the oldest eligible request;
///  2. if it is younger than th_b, take instead the oldest eligible request
///     that has another request queued for its bank (if any);
///  3. look for the oldest companion in another partition of that bank,
///     preferring a write (RWW) for a read primary, else a read (RWR);
///  4. keep the pair only if the estimated running power stays within
///     rapl_limit, otherwise schedule the primary alone.
std::optional<ScheduleDecision> select_palp(const RwQueue& q, const BankAvailability& banks,
                                            const SchedulerConfig& cfg, const PowerLedger& ledger,
                                            Cycle now, const TimingParams& timing = {});

/// Dispatches on cfg.policy.
std::optional<ScheduleDecision> select_next(const RwQueue& q, const BankAvailability& banks,
                                            const SchedulerConfig& cfg, const PowerLedger& ledger,
                                            Cycle now, const TimingParams& timing = {});

}  // namespace pcmsim
