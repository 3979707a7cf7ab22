#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "pcmsim/common.hpp"
#include "pcmsim/request.hpp"
#include "pcmsim/scheduler.hpp"
#include "pcmsim/trace.hpp"

namespace pcmsim {

class InconsistentTimestamps : public Error {
public:
    using Error::Error;
};

struct RequestOutcome {
    RequestId id = 0;
    AccessKind kind = AccessKind::Read;
    Cycle enqueue_cycle = 0;
    Cycle schedule_cycle = 0;
    Cycle complete_cycle = 0;
    PairKind paired = PairKind::None;

    Cycle queuing_delay() const { return schedule_cycle - enqueue_cycle; }
    Cycle access_latency() const { return complete_cycle - enqueue_cycle; }
};

struct RunReport {
    std::string policy;
    std::size_t requests = 0;
    std::size_t reads = 0;
    std::size_t writes = 0;
    bool truncated = false;

    Cycle total_cycles = 0;  // last completion; memory-side proxy for execution time
    double avg_queuing_delay = 0.0;
    Cycle max_queuing_delay = 0;
    double avg_access_latency = 0.0;
    Cycle max_access_latency = 0;
    double avg_service_latency = 0.0;

    std::size_t rww_pairs = 0;
    std::size_t rwr_pairs = 0;
    std::size_t single_decisions = 0;
    Cycle bank_busy_cycles = 0;  // sum of service latencies over decisions

    ConflictHistogram conflicts;

    double avg_power = 0.0;   // pJ/access, final running average
    double peak_power = 0.0;  // pJ/access
    double rapl_limit = 0.0;

    double clock_mhz = 256.0;
    double total_time_us = 0.0;  // total_cycles / clock_mhz

    nlohmann::ordered_json config;  // echo of the effective configuration
};

/// Per-run accumulator. Averages are order-insensitive; merge() combines
/// accumulators of disjoint runs (associative and commutative).
class StatsAccumulator {
public:
    /// Throws InconsistentTimestamps unless enqueue <= schedule <= complete.
    void record(const RequestOutcome& outcome);

    void set_power(const PowerLedger& ledger);
    void set_conflicts(const ConflictHistogram& h) { conflicts_ = h; }
    void set_run_info(std::string policy, double rapl_limit, double clock_mhz,
                      nlohmann::ordered_json config = {});
    void mark_truncated() { truncated_ = true; }

    void merge(const StatsAccumulator& other);

    std::size_t count() const { return count_; }
    RunReport finalize() const;

private:
    std::size_t count_ = 0;
    std::size_t reads_ = 0;
    Cycle sum_queuing_ = 0;
    Cycle max_queuing_ = 0;
    Cycle sum_access_ = 0;
    Cycle max_access_ = 0;
    Cycle last_complete_ = 0;
    std::size_t rww_members_ = 0;
    std::size_t rwr_members_ = 0;
    std::size_t singles_ = 0;
    Cycle busy_cycles_ = 0;

    Cycle power_cycles_ = 0;
    double power_weighted_ = 0.0;  // sum of p * n over merged runs
    double peak_ = 0.0;

    ConflictHistogram conflicts_;
    std::string policy_;
    double rapl_limit_ = 0.0;
    double clock_mhz_ = 256.0;
    bool truncated_ = false;
    nlohmann::ordered_json config_;
};

/// Stable key order.
nlohmann::ordered_json to_json(const RunReport& r);

void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const RunReport& r);

}  // namespace pcmsim
