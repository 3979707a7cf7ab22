#include "pcmsim/stats.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace pcmsim {

void StatsAccumulator::record(const RequestOutcome& o) {
    if (o.enqueue_cycle > o.schedule_cycle || o.schedule_cycle > o.complete_cycle) {
        throw InconsistentTimestamps("request " + std::to_string(o.id) + ": enqueue " +
                                     std::to_string(o.enqueue_cycle) + ", schedule " +
                                     std::to_string(o.schedule_cycle) + ", complete " +
                                     std::to_string(o.complete_cycle));
    }
    ++count_;
    if (o.kind == AccessKind::Read) ++reads_;
    sum_queuing_ += o.queuing_delay();
    max_queuing_ = std::max(max_queuing_, o.queuing_delay());
    sum_access_ += o.access_latency();
    max_access_ = std::max(max_access_, o.access_latency());
    last_complete_ = std::max(last_complete_, o.complete_cycle);
    const Cycle service = o.complete_cycle - o.schedule_cycle;
    switch (o.paired) {
        case PairKind::None:
            ++singles_;
            busy_cycles_ += 2 * service;
            break;
        case PairKind::Rww:
            ++rww_members_;
            busy_cycles_ += service;
            break;
        case PairKind::Rwr:
            ++rwr_members_;
            busy_cycles_ += service;
            break;
    }
}

void StatsAccumulator::set_power(const PowerLedger& ledger) {
    power_cycles_ = ledger.n;
    power_weighted_ = ledger.p * static_cast<double>(ledger.n);
    peak_ = ledger.peak;
}

void StatsAccumulator::set_run_info(std::string policy, double rapl_limit, double clock_mhz,
                                    nlohmann::ordered_json config) {
    policy_ = std::move(policy);
    rapl_limit_ = rapl_limit;
    clock_mhz_ = clock_mhz;
    config_ = std::move(config);
}

void StatsAccumulator::merge(const StatsAccumulator& o) {
    count_ += o.count_;
    reads_ += o.reads_;
    sum_queuing_ += o.sum_queuing_;
    max_queuing_ = std::max(max_queuing_, o.max_queuing_);
    sum_access_ += o.sum_access_;
    max_access_ = std::max(max_access_, o.max_access_);
    last_complete_ = std::max(last_complete_, o.last_complete_);
    rww_members_ += o.rww_members_;
    rwr_members_ += o.rwr_members_;
    singles_ += o.singles_;
    busy_cycles_ += o.busy_cycles_;
    power_cycles_ += o.power_cycles_;
    power_weighted_ += o.power_weighted_;
    peak_ = std::max(peak_, o.peak_);
    conflicts_.rr += o.conflicts_.rr;
    conflicts_.rw += o.conflicts_.rw;
    conflicts_.ww += o.conflicts_.ww;
    conflicts_.none += o.conflicts_.none;
    if (policy_ != o.policy_) policy_ = policy_.empty() ? o.policy_ : (o.policy_.empty() ? policy_ : "mixed");
    rapl_limit_ = std::max(rapl_limit_, o.rapl_limit_);
    truncated_ = truncated_ || o.truncated_;
}

RunReport StatsAccumulator::finalize() const {
    RunReport r;
    r.policy = policy_;
    r.requests = count_;
    r.reads = reads_;
    r.writes = count_ - reads_;
    r.truncated = truncated_;
    r.total_cycles = last_complete_;
    if (count_ > 0) {
        const double n = static_cast<double>(count_);
        r.avg_queuing_delay = static_cast<double>(sum_queuing_) / n;
        r.avg_access_latency = static_cast<double>(sum_access_) / n;
        r.avg_service_latency = r.avg_access_latency - r.avg_queuing_delay;
    }
    r.max_queuing_delay = max_queuing_;
    r.max_access_latency = max_access_;
    r.rww_pairs = rww_members_ / 2;
    r.rwr_pairs = rwr_members_ / 2;
    r.single_decisions = singles_;
    // singles were counted twice and pair members once, so halve the sum
    r.bank_busy_cycles = busy_cycles_ / 2;
    r.conflicts = conflicts_;
    r.avg_power = power_cycles_ > 0 ? power_weighted_ / static_cast<double>(power_cycles_) : 0.0;
    r.peak_power = peak_;
    r.rapl_limit = rapl_limit_;
    r.clock_mhz = clock_mhz_;
    r.total_time_us = clock_mhz_ > 0 ? static_cast<double>(last_complete_) / clock_mhz_ : 0.0;
    r.config = config_;
    return r;
}

nlohmann::ordered_json to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["policy"] = r.policy;
    j["requests"] = r.requests;
    j["reads"] = r.reads;
    j["writes"] = r.writes;
    j["truncated"] = r.truncated;
    j["total_cycles"] = r.total_cycles;
    j["avg_queuing_delay"] = r.avg_queuing_delay;
    j["max_queuing_delay"] = r.max_queuing_delay;
    j["avg_access_latency"] = r.avg_access_latency;
    j["max_access_latency"] = r.max_access_latency;
    j["avg_service_latency"] = r.avg_service_latency;
    j["pairs"] = {{"rww", r.rww_pairs}, {"rwr", r.rwr_pairs}, {"single", r.single_decisions}};
    j["bank_busy_cycles"] = r.bank_busy_cycles;
    j["conflicts"] = {{"rr", r.conflicts.rr},
                      {"rw", r.conflicts.rw},
                      {"ww", r.conflicts.ww},
                      {"none", r.conflicts.none}};
    j["power"] = {{"unit", "pJ/access"},
                  {"avg", r.avg_power},
                  {"peak", r.peak_power},
                  {"rapl_limit", r.rapl_limit}};
    j["clock_mhz"] = r.clock_mhz;
    j["total_time_us"] = r.total_time_us;
    j["config"] = r.config;
    return j;
}

void write_report_csv_header(std::ostream& out) {
    out << "policy,requests,reads,writes,truncated,total_cycles,avg_queuing_delay,max_queuing_delay,"
           "avg_access_latency,max_access_latency,avg_service_latency,rww_pairs,rwr_pairs,"
           "single_decisions,bank_busy_cycles,conflicts_rr,conflicts_rw,conflicts_ww,conflicts_none,"
           "avg_power,peak_power,rapl_limit,total_time_us\n";
}

void write_report_csv_row(std::ostream& out, const RunReport& r) {
    const auto old_precision = out.precision(15);
    out << r.policy << ',' << r.requests << ',' << r.reads << ',' << r.writes << ','
        << (r.truncated ? 1 : 0) << ',' << r.total_cycles << ',' << r.avg_queuing_delay << ','
        << r.max_queuing_delay << ',' << r.avg_access_latency << ',' << r.max_access_latency << ','
        << r.avg_service_latency << ',' << r.rww_pairs << ',' << r.rwr_pairs << ','
        << r.single_decisions << ',' << r.bank_busy_cycles << ',' << r.conflicts.rr << ','
        << r.conflicts.rw << ',' << r.conflicts.ww << ',' << r.conflicts.none << ',' << r.avg_power
        << ',' << r.peak_power << ',' << r.rapl_limit << ',' << r.total_time_us << '\n';
    out.precision(old_precision);
}

}  // namespace pcmsim
