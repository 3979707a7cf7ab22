#include "pcmsim/scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace pcmsim {

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::BaselineFcfs: return "BASELINE_FCFS";
        case Policy::MultiPartition: return "MULTIPARTITION";
        case Policy::Palp: return "PALP";
    }
    return "?";
}

std::optional<Policy> parse_policy(std::string_view name) {
    for (auto p : {Policy::BaselineFcfs, Policy::MultiPartition, Policy::Palp}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

std::string_view to_string(ThbUnit u) { return u == ThbUnit::Cycles ? "cycles" : "bypass_count"; }

std::optional<ThbUnit> parse_thb_unit(std::string_view name) {
    if (name == "cycles") return ThbUnit::Cycles;
    if (name == "bypass_count") return ThbUnit::BypassCount;
    return std::nullopt;
}

void SchedulerConfig::validate() const {
    if (!(rapl_limit > 0.0) || !std::isfinite(rapl_limit)) {
        throw ConfigError("scheduler: rapl_limit must be a finite value > 0");
    }
}

// ---------------------------------------------------------------------------
// RwQueue

namespace {
std::size_t kind_index(AccessKind k) { return k == AccessKind::Read ? 0 : 1; }
const std::set<RequestId> kNoEntries;
}  // namespace

void RwQueue::push(const MemoryRequest& r) {
    if (full()) throw Error("read-write queue is full");
    if (!entries_.empty() && r.id <= entries_.rbegin()->first) {
        throw Error("request ids must increase in arrival order (got " + std::to_string(r.id) + ")");
    }
    if (r.enqueue_cycle < r.arrival_cycle) throw Error("request enqueued before it arrived");
    entries_.emplace(r.id, r);
    by_bank_[r.bank].insert(r.id);
    auto& c = counts_[r.bank];
    ++c.total[kind_index(r.kind)];
    ++c.per_partition[kind_index(r.kind)][r.partition()];
}

void RwQueue::erase(RequestId id) {
    auto it = entries_.find(id);
    if (it == entries_.end()) return;
    const MemoryRequest& r = it->second;
    auto bank_it = by_bank_.find(r.bank);
    bank_it->second.erase(id);
    if (bank_it->second.empty()) by_bank_.erase(bank_it);
    auto& c = counts_[r.bank];
    --c.total[kind_index(r.kind)];
    auto& pp = c.per_partition[kind_index(r.kind)];
    if (--pp[r.partition()] == 0) pp.erase(r.partition());
    entries_.erase(it);
}

void RwQueue::mark_bypassed(RequestId scheduled) {
    for (auto it = entries_.begin(); it != entries_.end() && it->first < scheduled; ++it) {
        ++it->second.bypass_count;
    }
}

const MemoryRequest* RwQueue::find(RequestId id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

const std::set<RequestId>& RwQueue::bank_entries(BankId bank) const {
    auto it = by_bank_.find(bank);
    return it == by_bank_.end() ? kNoEntries : it->second;
}

std::size_t RwQueue::count(BankId bank, AccessKind kind) const {
    auto it = counts_.find(bank);
    return it == counts_.end() ? 0 : it->second.total[kind_index(kind)];
}

std::size_t RwQueue::count(BankId bank, AccessKind kind, std::uint32_t partition) const {
    auto it = counts_.find(bank);
    if (it == counts_.end()) return 0;
    const auto& pp = it->second.per_partition[kind_index(kind)];
    auto p = pp.find(partition);
    return p == pp.end() ? 0 : p->second;
}

// ---------------------------------------------------------------------------
// Ages and power

Cycle outstanding_age(const MemoryRequest& r, Cycle now) {
    return now >= r.enqueue_cycle ? now - r.enqueue_cycle : 0;
}

std::uint64_t backlog_age(const MemoryRequest& r, Cycle now, ThbUnit unit) {
    return unit == ThbUnit::Cycles ? outstanding_age(r, now) : r.bypass_count;
}

double estimate_pair_power(PairKind kind, const PowerLedger& ledger, const TimingParams& timing) {
    const double d = static_cast<double>(timing.pair_service(kind));
    const double n = static_cast<double>(ledger.n);
    return (n * ledger.p + d * ledger.p_sa + d * ledger.p_wd) / (n + d);
}

PowerLedger commit_power(PowerLedger ledger, const ScheduleDecision& decision, Cycle service_cycles) {
    if (service_cycles == 0) return ledger;
    const double d = static_cast<double>(service_cycles);
    const double n = static_cast<double>(ledger.n);
    if (decision.is_pair()) {
        ledger.p = (n * ledger.p + d * ledger.p_sa + d * ledger.p_wd) / (n + d);
    } else {
        const double e = decision.primary.is_read() ? ledger.p_sa : ledger.p_wd;
        // Incremental form of (N*P + d*e)/(N+d); exact when e == P, and kept
        // between P and e under rounding.
        const double mixed = ledger.p + (d / (n + d)) * (e - ledger.p);
        ledger.p = std::clamp(mixed, std::min(ledger.p, e), std::max(ledger.p, e));
    }
    ledger.n += service_cycles;
    ledger.peak = std::max(ledger.peak, ledger.p);
    return ledger;
}

// ---------------------------------------------------------------------------
// Policies

namespace {

// Oldest arrived request of a free bank. Per-bank sets are in arrival order,
// so only each bank's front needs checking.
const MemoryRequest* oldest_eligible(const RwQueue& q, const BankAvailability& banks, Cycle now,
                                     bool require_bank_conflict) {
    const MemoryRequest* best = nullptr;
    for (const auto& [bank, ids] : q.by_bank()) {
        if (!banks.is_free(bank, now)) continue;
        const MemoryRequest* front = q.find(*ids.begin());
        if (front->arrival_cycle > now) continue;
        if (require_bank_conflict) {
            auto second = std::next(ids.begin());
            if (second == ids.end() || q.find(*second)->arrival_cycle > now) continue;
        }
        if (!best || front->id < best->id) best = front;
    }
    return best;
}

// Oldest arrived request of `kind` in another partition of x's bank.
const MemoryRequest* oldest_companion(const RwQueue& q, const MemoryRequest& x, AccessKind kind,
                                      Cycle now) {
    if (q.count(x.bank, kind) == q.count(x.bank, kind, x.partition())) return nullptr;
    for (RequestId id : q.bank_entries(x.bank)) {
        const MemoryRequest* r = q.find(id);
        if (r->arrival_cycle > now) break;
        if (r->id == x.id || r->kind != kind || r->partition() == x.partition()) continue;
        return r;
    }
    return nullptr;
}

AccessKind opposite(AccessKind k) { return k == AccessKind::Read ? AccessKind::Write : AccessKind::Read; }

ScheduleDecision alone(const MemoryRequest& r, Cycle now) {
    return ScheduleDecision{r, std::nullopt, PairKind::None, now};
}

ScheduleDecision pair(const MemoryRequest& a, const MemoryRequest& b, Cycle now) {
    return ScheduleDecision{a, b, legal_pairing(a, b), now};
}

}  // namespace

std::optional<ScheduleDecision> select_fcfs(const RwQueue& q, const BankAvailability& banks, Cycle now) {
    if (q.empty()) throw EmptyQueue();
    const MemoryRequest* x = oldest_eligible(q, banks, now, false);
    if (!x) return std::nullopt;
    return alone(*x, now);
}

std::optional<ScheduleDecision> select_multipartition(const RwQueue& q, const BankAvailability& banks,
                                                      const SchedulerConfig& cfg, Cycle now) {
    if (q.empty()) throw EmptyQueue();
    const MemoryRequest* x = oldest_eligible(q, banks, now, false);
    if (!x) return std::nullopt;
    if (const MemoryRequest* c = oldest_companion(q, *x, opposite(x->kind), now)) return pair(*x, *c, now);

    const bool may_promote =
        !cfg.multipartition_thb_guard || backlog_age(*x, now, cfg.th_b_unit) < cfg.th_b;
    if (may_promote) {
        // Oldest eligible request that has a read<->write partner.
        const MemoryRequest* best = nullptr;
        const MemoryRequest* best_partner = nullptr;
        for (const auto& [bank, ids] : q.by_bank()) {
            if (!banks.is_free(bank, now)) continue;
            if (q.count(bank, AccessKind::Read) == 0 || q.count(bank, AccessKind::Write) == 0) continue;
            for (RequestId id : ids) {
                const MemoryRequest* r = q.find(id);
                if (r->arrival_cycle > now || (best && r->id > best->id)) break;
                if (const MemoryRequest* c = oldest_companion(q, *r, opposite(r->kind), now)) {
                    best = r;
                    best_partner = c;
                    break;
                }
            }
        }
        if (best) return pair(*best, *best_partner, now);
    }
    return alone(*x, now);
}

std::optional<ScheduleDecision> select_palp(const RwQueue& q, const BankAvailability& banks,
                                            const SchedulerConfig& cfg, const PowerLedger& ledger,
                                            Cycle now, const TimingParams& timing) {
    if (q.empty()) throw EmptyQueue();
    const MemoryRequest* x = oldest_eligible(q, banks, now, false);
    if (!x) return std::nullopt;
    if (backlog_age(*x, now, cfg.th_b_unit) < cfg.th_b) {
        if (const MemoryRequest* y = oldest_eligible(q, banks, now, true)) x = y;
    }

    const MemoryRequest* companion = nullptr;
    PairKind kind = PairKind::None;
    if (!x->is_read()) {
        companion = oldest_companion(q, *x, AccessKind::Read, now);
        kind = PairKind::Rww;
    } else if ((companion = oldest_companion(q, *x, AccessKind::Write, now))) {
        kind = PairKind::Rww;
    } else {
        companion = oldest_companion(q, *x, AccessKind::Read, now);
        kind = PairKind::Rwr;
    }
    if (!companion) return alone(*x, now);
    if (estimate_pair_power(kind, ledger, timing) <= cfg.rapl_limit) return pair(*x, *companion, now);
    return alone(*x, now);
}

std::optional<ScheduleDecision> select_next(const RwQueue& q, const BankAvailability& banks,
                                            const SchedulerConfig& cfg, const PowerLedger& ledger,
                                            Cycle now, const TimingParams& timing) {
    switch (cfg.policy) {
        case Policy::BaselineFcfs: return select_fcfs(q, banks, now);
        case Policy::MultiPartition: return select_multipartition(q, banks, cfg, now);
        case Policy::Palp: return select_palp(q, banks, cfg, ledger, now, timing);
    }
    return std::nullopt;
}

}  // namespace pcmsim
