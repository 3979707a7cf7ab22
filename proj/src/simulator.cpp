#include "pcmsim/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <memory>

namespace pcmsim {

namespace {

SimulationResult run(const SimConfig& cfg, const Trace& trace, const DecisionSource& source,
                     const DecisionObserver& observer, std::string policy_name) {
    cfg.timing.validate();
    cfg.scheduler.validate();
    cfg.mapping.check_geometry(cfg.geometry);

    SimulationResult result;
    const Geometry& g = cfg.geometry;
    const TimingParams& timing = cfg.timing;

    std::vector<MemoryRequest> requests;
    requests.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i > 0 && trace[i].arrival_cycle < trace[i - 1].arrival_cycle) {
            throw Error("trace arrival cycles must be nondecreasing (record " + std::to_string(i) + ")");
        }
        MemoryRequest r;
        r.id = i;
        r.arrival_cycle = trace[i].arrival_cycle;
        r.kind = trace[i].kind;
        r.address = decode(trace[i].address, cfg.mapping, g);
        r.bank = r.address.global_bank(g);
        requests.push_back(r);
    }

    RwQueue queue(cfg.scheduler.queue_capacity);
    BankAvailability banks(g.total_banks());
    PowerLedger ledger;
    ledger.p_sa = cfg.p_sa;
    ledger.p_wd = cfg.p_wd;
    StatsAccumulator stats;
    std::deque<std::size_t> waiting;  // arrived, queue full
    std::size_t next_arrival = 0;
    Cycle now = requests.empty() ? 0 : requests.front().arrival_cycle;
    bool truncated = false;

    auto admit = [&] {
        while (next_arrival < requests.size() && requests[next_arrival].arrival_cycle <= now) {
            waiting.push_back(next_arrival++);
        }
        while (!waiting.empty() && !queue.full()) {
            MemoryRequest r = requests[waiting.front()];
            r.enqueue_cycle = now;
            queue.push(r);
            waiting.pop_front();
        }
    };

    auto finish = [&](const MemoryRequest& r, const ScheduleDecision& d, Cycle service) {
        RequestOutcome o{r.id, r.kind, r.enqueue_cycle, now, now + service, d.pair_kind};
        stats.record(o);
        result.outcomes.push_back(o);
    };

    while (true) {
        admit();
        while (!queue.empty()) {
            auto decision = source(queue, banks, ledger, now);
            if (!decision) break;
            if (!queue.find(decision->primary.id) ||
                (decision->paired && !queue.find(decision->paired->id))) {
                throw Error("decision names a request that is not queued");
            }
            if (!banks.is_free(decision->primary.bank, now)) throw Error("decision targets a busy bank");
            if (observer) observer(*decision, queue, banks, ledger, now);

            CommandSequence seq = command_sequence(*decision, timing);
            result.commands.insert(result.commands.end(), seq.commands.begin(), seq.commands.end());
            banks.busy_until[decision->primary.bank] = now + seq.service_cycles;

            finish(decision->primary, *decision, seq.service_cycles);
            RequestId youngest = decision->primary.id;
            queue.erase(decision->primary.id);
            if (decision->paired) {
                finish(*decision->paired, *decision, seq.service_cycles);
                youngest = std::max(youngest, decision->paired->id);
                queue.erase(decision->paired->id);
            }
            queue.mark_bypassed(youngest);

            ledger = commit_power(ledger, *decision, seq.service_cycles);
            result.power_trajectory.emplace_back(now, ledger.p);
            result.decisions.push_back({*decision, seq.service_cycles});
            admit();
        }

        if (next_arrival >= requests.size() && waiting.empty() && queue.empty()) break;

        Cycle next = std::numeric_limits<Cycle>::max();
        if (next_arrival < requests.size()) next = requests[next_arrival].arrival_cycle;
        for (Cycle busy : banks.busy_until) {
            if (busy > now) next = std::min(next, busy);
        }
        if (next == std::numeric_limits<Cycle>::max()) {
            throw Error("scheduler stalled at cycle " + std::to_string(now) + " with " +
                        std::to_string(queue.size()) + " queued requests");
        }
        if (cfg.max_cycles != 0 && next >= cfg.max_cycles) {
            truncated = true;
            break;
        }
        now = next;
    }

    std::stable_sort(result.commands.begin(), result.commands.end(), [](const Command& a, const Command& b) {
        return a.issue_cycle != b.issue_cycle ? a.issue_cycle < b.issue_cycle : a.bank < b.bank;
    });
    result.verification = verify_stream(result.commands, timing);

    result.ledger = ledger;
    stats.set_power(ledger);
    stats.set_conflicts(classify_conflicts(trace, cfg.mapping, g, cfg.classify_window, timing));
    stats.set_run_info(std::move(policy_name), cfg.scheduler.rapl_limit, timing.clock_mhz, to_json(cfg));
    if (truncated) stats.mark_truncated();
    result.report = stats.finalize();
    return result;
}

}  // namespace

SimulationResult simulate(const SimConfig& cfg, const Trace& trace, const DecisionSource& source,
                          const DecisionObserver& observer) {
    return run(cfg, trace, source, observer, "SCRIPTED");
}

SimulationResult simulate(const SimConfig& cfg, const Trace& trace, const DecisionObserver& observer) {
    const SchedulerConfig sched = cfg.scheduler;
    const TimingParams timing = cfg.timing;
    DecisionSource source = [sched, timing](const RwQueue& q, const BankAvailability& b,
                                            const PowerLedger& ledger, Cycle now) {
        return select_next(q, b, sched, ledger, now, timing);
    };
    return run(cfg, trace, source, observer, std::string(to_string(cfg.scheduler.policy)));
}

DecisionSource scripted_source(std::vector<std::vector<RequestId>> groups) {
    for (const auto& grp : groups) {
        if (grp.empty() || grp.size() > 2) throw IllegalPair("scripted groups hold one or two requests");
    }
    auto cursor = std::make_shared<std::size_t>(0);
    auto script = std::make_shared<std::vector<std::vector<RequestId>>>(std::move(groups));
    return [cursor, script](const RwQueue& q, const BankAvailability& banks, const PowerLedger&,
                            Cycle now) -> std::optional<ScheduleDecision> {
        if (*cursor >= script->size()) return std::nullopt;
        const auto& grp = (*script)[*cursor];
        const MemoryRequest* a = q.find(grp[0]);
        if (!a || !banks.is_free(a->bank, now)) return std::nullopt;
        ScheduleDecision d{*a, std::nullopt, PairKind::None, now};
        if (grp.size() == 2) {
            const MemoryRequest* b = q.find(grp[1]);
            if (!b) return std::nullopt;
            d.pair_kind = legal_pairing(*a, *b);
            if (d.pair_kind == PairKind::None) {
                throw IllegalPair("scripted requests " + std::to_string(grp[0]) + " and " +
                                  std::to_string(grp[1]) + " cannot be paired");
            }
            d.paired = *b;
        }
        ++*cursor;
        return d;
    };
}

}  // namespace pcmsim
