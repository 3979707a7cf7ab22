#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pcmsim/config.hpp"
#include "pcmsim/device.hpp"
#include "pcmsim/scheduler.hpp"
#include "pcmsim/stats.hpp"
#include "pcmsim/trace.hpp"

namespace pcmsim {

/// Chooses the next decision given the controller state, or nullopt to wait
/// for the next event.
using DecisionSource = std::function<std::optional<ScheduleDecision>(
    const RwQueue&, const BankAvailability&, const PowerLedger&, Cycle now)>;

/// Called for every decision before it is applied, with the state the policy saw.
using DecisionObserver = std::function<void(const ScheduleDecision&, const RwQueue&,
                                            const BankAvailability&, const PowerLedger&, Cycle now)>;

struct DecisionRecord {
    ScheduleDecision decision;
    Cycle service_cycles = 0;
};

struct SimulationResult {
    RunReport report;
    std::vector<Command> commands;  // ordered by (issue cycle, bank)
    std::vector<DecisionRecord> decisions;
    std::vector<RequestOutcome> outcomes;
    std::vector<std::pair<Cycle, double>> power_trajectory;  // (decision cycle, P after commit)
    PowerLedger ledger;
    VerifyReport verification;
};

/// Event loop: arrivals are enqueued, then the source is asked for decisions
/// until it declines; time advances to the next arrival or bank release.
/// Request ids are trace indices. The emitted command stream is replayed
/// through verify_stream before returning.
SimulationResult simulate(const SimConfig& cfg, const Trace& trace, const DecisionSource& source,
                          const DecisionObserver& observer = {});

/// Runs the configured policy.
SimulationResult simulate(const SimConfig& cfg, const Trace& trace, const DecisionObserver& observer = {});

/// A fixed schedule: each group holds one or two trace indices and is issued
/// as soon as all of its requests are queued and their bank is free.
/// Throws IllegalPair for a two-request group that cannot pair.
DecisionSource scripted_source(std::vector<std::vector<RequestId>> groups);

}  // namespace pcmsim
