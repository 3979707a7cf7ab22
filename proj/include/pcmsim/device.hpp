#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcmsim/common.hpp"
#include "pcmsim/request.hpp"

namespace pcmsim {

class IllegalPair : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class CommandParseError : public Error {
public:
    CommandParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Bank timing in memory-clock cycles. The A-x-P values are end-to-end bank
/// service latencies; the remaining parameters place commands inside them.
struct TimingParams {
    Cycle a_r_p = 19;
    Cycle a_w_p = 47;
    Cycle t_rcd = 1;
    Cycle rl = 10;
    Cycle wl = 3;
    Cycle t_wr = 35;
    Cycle a_rww_p = 48;
    Cycle a_rwr_p = 30;
    Cycle transfer_read_pair = 17;  // burst + 1 (TRANSFER) + burst
    double clock_mhz = 256.0;

    /// Throws ConfigError if a pair fails to beat serial service or the
    /// command offsets of any sequence would collide.
    void validate() const;

    Cycle read_burst() const { return (transfer_read_pair - 1) / 2; }
    Cycle single_service(AccessKind k) const { return k == AccessKind::Read ? a_r_p : a_w_p; }
    Cycle pair_service(PairKind k) const;

    friend bool operator==(const TimingParams&, const TimingParams&) = default;
};

enum class CommandKind { Activate, Read, Write, Precharge, Rww, Rwr, Decouple, Transfer };

std::string_view to_string(CommandKind k);  // A, R, W, P, RWW, RWR, D, T
std::optional<CommandKind> parse_command_kind(std::string_view token);

struct Command {
    CommandKind kind = CommandKind::Activate;
    BankId bank = 0;
    // ACTIVATE: target partition (required). RWW: the partition being
    // written (optional; defaults to the first activated partition).
    std::optional<std::uint32_t> partition;
    std::uint32_t row = 0;
    std::uint32_t column = 0;
    Cycle issue_cycle = 0;

    friend bool operator==(const Command&, const Command&) = default;
};

/// Pass-transistor state of one peripheral structure serving partitions i
/// (first activated) and j (second activated).
///   M0: write driver -> i    M1: sense amp -> i
///   M2: write driver -> j    M3: sense amp -> j
///   M4: pulse shaper <-> verify logic (OFF = decoupled)
///   M5/M6: data-bus select (M5 ON routes the verify logic's data)
struct SwitchConfig {
    std::array<bool, 7> m{false, false, false, false, true, false, true};

    static SwitchConfig idle() { return {}; }
    static SwitchConfig from_bits(std::initializer_list<int> on);

    bool decoupled() const { return !m[4]; }
    bool is_valid() const;
    std::string to_string() const;

    friend bool operator==(const SwitchConfig&, const SwitchConfig&) = default;
};

/// Throws InvalidConfig unless the configuration is one of the legal rows
/// (idle, single access, read-with-write, or decoupled read-with-read).
void validate_switch(const SwitchConfig& sw);

/// Access performed on the first- and second-activated partitions.
struct PartitionRoles {
    std::optional<AccessKind> first;
    std::optional<AccessKind> second;
};

SwitchConfig transistor_config(PairKind kind, const PartitionRoles& roles);
SwitchConfig transistor_config(const ScheduleDecision& decision);

/// RWW_PAIR for a read and a write, RWR_PAIR for two reads, both to distinct
/// partitions of one bank; NONE otherwise.
PairKind legal_pairing(const MemoryRequest& a, const MemoryRequest& b);

struct CommandSequence {
    std::vector<Command> commands;  // issue cycles are absolute
    Cycle service_cycles = 0;
};

/// Commands for a decision, starting at decision.decision_cycle.
///   read  : A R P            (a_r_p)
///   write : A W P            (a_w_p)
///   RWW   : A A RWW P        (a_rww_p)
///   RWR   : A A D RWR T P    (a_rwr_p)
/// Throws IllegalPair if a paired decision does not pass legal_pairing.
CommandSequence command_sequence(const ScheduleDecision& decision, const TimingParams& timing);

enum class DriverMode { Write, Decoupled };

enum class TxnPhase { Idle, Activated1, Activated2, Decoupled, Single, RwwIssued, RwrIssued, Transferred };

struct BankState {
    std::vector<std::uint32_t> open_partitions;  // activation order, size <= 2
    SwitchConfig sw;
    DriverMode driver_mode = DriverMode::Write;
    Cycle busy_until = 0;
    Cycle txn_start = 0;
    TxnPhase phase = TxnPhase::Idle;
    std::vector<Command> pending_sequence;  // commands of the open transaction
};

enum class ViolationKind { Timing, Sequence, InvalidConfig };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    BankId bank = 0;
    Cycle cycle = 0;
    std::size_t index = 0;  // position in the replayed stream
    std::string message;
};

/// Applies one command to a bank. On success the state is updated and
/// nullopt is returned; on violation the state is left untouched.
std::optional<Violation> issue(BankState& bank, const Command& cmd, Cycle now,
                               const TimingParams& timing);

struct VerifyReport {
    std::vector<Violation> violations;
    Cycle last_retire_cycle = 0;  // max busy_until over closed transactions

    bool ok() const { return violations.empty(); }
};

/// Replays a stream on fresh banks. The stream must be ordered by issue
/// cycle; out-of-order entries are reported as sequence violations, as are
/// transactions still open at the end.
VerifyReport verify_stream(std::span<const Command> commands, const TimingParams& timing);

/// Text form, one command per line: `cycle KIND bank [partition row column]`.
/// ACTIVATE carries all three operands; RWW may carry the written partition.
std::vector<Command> parse_command_stream(std::istream& in);
void write_command_stream(std::ostream& out, std::span<const Command> commands);

}  // namespace pcmsim
