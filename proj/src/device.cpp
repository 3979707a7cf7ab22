#include "pcmsim/device.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pcmsim {

std::string_view to_string(PairKind k) {
    switch (k) {
        case PairKind::None: return "NONE";
        case PairKind::Rww: return "RWW_PAIR";
        case PairKind::Rwr: return "RWR_PAIR";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Timing

Cycle TimingParams::pair_service(PairKind k) const {
    switch (k) {
        case PairKind::Rww: return a_rww_p;
        case PairKind::Rwr: return a_rwr_p;
        case PairKind::None: break;
    }
    throw IllegalPair("no pair service latency for PairKind NONE");
}

void TimingParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("timing: " + msg); };
    if (t_rcd < 1) fail("t_rcd must be >= 1");
    if (a_r_p < t_rcd + 2) fail("a_r_p must leave room for READ and PRECHARGE");
    if (a_w_p < t_rcd + 2) fail("a_w_p must leave room for WRITE and PRECHARGE");
    if (a_rww_p < 2 * t_rcd + 2) fail("a_rww_p must leave room for two ACTIVATEs, RWW and PRECHARGE");
    if (transfer_read_pair < 3) fail("transfer_read_pair must be >= 3");
    if (2 * t_rcd + 1 + rl + read_burst() + 1 >= a_rwr_p) {
        fail("a_rwr_p too short for A A D RWR T P at the configured rl/transfer_read_pair");
    }
    if (!(a_rww_p < a_r_p + a_w_p)) fail("a_rww_p must be < a_r_p + a_w_p");
    if (!(a_rwr_p < 2 * a_r_p)) fail("a_rwr_p must be < 2 * a_r_p");
    if (!(clock_mhz > 0.0)) fail("clock_mhz must be > 0");
}

// ---------------------------------------------------------------------------
// Commands

std::string_view to_string(CommandKind k) {
    switch (k) {
        case CommandKind::Activate: return "A";
        case CommandKind::Read: return "R";
        case CommandKind::Write: return "W";
        case CommandKind::Precharge: return "P";
        case CommandKind::Rww: return "RWW";
        case CommandKind::Rwr: return "RWR";
        case CommandKind::Decouple: return "D";
        case CommandKind::Transfer: return "T";
    }
    return "?";
}

std::optional<CommandKind> parse_command_kind(std::string_view token) {
    for (auto k : {CommandKind::Activate, CommandKind::Read, CommandKind::Write,
                   CommandKind::Precharge, CommandKind::Rww, CommandKind::Rwr,
                   CommandKind::Decouple, CommandKind::Transfer}) {
        if (to_string(k) == token) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Switch configurations

SwitchConfig SwitchConfig::from_bits(std::initializer_list<int> on) {
    SwitchConfig sw;
    sw.m.fill(false);
    for (int i : on) {
        if (i < 0 || i > 6) throw InvalidConfig("transistor index out of range: M" + std::to_string(i));
        sw.m[static_cast<std::size_t>(i)] = true;
    }
    return sw;
}

namespace {

// M0..M6 packed as bit i.
constexpr unsigned kWriteTail = (1u << 4) | (1u << 6);       // M4 ON, M5 OFF, M6 ON
constexpr unsigned kDecoupledTail = 1u << 6;                 // M4 OFF, M5 OFF, M6 ON
constexpr unsigned kTransferTail = 1u << 5;                  // M4 OFF, M5 ON, M6 OFF

constexpr unsigned kValidRows[] = {
    kWriteTail,                        // idle
    0b0001 | kWriteTail,               // write i
    0b0010 | kWriteTail,               // read i
    0b0100 | kWriteTail,               // write j
    0b1000 | kWriteTail,               // read j
    0b1001 | kWriteTail,               // write i, read j
    0b0110 | kWriteTail,               // read i, write j
    kDecoupledTail,                    // decoupled, nothing connected yet
    0b0110 | kDecoupledTail,           // sense amp <- i, verify logic <- j
    0b0110 | kTransferTail,
    0b1001 | kDecoupledTail,           // verify logic <- i, sense amp <- j
    0b1001 | kTransferTail,
};

unsigned pack(const SwitchConfig& sw) {
    unsigned bits = 0;
    for (std::size_t i = 0; i < sw.m.size(); ++i) {
        if (sw.m[i]) bits |= 1u << i;
    }
    return bits;
}

SwitchConfig unpack(unsigned bits) {
    SwitchConfig sw;
    for (std::size_t i = 0; i < sw.m.size(); ++i) sw.m[i] = (bits >> i) & 1u;
    return sw;
}

}  // namespace

bool SwitchConfig::is_valid() const {
    const unsigned bits = pack(*this);
    return std::find(std::begin(kValidRows), std::end(kValidRows), bits) != std::end(kValidRows);
}

std::string SwitchConfig::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ' ';
        s += 'M';
        s += static_cast<char>('0' + i);
        s += m[i] ? "=ON" : "=OFF";
    }
    return s;
}

void validate_switch(const SwitchConfig& sw) {
    if (!sw.is_valid()) throw InvalidConfig("invalid transistor configuration: " + sw.to_string());
}

SwitchConfig transistor_config(PairKind kind, const PartitionRoles& roles) {
    auto bad = [] { return InvalidConfig("partition roles do not match the pair kind"); };
    unsigned paths = 0;
    unsigned tail = kWriteTail;
    switch (kind) {
        case PairKind::None:
            if (roles.first.has_value() == roles.second.has_value()) throw bad();
            if (roles.first) {
                paths = *roles.first == AccessKind::Write ? 0b0001 : 0b0010;
            } else {
                paths = *roles.second == AccessKind::Write ? 0b0100 : 0b1000;
            }
            break;
        case PairKind::Rww:
            if (!roles.first || !roles.second || *roles.first == *roles.second) throw bad();
            paths = *roles.first == AccessKind::Write ? 0b1001 : 0b0110;
            break;
        case PairKind::Rwr:
            if (roles.first != AccessKind::Read || roles.second != AccessKind::Read) throw bad();
            paths = 0b0110;
            tail = kDecoupledTail;
            break;
    }
    SwitchConfig sw = unpack(paths | tail);
    validate_switch(sw);
    return sw;
}

SwitchConfig transistor_config(const ScheduleDecision& decision) {
    PartitionRoles roles{decision.primary.kind, std::nullopt};
    if (decision.is_pair()) {
        if (!decision.paired) throw IllegalPair("paired decision without a companion request");
        roles.second = decision.paired->kind;
    }
    return transistor_config(decision.pair_kind, roles);
}

PairKind legal_pairing(const MemoryRequest& a, const MemoryRequest& b) {
    if (!a.address.same_bank(b.address)) return PairKind::None;
    if (a.partition() == b.partition()) return PairKind::None;
    if (a.is_read() && b.is_read()) return PairKind::Rwr;
    if (a.is_read() != b.is_read()) return PairKind::Rww;
    return PairKind::None;
}

// ---------------------------------------------------------------------------
// Command sequences

namespace {

Command activate(const MemoryRequest& r, Cycle at) {
    return Command{CommandKind::Activate, r.bank, r.partition(), r.address.row, r.address.column, at};
}

Command plain(CommandKind k, BankId bank, Cycle at) {
    return Command{k, bank, std::nullopt, 0, 0, at};
}

}  // namespace

CommandSequence command_sequence(const ScheduleDecision& d, const TimingParams& t) {
    CommandSequence seq;
    const Cycle s = d.decision_cycle;
    const BankId bank = d.primary.bank;
    auto& out = seq.commands;

    if (!d.is_pair()) {
        if (d.paired) throw IllegalPair("unpaired decision carries a companion request");
        const bool read = d.primary.is_read();
        seq.service_cycles = t.single_service(d.primary.kind);
        out.push_back(activate(d.primary, s));
        out.push_back(plain(read ? CommandKind::Read : CommandKind::Write, bank, s + t.t_rcd));
        out.push_back(plain(CommandKind::Precharge, bank, s + seq.service_cycles - 1));
        return seq;
    }

    if (!d.paired) throw IllegalPair("paired decision without a companion request");
    const PairKind actual = legal_pairing(d.primary, *d.paired);
    if (actual == PairKind::None || actual != d.pair_kind) {
        throw IllegalPair("requests " + std::to_string(d.primary.id) + " and " +
                          std::to_string(d.paired->id) + " cannot form " +
                          std::string(to_string(d.pair_kind)));
    }
    seq.service_cycles = t.pair_service(d.pair_kind);
    out.push_back(activate(d.primary, s));
    out.push_back(activate(*d.paired, s + t.t_rcd));
    const Cycle third = s + 2 * t.t_rcd;
    if (d.pair_kind == PairKind::Rww) {
        const MemoryRequest& w = d.primary.is_read() ? *d.paired : d.primary;
        Command rww = plain(CommandKind::Rww, bank, third);
        rww.partition = w.partition();
        out.push_back(rww);
    } else {
        out.push_back(plain(CommandKind::Decouple, bank, third));
        out.push_back(plain(CommandKind::Rwr, bank, third + 1));
        out.push_back(plain(CommandKind::Transfer, bank, third + 1 + t.rl + t.read_burst()));
    }
    out.push_back(plain(CommandKind::Precharge, bank, s + seq.service_cycles - 1));
    return seq;
}

// ---------------------------------------------------------------------------
// Bank state machine

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Timing: return "TimingViolation";
        case ViolationKind::Sequence: return "SequenceViolation";
        case ViolationKind::InvalidConfig: return "InvalidConfig";
    }
    return "?";
}

std::optional<Violation> issue(BankState& bank, const Command& cmd, Cycle now,
                               const TimingParams& t) {
    auto violation = [&](ViolationKind k, std::string msg) {
        return Violation{k, cmd.bank, now, 0,
                         std::string(to_string(cmd.kind)) + " @" + std::to_string(now) + ": " +
                             std::move(msg)};
    };
    auto off_schedule = [&](Cycle expected) {
        return violation(ViolationKind::Timing,
                         "expected at cycle " + std::to_string(expected));
    };
    auto out_of_sequence = [&](std::string_view why) {
        return violation(ViolationKind::Sequence, std::string(why));
    };

    BankState next = bank;
    const Cycle s = bank.txn_start;

    auto set_switch = [&](const SwitchConfig& sw) -> std::optional<Violation> {
        if (!sw.is_valid()) return violation(ViolationKind::InvalidConfig, sw.to_string());
        next.sw = sw;
        return std::nullopt;
    };
    auto roles_of_open = [&](std::optional<std::uint32_t> write_partition) {
        PartitionRoles roles{AccessKind::Read, AccessKind::Read};
        if (!write_partition || *write_partition == bank.open_partitions[0]) {
            roles.first = AccessKind::Write;
        } else {
            roles.second = AccessKind::Write;
        }
        return roles;
    };

    switch (bank.phase) {
        case TxnPhase::Idle:
            if (cmd.kind != CommandKind::Activate) return out_of_sequence("no open transaction");
            if (!cmd.partition) return out_of_sequence("ACTIVATE without a partition");
            if (now < bank.busy_until) {
                return violation(ViolationKind::Timing,
                                 "bank busy until " + std::to_string(bank.busy_until));
            }
            next.open_partitions = {*cmd.partition};
            next.txn_start = now;
            next.phase = TxnPhase::Activated1;
            next.pending_sequence.clear();
            break;

        case TxnPhase::Activated1:
            switch (cmd.kind) {
                case CommandKind::Activate:
                    if (!cmd.partition) return out_of_sequence("ACTIVATE without a partition");
                    if (*cmd.partition == bank.open_partitions[0]) {
                        return out_of_sequence("partition already open");
                    }
                    if (now != s + t.t_rcd) return off_schedule(s + t.t_rcd);
                    next.open_partitions.push_back(*cmd.partition);
                    next.phase = TxnPhase::Activated2;
                    break;
                case CommandKind::Read:
                case CommandKind::Write: {
                    if (now != s + t.t_rcd) return off_schedule(s + t.t_rcd);
                    const auto k = cmd.kind == CommandKind::Read ? AccessKind::Read : AccessKind::Write;
                    if (auto v = set_switch(transistor_config(PairKind::None, {k, std::nullopt}))) return v;
                    next.busy_until = s + t.single_service(k);
                    next.phase = TxnPhase::Single;
                    break;
                }
                default:
                    return out_of_sequence("expected ACTIVATE, READ or WRITE after ACTIVATE");
            }
            break;

        case TxnPhase::Activated2:
            switch (cmd.kind) {
                case CommandKind::Rww: {
                    if (now != s + 2 * t.t_rcd) return off_schedule(s + 2 * t.t_rcd);
                    if (cmd.partition && *cmd.partition != bank.open_partitions[0] &&
                        *cmd.partition != bank.open_partitions[1]) {
                        return out_of_sequence("RWW write partition is not open");
                    }
                    if (auto v = set_switch(transistor_config(PairKind::Rww, roles_of_open(cmd.partition)))) {
                        return v;
                    }
                    next.busy_until = s + t.a_rww_p;
                    next.phase = TxnPhase::RwwIssued;
                    break;
                }
                case CommandKind::Decouple: {
                    if (now != s + 2 * t.t_rcd) return off_schedule(s + 2 * t.t_rcd);
                    SwitchConfig sw = bank.sw;
                    sw.m[4] = false;
                    if (auto v = set_switch(sw)) return v;
                    next.driver_mode = DriverMode::Decoupled;
                    next.phase = TxnPhase::Decoupled;
                    break;
                }
                case CommandKind::Activate:
                    return out_of_sequence("at most two partitions may be open");
                case CommandKind::Rwr:
                    return out_of_sequence("RWR requires a preceding DECOUPLE");
                default:
                    return out_of_sequence("expected RWW or DECOUPLE after two ACTIVATEs");
            }
            break;

        case TxnPhase::Decoupled:
            if (cmd.kind != CommandKind::Rwr) return out_of_sequence("DECOUPLE must be followed by RWR");
            if (now != s + 2 * t.t_rcd + 1) return off_schedule(s + 2 * t.t_rcd + 1);
            if (auto v = set_switch(transistor_config(PairKind::Rwr, {AccessKind::Read, AccessKind::Read}))) {
                return v;
            }
            next.busy_until = s + t.a_rwr_p;
            next.phase = TxnPhase::RwrIssued;
            break;

        case TxnPhase::RwrIssued:
            if (cmd.kind == CommandKind::Transfer) {
                const Cycle expected = s + 2 * t.t_rcd + 1 + t.rl + t.read_burst();
                if (now != expected) return off_schedule(expected);
                SwitchConfig sw = bank.sw;
                sw.m[5] = true;
                sw.m[6] = false;
                if (auto v = set_switch(sw)) return v;
                next.phase = TxnPhase::Transferred;
                break;
            }
            if (cmd.kind == CommandKind::Activate && now < bank.busy_until) {
                return violation(ViolationKind::Timing,
                                 "bank busy until " + std::to_string(bank.busy_until));
            }
            return out_of_sequence("RWR must be followed by TRANSFER");

        case TxnPhase::Single:
        case TxnPhase::RwwIssued:
        case TxnPhase::Transferred:
            if (cmd.kind == CommandKind::Precharge) {
                if (now != bank.busy_until - 1) return off_schedule(bank.busy_until - 1);
                next.open_partitions.clear();
                next.sw = SwitchConfig::idle();
                next.driver_mode = DriverMode::Write;
                next.phase = TxnPhase::Idle;
                next.pending_sequence.clear();
                bank = std::move(next);
                return std::nullopt;
            }
            if (cmd.kind == CommandKind::Activate && now < bank.busy_until) {
                return violation(ViolationKind::Timing,
                                 "bank busy until " + std::to_string(bank.busy_until));
            }
            return out_of_sequence("expected PRECHARGE");
    }

    next.pending_sequence.push_back(cmd);
    bank = std::move(next);
    return std::nullopt;
}

VerifyReport verify_stream(std::span<const Command> commands, const TimingParams& timing) {
    VerifyReport report;
    std::map<BankId, BankState> banks;
    Cycle last_cycle = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const Command& cmd = commands[i];
        if (i > 0 && cmd.issue_cycle < last_cycle) {
            report.violations.push_back({ViolationKind::Sequence, cmd.bank, cmd.issue_cycle, i,
                                         "stream not ordered by issue cycle"});
        }
        last_cycle = std::max(last_cycle, cmd.issue_cycle);
        BankState& bank = banks[cmd.bank];
        if (auto v = issue(bank, cmd, cmd.issue_cycle, timing)) {
            v->index = i;
            report.violations.push_back(std::move(*v));
        } else if (cmd.kind == CommandKind::Precharge) {
            report.last_retire_cycle = std::max(report.last_retire_cycle, bank.busy_until);
        }
    }
    for (const auto& [id, bank] : banks) {
        if (bank.phase != TxnPhase::Idle) {
            report.violations.push_back({ViolationKind::Sequence, id, bank.txn_start, commands.size(),
                                         "transaction opened at cycle " +
                                             std::to_string(bank.txn_start) + " never precharged"});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Text form

std::vector<Command> parse_command_stream(std::istream& in) {
    std::vector<Command> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok.size() < 3) throw CommandParseError(lineno, "expected `cycle kind bank ...`");

        auto number = [&](const std::string& s, const char* what) -> std::uint64_t {
            std::size_t used = 0;
            std::uint64_t v = 0;
            try {
                if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
                v = std::stoull(s, &used, 10);
            } catch (const std::exception&) {
                throw CommandParseError(lineno, std::string("bad ") + what + " '" + s + "'");
            }
            if (used != s.size()) throw CommandParseError(lineno, std::string("bad ") + what + " '" + s + "'");
            return v;
        };

        Command c;
        c.issue_cycle = number(tok[0], "cycle");
        auto kind = parse_command_kind(tok[1]);
        if (!kind) throw CommandParseError(lineno, "unknown command kind '" + tok[1] + "'");
        c.kind = *kind;
        c.bank = static_cast<BankId>(number(tok[2], "bank"));
        if (c.kind == CommandKind::Activate) {
            if (tok.size() != 6) throw CommandParseError(lineno, "ACTIVATE needs `partition row column`");
            c.partition = static_cast<std::uint32_t>(number(tok[3], "partition"));
            c.row = static_cast<std::uint32_t>(number(tok[4], "row"));
            c.column = static_cast<std::uint32_t>(number(tok[5], "column"));
        } else if (c.kind == CommandKind::Rww) {
            if (tok.size() > 4) throw CommandParseError(lineno, "RWW takes at most one operand");
            if (tok.size() == 4) c.partition = static_cast<std::uint32_t>(number(tok[3], "partition"));
        } else if (tok.size() != 3) {
            throw CommandParseError(lineno, "unexpected operands after " + tok[1]);
        }
        out.push_back(c);
    }
    return out;
}

void write_command_stream(std::ostream& out, std::span<const Command> commands) {
    for (const auto& c : commands) {
        out << c.issue_cycle << ' ' << to_string(c.kind) << ' ' << c.bank;
        if (c.kind == CommandKind::Activate) {
            out << ' ' << c.partition.value_or(0) << ' ' << c.row << ' ' << c.column;
        } else if (c.kind == CommandKind::Rww && c.partition) {
            out << ' ' << *c.partition;
        }
        out << '\n';
    }
}

}  // namespace pcmsim
