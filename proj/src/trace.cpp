#include "pcmsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace pcmsim {

Trace parse_trace(std::istream& in) {
    Trace out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ls(line);
        std::string cycle_tok, kind_tok, addr_tok, extra;
        if (!(ls >> cycle_tok >> kind_tok >> addr_tok) || (ls >> extra)) {
            throw ParseError(lineno, "expected `<cycle> <R|W> <hex-address>`");
        }

        TraceRecord rec;
        try {
            std::size_t used = 0;
            if (cycle_tok[0] == '-' || cycle_tok[0] == '+') throw std::invalid_argument(cycle_tok);
            rec.arrival_cycle = std::stoull(cycle_tok, &used, 10);
            if (used != cycle_tok.size()) throw std::invalid_argument(cycle_tok);
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad cycle '" + cycle_tok + "'");
        }

        if (kind_tok == "R") {
            rec.kind = AccessKind::Read;
        } else if (kind_tok == "W") {
            rec.kind = AccessKind::Write;
        } else {
            throw ParseError(lineno, "bad access kind '" + kind_tok + "' (expected R or W)");
        }

        if (addr_tok.size() < 3 || addr_tok[0] != '0' || (addr_tok[1] != 'x' && addr_tok[1] != 'X')) {
            throw ParseError(lineno, "address must be hexadecimal with a 0x prefix");
        }
        try {
            std::size_t used = 0;
            const std::string digits = addr_tok.substr(2);
            if (digits[0] == '-' || digits[0] == '+') throw std::invalid_argument(digits);
            rec.address = std::stoull(digits, &used, 16);
            if (used != digits.size()) throw std::invalid_argument(digits);
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad address '" + addr_tok + "'");
        }

        if (!out.empty() && rec.arrival_cycle < out.back().arrival_cycle) {
            throw NonMonotonicCycle(lineno, "cycle " + std::to_string(rec.arrival_cycle) +
                                                " is earlier than the previous record's " +
                                                std::to_string(out.back().arrival_cycle));
        }
        out.push_back(rec);
    }
    return out;
}

void write_trace(std::ostream& out, const Trace& trace) {
    for (const auto& r : trace) {
        out << r.arrival_cycle << ' ' << access_letter(r.kind) << " 0x" << std::uppercase << std::hex
            << r.address << std::dec << std::nouppercase << '\n';
    }
}

void SyntheticConfig::validate() const {
    auto prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(std::string("synthetic.") + name + " must be in [0, 1]");
        }
    };
    prob(read_fraction, "read_fraction");
    prob(bank_locality, "bank_locality");
    prob(partition_spread, "partition_spread");
    prob(write_thinning, "write_thinning");
    if (!(inter_arrival >= 0.0) || !std::isfinite(inter_arrival)) {
        throw ConfigError("synthetic.inter_arrival must be a finite value >= 0");
    }
}

namespace {

class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint32_t below(std::uint64_t n) {
        auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return static_cast<std::uint32_t>(std::min(v, n - 1));
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace

Trace generate_trace(const SyntheticConfig& cfg, const MappingScheme& scheme, const Geometry& g) {
    cfg.validate();
    g.validate();
    scheme.check_geometry(g);

    Stream rng(cfg.seed);
    Trace out;
    out.reserve(cfg.request_count);
    const double gap_span = 2.0 * cfg.inter_arrival + 1.0;

    Cycle now = 0;
    DecodedAddress prev;
    for (std::size_t i = 0; i < cfg.request_count; ++i) {
        if (i > 0) now += static_cast<Cycle>(std::floor(rng.uniform() * gap_span));

        const AccessKind kind = rng.uniform() < cfg.read_fraction ? AccessKind::Read : AccessKind::Write;
        const bool reuse_bank = rng.uniform() < cfg.bank_locality;
        const bool spread = rng.uniform() < cfg.partition_spread;

        DecodedAddress d;
        if (i > 0 && reuse_bank) {
            d.channel = prev.channel;
            d.rank = prev.rank;
            d.bank = prev.bank;
            d.partition = prev.partition;
            if (spread && g.partitions_per_bank > 1) {
                const std::uint32_t step = 1 + rng.below(g.partitions_per_bank - 1);
                d.partition = (prev.partition + step) % g.partitions_per_bank;
            }
        } else {
            d.channel = rng.below(g.channels);
            d.rank = rng.below(g.ranks_per_channel);
            d.bank = rng.below(g.banks_per_rank);
            d.partition = rng.below(g.partitions_per_bank);
        }
        d.row = rng.below(g.rows_per_partition);
        d.column = rng.below(g.columns_per_row);
        prev = d;

        const bool thinned = rng.uniform() < cfg.write_thinning;
        if (kind == AccessKind::Write && thinned) continue;
        out.push_back({now, kind, encode(d, scheme, g)});
    }
    return out;
}

double ConflictHistogram::fraction(ConflictKind k) const {
    const std::size_t n = total();
    if (n == 0) return k == ConflictKind::None ? 1.0 : 0.0;
    std::size_t c = 0;
    switch (k) {
        case ConflictKind::RR: c = rr; break;
        case ConflictKind::RW: c = rw; break;
        case ConflictKind::WW: c = ww; break;
        case ConflictKind::None: c = none; break;
    }
    return static_cast<double>(c) / static_cast<double>(n);
}

ConflictHistogram classify_conflicts(const Trace& trace, const MappingScheme& scheme, const Geometry& g,
                                     std::optional<Cycle> window, const TimingParams& timing) {
    if (window && *window == 0) throw ConfigError("conflict window must be > 0");
    struct Last {
        Cycle arrival;
        AccessKind kind;
        DecodedAddress addr;
        Cycle complete;
    };
    std::unordered_map<BankId, Last> last;
    ConflictHistogram h;
    for (const auto& rec : trace) {
        const DecodedAddress d = decode(rec.address, scheme, g);
        const BankId bank = d.global_bank(g);
        Cycle start = rec.arrival_cycle;
        auto it = last.find(bank);
        ConflictKind k = ConflictKind::None;
        if (it != last.end()) {
            const Last& prev = it->second;
            const bool coexists = window ? rec.arrival_cycle - prev.arrival < *window
                                         : prev.complete > rec.arrival_cycle;
            if (coexists) k = conflict_kind(prev.addr, prev.kind, d, rec.kind);
            start = std::max(start, prev.complete);
        }
        switch (k) {
            case ConflictKind::RR: ++h.rr; break;
            case ConflictKind::RW: ++h.rw; break;
            case ConflictKind::WW: ++h.ww; break;
            case ConflictKind::None: ++h.none; break;
        }
        last[bank] = Last{rec.arrival_cycle, rec.kind, d, start + timing.single_service(rec.kind)};
    }
    return h;
}

void write_histogram_csv(std::ostream& out, const ConflictHistogram& h) {
    out << "rr,rw,ww,none,requests\n";
    out << std::setprecision(15) << h.fraction(ConflictKind::RR) << ',' << h.fraction(ConflictKind::RW)
        << ',' << h.fraction(ConflictKind::WW) << ',' << h.fraction(ConflictKind::None) << ','
        << h.total() << '\n';
}

}  // namespace pcmsim
