#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcmsim/address_map.hpp"
#include "pcmsim/common.hpp"
#include "pcmsim/device.hpp"

namespace pcmsim {

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class NonMonotonicCycle : public ParseError {
public:
    using ParseError::ParseError;
};

struct TraceRecord {
    Cycle arrival_cycle = 0;
    AccessKind kind = AccessKind::Read;
    Address address = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

/// Reads `<cycle> <R|W> <hex-address>` lines. Blank lines and lines whose
/// first non-blank character is `#` are skipped.
Trace parse_trace(std::istream& in);

/// Writes `cycle SP kind SP 0xADDR LF` per record (upper-case hex digits).
void write_trace(std::ostream& out, const Trace& trace);

struct SyntheticConfig {
    std::size_t request_count = 10000;
    double read_fraction = 0.85;
    double bank_locality = 0.6;     // P(reuse the previous request's bank)
    double partition_spread = 0.5;  // P(other partition | bank reused)
    double inter_arrival = 4.0;     // mean cycles between arrivals
    double write_thinning = 0.0;    // fraction of generated writes dropped
    std::uint64_t seed = 1;

    void validate() const;
};

/// Deterministic in (cfg, scheme, g). The random stream is derived from
/// std::mt19937_64 raw output only, so traces are identical across
/// standard-library implementations.
Trace generate_trace(const SyntheticConfig& cfg, const MappingScheme& scheme, const Geometry& g);

struct ConflictHistogram {
    std::size_t rr = 0;
    std::size_t rw = 0;
    std::size_t ww = 0;
    std::size_t none = 0;

    std::size_t total() const { return rr + rw + ww + none; }
    double fraction(ConflictKind k) const;
};

/// Classifies every request by its most recent older request to the same
/// bank. With a window, that older request must have arrived within the
/// preceding `window` cycles. Without one, it must still be unserved at the
/// request's arrival in a per-bank FCFS reference run under `timing`.
ConflictHistogram classify_conflicts(const Trace& trace, const MappingScheme& scheme, const Geometry& g,
                                     std::optional<Cycle> window, const TimingParams& timing = {});

/// `rr,rw,ww,none,requests` header plus one row of fractions.
void write_histogram_csv(std::ostream& out, const ConflictHistogram& h);

}  // namespace pcmsim
