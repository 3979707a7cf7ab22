#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

using namespace pcmsim;
using fixtures::addr_of;

namespace {

// O(n^2) classifier: scan every older request of the bank and keep the most
// recent one that still coexists.
ConflictHistogram brute_force(const Trace& t, std::optional<Cycle> window, const std::vector<Cycle>& complete) {
    MappingScheme s;
    Geometry g;
    ConflictHistogram h;
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto di = decode(t[i].address, s, g);
        std::optional<std::size_t> hit;
        for (std::size_t j = 0; j < i; ++j) {
            auto dj = decode(t[j].address, s, g);
            if (!di.same_bank(dj)) continue;
            bool coexist = window ? t[i].arrival_cycle - t[j].arrival_cycle < *window
                                  : complete[j] > t[i].arrival_cycle;
            if (coexist) hit = j;
        }
        if (!hit) {
            ++h.none;
            continue;
        }
        const bool ri = t[i].kind == AccessKind::Read, rj = t[*hit].kind == AccessKind::Read;
        if (ri && rj) ++h.rr;
        else if (ri != rj) ++h.rw;
        else ++h.ww;
    }
    return h;
}

std::vector<Cycle> fcfs_completions(const Trace& t) {
    auto res = simulate(fixtures::config_for(Policy::BaselineFcfs), t);
    std::vector<Cycle> c(t.size());
    for (const auto& o : res.outcomes) c[o.id] = o.complete_cycle;
    return c;
}

bool same(const ConflictHistogram& a, const ConflictHistogram& b) {
    return a.rr == b.rr && a.rw == b.rw && a.ww == b.ww && a.none == b.none;
}

}  // namespace

TEST_CASE("parse basic records") {
    std::istringstream in("# header\n0 R 0x0\n\n  # indented comment\n7 W 0x3F8B00\n");
    auto t = parse_trace(in);
    REQUIRE(t.size() == 2);
    CHECK(t[0] == TraceRecord{0, AccessKind::Read, 0});
    CHECK(t[1] == TraceRecord{7, AccessKind::Write, 0x3F8B00});
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream nm("5 W 0x3F8B00\n3 R 0x0\n");
    try {
        parse_trace(nm);
        FAIL("expected NonMonotonicCycle");
    } catch (const NonMonotonicCycle& e) {
        CHECK(e.line() == 2);
    }
    for (const char* bad : {"1 X 0x0\n", "1 R 12\n", "R 0x0\n", "1 R 0xZZ\n", "1 R 0x0 extra\n", "-1 R 0x0\n"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(parse_trace(in), ParseError);
    }
}

TEST_CASE("write and parse round trip") {
    SyntheticConfig cfg;
    cfg.request_count = 500;
    auto t = generate_trace(cfg, MappingScheme{}, Geometry{});
    std::stringstream ss;
    write_trace(ss, t);
    CHECK(parse_trace(ss) == t);

    std::ostringstream one;
    write_trace(one, {{12, AccessKind::Write, 0xabc}});
    CHECK(one.str() == "12 W 0xABC\n");
}

TEST_CASE("generator is deterministic and respects its knobs") {
    SyntheticConfig cfg;
    cfg.request_count = 2000;
    cfg.seed = 42;
    auto a = generate_trace(cfg, MappingScheme{}, Geometry{});
    auto b = generate_trace(cfg, MappingScheme{}, Geometry{});
    CHECK(a == b);
    cfg.seed = 43;
    CHECK(generate_trace(cfg, MappingScheme{}, Geometry{}) != a);
    for (std::size_t i = 1; i < a.size(); ++i) REQUIRE(a[i].arrival_cycle >= a[i - 1].arrival_cycle);

    cfg.read_fraction = 1.0;
    for (const auto& r : generate_trace(cfg, MappingScheme{}, Geometry{})) REQUIRE(r.kind == AccessKind::Read);

    cfg.read_fraction = 0.85;
    cfg.bank_locality = 1.0;
    cfg.partition_spread = 0.0;
    auto loc = generate_trace(cfg, MappingScheme{}, Geometry{});
    auto d0 = decode(loc.front().address, MappingScheme{}, Geometry{});
    for (const auto& r : loc) {
        auto d = decode(r.address, MappingScheme{}, Geometry{});
        REQUIRE(d.same_bank(d0));
        REQUIRE(d.partition == d0.partition);
    }

    cfg.request_count = 100000;
    cfg.bank_locality = 0.6;
    auto big = generate_trace(cfg, MappingScheme{}, Geometry{});
    std::size_t reads = 0;
    for (const auto& r : big) reads += r.kind == AccessKind::Read;
    CHECK(std::abs(double(reads) / big.size() - 0.85) < 0.02);

    SyntheticConfig bad;
    bad.read_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("write thinning drops writes") {
    SyntheticConfig cfg;
    cfg.request_count = 5000;
    cfg.write_thinning = 1.0;
    for (const auto& r : generate_trace(cfg, MappingScheme{}, Geometry{})) REQUIRE(r.kind == AccessKind::Read);
}

TEST_CASE("classify distinct banks") {
    Trace t;
    for (BankId b = 0; b < 128; ++b) t.push_back({0, AccessKind::Read, addr_of(b, 0, 0)});
    auto h = classify_conflicts(t, MappingScheme{}, Geometry{}, std::nullopt);
    CHECK(h.none == 128);
    CHECK(h.fraction(ConflictKind::None) == 1.0);
    CHECK(classify_conflicts({}, MappingScheme{}, Geometry{}, std::nullopt).fraction(ConflictKind::None) == 1.0);
}

TEST_CASE("classify alternating read write") {
    Trace t;
    for (int i = 0; i < 100; ++i) t.push_back({Cycle(i), i % 2 ? AccessKind::Write : AccessKind::Read, addr_of(7, i % 8, 3)});
    auto h = classify_conflicts(t, MappingScheme{}, Geometry{}, Cycle{1000});
    CHECK(h.rw == 99);
    CHECK(h.none == 1);
}

TEST_CASE("classifier agrees with the brute force oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SyntheticConfig cfg;
        cfg.request_count = 1000;
        cfg.seed = seed;
        cfg.inter_arrival = double(seed % 5) * 3 + 1;
        auto t = generate_trace(cfg, MappingScheme{}, Geometry{});
        auto complete = fcfs_completions(t);
        CHECK(same(classify_conflicts(t, MappingScheme{}, Geometry{}, std::nullopt), brute_force(t, std::nullopt, complete)));
        for (Cycle w : {1, 5, 40}) {
            CHECK(same(classify_conflicts(t, MappingScheme{}, Geometry{}, w), brute_force(t, w, complete)));
        }
        auto h = classify_conflicts(t, MappingScheme{}, Geometry{}, std::nullopt);
        double sum = 0;
        for (auto k : {ConflictKind::RR, ConflictKind::RW, ConflictKind::WW, ConflictKind::None}) sum += h.fraction(k);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("read heavy locality trace is read-read dominated") {
    SyntheticConfig cfg;  // read_fraction 0.85, bank_locality 0.6
    cfg.request_count = 1000;
    auto t = generate_trace(cfg, MappingScheme{}, Geometry{});
    auto h = brute_force(t, std::nullopt, fcfs_completions(t));
    CHECK(h.rr > h.rw);
    CHECK(h.rw > h.ww);
}

TEST_CASE("histogram csv") {
    ConflictHistogram h{2, 1, 1, 0};
    std::ostringstream out;
    write_histogram_csv(out, h);
    CHECK(out.str() == "rr,rw,ww,none,requests\n0.5,0.25,0.25,0,4\n");
}
