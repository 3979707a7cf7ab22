#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"

using namespace pcmsim;
using fixtures::addr_of;

TEST_CASE("three policies on the reference trace") {
    auto t = fixtures::six_request_trace();
    CHECK(simulate(fixtures::config_for(Policy::BaselineFcfs), t).report.total_cycles == 170);
    CHECK(simulate(fixtures::config_for(Policy::MultiPartition), t).report.total_cycles == 134);
    auto palp = simulate(fixtures::config_for(Policy::Palp), t);
    CHECK(palp.report.total_cycles == 126);
    CHECK(palp.verification.ok());
    CHECK(palp.verification.last_retire_cycle == 126);
}

TEST_CASE("scripted reference schedule") {
    auto src = scripted_source({{0, 1}, {2, 4}, {3}, {5}});
    auto res = simulate(fixtures::config_for(Policy::BaselineFcfs), fixtures::six_request_trace(), src);
    CHECK(res.report.total_cycles == 144);
    CHECK(res.verification.ok());
    CHECK(res.report.policy == "SCRIPTED");
}

TEST_CASE("illegal scripted pair is rejected when issued") {
    auto src = scripted_source({{1, 3}});
    CHECK_THROWS_AS(simulate(SimConfig{}, fixtures::six_request_trace(), src), IllegalPair);
}

TEST_CASE("empty trace") {
    auto res = simulate(SimConfig{}, Trace{});
    CHECK(res.report.requests == 0);
    CHECK(res.commands.empty());
    CHECK(res.verification.ok());
}

TEST_CASE("queue capacity delays enqueue") {
    SimConfig cfg = fixtures::config_for(Policy::BaselineFcfs);
    cfg.scheduler.queue_capacity = 1;
    auto res = simulate(cfg, fixtures::six_request_trace());
    CHECK(res.report.total_cycles == 170);
    // each request enters as its predecessor is scheduled: 0+19+47+19+47+19
    CHECK(res.report.avg_queuing_delay == doctest::Approx(151.0 / 6));
    CHECK(res.verification.ok());
}

TEST_CASE("max_cycles truncates") {
    SimConfig cfg = fixtures::config_for(Policy::BaselineFcfs);
    cfg.max_cycles = 50;
    auto res = simulate(cfg, fixtures::six_request_trace());
    CHECK(res.report.truncated);
    CHECK(res.report.requests < 6);
}

TEST_CASE("bank level parallelism") {
    Trace t{{0, AccessKind::Write, addr_of(0, 0, 0)}, {0, AccessKind::Write, addr_of(1, 0, 0)}};
    auto res = simulate(SimConfig{}, t);
    CHECK(res.report.total_cycles == 47);
}

TEST_CASE("observer sees every decision") {
    std::size_t seen = 0;
    auto res = simulate(fixtures::config_for(Policy::Palp), fixtures::six_request_trace(),
                        [&](const ScheduleDecision& d, const RwQueue& q, const BankAvailability& b, const PowerLedger&,
                            Cycle now) {
                            ++seen;
                            CHECK(q.find(d.primary.id));
                            CHECK(b.is_free(d.primary.bank, now));
                        });
    CHECK(seen == res.decisions.size());
}

TEST_CASE("config json round trip and validation") {
    SimConfig cfg;
    auto j = nlohmann::json::parse(to_json(cfg).dump());
    j.erase("mapping");
    j["classify"].erase("window");
    auto back = config_from_json(j);
    CHECK(back.geometry == cfg.geometry);
    CHECK(back.timing == cfg.timing);
    CHECK(back.scheduler.policy == cfg.scheduler.policy);
    CHECK(back.scheduler.rapl_limit == cfg.scheduler.rapl_limit);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scheduler": {"policy": "LIFO"}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"geometry": {"channels": 3}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"trace": {"file": "/nonexistent/x.trace"}})")),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"power": {"rapl_limit": 0}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"timing": {"a_rww_p": 70}})")), ConfigError);
}

TEST_CASE("custom mapping from json") {
    auto j = nlohmann::json::parse(R"({"mapping": {"scheme": "CUSTOM", "fields": [
        {"field": "byte", "msb": 5, "lsb": 0}, {"field": "bank", "msb": 8, "lsb": 6},
        {"field": "partition", "msb": 11, "lsb": 9}, {"field": "channel", "msb": 13, "lsb": 12},
        {"field": "column", "msb": 22, "lsb": 14}, {"field": "row", "msb": 34, "lsb": 23},
        {"field": "rank", "msb": 36, "lsb": 35}]}})");
    auto cfg = config_from_json(j);
    CHECK(cfg.mapping.name() == SchemeName::Custom);
    CHECK(decode(Address{3} << 6, cfg.mapping, cfg.geometry).bank == 3);
}

TEST_CASE("committed default config loads") {
    auto cfg = load_config(std::string(PCMSIM_SOURCE_DIR) + "/configs/default.json");
    CHECK(cfg.scheduler.policy == Policy::Palp);
    CHECK(cfg.scheduler.th_b == 8);
    CHECK(cfg.scheduler.rapl_limit == 0.3);
    CHECK(cfg.timing == TimingParams{});
    CHECK(cfg.geometry == Geometry{});
    CHECK(cfg.mapping.name() == SchemeName::DefaultMicron);
}
