#include "pcmsim/cli.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "pcmsim/config.hpp"
#include "pcmsim/simulator.hpp"

namespace pcmsim {

namespace {

namespace fs = std::filesystem;

// Flags shared by the run-style subcommands; unset means "keep config value".
struct Overrides {
    std::string config;
    std::string policy;
    std::string trace;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<double> rapl;
    std::optional<std::uint64_t> thb;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--policy", o.policy, "BASELINE_FCFS | MULTIPARTITION | PALP");
    cmd->add_option("--trace", o.trace, "trace file (replaces the synthetic generator)");
    cmd->add_option("--seed", o.seed, "synthetic trace seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--rapl", o.rapl, "RAPL limit, pJ/access");
    cmd->add_option("--thb", o.thb, "backlogging threshold");
}

SimConfig resolve(const Overrides& o) {
    SimConfig cfg = o.config.empty() ? SimConfig{} : load_config(o.config);
    if (!o.policy.empty()) {
        auto p = parse_policy(o.policy);
        if (!p) throw ConfigError("--policy: unknown policy '" + o.policy + "'");
        cfg.scheduler.policy = *p;
    }
    if (!o.trace.empty()) cfg.trace_file = fs::path(o.trace);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.synthetic.seed = *o.seed;
    }
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.rapl) cfg.scheduler.rapl_limit = *o.rapl;
    if (o.thb) cfg.scheduler.th_b = *o.thb;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
}

void report_violations(std::ostream& err, const VerifyReport& v) {
    err << "legality violation: " << v.violations.size() << " violation(s)\n";
    const std::size_t shown = std::min<std::size_t>(v.violations.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& x = v.violations[i];
        err << "  [" << to_string(x.kind) << "] command " << x.index << " bank " << x.bank << " cycle "
            << x.cycle << ": " << x.message << '\n';
    }
}

int cmd_simulate(const Overrides& o, std::ostream& out, std::ostream& err) {
    SimConfig cfg = resolve(o);
    Trace trace = load_trace(cfg);
    SimulationResult res = simulate(cfg, trace);
    if (!res.verification.ok()) {
        report_violations(err, res.verification);
        return kExitLegality;
    }

    fs::create_directories(cfg.out_dir);
    {
        auto f = open_out(cfg.out_dir / "report.json");
        f << to_json(res.report).dump(2) << '\n';
    }
    {
        auto f = open_out(cfg.out_dir / "report.csv");
        write_report_csv_header(f);
        write_report_csv_row(f, res.report);
    }
    {
        auto f = open_out(cfg.out_dir / "power.csv");
        f << "cycle,power\n" << std::setprecision(15);
        for (const auto& [cycle, p] : res.power_trajectory) f << cycle << ',' << p << '\n';
    }
    {
        auto f = open_out(cfg.out_dir / "commands.txt");
        write_command_stream(f, res.commands);
    }
    out << res.report.policy << ": " << res.report.requests << " requests, total_cycles "
        << res.report.total_cycles << ", avg access latency " << res.report.avg_access_latency
        << ", pairs rww/rwr " << res.report.rww_pairs << '/' << res.report.rwr_pairs << '\n';
    out << "wrote " << (cfg.out_dir / "report.json").string() << '\n';
    return kExitOk;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ConfigError("--values: not a number: '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("--values: need at least one value");
    return values;
}

int cmd_sweep(const Overrides& o, const std::string& param, const std::string& value_list, unsigned jobs,
              std::ostream& out, std::ostream& err) {
    SimConfig base = resolve(o);
    if (param != "rapl_limit" && param != "th_b") throw ConfigError("--param: expected rapl_limit or th_b");
    std::vector<double> values = parse_values(value_list);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<SimConfig> cfgs;
    for (double v : values) {
        SimConfig c = base;
        if (param == "rapl_limit") {
            c.scheduler.rapl_limit = v;
        } else {
            if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
                throw ConfigError("--values: th_b must be a nonnegative integer");
            }
            c.scheduler.th_b = static_cast<std::uint64_t>(v);
        }
        c.validate();
        cfgs.push_back(std::move(c));
    }

    const Trace trace = load_trace(base);
    std::vector<SimulationResult> results(cfgs.size());
    jobs = std::max(1u, jobs);
    for (std::size_t start = 0; start < cfgs.size(); start += jobs) {
        std::vector<std::future<SimulationResult>> batch;
        for (std::size_t i = start; i < std::min(cfgs.size(), start + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       [&, i] { return simulate(cfgs[i], trace); }));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
    }

    for (const auto& r : results) {
        if (!r.verification.ok()) {
            report_violations(err, r.verification);
            return kExitLegality;
        }
    }

    fs::create_directories(base.out_dir);
    auto f = open_out(base.out_dir / "sweep.csv");
    f << "param,value,";
    write_report_csv_header(f);
    for (std::size_t i = 0; i < results.size(); ++i) {
        f << param << ',' << std::setprecision(15) << values[i] << ',';
        write_report_csv_row(f, results[i].report);
        out << param << '=' << values[i] << ": total_cycles " << results[i].report.total_cycles
            << ", pairs " << results[i].report.rww_pairs + results[i].report.rwr_pairs << '\n';
    }
    out << "wrote " << (base.out_dir / "sweep.csv").string() << '\n';
    return kExitOk;
}

int cmd_gen_trace(const Overrides& o, const std::string& output, std::ostream& out) {
    SimConfig cfg = resolve(o);
    if (cfg.trace_file) throw ConfigError("gen-trace uses the synthetic generator; drop --trace/trace.file");
    Trace t = load_trace(cfg);
    auto f = open_out(output);
    write_trace(f, t);
    out << "wrote " << t.size() << " records to " << output << '\n';
    return kExitOk;
}

int cmd_classify(const Overrides& o, std::optional<Cycle> window, std::ostream& out) {
    SimConfig cfg = resolve(o);
    if (window) cfg.classify_window = *window == 0 ? std::nullopt : window;
    Trace t = load_trace(cfg);
    ConflictHistogram h = classify_conflicts(t, cfg.mapping, cfg.geometry, cfg.classify_window, cfg.timing);
    fs::create_directories(cfg.out_dir);
    {
        auto f = open_out(cfg.out_dir / "conflicts.csv");
        write_histogram_csv(f, h);
    }
    write_histogram_csv(out, h);
    return kExitOk;
}

int cmd_verify(const std::string& path, const Overrides& o, std::ostream& out, std::ostream& err) {
    SimConfig cfg = resolve(o);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open command stream: " + path);
    std::vector<Command> cmds = parse_command_stream(in);
    VerifyReport v = verify_stream(cmds, cfg.timing);
    if (!v.ok()) {
        report_violations(err, v);
        return kExitLegality;
    }
    out << "ok: " << cmds.size() << " commands, last retire at cycle " << v.last_retire_cycle << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partition-level parallel PCM bank simulator", "pcmsim"};
    app.require_subcommand(1);

    Overrides sim_o, sweep_o, gen_o, cls_o, ver_o;
    auto* sim = app.add_subcommand("simulate", "run one simulation and write reports");
    add_overrides(sim, sim_o);

    auto* sweep = app.add_subcommand("sweep", "run one simulation per parameter value");
    add_overrides(sweep, sweep_o);
    std::string param, values;
    unsigned jobs = 1;
    sweep->add_option("--param", param, "rapl_limit | th_b")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--jobs", jobs, "parallel runs");

    auto* gen = app.add_subcommand("gen-trace", "write a synthetic trace");
    add_overrides(gen, gen_o);
    std::string output;
    gen->add_option("-o,--output", output, "trace file to write")->required();

    auto* cls = app.add_subcommand("classify", "conflict histogram of a trace");
    add_overrides(cls, cls_o);
    std::optional<Cycle> window;
    cls->add_option("--window", window, "conflict window in cycles (0: FCFS coexistence)");

    auto* ver = app.add_subcommand("verify", "check a command stream file");
    add_overrides(ver, ver_o);
    std::string stream_path;
    ver->add_option("stream", stream_path, "command stream file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (*sim) return cmd_simulate(sim_o, out, err);
        if (*sweep) return cmd_sweep(sweep_o, param, values, jobs, out, err);
        if (*gen) return cmd_gen_trace(gen_o, output, out);
        if (*cls) return cmd_classify(cls_o, window, out);
        if (*ver) return cmd_verify(stream_path, ver_o, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    }
    return kExitUserError;
}

}  // namespace pcmsim
