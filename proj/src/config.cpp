#include "pcmsim/config.hpp"

#include <fstream>
#include <set>

namespace pcmsim {

void SimConfig::validate() const {
    geometry.validate();
    timing.validate();
    mapping.check_geometry(geometry);
    scheduler.validate();
    if (!(p_sa >= 0.0) || !(p_wd >= 0.0)) throw ConfigError("power: p_sa and p_wd must be >= 0");
    synthetic.validate();
    if (classify_window && *classify_window == 0) throw ConfigError("classify.window must be > 0");
    if (trace_file && !std::filesystem::exists(*trace_file)) {
        throw ConfigError("trace file not found: " + trace_file->string());
    }
}

namespace {

using json = nlohmann::json;

class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError(name_ + " must be a JSON object");
    }

    template <typename T>
    void read(const char* key, T& dst) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        try {
            if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
                if (!it->is_number_unsigned()) throw ConfigError("expected a nonnegative integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError("expected a number");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigError("expected true or false");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!it->is_string()) throw ConfigError("expected a string");
            }
            dst = it->get<T>();
        } catch (const std::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError("unknown key '" + name_ + "." + k + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

MappingScheme mapping_from_json(const json& j, const Geometry& g) {
    Section s(j, "mapping");
    std::string name = "DEFAULT_MICRON";
    unsigned line_offset_bits = 6;
    s.read("scheme", name);
    s.read("line_offset_bits", line_offset_bits);
    const json* fields = s.child("fields");
    s.finish();

    auto scheme = parse_scheme_name(name);
    if (!scheme) throw ConfigError("mapping.scheme: unknown scheme '" + name + "'");
    if (*scheme != SchemeName::Custom) {
        if (fields) throw ConfigError("mapping.fields is only allowed with scheme CUSTOM");
        return MappingScheme::named(*scheme, g, line_offset_bits);
    }
    if (!fields || !fields->is_array()) throw ConfigError("mapping.fields must list the CUSTOM bit ranges");
    std::vector<BitRange> ranges;
    for (const auto& f : *fields) {
        Section fs(f, "mapping.fields[]");
        std::string field;
        unsigned msb = 0, lsb = 0;
        fs.read("field", field);
        fs.read("msb", msb);
        fs.read("lsb", lsb);
        fs.finish();
        auto af = parse_address_field(field);
        if (!af) throw ConfigError("mapping.fields[]: unknown field '" + field + "'");
        if (msb < lsb) throw ConfigError("mapping.fields[]: msb < lsb for '" + field + "'");
        ranges.push_back({*af, lsb, msb - lsb + 1});
    }
    return MappingScheme::custom(std::move(ranges));
}

}  // namespace

SimConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    SimConfig cfg;
    Section top(j, "config");

    if (const json* g = top.child("geometry")) {
        Section s(*g, "geometry");
        s.read("channels", cfg.geometry.channels);
        s.read("ranks_per_channel", cfg.geometry.ranks_per_channel);
        s.read("banks_per_rank", cfg.geometry.banks_per_rank);
        s.read("partitions_per_bank", cfg.geometry.partitions_per_bank);
        s.read("rows_per_partition", cfg.geometry.rows_per_partition);
        s.read("columns_per_row", cfg.geometry.columns_per_row);
        s.read("line_bits", cfg.geometry.line_bits);
        s.finish();
    }
    cfg.geometry.validate();

    if (const json* t = top.child("timing")) {
        Section s(*t, "timing");
        s.read("a_r_p", cfg.timing.a_r_p);
        s.read("a_w_p", cfg.timing.a_w_p);
        s.read("t_rcd", cfg.timing.t_rcd);
        s.read("rl", cfg.timing.rl);
        s.read("wl", cfg.timing.wl);
        s.read("t_wr", cfg.timing.t_wr);
        s.read("a_rww_p", cfg.timing.a_rww_p);
        s.read("a_rwr_p", cfg.timing.a_rwr_p);
        s.read("transfer_read_pair", cfg.timing.transfer_read_pair);
        s.read("clock_mhz", cfg.timing.clock_mhz);
        s.finish();
    }

    if (const json* m = top.child("mapping")) {
        cfg.mapping = mapping_from_json(*m, cfg.geometry);
    } else {
        cfg.mapping = MappingScheme::named(SchemeName::DefaultMicron, cfg.geometry);
    }

    if (const json* sc = top.child("scheduler")) {
        Section s(*sc, "scheduler");
        std::string policy(to_string(cfg.scheduler.policy));
        std::string unit(to_string(cfg.scheduler.th_b_unit));
        s.read("policy", policy);
        s.read("th_b", cfg.scheduler.th_b);
        s.read("th_b_unit", unit);
        s.read("multipartition_thb_guard", cfg.scheduler.multipartition_thb_guard);
        s.read("queue_capacity", cfg.scheduler.queue_capacity);
        s.finish();
        auto p = parse_policy(policy);
        if (!p) throw ConfigError("scheduler.policy: unknown policy '" + policy + "'");
        cfg.scheduler.policy = *p;
        auto u = parse_thb_unit(unit);
        if (!u) throw ConfigError("scheduler.th_b_unit: expected cycles or bypass_count");
        cfg.scheduler.th_b_unit = *u;
    }

    if (const json* pw = top.child("power")) {
        Section s(*pw, "power");
        s.read("p_sa", cfg.p_sa);
        s.read("p_wd", cfg.p_wd);
        s.read("rapl_limit", cfg.scheduler.rapl_limit);
        s.finish();
    }

    if (const json* tr = top.child("trace")) {
        Section s(*tr, "trace");
        std::string file;
        s.read("file", file);
        if (!file.empty()) {
            std::filesystem::path p(file);
            cfg.trace_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        if (const json* syn = s.child("synthetic")) {
            Section ss(*syn, "trace.synthetic");
            ss.read("request_count", cfg.synthetic.request_count);
            ss.read("read_fraction", cfg.synthetic.read_fraction);
            ss.read("bank_locality", cfg.synthetic.bank_locality);
            ss.read("partition_spread", cfg.synthetic.partition_spread);
            ss.read("inter_arrival", cfg.synthetic.inter_arrival);
            ss.read("write_thinning", cfg.synthetic.write_thinning);
            ss.finish();
        }
        s.finish();
    }

    top.read("seed", cfg.seed);
    cfg.synthetic.seed = cfg.seed;

    if (const json* o = top.child("output")) {
        Section s(*o, "output");
        std::string dir;
        s.read("dir", dir);
        if (!dir.empty()) cfg.out_dir = dir;
        s.finish();
    }

    if (const json* c = top.child("classify")) {
        Section s(*c, "classify");
        Cycle window = 0;
        s.read("window", window);
        if (window > 0) cfg.classify_window = window;
        s.finish();
    }

    top.read("max_cycles", cfg.max_cycles);
    top.finish();
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

nlohmann::ordered_json to_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    j["geometry"] = {{"channels", c.geometry.channels},
                     {"ranks_per_channel", c.geometry.ranks_per_channel},
                     {"banks_per_rank", c.geometry.banks_per_rank},
                     {"partitions_per_bank", c.geometry.partitions_per_bank},
                     {"rows_per_partition", c.geometry.rows_per_partition},
                     {"columns_per_row", c.geometry.columns_per_row},
                     {"line_bits", c.geometry.line_bits}};
    j["timing"] = {{"a_r_p", c.timing.a_r_p},
                   {"a_w_p", c.timing.a_w_p},
                   {"t_rcd", c.timing.t_rcd},
                   {"rl", c.timing.rl},
                   {"wl", c.timing.wl},
                   {"t_wr", c.timing.t_wr},
                   {"a_rww_p", c.timing.a_rww_p},
                   {"a_rwr_p", c.timing.a_rwr_p},
                   {"transfer_read_pair", c.timing.transfer_read_pair},
                   {"clock_mhz", c.timing.clock_mhz}};
    nlohmann::ordered_json fields = nlohmann::ordered_json::array();
    for (const auto& r : c.mapping.ranges()) {
        if (r.width == 0) continue;
        fields.push_back({{"field", to_string(r.field)}, {"msb", r.msb()}, {"lsb", r.lsb}});
    }
    j["mapping"] = {{"scheme", to_string(c.mapping.name())}, {"fields", fields}};
    j["scheduler"] = {{"policy", to_string(c.scheduler.policy)},
                      {"th_b", c.scheduler.th_b},
                      {"th_b_unit", to_string(c.scheduler.th_b_unit)},
                      {"multipartition_thb_guard", c.scheduler.multipartition_thb_guard},
                      {"queue_capacity", c.scheduler.queue_capacity}};
    j["power"] = {{"p_sa", c.p_sa}, {"p_wd", c.p_wd}, {"rapl_limit", c.scheduler.rapl_limit}};
    nlohmann::ordered_json trace;
    if (c.trace_file) {
        trace["file"] = c.trace_file->generic_string();
    } else {
        trace["synthetic"] = {{"request_count", c.synthetic.request_count},
                              {"read_fraction", c.synthetic.read_fraction},
                              {"bank_locality", c.synthetic.bank_locality},
                              {"partition_spread", c.synthetic.partition_spread},
                              {"inter_arrival", c.synthetic.inter_arrival},
                              {"write_thinning", c.synthetic.write_thinning}};
    }
    j["trace"] = trace;
    j["seed"] = c.seed;
    j["classify"] = {{"window", c.classify_window ? nlohmann::ordered_json(*c.classify_window)
                                                  : nlohmann::ordered_json(nullptr)}};
    j["max_cycles"] = c.max_cycles;
    return j;
}

Trace load_trace(const SimConfig& cfg) {
    if (cfg.trace_file) {
        std::ifstream in(*cfg.trace_file);
        if (!in) throw ConfigError("cannot open trace file: " + cfg.trace_file->string());
        return parse_trace(in);
    }
    SyntheticConfig syn = cfg.synthetic;
    syn.seed = cfg.seed;
    return generate_trace(syn, cfg.mapping, cfg.geometry);
}

}  // namespace pcmsim
