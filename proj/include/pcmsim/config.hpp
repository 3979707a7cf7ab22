#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "pcmsim/address_map.hpp"
#include "pcmsim/device.hpp"
#include "pcmsim/geometry.hpp"
#include "pcmsim/scheduler.hpp"
#include "pcmsim/trace.hpp"

namespace pcmsim {

/// Everything a run needs. Defaults reproduce the reference memory system:
/// 4 channels x 4 ranks x 8 banks x 8 partitions, 256 MHz, DEFAULT_MICRON
/// mapping, PALP with th_b = 8 cycles and a 0.3 pJ/access power limit.
struct SimConfig {
    Geometry geometry;
    TimingParams timing;
    MappingScheme mapping;
    SchedulerConfig scheduler;
    double p_sa = 0.12;  // pJ/access
    double p_wd = 0.24;  // pJ/access

    std::optional<std::filesystem::path> trace_file;  // otherwise synthetic
    SyntheticConfig synthetic;
    std::uint64_t seed = 1;

    std::filesystem::path out_dir = "out";
    std::optional<Cycle> classify_window;  // unset: FCFS coexistence
    Cycle max_cycles = 0;                  // 0: run to completion

    /// Re-checks every module invariant; throws ConfigError.
    void validate() const;
};

/// Reads a JSON document. Relative trace paths resolve against the config
/// file's directory. Unknown keys are rejected.
SimConfig load_config(const std::filesystem::path& path);
SimConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Full effective configuration with stable key order.
nlohmann::ordered_json to_json(const SimConfig& cfg);

/// Trace from the configured file, or generated from `synthetic` with `seed`.
Trace load_trace(const SimConfig& cfg);

}  // namespace pcmsim
