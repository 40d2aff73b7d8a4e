#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gouflow/presets.hpp"

namespace gouflow {

/// Invalid experiment configuration; the message starts with
/// "<source>:<line>:<column>:" when the problem can be located.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int config_schema_version = 1;

/// Names accepted by the `suite` key, in run order.
const std::vector<std::string>& suite_names();

struct ExperimentConfig {
    int schema_version = config_schema_version;
    std::uint64_t seed = 0;
    std::string model_name = "custom";  ///< preset name, or "custom"
    LevyModel2 model = LevyModel2::zero();
    Backend backend = Backend::exact;
    double grid_dt = 1e-3;
    double horizon = 30.0;
    std::size_t paths = 10000;
    std::vector<std::string> suites;
    /// True when the suites came from "all" (or the default): suites whose
    /// hypotheses fail are skipped instead of refused.
    bool skip_inapplicable = true;
    SuiteDefaults params;
    // Run-time settings; excluded from the config hash.
    std::string out_dir = "out";
    unsigned workers = 1;
};

/// Parse YAML text. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Configuration of a bundled preset, running every suite.
ExperimentConfig preset_config(const std::string& preset, std::uint64_t seed);

/// Expand "all" and check names. Throws ConfigError.
std::vector<std::string> expand_suites(const std::vector<std::string>& names);

/// Canonical JSON of everything that determines the results (not the
/// output directory or worker count).
nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text) noexcept;

/// FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const LevyModel2& model);

}  // namespace gouflow
