#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gouflow/config.hpp"

namespace gouflow {

struct SuiteFile {
    std::string name;  ///< file name inside the output directory
    std::string content;
};

struct SuiteResult {
    std::string suite;
    /// "pass", "fail", "refused" (a hypothesis of the suite does not hold
    /// and the suite was requested by name) or "skipped" (same, under "all").
    std::string status;
    std::uint64_t seed = 0;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    std::vector<std::string> notes;
    std::vector<SuiteFile> files;

    bool ok() const noexcept { return status == "pass" || status == "skipped"; }
};

/// Run one suite. ConditionViolation from the library becomes "refused",
/// or "skipped" when `lenient`.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& config, bool lenient = false);

struct ExperimentSummary {
    std::string config_hash;
    nlohmann::ordered_json config;
    std::vector<SuiteResult> results;

    bool ok() const noexcept;
    /// Machine-readable summary; contains no timings or host details, so
    /// equal (config, seed) give byte-identical output.
    std::string json() const;
};

/// Runs config.suites in order; see ExperimentConfig::skip_inapplicable.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Writes summary.json and every suite file into `dir`, creating it.
void write_outputs(const ExperimentSummary& summary, const std::string& dir);

}  // namespace gouflow
