#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gouflow/duality.hpp"

namespace gouflow {

struct MonotonicityProbe {
    double t = 1.0;
    double y = 0.0;
    std::vector<double> xs{-1.0, -0.5, 0.0, 0.5, 1.0};
};

/// Suite parameters that depend on the model, bundled with it.
struct SuiteDefaults {
    DualityGrid grid;
    /// Start values for the ruin suite: y for the dual when L is a
    /// subordinator, x for the forward process otherwise.
    std::vector<double> ruin_levels{0.5, 1.0};
    MonotonicityProbe monotonicity;
    double flow_t = 2.0;
    std::vector<double> flow_xs{-1.0, 0.0, 1.0};
    double lemma_t = 1.0;  ///< time of the finite-horizon distributional check
};

struct Preset {
    std::string name;
    std::string description;
    LevyModel2 model;
    Backend backend = Backend::exact;
    double grid_dt = 1e-3;
    double horizon = 30.0;  ///< truncation horizon of infinite-time quantities
    SuiteDefaults defaults;
};

const std::vector<Preset>& presets();

/// Throws std::invalid_argument for an unknown name.
const Preset& find_preset(std::string_view name);

}  // namespace gouflow
