#include "gouflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gouflow {

namespace {

using nlohmann::ordered_json;

class Parser {
  public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const
    {
        const YAML::Mark m = at.Mark();
        if (m.is_null()) {
            throw ConfigError(source_ + ": " + what);
        }
        throw ConfigError(source_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": " +
                          what);
    }

    void require_map(const YAML::Node& n, const std::string& what) const
    {
        if (!n.IsMap()) {
            fail(n, what + " must be a mapping");
        }
    }

    // Reject keys outside `allowed`, so that typos do not pass silently.
    void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) const
    {
        for (const auto& kv : n) {
            const std::string key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                fail(kv.first, "unknown key '" + key + "' in " + where);
            }
        }
    }

    template <class T>
    T scalar(const YAML::Node& n, const std::string& what) const
    {
        if (!n.IsScalar()) {
            fail(n, what + " must be a scalar");
        }
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, what + ": cannot read '" + n.Scalar() + "'");
        }
    }

    double number(const YAML::Node& n, const std::string& what) const
    {
        const double v = scalar<double>(n, what);
        if (!std::isfinite(v)) {
            fail(n, what + " must be finite");
        }
        return v;
    }

    std::vector<double> numbers(const YAML::Node& n, const std::string& what) const
    {
        if (n.IsScalar()) {
            return {number(n, what)};
        }
        if (!n.IsSequence() || n.size() == 0) {
            fail(n, what + " must be a number or a nonempty list of numbers");
        }
        std::vector<double> out;
        for (const auto& v : n) {
            out.push_back(number(v, what));
        }
        return out;
    }

    Marginal marginal(const YAML::Node& n, const std::string& what) const
    {
        require_map(n, what);
        if (!n["type"]) {
            fail(n, what + ": missing 'type'");
        }
        const std::string type = scalar<std::string>(n["type"], what + ".type");
        if (type == "point_masses") {
            check_keys(n, {"type", "values", "probs"}, what);
            PointMasses pm{numbers(need(n, "values", what), what + ".values"),
                           numbers(need(n, "probs", what), what + ".probs")};
            return pm;
        }
        if (type == "exponential") {
            check_keys(n, {"type", "rate", "sign"}, what);
            const int sign = n["sign"] ? scalar<int>(n["sign"], what + ".sign") : 1;
            if (sign != 1 && sign != -1) {
                fail(n["sign"], what + ".sign must be 1 or -1");
            }
            return SignedExponential{number(need(n, "rate", what), what + ".rate"), sign};
        }
        if (type == "uniform") {
            check_keys(n, {"type", "lo", "hi"}, what);
            return Uniform{number(need(n, "lo", what), what + ".lo"), number(need(n, "hi", what), what + ".hi")};
        }
        if (type == "truncated_gaussian") {
            check_keys(n, {"type", "mean", "sd", "lower"}, what);
            TruncatedGaussian g{number(need(n, "mean", what), what + ".mean"),
                                number(need(n, "sd", what), what + ".sd")};
            if (n["lower"]) {
                g.lower = number(n["lower"], what + ".lower");
            }
            return g;
        }
        fail(n["type"], what + ": unknown marginal type '" + type + "'");
    }

    JumpLaw2 jump_law(const YAML::Node& n) const
    {
        require_map(n, "jump_law");
        if (!n["type"]) {
            fail(n, "jump_law: missing 'type'");
        }
        const std::string type = scalar<std::string>(n["type"], "jump_law.type");
        try {
            if (type == "point_mass") {
                check_keys(n, {"type", "atoms"}, "jump_law");
                const YAML::Node atoms = need(n, "atoms", "jump_law");
                if (!atoms.IsSequence() || atoms.size() == 0) {
                    fail(atoms, "jump_law.atoms must be a nonempty list of [du, dl, prob]");
                }
                PointMassLaw law;
                for (const auto& a : atoms) {
                    const auto v = numbers(a, "jump_law atom");
                    if (v.size() != 3) {
                        fail(a, "jump_law atom must be [du, dl, prob]");
                    }
                    law.atoms.push_back({v[0], v[1], v[2]});
                }
                return JumpLaw2(law);
            }
            if (type == "independent") {
                check_keys(n, {"type", "du", "dl"}, "jump_law");
                return JumpLaw2(IndependentLaw{marginal(need(n, "du", "jump_law"), "jump_law.du"),
                                               marginal(need(n, "dl", "jump_law"), "jump_law.dl")});
            }
            if (type == "linked") {
                check_keys(n, {"type", "du", "intercept", "slope"}, "jump_law");
                LinkedLaw law{marginal(need(n, "du", "jump_law"), "jump_law.du"), 0.0, 0.0};
                if (n["intercept"]) {
                    law.intercept = number(n["intercept"], "jump_law.intercept");
                }
                if (n["slope"]) {
                    law.slope = number(n["slope"], "jump_law.slope");
                }
                return JumpLaw2(law);
            }
        } catch (const std::invalid_argument& e) {
            fail(n, std::string("jump_law: ") + e.what());
        } catch (const std::domain_error& e) {
            fail(n, std::string("jump_law: ") + e.what());
        }
        fail(n["type"], "jump_law: unknown type '" + type + "'");
    }

    Cov2 covariance(const YAML::Node& n) const
    {
        // Either [uu, ul, ll] or [[uu, ul], [ul, ll]].
        if (n.IsSequence() && n.size() == 2 && n[0].IsSequence()) {
            const auto r0 = numbers(n[0], "gaussian_cov row");
            const auto r1 = numbers(n[1], "gaussian_cov row");
            if (r0.size() != 2 || r1.size() != 2) {
                fail(n, "gaussian_cov must be 2x2");
            }
            if (r0[1] != r1[0]) {
                fail(n, "gaussian_cov must be symmetric");
            }
            return {r0[0], r0[1], r1[1]};
        }
        const auto v = numbers(n, "gaussian_cov");
        if (v.size() != 3) {
            fail(n, "gaussian_cov must be [uu, ul, ll] or a 2x2 matrix");
        }
        return {v[0], v[1], v[2]};
    }

    LevyModel2 model(const YAML::Node& n) const
    {
        check_keys(n, {"drift", "gaussian_cov", "jump_intensity", "jump_law"}, "model");
        Vec2 drift{0.0, 0.0};
        if (n["drift"]) {
            const auto d = numbers(n["drift"], "model.drift");
            if (d.size() != 2) {
                fail(n["drift"], "model.drift must be [b_U, b_L]");
            }
            drift = {d[0], d[1]};
        }
        const Cov2 cov = n["gaussian_cov"] ? covariance(n["gaussian_cov"]) : Cov2{};
        const double intensity = n["jump_intensity"] ? number(n["jump_intensity"], "model.jump_intensity") : 0.0;
        const JumpLaw2 law = n["jump_law"] ? jump_law(n["jump_law"]) : JumpLaw2::none();
        if (intensity > 0.0 && !n["jump_law"]) {
            fail(n, "model: jump_intensity > 0 needs a jump_law");
        }
        try {
            return LevyModel2(drift, cov, intensity, law);
        } catch (const std::invalid_argument& e) {
            fail(n, std::string("model: ") + e.what());
        }
    }

    YAML::Node need(const YAML::Node& n, const std::string& key, const std::string& where) const
    {
        const YAML::Node v = n[key];
        if (!v) {
            fail(n, where + ": missing '" + key + "'");
        }
        return v;
    }

  private:
    std::string source_;
};

ordered_json marginal_json(const Marginal& m)
{
    return std::visit(
        [](const auto& v) -> ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PointMasses>) {
                return {{"type", "point_masses"}, {"values", v.values}, {"probs", v.probs}};
            } else if constexpr (std::is_same_v<T, SignedExponential>) {
                return {{"type", "exponential"}, {"rate", v.rate}, {"sign", v.sign}};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return {{"type", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
            } else {
                ordered_json j{{"type", "truncated_gaussian"}, {"mean", v.mean}, {"sd", v.sd}};
                j["lower"] = std::isfinite(v.lower) ? ordered_json(v.lower) : ordered_json("-inf");
                return j;
            }
        },
        m);
}

ordered_json law_json(const JumpLaw2& law)
{
    return std::visit(
        [](const auto& v) -> ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PointMassLaw>) {
                ordered_json atoms = ordered_json::array();
                for (const auto& a : v.atoms) {
                    atoms.push_back({a.du, a.dl, a.prob});
                }
                return {{"type", "point_mass"}, {"atoms", atoms}};
            } else if constexpr (std::is_same_v<T, IndependentLaw>) {
                return {{"type", "independent"}, {"du", marginal_json(v.du)}, {"dl", marginal_json(v.dl)}};
            } else if constexpr (std::is_same_v<T, LinkedLaw>) {
                return {{"type", "linked"},
                        {"du", marginal_json(v.du)},
                        {"intercept", v.intercept},
                        {"slope", v.slope}};
            } else {
                return {{"type", "dual_image"}, {"base", law_json(*v.base)}};
            }
        },
        law.variant());
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"duality", "inverse-flow", "ruin", "stationary", "monotonicity"};
    return names;
}

std::vector<std::string> expand_suites(const std::vector<std::string>& names)
{
    std::set<std::string> wanted;
    for (const auto& n : names) {
        if (n == "all") {
            wanted.insert(suite_names().begin(), suite_names().end());
            continue;
        }
        if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end()) {
            throw ConfigError("unknown suite '" + n + "'");
        }
        wanted.insert(n);
    }
    std::vector<std::string> out;
    for (const auto& n : suite_names()) {
        if (wanted.count(n)) {
            out.push_back(n);
        }
    }
    return out;
}

ExperimentConfig preset_config(const std::string& name, std::uint64_t seed)
{
    const Preset& p = find_preset(name);
    ExperimentConfig c;
    c.seed = seed;
    c.model_name = p.name;
    c.model = p.model;
    c.backend = p.backend;
    c.grid_dt = p.grid_dt;
    c.horizon = p.horizon;
    c.params = p.defaults;
    c.suites = suite_names();
    return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    Parser ps(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    if (!root.IsMap()) {
        throw ConfigError(source + ": top level must be a mapping");
    }
    ps.check_keys(root,
                  {"schema_version", "seed", "model", "backend", "grid_dt", "horizon", "paths", "suite", "probes",
                   "ruin", "monotonicity", "inverse_flow", "stationary", "output", "workers"},
                  "config");

    if (!root["schema_version"]) {
        ps.fail(root, "missing 'schema_version'");
    }
    const int version = ps.scalar<int>(root["schema_version"], "schema_version");
    if (version != config_schema_version) {
        ps.fail(root["schema_version"], "unsupported schema_version " + std::to_string(version) + " (expected " +
                                            std::to_string(config_schema_version) + ")");
    }
    if (!root["seed"]) {
        ps.fail(root, "missing 'seed' (runs are never seeded from entropy)");
    }
    const auto seed_text = ps.scalar<std::string>(root["seed"], "seed");
    ExperimentConfig c;
    try {
        std::size_t used = 0;
        c.seed = std::stoull(seed_text, &used, 0);
        if (used != seed_text.size() || seed_text.front() == '-') {
            throw std::invalid_argument(seed_text);
        }
    } catch (const std::exception&) {
        ps.fail(root["seed"], "seed must be an unsigned 64-bit integer");
    }

    if (!root["model"]) {
        ps.fail(root, "missing 'model'");
    }
    const YAML::Node mn = root["model"];
    if (mn.IsScalar()) {
        try {
            c = preset_config(mn.Scalar(), c.seed);
        } catch (const std::invalid_argument& e) {
            ps.fail(mn, e.what());
        }
    } else {
        ps.require_map(mn, "model");
        if (mn["preset"]) {
            if (mn.size() != 1) {
                ps.fail(mn, "model: 'preset' cannot be combined with explicit fields");
            }
            try {
                c = preset_config(mn["preset"].Scalar(), c.seed);
            } catch (const std::invalid_argument& e) {
                ps.fail(mn["preset"], e.what());
            }
        } else {
            const std::uint64_t seed = c.seed;
            c = ExperimentConfig{};
            c.seed = seed;
            c.model = ps.model(mn);
            c.backend = c.model.cov().is_zero() ? Backend::exact : Backend::euler;
            c.suites = suite_names();
        }
    }

    if (root["backend"]) {
        const auto b = ps.scalar<std::string>(root["backend"], "backend");
        if (b == "exact") {
            c.backend = Backend::exact;
        } else if (b == "euler") {
            c.backend = Backend::euler;
        } else {
            ps.fail(root["backend"], "backend must be 'exact' or 'euler'");
        }
    }
    if (c.backend == Backend::exact && !c.model.cov().is_zero()) {
        ps.fail(root["backend"] ? root["backend"] : mn, "the exact backend needs a model without Gaussian part");
    }
    if (root["grid_dt"]) {
        c.grid_dt = ps.number(root["grid_dt"], "grid_dt");
        if (!(c.grid_dt > 0.0)) {
            ps.fail(root["grid_dt"], "grid_dt must be positive");
        }
    }
    if (root["horizon"]) {
        c.horizon = ps.number(root["horizon"], "horizon");
        if (!(c.horizon > 0.0)) {
            ps.fail(root["horizon"], "horizon must be positive");
        }
    }
    if (root["paths"]) {
        const long long n = ps.scalar<long long>(root["paths"], "paths");
        if (n < 2) {
            ps.fail(root["paths"], "paths must be at least 2");
        }
        c.paths = static_cast<std::size_t>(n);
    }
    if (root["suite"]) {
        const YAML::Node s = root["suite"];
        std::vector<std::string> names;
        if (s.IsSequence()) {
            for (const auto& v : s) {
                names.push_back(ps.scalar<std::string>(v, "suite"));
            }
        } else {
            names.push_back(ps.scalar<std::string>(s, "suite"));
        }
        c.skip_inapplicable = std::find(names.begin(), names.end(), "all") != names.end();
        try {
            c.suites = expand_suites(names);
        } catch (const ConfigError& e) {
            ps.fail(s, e.what());
        }
    }
    if (const YAML::Node p = root["probes"]) {
        ps.require_map(p, "probes");
        ps.check_keys(p, {"t", "x", "y"}, "probes");
        if (p["t"]) c.params.grid.ts = ps.numbers(p["t"], "probes.t");
        if (p["x"]) c.params.grid.xs = ps.numbers(p["x"], "probes.x");
        if (p["y"]) c.params.grid.ys = ps.numbers(p["y"], "probes.y");
        for (const double t : c.params.grid.ts) {
            if (!(t > 0.0)) {
                ps.fail(p["t"], "probes.t must be positive");
            }
        }
    }
    if (const YAML::Node r = root["ruin"]) {
        ps.require_map(r, "ruin");
        ps.check_keys(r, {"levels"}, "ruin");
        if (r["levels"]) c.params.ruin_levels = ps.numbers(r["levels"], "ruin.levels");
    }
    if (const YAML::Node m = root["monotonicity"]) {
        ps.require_map(m, "monotonicity");
        ps.check_keys(m, {"t", "y", "xs"}, "monotonicity");
        if (m["t"]) c.params.monotonicity.t = ps.number(m["t"], "monotonicity.t");
        if (m["y"]) c.params.monotonicity.y = ps.number(m["y"], "monotonicity.y");
        if (m["xs"]) c.params.monotonicity.xs = ps.numbers(m["xs"], "monotonicity.xs");
    }
    if (const YAML::Node f = root["inverse_flow"]) {
        ps.require_map(f, "inverse_flow");
        ps.check_keys(f, {"t", "xs"}, "inverse_flow");
        if (f["t"]) c.params.flow_t = ps.number(f["t"], "inverse_flow.t");
        if (f["xs"]) c.params.flow_xs = ps.numbers(f["xs"], "inverse_flow.xs");
    }
    if (const YAML::Node s = root["stationary"]) {
        ps.require_map(s, "stationary");
        ps.check_keys(s, {"t"}, "stationary");
        if (s["t"]) c.params.lemma_t = ps.number(s["t"], "stationary.t");
    }
    if (root["output"]) {
        c.out_dir = ps.scalar<std::string>(root["output"], "output");
    }
    if (root["workers"]) {
        const long long w = ps.scalar<long long>(root["workers"], "workers");
        if (w < 0) {
            ps.fail(root["workers"], "workers must be >= 0 (0 = all hardware threads)");
        }
        c.workers = static_cast<unsigned>(w);
    }
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

ordered_json to_json(const LevyModel2& model)
{
    return {{"drift", {model.drift()[0], model.drift()[1]}},
            {"gaussian_cov", {model.cov().uu, model.cov().ul, model.cov().ll}},
            {"jump_intensity", model.jump_intensity()},
            {"jump_law", law_json(model.jump_law())}};
}

ordered_json to_json(const ExperimentConfig& c)
{
    const auto& p = c.params;
    return {{"schema_version", c.schema_version},
            {"seed", c.seed},
            {"model_name", c.model_name},
            {"model", to_json(c.model)},
            {"backend", to_string(c.backend)},
            {"grid_dt", c.grid_dt},
            {"horizon", c.horizon},
            {"paths", c.paths},
            {"suites", c.suites},
            {"skip_inapplicable", c.skip_inapplicable},
            {"probes", {{"t", p.grid.ts}, {"x", p.grid.xs}, {"y", p.grid.ys}}},
            {"ruin", {{"levels", p.ruin_levels}}},
            {"monotonicity", {{"t", p.monotonicity.t}, {"y", p.monotonicity.y}, {"xs", p.monotonicity.xs}}},
            {"inverse_flow", {{"t", p.flow_t}, {"xs", p.flow_xs}}},
            {"stationary", {{"t", p.lemma_t}}}};
}

std::string config_hash(const ExperimentConfig& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(config).dump())));
    return buf;
}

}  // namespace gouflow
