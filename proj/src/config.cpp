#include "decaylab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace decaylab {

namespace {

std::string where(const YAML::Node& node, const std::string& key) {
    std::ostringstream msg;
    msg << "'" << key << "'";
    const auto mark = node.Mark();
    if (mark.line >= 0) msg << " (line " << mark.line + 1 << ")";
    return msg.str();
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError("config section " + where(node, path) + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            const std::string full = path.empty() ? key : path + "." + key;
            throw ConfigError("unknown config key " + where(kv.first, full));
        }
    }
}

template <typename T>
T read(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("config key " + where(node, key) + " has the wrong type");
    }
}

template <typename T>
void maybe(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
    if (const auto n = parent[key]) out = read<T>(n, path + key);
}

template <typename T>
void maybe_opt(const YAML::Node& parent, const char* key, const std::string& path,
               std::optional<T>& out) {
    if (const auto n = parent[key]) {
        if (n.IsScalar() && n.as<std::string>() == "auto") {
            out.reset();
        } else {
            out = read<T>(n, path + key);
        }
    }
}

template <typename F>
auto convert(const YAML::Node& node, const std::string& key, F f) {
    const auto text = read<std::string>(node, key);
    try {
        return f(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config key " + where(node, key) + ": " + e.what());
    }
}

StateFamily state_family_from_string(std::string_view s) {
    if (s == "gaussian") return StateFamily::gaussian;
    if (s == "eigenvector") return StateFamily::eigenvector;
    if (s == "band_limited") return StateFamily::band_limited;
    throw std::invalid_argument("unknown state family '" + std::string(s) + "'");
}

std::string_view to_string(StateFamily f) {
    switch (f) {
        case StateFamily::gaussian: return "gaussian";
        case StateFamily::eigenvector: return "eigenvector";
        case StateFamily::band_limited: return "band_limited";
    }
    return "?";
}

ExperimentConfig from_node(const YAML::Node& root) {
    check_keys(root, "",
               {"schema_version", "scenario", "description", "seed", "output_dir", "grid",
                "potential", "commutator", "band", "drift", "propagation", "state", "decay",
                "propositions", "group_times", "force_zero_K", "ladder", "samples",
                "eigenvector_control", "expected"});
    ExperimentConfig cfg;
    if (!root["schema_version"]) throw ConfigError("config is missing 'schema_version'");
    cfg.schema_version = read<int>(root["schema_version"], "schema_version");
    if (cfg.schema_version != kConfigSchemaVersion) {
        throw ConfigError("unsupported config schema_version " + std::to_string(cfg.schema_version));
    }
    if (!root["seed"]) throw ConfigError("config is missing the mandatory 'seed'");
    cfg.seed = read<std::uint64_t>(root["seed"], "seed");
    maybe(root, "scenario", "", cfg.scenario);
    maybe(root, "description", "", cfg.description);
    maybe(root, "output_dir", "", cfg.output_dir);

    if (const auto g = root["grid"]) {
        check_keys(g, "grid", {"geometry", "n", "L", "audit_n"});
        if (g["geometry"]) cfg.geometry = convert(g["geometry"], "grid.geometry", geometry_from_string);
        maybe(g, "n", "grid.", cfg.n);
        maybe(g, "L", "grid.", cfg.L);
        maybe(g, "audit_n", "grid.", cfg.audit_n);
    }
    cfg.space_dim = cfg.geometry == Geometry::radial3d ? 3 : 1;
    if (const auto p = root["potential"]) {
        check_keys(p, "potential", {"family", "coupling", "dim"});
        if (p["family"]) {
            cfg.potential = convert(p["family"], "potential.family", potential_family_from_string);
        }
        maybe(p, "coupling", "potential.", cfg.coupling);
        maybe(p, "dim", "potential.", cfg.space_dim);
        if (cfg.space_dim != 1 && cfg.space_dim != 3) throw ConfigError("potential.dim must be 1 or 3");
    }
    if (const auto c = root["commutator"]) {
        check_keys(c, "commutator", {"c", "s"});
        maybe(c, "c", "commutator.", cfg.c);
        maybe(c, "s", "commutator.", cfg.s);
    }
    if (const auto b = root["band"]) {
        check_keys(b, "band", {"lo", "hi", "split_m"});
        maybe_opt(b, "lo", "band.", cfg.band_lo);
        maybe_opt(b, "hi", "band.", cfg.band_hi);
        maybe_opt(b, "split_m", "band.", cfg.split_m);
    }
    if (const auto d = root["drift"]) {
        check_keys(d, "drift", {"policy", "T", "cap"});
        if (d["policy"]) {
            const auto policy = read<std::string>(d["policy"], "drift.policy");
            if (policy != "auto" && policy != "fixed") {
                throw ConfigError("drift.policy must be 'auto' or 'fixed' " + where(d["policy"], "drift.policy"));
            }
            cfg.tb_auto = policy == "auto";
        }
        maybe(d, "T", "drift.", cfg.tb_value);
        maybe(d, "cap", "drift.", cfg.tb_cap);
    }
    if (const auto p = root["propagation"]) {
        check_keys(p, "propagation", {"kernel", "tolerance", "dt"});
        if (p["kernel"]) cfg.kernel = convert(p["kernel"], "propagation.kernel", kernel_from_string);
        maybe(p, "tolerance", "propagation.", cfg.tolerance);
        maybe(p, "dt", "propagation.", cfg.dt);
    }
    if (const auto s = root["state"]) {
        check_keys(s, "state", {"family", "width", "center", "momentum", "amplitude", "index"});
        if (s["family"]) cfg.state.family = convert(s["family"], "state.family", state_family_from_string);
        maybe(s, "width", "state.", cfg.state.width);
        maybe(s, "center", "state.", cfg.state.center);
        maybe(s, "momentum", "state.", cfg.state.momentum);
        maybe(s, "amplitude", "state.", cfg.state.amplitude);
        maybe(s, "index", "state.", cfg.state.index);
    }
    if (const auto d = root["decay"]) {
        check_keys(d, "decay", {"t_lo", "t_max", "tolerance", "expected_failure", "note"});
        maybe(d, "t_lo", "decay.", cfg.t_lo);
        maybe_opt(d, "t_max", "decay.", cfg.t_max);
        maybe(d, "tolerance", "decay.", cfg.exponent_tolerance);
        maybe(d, "expected_failure", "decay.", cfg.expected_failure);
        maybe(d, "note", "decay.", cfg.control_note);
    }
    if (const auto p = root["propositions"]) {
        if (!p.IsSequence()) throw ConfigError("'propositions' " + where(p, "propositions") + " must be a list");
        for (const auto& item : p) {
            cfg.propositions.push_back(convert(item, "propositions", prop_from_string));
        }
    }
    if (const auto g = root["group_times"]) cfg.group_times = read<std::vector<double>>(g, "group_times");
    maybe(root, "force_zero_K", "", cfg.force_zero_K);
    if (const auto l = root["ladder"]) cfg.ladder = read<std::vector<std::size_t>>(l, "ladder");
    if (const auto s = root["samples"]) {
        check_keys(s, "samples", {"count", "eps_lo", "e_hi", "centre_lo", "centre_hi", "width_lo",
                                  "width_hi", "phase_max", "seed"});
        maybe(s, "count", "samples.", cfg.samples.count);
        maybe(s, "eps_lo", "samples.", cfg.samples.eps_lo);
        maybe(s, "e_hi", "samples.", cfg.samples.e_hi);
        maybe(s, "centre_lo", "samples.", cfg.samples.centre_lo);
        maybe(s, "centre_hi", "samples.", cfg.samples.centre_hi);
        maybe(s, "width_lo", "samples.", cfg.samples.width_lo);
        maybe(s, "width_hi", "samples.", cfg.samples.width_hi);
        maybe(s, "phase_max", "samples.", cfg.samples.phase_max);
        maybe(s, "seed", "samples.", cfg.samples.seed);
    } else {
        cfg.samples.seed = cfg.seed;
    }
    maybe(root, "eigenvector_control", "", cfg.eigenvector_control);
    if (const auto e = root["expected"]) {
        if (!e.IsMap()) throw ConfigError("'expected' must be a mapping");
        for (const auto& kv : e) {
            const auto key = kv.first.as<std::string>();
            convert(kv.first, "expected", prop_from_string);
            cfg.expected[key] = read<std::string>(kv.second, "expected." + key);
        }
    }

    if (cfg.propositions.empty()) throw ConfigError("config lists no propositions");
    if (cfg.n < kMinGridPoints || !(cfg.L > 0.0)) {
        throw ConfigError("grid needs n >= " + std::to_string(kMinGridPoints) + " and L > 0");
    }
    if (cfg.s != 0.0 && cfg.s != 0.5) throw ConfigError("commutator.s must be 0 or 0.5");
    if (!(cfg.dt > 0.0) || !(cfg.tolerance > 0.0)) {
        throw ConfigError("propagation.dt and propagation.tolerance must be positive");
    }
    return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root || !root.IsMap()) throw ConfigError("config must be a mapping at the top level");
    return from_node(root);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string canonical_config(const ExperimentConfig& cfg) {
    using nlohmann::json;
    json j;
    j["schema_version"] = cfg.schema_version;
    j["scenario"] = cfg.scenario;
    j["description"] = cfg.description;
    j["seed"] = cfg.seed;
    j["grid"] = {{"geometry", to_string(cfg.geometry)}, {"n", cfg.n}, {"L", cfg.L}, {"audit_n", cfg.audit_n}};
    j["potential"] = {{"family", to_string(cfg.potential)}, {"coupling", cfg.coupling}, {"dim", cfg.space_dim}};
    j["commutator"] = {{"c", cfg.c}, {"s", cfg.s}};
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json("auto"); };
    j["band"] = {{"lo", opt(cfg.band_lo)}, {"hi", opt(cfg.band_hi)}, {"split_m", opt(cfg.split_m)}};
    j["drift"] = {{"policy", cfg.tb_auto ? "auto" : "fixed"}, {"T", cfg.tb_value}, {"cap", cfg.tb_cap}};
    j["propagation"] = {{"kernel", to_string(cfg.kernel)}, {"tolerance", cfg.tolerance}, {"dt", cfg.dt}};
    j["state"] = {{"family", to_string(cfg.state.family)}, {"width", cfg.state.width},
                  {"center", cfg.state.center}, {"momentum", cfg.state.momentum},
                  {"amplitude", cfg.state.amplitude}, {"index", cfg.state.index}};
    j["decay"] = {{"t_lo", cfg.t_lo}, {"t_max", opt(cfg.t_max)}, {"tolerance", cfg.exponent_tolerance},
                  {"expected_failure", cfg.expected_failure}, {"note", cfg.control_note}};
    json props = json::array();
    for (PropId p : cfg.propositions) props.push_back(to_string(p));
    j["propositions"] = props;
    j["group_times"] = cfg.group_times;
    j["force_zero_K"] = cfg.force_zero_K;
    j["ladder"] = cfg.ladder;
    j["samples"] = {{"count", cfg.samples.count}, {"eps_lo", cfg.samples.eps_lo},
                    {"e_hi", cfg.samples.e_hi}, {"centre_lo", cfg.samples.centre_lo},
                    {"centre_hi", cfg.samples.centre_hi}, {"width_lo", cfg.samples.width_lo},
                    {"width_hi", cfg.samples.width_hi}, {"phase_max", cfg.samples.phase_max},
                    {"seed", cfg.samples.seed}};
    j["eigenvector_control"] = cfg.eigenvector_control;
    j["expected"] = cfg.expected;
    return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string text = canonical_config(cfg);
    return fnv1a(text.data(), text.size());
}

}  // namespace decaylab
