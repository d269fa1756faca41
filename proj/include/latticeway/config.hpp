#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "latticeway/netsim.hpp"
#include "latticeway/rates.hpp"

namespace latticeway::config {

using nlohmann::json;

/// schema violation; the CLI maps this to its config-error exit code
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::set<std::string>& known_commands() {
    static const std::set<std::string> c = {"rates", "gap-check", "simulate", "transform-demo", "chain"};
    return c;
}

/**
 * Batch experiment description. Everything is optional except what the
 * selected command actually needs; unknown fields anywhere are rejected.
 */
struct ExperimentConfig {
    std::optional<std::string> command;

    std::optional<netsim::NetworkConfig> network;

    int dimension = 1;
    long long blocks = 10;
    long long trials = 1;
    std::uint64_t seed = 1;
    std::optional<double> rate_sym;  // default 1.0 when unset

    // transform-demo knobs (defaults reproduce the worked 1-D instance)
    long long demo_prime = 5;
    long long demo_ratio = 2;
    Rat demo_base_scale = Rat(1, 2);
    Rat demo_coarse_scale = Rat(5);

    std::optional<std::string> out_path;
    std::string format = "json";
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
}

inline double need_positive(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + " must be a number");
    double x = v.get<double>();
    if (!(x > 0) || !std::isfinite(x)) throw ConfigError(name + " must be positive and finite");
    return x;
}

inline long long need_int_at_least(const json& v, long long lo, const std::string& name) {
    if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
    long long x = v.get<long long>();
    if (x < lo) throw ConfigError(name + " must be >= " + std::to_string(lo));
    return x;
}

inline Rat need_rational(const json& v, const std::string& name) {
    try {
        if (v.is_number_integer()) return Rat(v.get<long long>());
        if (v.is_string()) return Rat::parse(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
    throw ConfigError(name + " must be an integer or a \"p/q\" string");
}

}  // namespace detail

inline netsim::NetworkConfig parse_network(const json& net) {
    detail::reject_unknown(net, {"nodes", "powers", "noise_variances", "duplex"}, "network");
    netsim::NetworkConfig cfg;
    if (!net.contains("powers") || !net["powers"].is_array())
        throw ConfigError("network.powers must be an array");
    if (!net.contains("noise_variances") || !net["noise_variances"].is_array())
        throw ConfigError("network.noise_variances must be an array");
    for (const auto& v : net["powers"]) cfg.powers.push_back(detail::need_positive(v, "network.powers[]"));
    for (const auto& v : net["noise_variances"]) {
        if (!v.is_number()) throw ConfigError("network.noise_variances[] must be numbers");
        double x = v.get<double>();
        if (!(x >= 0) || !std::isfinite(x)) throw ConfigError("network.noise_variances[] must be >= 0");
        cfg.noise_variances.push_back(x);
    }
    cfg.nodes = net.contains("nodes")
                    ? static_cast<int>(detail::need_int_at_least(net["nodes"], 3, "network.nodes"))
                    : static_cast<int>(cfg.powers.size());
    if (net.contains("duplex")) {
        std::string d = net["duplex"].is_string() ? net["duplex"].get<std::string>() : "";
        if (d == "full")
            cfg.duplex = netsim::Duplex::full;
        else if (d == "half")
            cfg.duplex = netsim::Duplex::half;
        else
            throw ConfigError("network.duplex must be \"full\" or \"half\"");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("network: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(root, {"command", "network", "simulation", "transform", "output"}, "config");

    ExperimentConfig cfg;
    if (root.contains("command")) {
        if (!root["command"].is_string()) throw ConfigError("command must be a string");
        cfg.command = root["command"].get<std::string>();
        if (!known_commands().count(*cfg.command)) throw ConfigError("unknown command \"" + *cfg.command + "\"");
    }
    if (root.contains("network")) cfg.network = parse_network(root["network"]);

    if (root.contains("simulation")) {
        const json& sim = root["simulation"];
        detail::reject_unknown(sim, {"dimension", "blocks", "trials", "seed", "rate_sym"}, "simulation");
        if (sim.contains("dimension"))
            cfg.dimension = static_cast<int>(detail::need_int_at_least(sim["dimension"], 1, "simulation.dimension"));
        if (sim.contains("blocks")) cfg.blocks = detail::need_int_at_least(sim["blocks"], 1, "simulation.blocks");
        if (sim.contains("trials")) cfg.trials = detail::need_int_at_least(sim["trials"], 1, "simulation.trials");
        if (sim.contains("seed")) cfg.seed = static_cast<std::uint64_t>(
            detail::need_int_at_least(sim["seed"], 0, "simulation.seed"));
        if (sim.contains("rate_sym")) cfg.rate_sym = detail::need_positive(sim["rate_sym"], "simulation.rate_sym");
    }

    if (root.contains("transform")) {
        const json& tr = root["transform"];
        detail::reject_unknown(tr, {"prime", "ratio", "base_scale", "coarse_scale"}, "transform");
        if (tr.contains("prime")) {
            cfg.demo_prime = detail::need_int_at_least(tr["prime"], 2, "transform.prime");
            if (!is_prime(cfg.demo_prime)) throw ConfigError("transform.prime must be prime");
        }
        if (tr.contains("ratio")) cfg.demo_ratio = detail::need_int_at_least(tr["ratio"], 1, "transform.ratio");
        if (tr.contains("base_scale")) {
            cfg.demo_base_scale = detail::need_rational(tr["base_scale"], "transform.base_scale");
            if (!cfg.demo_base_scale.is_positive()) throw ConfigError("transform.base_scale must be positive");
        }
        if (tr.contains("coarse_scale")) {
            cfg.demo_coarse_scale = detail::need_rational(tr["coarse_scale"], "transform.coarse_scale");
            if (!cfg.demo_coarse_scale.is_positive()) throw ConfigError("transform.coarse_scale must be positive");
        }
    }

    if (root.contains("output")) {
        const json& out = root["output"];
        detail::reject_unknown(out, {"path", "format"}, "output");
        if (out.contains("path")) {
            if (!out["path"].is_string()) throw ConfigError("output.path must be a string");
            cfg.out_path = out["path"].get<std::string>();
        }
        if (out.contains("format")) {
            std::string f = out["format"].is_string() ? out["format"].get<std::string>() : "";
            if (f != "json" && f != "csv") throw ConfigError("output.format must be \"json\" or \"csv\"");
            cfg.format = f;
        }
    }
    return cfg;
}

/// fixed 12-significant-digit float formatting keeps CSV output reproducible
inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline json to_json(const rates::RateReport& r) {
    return json{{"type", "rate_report"},
                {"achievable", r.achievable},
                {"binding", r.binding},
                {"outer", r.outer},
                {"gap", r.gap},
                {"gap_bound", rates::kHalfLog3},
                {"truncated_powers", r.truncated_powers},
                {"N", r.N},
                {"M", r.M},
                {"orientation13", rates::orientation_name(r.orientation13)},
                {"orientation24", rates::orientation_name(r.orientation24)}};
}

inline json to_json(const netsim::ProtocolPlan& plan) {
    std::vector<std::string> scales;
    for (const auto& s : plan.node_scales) scales.push_back(s.str());
    return json{{"node_count", plan.node_count},
                {"dimension", plan.dimension},
                {"blocks", plan.blocks},
                {"rate_sym", plan.rate_sym},
                {"prime", plan.prime},
                {"pair_ratios", plan.pair_ratios},
                {"p", plan.p},
                {"q", plan.q},
                {"node_scales", scales}};
}

inline json to_json(const netsim::SimulationResult& r) {
    return json{{"type", "simulation"},
                {"blocks", r.blocks},
                {"channel_uses", r.channel_uses},
                {"rate_sym", r.rate_sym},
                {"delivered", {{"a", r.delivered_a}, {"b", r.delivered_b}}},
                {"message_errors", {{"a", r.errors_a}, {"b", r.errors_b}}},
                {"decode_failures", r.decode_failures},
                {"throughput", r.throughput},
                {"mean_power", r.mean_power}};
}

inline json to_json(const netsim::MonteCarloResult& mc) {
    return json{{"type", "monte_carlo"},
                {"trials", mc.trials},
                {"delivered", {{"a", mc.delivered_a}, {"b", mc.delivered_b}}},
                {"message_errors", {{"a", mc.errors_a}, {"b", mc.errors_b}}},
                {"error_rate", {{"a", mc.error_rate_a}, {"b", mc.error_rate_b}}},
                {"wilson95",
                 {{"a", {mc.wilson_a.first, mc.wilson_a.second}}, {"b", {mc.wilson_b.first, mc.wilson_b.second}}}},
                {"decode_failures", mc.decode_failures},
                {"first_trial", to_json(mc.first)}};
}

inline std::string trace_csv(const netsim::SimulationResult& r) {
    std::string out = "block,node,role,field_combination,decode_ok\n";
    for (const auto& row : r.trace) {
        out += std::to_string(row.block) + "," + std::to_string(row.node) + "," + row.role + "," +
               row.field_combination + "," + (row.decode_ok < 0 ? "-" : std::to_string(row.decode_ok)) + "\n";
    }
    return out;
}

}  // namespace latticeway::config
