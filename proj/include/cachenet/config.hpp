#pragma once

// Experiment configuration: a versioned JSON document binding catalog,
// topology, workload, run, tlru and analytics settings. Unknown keys are
// rejected so typos cannot silently change an experiment.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cachenet/analytics.hpp"
#include "cachenet/catalog.hpp"
#include "cachenet/sim.hpp"
#include "cachenet/tlru.hpp"

namespace cachenet {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AnalyticsConfig {
    double tolerance = 1e-12;
    int max_iter = 100;
    ChainProductMode chain_product_mode = ChainProductMode::Inclusive;
};

struct ExperimentConfig {
    int schema_version = 1;
    WorkloadSpec workload;  // catalog size, alpha, ttu law, seed; total_rate unused here
    int content_size = 1;
    Topology topology;
    SimConfig run;  // horizon, warmup, window, level scale, tlru, seed
    AnalyticsConfig analytics;
};

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + path + "." + key + "'");
    for (const auto& key : required)
        if (!obj.contains(key))
            throw ConfigError("missing required key '" + path + "." + key + "'");
}

inline double positive(const json& v, const std::string& path) {
    const double d = v.get<double>();
    if (!(d > 0.0)) throw ConfigError("'" + path + "' must be > 0");
    return d;
}

inline TtuLaw parse_ttu_law(const json& obj, const std::string& path) {
    require_keys(obj, path, {"kind", "value", "mean", "stddev", "floor"}, {"kind"});
    TtuLaw law;
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "constant") {
        require_keys(obj, path, {"kind", "value"}, {"kind", "value"});
        law.kind = TtuLaw::Kind::Constant;
        law.value = positive(obj.at("value"), path + ".value");
    } else if (kind == "normal") {
        require_keys(obj, path, {"kind", "mean", "stddev", "floor"},
                     {"kind", "mean", "stddev"});
        law.kind = TtuLaw::Kind::Normal;
        law.mean = obj.at("mean").get<double>();
        law.stddev = positive(obj.at("stddev"), path + ".stddev");
        if (obj.contains("floor")) law.floor = positive(obj.at("floor"), path + ".floor");
    } else if (kind == "absent") {
        require_keys(obj, path, {"kind"}, {"kind"});
        law.kind = TtuLaw::Kind::Absent;
    } else {
        throw ConfigError("'" + path + ".kind' must be constant, normal or absent");
    }
    return law;
}

inline Policy parse_policy(const std::string& name, const std::string& path) {
    if (name == "fifo") return Policy::Fifo;
    if (name == "lru") return Policy::Lru;
    if (name == "lfu") return Policy::Lfu;
    if (name == "tlru") return Policy::Tlru;
    throw ConfigError("'" + path + "' must be fifo, lru, lfu or tlru");
}

inline std::string policy_name(Policy p) {
    switch (p) {
        case Policy::Fifo: return "fifo";
        case Policy::Lru: return "lru";
        case Policy::Lfu: return "lfu";
        case Policy::Tlru: return "tlru";
    }
    return "?";
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    detail::require_keys(doc, "$",
                         {"schema_version", "catalog", "topology", "workload", "run",
                          "tlru", "analytics"},
                         {"schema_version", "catalog", "topology", "workload", "run"});
    ExperimentConfig cfg;
    cfg.schema_version = doc.at("schema_version").get<int>();
    if (cfg.schema_version != 1) throw ConfigError("unsupported schema_version");

    const json& cat = doc.at("catalog");
    detail::require_keys(cat, "catalog", {"size", "zipf_alpha", "content_size", "ttu_law"},
                         {"size", "zipf_alpha", "ttu_law"});
    cfg.workload.catalog_size = cat.at("size").get<int>();
    if (cfg.workload.catalog_size < 1) throw ConfigError("'catalog.size' must be >= 1");
    cfg.workload.zipf_alpha = detail::positive(cat.at("zipf_alpha"), "catalog.zipf_alpha");
    if (cat.contains("content_size")) {
        cfg.content_size = cat.at("content_size").get<int>();
        if (cfg.content_size < 1) throw ConfigError("'catalog.content_size' must be >= 1");
    }
    cfg.workload.ttu_law = detail::parse_ttu_law(cat.at("ttu_law"), "catalog.ttu_law");

    const json& topo = doc.at("topology");
    detail::require_keys(topo, "topology", {"nodes", "level_ttu_scale"}, {"nodes"});
    if (topo.contains("level_ttu_scale"))
        cfg.run.level_ttu_scale =
            detail::positive(topo.at("level_ttu_scale"), "topology.level_ttu_scale");
    for (const auto& n : topo.at("nodes")) {
        const std::string path = "topology.nodes[" + std::to_string(cfg.topology.nodes.size()) + "]";
        detail::require_keys(n, path,
                             {"name", "publisher", "parent", "capacity", "policy",
                              "exogenous_rate"},
                             {"name"});
        TopologyNode node;
        node.name = n.at("name").get<std::string>();
        node.is_publisher = n.contains("publisher") && n.at("publisher").get<bool>();
        if (!node.is_publisher) {
            detail::require_keys(n, path,
                                 {"name", "publisher", "parent", "capacity", "policy",
                                  "exogenous_rate"},
                                 {"name", "parent", "capacity", "policy"});
            node.capacity = n.at("capacity").get<int>();
            if (node.capacity < 1) throw ConfigError("'" + path + ".capacity' must be >= 1");
            node.policy = detail::parse_policy(n.at("policy").get<std::string>(),
                                               path + ".policy");
        }
        if (n.contains("exogenous_rate")) {
            node.exo_rate = n.at("exogenous_rate").get<double>();
            if (node.exo_rate < 0.0)
                throw ConfigError("'" + path + ".exogenous_rate' must be >= 0");
        }
        cfg.topology.nodes.push_back(node);
    }
    // resolve parents by name once all nodes are known
    std::size_t idx = 0;
    for (const auto& n : topo.at("nodes")) {
        const std::string path = "topology.nodes[" + std::to_string(idx) + "]";
        if (n.contains("parent")) {
            const int p = cfg.topology.find(n.at("parent").get<std::string>());
            if (p < 0)
                throw ConfigError("'" + path + ".parent' references undefined node '" +
                                  n.at("parent").get<std::string>() + "'");
            cfg.topology.nodes[idx].parent = p;
        }
        ++idx;
    }
    try {
        cfg.topology.finalize();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const json& wl = doc.at("workload");
    detail::require_keys(wl, "workload", {"seed"}, {"seed"});
    cfg.workload.seed = wl.at("seed").get<std::uint64_t>();
    cfg.run.seed = cfg.workload.seed;

    const json& run = doc.at("run");
    detail::require_keys(run, "run", {"horizon", "warmup_fraction", "metric_window"},
                         {"horizon"});
    cfg.run.horizon = run.at("horizon").get<double>();
    if (cfg.run.horizon < 0.0) throw ConfigError("'run.horizon' must be >= 0");
    if (run.contains("warmup_fraction")) {
        cfg.run.warmup_fraction = run.at("warmup_fraction").get<double>();
        if (cfg.run.warmup_fraction < 0.0 || cfg.run.warmup_fraction >= 1.0)
            throw ConfigError("'run.warmup_fraction' must be in [0, 1)");
    }
    if (run.contains("metric_window")) {
        cfg.run.metric_window = run.at("metric_window").get<double>();
        if (cfg.run.metric_window < 0.0)
            throw ConfigError("'run.metric_window' must be >= 0");
    }

    if (doc.contains("tlru")) {
        const json& t = doc.at("tlru");
        detail::require_keys(t, "tlru", {"composite_rule", "cold_start_admit", "ttu_floor"},
                             {});
        if (t.contains("composite_rule")) {
            const std::string r = t.at("composite_rule").get<std::string>();
            if (r == "max")
                cfg.run.tlru.composite_rule = CompositeRule::Max;
            else if (r == "min")
                cfg.run.tlru.composite_rule = CompositeRule::Min;
            else if (r == "f_only")
                cfg.run.tlru.composite_rule = CompositeRule::FOnly;
            else if (r == "g_only")
                cfg.run.tlru.composite_rule = CompositeRule::GOnly;
            else
                throw ConfigError("'tlru.composite_rule' must be max, min, f_only or g_only");
        }
        if (t.contains("cold_start_admit"))
            cfg.run.tlru.cold_start_admit = t.at("cold_start_admit").get<bool>();
        if (t.contains("ttu_floor"))
            cfg.run.tlru.ttu_floor = detail::positive(t.at("ttu_floor"), "tlru.ttu_floor");
    }

    if (doc.contains("analytics")) {
        const json& a = doc.at("analytics");
        detail::require_keys(a, "analytics", {"tolerance", "max_iter", "chain_product_mode"},
                             {});
        if (a.contains("tolerance"))
            cfg.analytics.tolerance = detail::positive(a.at("tolerance"), "analytics.tolerance");
        if (a.contains("max_iter")) {
            cfg.analytics.max_iter = a.at("max_iter").get<int>();
            if (cfg.analytics.max_iter < 1)
                throw ConfigError("'analytics.max_iter' must be >= 1");
        }
        if (a.contains("chain_product_mode")) {
            const std::string m = a.at("chain_product_mode").get<std::string>();
            if (m == "inclusive")
                cfg.analytics.chain_product_mode = ChainProductMode::Inclusive;
            else if (m == "exclusive")
                cfg.analytics.chain_product_mode = ChainProductMode::Exclusive;
            else
                throw ConfigError("'analytics.chain_product_mode' must be inclusive or exclusive");
        }
    }
    return cfg;
}

}  // namespace cachenet
