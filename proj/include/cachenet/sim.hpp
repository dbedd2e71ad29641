#pragma once

// Event-driven simulation of a tree of cache nodes rooted at the
// publisher. Misses forward toward the publisher; the returning content is
// offered to every node on the miss path at the same simulated instant
// (zero download delay), subject to each node's policy and admission.
// Runs are a pure function of (topology, catalog, seed, horizon).

#include <array>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachenet/cache.hpp"
#include "cachenet/catalog.hpp"
#include "cachenet/tlru.hpp"

namespace cachenet {

struct TopologyNode {
    std::string name;
    int parent = -1;       // index toward the publisher; -1 for the publisher
    bool is_publisher = false;
    int capacity = 1;      // ignored for the publisher (permanent copies)
    Policy policy = Policy::Lru;
    double exo_rate = 0.0;  // aggregate exogenous requests/second
    int level = 0;          // depth from the publisher (publisher = 0)
};

struct Topology {
    std::vector<TopologyNode> nodes;
    int publisher = -1;

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].name == name) return static_cast<int>(i);
        return -1;
    }

    // Derives levels and validates the tree shape.
    void finalize() {
        publisher = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_publisher) {
                if (publisher >= 0) throw std::invalid_argument("topology: two publishers");
                publisher = static_cast<int>(i);
                if (nodes[i].parent != -1)
                    throw std::invalid_argument("topology: publisher cannot have a parent");
            }
        }
        if (publisher < 0) throw std::invalid_argument("topology: no publisher");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            int n = static_cast<int>(i), depth = 0;
            while (!nodes[static_cast<std::size_t>(n)].is_publisher) {
                n = nodes[static_cast<std::size_t>(n)].parent;
                ++depth;
                if (n < 0 || n >= static_cast<int>(nodes.size()) ||
                    depth > static_cast<int>(nodes.size()))
                    throw std::invalid_argument("topology: node " + nodes[i].name +
                                                " does not reach the publisher");
            }
            nodes[i].level = depth;
        }
    }
};

struct NodeContentCounts {
    std::uint64_t requests = 0, hits = 0, misses = 0, expired_misses = 0,
                  rejections = 0, evictions = 0;
};

struct NodeWindowCounts {
    std::vector<std::uint64_t> total, exo, forwarded_out;
    void bump(std::vector<std::uint64_t>& v, std::size_t w) {
        if (v.size() <= w) v.resize(w + 1, 0);
        ++v[w];
    }
};

struct Metrics {
    int catalog_size = 0;
    std::vector<std::vector<NodeContentCounts>> per_node;  // [node][content-1]
    std::vector<std::uint64_t> hop_histogram;  // hops from origin to first hit
    std::vector<NodeWindowCounts> windows;     // populated when window > 0
    double metric_window = 0.0;
    std::uint64_t exogenous_requests = 0;
    std::uint64_t terminated_requests = 0;
    std::uint64_t expiry_violations = 0;
    std::uint64_t outcome_digest = 0xcbf29ce484222325ULL;  // trace fingerprint
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;

    const NodeContentCounts& at(int node, ContentId content) const {
        return per_node.at(static_cast<std::size_t>(node))
            .at(static_cast<std::size_t>(content - 1));
    }

    std::uint64_t node_requests(int node) const {
        std::uint64_t n = 0;
        for (const auto& c : per_node.at(static_cast<std::size_t>(node))) n += c.requests;
        return n;
    }
    std::uint64_t node_hits(int node) const {
        std::uint64_t n = 0;
        for (const auto& c : per_node.at(static_cast<std::size_t>(node))) n += c.hits;
        return n;
    }
    double node_hit_ratio(int node) const {
        const std::uint64_t r = node_requests(node);
        return r == 0 ? 0.0 : static_cast<double>(node_hits(node)) / static_cast<double>(r);
    }

    void digest_mix(std::uint64_t v) {
        outcome_digest ^= v;
        outcome_digest *= 0x100000001b3ULL;
    }
};

// Plain arithmetic of the total-rate decomposition: exogenous count plus
// the children's forwarded (miss) counts over a trailing window.
inline double aggregate_rate(std::uint64_t exo_count,
                             const std::vector<std::uint64_t>& endo_counts, double window) {
    if (window <= 0.0) throw std::domain_error("aggregate_rate: window must be > 0");
    std::uint64_t total = exo_count;
    for (auto c : endo_counts) total += c;
    return static_cast<double>(total) / window;
}

struct SimConfig {
    double horizon = 0.0;
    double warmup_fraction = 0.0;   // metrics discard [0, warmup * horizon)
    double metric_window = 0.0;     // 0 disables per-window counting
    double level_ttu_scale = 1.0;   // effective TTU multiplier per tree level
    TlruConfig tlru;
    std::uint64_t seed = 0;
};

class Simulation {
public:
    Simulation(const Topology& topo, const Catalog& catalog, const SimConfig& cfg)
        : topo_(topo), catalog_(catalog), cfg_(cfg) {
        if (topo_.publisher < 0) throw std::invalid_argument("simulation: topology not finalized");
        for (const auto& n : topo_.nodes)
            states_.emplace_back(n.is_publisher ? 1 : n.capacity);
        metrics_.catalog_size = catalog_.size();
        metrics_.per_node.assign(topo_.nodes.size(),
                                 std::vector<NodeContentCounts>(
                                     static_cast<std::size_t>(catalog_.size())));
        metrics_.windows.resize(topo_.nodes.size());
        metrics_.metric_window = cfg_.metric_window;
        metrics_.seed = cfg_.seed;
    }

    Metrics run() {
        const double warmup_end = cfg_.warmup_fraction * cfg_.horizon;
        struct Arrival {
            double time;
            std::uint64_t seq;
            int node;
            bool operator>(const Arrival& o) const {
                return std::tie(time, seq) > std::tie(o.time, o.seq);
            }
        };
        std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> queue;
        std::vector<Rng> arrival_rng, content_rng;
        ZipfSampler sampler(catalog_.size(), catalog_.zipf_alpha);
        std::uint64_t seq = 0;
        for (std::size_t i = 0; i < topo_.nodes.size(); ++i) {
            arrival_rng.push_back(
                Rng::stream(cfg_.seed, "node/" + std::to_string(i) + "/arrival"));
            content_rng.push_back(
                Rng::stream(cfg_.seed, "node/" + std::to_string(i) + "/content"));
            if (topo_.nodes[i].exo_rate > 0.0) {
                const double t = next_arrival(topo_.nodes[i].exo_rate, arrival_rng[i]);
                if (t < cfg_.horizon) queue.push({t, seq++, static_cast<int>(i)});
            }
        }
        while (!queue.empty()) {
            const Arrival a = queue.top();
            queue.pop();
            const ContentId content =
                sampler.sample(content_rng[static_cast<std::size_t>(a.node)]);
            process_request(a.node, content, a.time, a.time >= warmup_end);
            const double next = a.time + next_arrival(topo_.nodes[static_cast<std::size_t>(
                                                          a.node)].exo_rate,
                                                      arrival_rng[static_cast<std::size_t>(a.node)]);
            if (next < cfg_.horizon) queue.push({next, seq++, a.node});
        }
        for (const auto& s : states_) metrics_.expiry_violations += s.expiry_violations();
        return metrics_;
    }

    const CacheState& state(int node) const {
        return states_.at(static_cast<std::size_t>(node));
    }

private:
    void count_window(int node, double now, bool exo, bool forwarded) {
        if (cfg_.metric_window <= 0.0) return;
        auto& w = metrics_.windows[static_cast<std::size_t>(node)];
        const auto idx = static_cast<std::size_t>(now / cfg_.metric_window);
        w.bump(w.total, idx);
        if (exo) w.bump(w.exo, idx);
        if (forwarded) w.bump(w.forwarded_out, idx);
    }

    // One exogenous request and its whole same-instant cascade: walk toward
    // the publisher until a live copy is found, then offer the content to
    // every node on the miss path.
    void process_request(int origin, ContentId content, double now, bool record) {
        if (content < 1 || content > catalog_.size())
            throw std::invalid_argument("request for content outside the catalog");
        if (record) ++metrics_.exogenous_requests;
        std::vector<int> miss_path;
        int node = origin;
        int serving = -1;
        while (true) {
            auto& row = metrics_.per_node[static_cast<std::size_t>(node)]
                                         [static_cast<std::size_t>(content - 1)];
            const auto& tn = topo_.nodes[static_cast<std::size_t>(node)];
            if (tn.is_publisher) {
                if (record) {
                    ++row.requests;
                    ++row.hits;
                    count_window(node, now, node == origin, false);
                }
                serving = node;
                break;
            }
            auto& st = states_[static_cast<std::size_t>(node)];
            st.record_request(content, now);
            const AccessOutcome out = st.lookup(content, now);
            if (record) {
                ++row.requests;
                count_window(node, now, node == origin,
                             out.result != AccessResult::Hit);
                switch (out.result) {
                    case AccessResult::Hit: ++row.hits; break;
                    case AccessResult::Miss: ++row.misses; break;
                    case AccessResult::ExpiredMiss: ++row.expired_misses; break;
                }
            }
            if (out.result == AccessResult::Hit) {
                serving = node;
                break;
            }
            miss_path.push_back(node);
            node = tn.parent;
        }
        if (record) {
            ++metrics_.terminated_requests;
            const auto hops = miss_path.size();
            if (metrics_.hop_histogram.size() <= hops)
                metrics_.hop_histogram.resize(hops + 1, 0);
            ++metrics_.hop_histogram[hops];
            metrics_.digest_mix(static_cast<std::uint64_t>(serving) * 1000003u +
                                static_cast<std::uint64_t>(content));
        }
        fill_on_return(content, miss_path, now, record);
    }

    void fill_on_return(ContentId content, const std::vector<int>& path, double now,
                        bool record) {
        const ContentMeta& meta = catalog_.meta(content);
        if (!meta.publisher_ttu) return;  // never-cache stamp
        for (int node : path) {
            const auto& tn = topo_.nodes[static_cast<std::size_t>(node)];
            auto& st = states_[static_cast<std::size_t>(node)];
            auto& row = metrics_.per_node[static_cast<std::size_t>(node)]
                                         [static_cast<std::size_t>(content - 1)];
            ContentMeta local = meta;
            if (cfg_.level_ttu_scale != 1.0)
                local.publisher_ttu = *meta.publisher_ttu *
                                      std::pow(cfg_.level_ttu_scale, tn.level);
            if (tn.policy == Policy::Tlru) {
                const TlruOutcome out = tlru_insert(st, local, now, cfg_.tlru);
                if (record) {
                    if (out.result == TlruResult::Rejected) ++row.rejections;
                    row.evictions += out.evicted.size();
                    metrics_.digest_mix(static_cast<std::uint64_t>(out.result == TlruResult::Stored
                                                                       ? 2
                                                                       : 3) +
                                        out.evicted.size() * 7919u);
                    for (ContentId e : out.evicted)
                        metrics_.digest_mix(static_cast<std::uint64_t>(e));
                }
            } else {
                const auto evicted = st.insert(content, local.size,
                                               now + *local.publisher_ttu, now, tn.policy);
                if (record && evicted) {
                    row.evictions += evicted->size();
                    metrics_.digest_mix(2 + evicted->size() * 7919u);
                    for (ContentId e : *evicted)
                        metrics_.digest_mix(static_cast<std::uint64_t>(e));
                }
            }
        }
    }

    const Topology& topo_;
    const Catalog& catalog_;
    SimConfig cfg_;
    std::vector<CacheState> states_;
    Metrics metrics_;
};

inline Metrics run_simulation(const Topology& topo, const Catalog& catalog,
                              const SimConfig& cfg) {
    return Simulation(topo, catalog, cfg).run();
}

}  // namespace cachenet
