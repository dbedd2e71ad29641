#pragma once

// Exhaustive small-instance analysis of eviction policies as finite
// transition systems: reachable-state enumeration, protective vs
// non-protective classification, recurrence via strongly connected
// components, and shortest reorder paths.
//
// States are canonical encodings of the eviction-relevant bookkeeping:
//   FIFO  queue order (front = next victim)
//   LRU   recency order (front = least recent)
//   LFU   (content, capped count) pairs in recency order
//   TLRU  (content, remaining-TTU level) pairs in recency order; levels
//         decay by one per event step, fresh entries start at ttu_levels,
//         level 0 is expired, levels <= 1 form the contraction set.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachenet/cache.hpp"

namespace cachenet {

class StateSpaceBudgetExceeded : public std::runtime_error {
public:
    explicit StateSpaceBudgetExceeded(std::size_t count)
        : std::runtime_error("state-space budget exceeded at " + std::to_string(count) +
                             " states"),
          count(count) {}
    std::size_t count;
};

// Encoding: FIFO/LRU -> [c0, c1, ...]; LFU/TLRU -> [c0, v0, c1, v1, ...].
using StateCode = std::vector<int>;

struct AbstractEntry {
    int content = 0;
    int value = 0;  // LFU count or TLRU level; unused otherwise
};

struct TransitionEdge {
    int request = 0;  // content symbol driving the transition
    int target = -1;  // state id
    std::vector<int> evicted;
};

struct TransitionGraph {
    Policy policy = Policy::Lru;
    int catalog_size = 0;
    int cache_size = 0;
    int ttu_levels = 0;
    std::vector<StateCode> states;
    std::vector<std::vector<TransitionEdge>> edges;  // [state][request-1]

    int state_id(const StateCode& code) const {
        auto it = index.find(code);
        return it == index.end() ? -1 : it->second;
    }
    std::map<StateCode, int> index;
};

namespace detail {

inline bool pairwise(Policy p) { return p == Policy::Lfu || p == Policy::Tlru; }

inline std::vector<AbstractEntry> decode(Policy p, const StateCode& code) {
    std::vector<AbstractEntry> v;
    if (pairwise(p)) {
        for (std::size_t i = 0; i + 1 < code.size(); i += 2)
            v.push_back({code[i], code[i + 1]});
    } else {
        for (int c : code) v.push_back({c, 0});
    }
    return v;
}

inline StateCode encode(Policy p, const std::vector<AbstractEntry>& v) {
    StateCode code;
    for (const auto& e : v) {
        code.push_back(e.content);
        if (pairwise(p)) code.push_back(e.value);
    }
    return code;
}

// One request symbol applied to an abstract state; returns the successor
// and the evicted contents.
inline std::pair<StateCode, std::vector<int>> step(Policy policy, const StateCode& code,
                                                   int request, int cache_size,
                                                   int ttu_levels) {
    auto entries = decode(policy, code);
    std::vector<int> evicted;
    auto find = [&](int c) {
        return std::find_if(entries.begin(), entries.end(),
                            [&](const AbstractEntry& e) { return e.content == c; });
    };

    switch (policy) {
        case Policy::Fifo: {
            if (find(request) != entries.end()) break;  // hit leaves the queue as-is
            if (static_cast<int>(entries.size()) >= cache_size) {
                evicted.push_back(entries.front().content);
                entries.erase(entries.begin());
            }
            entries.push_back({request, 0});
            break;
        }
        case Policy::Lru: {
            if (auto it = find(request); it != entries.end()) {
                AbstractEntry e = *it;
                entries.erase(it);
                entries.push_back(e);  // most recent at the back
                break;
            }
            if (static_cast<int>(entries.size()) >= cache_size) {
                evicted.push_back(entries.front().content);
                entries.erase(entries.begin());
            }
            entries.push_back({request, 0});
            break;
        }
        case Policy::Lfu: {
            const int cap = cache_size + 1;  // counts beyond this never change a victim choice
            if (auto it = find(request); it != entries.end()) {
                AbstractEntry e = *it;
                e.value = std::min(e.value + 1, cap);
                entries.erase(it);
                entries.push_back(e);
                break;
            }
            if (static_cast<int>(entries.size()) >= cache_size) {
                // min count, ties by least recent (front-most)
                auto victim = entries.begin();
                for (auto it = entries.begin(); it != entries.end(); ++it)
                    if (it->value < victim->value) victim = it;
                evicted.push_back(victim->content);
                entries.erase(victim);
            }
            entries.push_back({request, 0});
            break;
        }
        case Policy::Tlru: {
            for (auto& e : entries) e.value = std::max(0, e.value - 1);  // decay
            if (auto it = find(request); it != entries.end()) {
                if (it->value > 0) {  // live hit refreshes recency, not the deadline
                    AbstractEntry e = *it;
                    entries.erase(it);
                    entries.push_back(e);
                    break;
                }
                entries.erase(it);  // expired copy replaced by a fresh one
                entries.push_back({request, ttu_levels});
                break;
            }
            if (static_cast<int>(entries.size()) >= cache_size) {
                // LRU over the contraction set (level <= 1), else plain LRU
                auto victim = entries.end();
                for (auto it = entries.begin(); it != entries.end(); ++it)
                    if (it->value <= 1) {
                        victim = it;
                        break;
                    }
                if (victim == entries.end()) victim = entries.begin();
                evicted.push_back(victim->content);
                entries.erase(victim);
            }
            entries.push_back({request, ttu_levels});
            break;
        }
    }
    return {encode(policy, entries), evicted};
}

inline std::set<int> content_set(Policy p, const StateCode& code) {
    std::set<int> s;
    for (const auto& e : decode(p, code)) s.insert(e.content);
    return s;
}

}  // namespace detail

inline TransitionGraph enumerate_reachable(Policy policy, int catalog_size, int cache_size,
                                           int ttu_levels = 2,
                                           std::size_t budget = 2'000'000) {
    if (catalog_size < 1 || cache_size < 1)
        throw std::domain_error("enumerate_reachable: sizes must be >= 1");
    TransitionGraph g;
    g.policy = policy;
    g.catalog_size = catalog_size;
    g.cache_size = cache_size;
    g.ttu_levels = ttu_levels;

    auto intern = [&](const StateCode& code) {
        auto [it, inserted] = g.index.try_emplace(code, static_cast<int>(g.states.size()));
        if (inserted) {
            g.states.push_back(code);
            if (g.states.size() > budget) throw StateSpaceBudgetExceeded(g.states.size());
        }
        return it->second;
    };

    std::queue<int> work;
    work.push(intern({}));
    while (!work.empty()) {
        const int id = work.front();
        work.pop();
        if (static_cast<int>(g.edges.size()) <= id) g.edges.resize(g.states.size());
        if (!g.edges[static_cast<std::size_t>(id)].empty()) continue;
        const StateCode code = g.states[static_cast<std::size_t>(id)];
        auto& out = g.edges[static_cast<std::size_t>(id)];
        for (int req = 1; req <= catalog_size; ++req) {
            auto [next, evicted] = detail::step(policy, code, req, cache_size, ttu_levels);
            const bool fresh = g.index.find(next) == g.index.end();
            const int target = intern(next);
            out.push_back({req, target, evicted});
            if (fresh) work.push(target);
        }
    }
    g.edges.resize(g.states.size());
    // complete edge rows for states discovered last
    for (std::size_t id = 0; id < g.states.size(); ++id) {
        if (!g.edges[id].empty()) continue;
        for (int req = 1; req <= catalog_size; ++req) {
            auto [next, evicted] = detail::step(policy, g.states[id], req, cache_size,
                                                ttu_levels);
            auto it = g.index.find(next);
            if (it == g.index.end()) throw std::logic_error("enumeration not closed");
            g.edges[id].push_back({req, it->second, evicted});
        }
    }
    return g;
}

struct ProtectiveWitness {
    int state = -1;
    int content = 0;
};

struct ClassificationResult {
    bool protective = false;
    // evaluated over content-preserving traversals: a cached item counts as
    // evictable if hit-only maneuvering can make some single request evict
    // it; a miss by a catalog-external newcomer counts as a request, so the
    // answer does not degenerate when the catalog fits the cache exactly
    std::vector<ProtectiveWitness> witnesses;
    // strict one-step support, reported for transparency: from how many
    // (full state, content) pairs an immediate request already evicts
    std::size_t one_step_evictable_pairs = 0;
    std::size_t full_state_content_pairs = 0;
};

inline bool is_full_state(const TransitionGraph& g, int id) {
    const auto n = detail::content_set(g.policy, g.states[static_cast<std::size_t>(id)]).size();
    return static_cast<int>(n) == g.cache_size;
}

inline ClassificationResult classify_protective(const TransitionGraph& g) {
    ClassificationResult res;
    for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
        if (!is_full_state(g, s)) continue;
        const auto contents = detail::content_set(g.policy, g.states[static_cast<std::size_t>(s)]);
        for (int c : contents) {
            ++res.full_state_content_pairs;
            bool evictable = false, one_step = false;
            // closure over edges that keep the cached content set identical
            std::vector<int> stack{s};
            std::set<int> seen{s};
            while (!stack.empty() && !evictable) {
                const int cur = stack.back();
                stack.pop_back();
                // a miss by a content outside the catalog
                const auto [next, evicted] =
                    detail::step(g.policy, g.states[static_cast<std::size_t>(cur)],
                                 g.catalog_size + 1, g.cache_size, g.ttu_levels);
                if (std::find(evicted.begin(), evicted.end(), c) != evicted.end()) {
                    evictable = true;
                    if (cur == s) one_step = true;
                    continue;
                }
                for (const auto& e : g.edges[static_cast<std::size_t>(cur)]) {
                    if (std::find(e.evicted.begin(), e.evicted.end(), c) != e.evicted.end()) {
                        evictable = true;
                        if (cur == s) one_step = true;
                        break;
                    }
                    if (e.evicted.empty() &&
                        detail::content_set(g.policy,
                                            g.states[static_cast<std::size_t>(e.target)]) ==
                            contents &&
                        seen.insert(e.target).second)
                        stack.push_back(e.target);
                }
            }
            if (one_step) ++res.one_step_evictable_pairs;
            if (!evictable) res.witnesses.push_back({s, c});
        }
    }
    res.protective = !res.witnesses.empty();
    return res;
}

struct RecurrenceResult {
    std::vector<int> recurrent_states;
    bool is_ergodic_set = false;  // all full states share one closed class
    int closed_class_count = 0;
};

inline RecurrenceResult check_recurrence(const TransitionGraph& g) {
    const auto n = g.states.size();
    // Tarjan SCC, iterative
    std::vector<int> comp(n, -1), low(n), num(n, -1), stack_flag(n, 0);
    std::vector<int> scc_stack;
    int counter = 0, comp_count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        std::vector<std::pair<int, std::size_t>> call{{static_cast<int>(root), 0}};
        while (!call.empty()) {
            auto& [v, ei] = call.back();
            if (ei == 0) {
                num[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
                scc_stack.push_back(v);
                stack_flag[static_cast<std::size_t>(v)] = 1;
            }
            bool descended = false;
            while (ei < g.edges[static_cast<std::size_t>(v)].size()) {
                const int w = g.edges[static_cast<std::size_t>(v)][ei++].target;
                if (num[static_cast<std::size_t>(w)] == -1) {
                    call.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (stack_flag[static_cast<std::size_t>(w)])
                    low[static_cast<std::size_t>(v)] =
                        std::min(low[static_cast<std::size_t>(v)], num[static_cast<std::size_t>(w)]);
            }
            if (descended) continue;
            if (low[static_cast<std::size_t>(v)] == num[static_cast<std::size_t>(v)]) {
                while (true) {
                    const int w = scc_stack.back();
                    scc_stack.pop_back();
                    stack_flag[static_cast<std::size_t>(w)] = 0;
                    comp[static_cast<std::size_t>(w)] = comp_count;
                    if (w == v) break;
                }
                ++comp_count;
            }
            const int child = v;
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().first;
                low[static_cast<std::size_t>(parent)] =
                    std::min(low[static_cast<std::size_t>(parent)],
                             low[static_cast<std::size_t>(child)]);
            }
        }
    }
    // closed = no edge leaves the component
    std::vector<char> closed(static_cast<std::size_t>(comp_count), 1);
    for (std::size_t v = 0; v < n; ++v)
        for (const auto& e : g.edges[v])
            if (comp[v] != comp[static_cast<std::size_t>(e.target)])
                closed[static_cast<std::size_t>(comp[v])] = 0;

    RecurrenceResult res;
    std::set<int> closed_classes_seen;
    for (std::size_t v = 0; v < n; ++v)
        if (closed[static_cast<std::size_t>(comp[v])]) {
            res.recurrent_states.push_back(static_cast<int>(v));
            closed_classes_seen.insert(comp[v]);
        }
    res.closed_class_count = static_cast<int>(closed_classes_seen.size());
    bool all_full_recurrent = true;
    std::set<int> full_classes;
    for (int v = 0; v < static_cast<int>(n); ++v)
        if (is_full_state(g, v)) {
            if (!closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])])
                all_full_recurrent = false;
            full_classes.insert(comp[static_cast<std::size_t>(v)]);
        }
    res.is_ergodic_set = all_full_recurrent && full_classes.size() == 1;
    return res;
}

// Shortest request-path between two states of an already-built graph;
// returns -1 when the target is unreachable.
inline int shortest_path(const TransitionGraph& g, int from, int to) {
    if (from == to) return 0;
    std::vector<int> dist(g.states.size(), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(from)] = 0;
    q.push(from);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (const auto& e : g.edges[static_cast<std::size_t>(v)]) {
            if (dist[static_cast<std::size_t>(e.target)] != -1) continue;
            dist[static_cast<std::size_t>(e.target)] = dist[static_cast<std::size_t>(v)] + 1;
            if (e.target == to) return dist[static_cast<std::size_t>(e.target)];
            q.push(e.target);
        }
    }
    return -1;
}

// Minimum number of requests taking a FIFO queue from one insertion order
// to another (e.g. (c,d) -> (d,c) costs 4 with a catalog of 4).
inline int fifo_reorder_cost(const TransitionGraph& g, const std::vector<int>& from_order,
                             const std::vector<int>& to_order) {
    if (g.policy != Policy::Fifo)
        throw std::invalid_argument("fifo_reorder_cost: graph is not FIFO");
    const int from = g.state_id(StateCode(from_order.begin(), from_order.end()));
    const int to = g.state_id(StateCode(to_order.begin(), to_order.end()));
    if (from < 0 || to < 0)
        throw std::invalid_argument("fifo_reorder_cost: order is not a reachable state");
    return shortest_path(g, from, to);
}

}  // namespace cachenet
