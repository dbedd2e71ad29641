#pragma once

// TLRU: locally derived retention deadlines (the f and g worth functions
// and their composite), admission against the estimated inter-request gap,
// and eviction by LRU over the contraction set of entries whose remaining
// lifetime is below their expected next-request gap.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cachenet/cache.hpp"
#include "cachenet/catalog.hpp"

namespace cachenet {

enum class CompositeRule { Max, Min, FOnly, GOnly };

struct TlruConfig {
    CompositeRule composite_rule = CompositeRule::Max;
    bool cold_start_admit = true;  // admit when no gap estimate exists yet
    double ttu_floor = 0.001;      // seconds; lower clamp for local TTU
};

struct RateSnapshot {
    std::unordered_map<ContentId, double> rho;  // requests/second
};

// Size-proportional worth: a content occupying the whole cache keeps the
// publisher's full stamp, smaller contents proportionally less.
inline double f_worth(int content_size, int cache_capacity, double publisher_ttu) {
    if (content_size < 1 || content_size > cache_capacity)
        throw std::domain_error("f_worth: size must be in [1, capacity]");
    if (publisher_ttu <= 0.0) throw std::domain_error("f_worth: TTU must be > 0");
    return (static_cast<double>(content_size) / cache_capacity) * publisher_ttu;
}

// Rate-proportional worth: this content's rate relative to everything else
// at the node. Unbounded as written, so the result is clamped into
// (0, publisher_ttu]; with no other traffic the full stamp is returned.
inline double g_worth_rates(double rho_self, double rho_others, double publisher_ttu) {
    if (publisher_ttu <= 0.0) throw std::domain_error("g_worth: TTU must be > 0");
    if (rho_others <= 0.0) return publisher_ttu;
    const double w = (rho_self / rho_others) * publisher_ttu;
    return std::clamp(w, 0.0, publisher_ttu);
}

inline double g_worth(ContentId content, const RateSnapshot& rates, double publisher_ttu) {
    double self = 0.0, others = 0.0;
    for (const auto& [id, r] : rates.rho) {
        if (r < 0.0) throw std::domain_error("g_worth: negative rate");
        if (id == content)
            self = r;
        else
            others += r;
    }
    return g_worth_rates(self, others, publisher_ttu);
}

inline double combine_worth(double f, double g, CompositeRule rule) {
    switch (rule) {
        case CompositeRule::Max: return std::max(f, g);
        case CompositeRule::Min: return std::min(f, g);
        case CompositeRule::FOnly: return f;
        case CompositeRule::GOnly: return g;
    }
    return std::max(f, g);
}

// Local retention deadline for an arriving content; always satisfies
// 0 < result <= publisher_ttu. Returns nullopt for never-cache contents.
inline std::optional<double> local_ttu(const ContentMeta& content, int cache_capacity,
                                       double rho_self, double rho_others,
                                       const TlruConfig& config) {
    if (!content.publisher_ttu) return std::nullopt;
    const double ttu = *content.publisher_ttu;
    const double f = f_worth(content.size, cache_capacity, ttu);
    const double g = g_worth_rates(rho_self, rho_others, ttu);
    const double combined = combine_worth(f, g, config.composite_rule);
    return std::clamp(combined, std::min(config.ttu_floor, ttu), ttu);
}

inline std::optional<double> local_ttu(const ContentMeta& content, int cache_capacity,
                                       const RateSnapshot& rates, const TlruConfig& config) {
    double self = 0.0, others = 0.0;
    for (const auto& [id, r] : rates.rho) {
        if (id == content.id)
            self = r;
        else
            others += r;
    }
    return local_ttu(content, cache_capacity, self, others, config);
}

// Store only if the deadline outlives the expected next-request gap.
inline bool admit(double local_ttu_value, std::optional<double> tau,
                  const TlruConfig& config) {
    if (local_ttu_value <= 0.0) throw std::domain_error("admit: local TTU must be > 0");
    if (!tau) return config.cold_start_admit;
    return local_ttu_value > *tau;
}

// Entries doomed to expire before their next expected request: remaining
// lifetime below the smoothed gap, or already expired. Entries without a
// gap estimate cannot be judged and are excluded.
inline bool in_contraction_set(const CacheState& state, const CacheEntry& e, double now) {
    const double remaining = e.expiry - now;
    if (remaining <= 0.0) return true;
    const auto tau_hat = state.tau(e.content);
    return tau_hat && remaining < *tau_hat;
}

inline std::unordered_set<ContentId> contraction_set(const CacheState& state, double now) {
    std::unordered_set<ContentId> ev;
    state.for_each_entry([&](const CacheEntry& e) {
        if (in_contraction_set(state, e, now)) ev.insert(e.content);
    });
    return ev;
}

enum class TlruResult { Stored, Rejected, NotCacheable };

struct TlruOutcome {
    TlruResult result = TlruResult::Rejected;
    std::vector<ContentId> evicted;
    double local_ttu = 0.0;  // valid when result == Stored
};

// Full insert decision for a miss being filled: local-TTU computation,
// admission, then contraction-first LRU eviction until the entry fits.
inline TlruOutcome tlru_insert(CacheState& state, const ContentMeta& content, double now,
                               const TlruConfig& config) {
    if (!content.publisher_ttu || content.size > state.capacity())
        return {TlruResult::NotCacheable, {}, 0.0};
    const double rho_self = state.estimated_rate(content.id);
    const double rho_others = state.estimated_rate_sum() - rho_self;
    const double ttu_local =
        *local_ttu(content, state.capacity(), rho_self, rho_others, config);
    if (!admit(ttu_local, state.tau(content.id), config))
        return {TlruResult::Rejected, {}, 0.0};

    TlruOutcome out{TlruResult::Stored, {}, ttu_local};
    if (const CacheEntry* stale = state.find(content.id); stale != nullptr) {
        out.evicted.push_back(content.id);
        state.remove(content.id);
    }
    while (state.used() + content.size > state.capacity()) {
        // LRU over the contraction set, falling back to plain LRU when the
        // set is empty; scanning recency order yields the same victim as
        // materializing Ev and taking its least-recent member.
        auto victim = state.lru_victim_matching(
            [&](const CacheEntry& e) { return in_contraction_set(state, e, now); });
        if (!victim) victim = state.evict_victim_lru();
        out.evicted.push_back(*victim);
        state.remove(*victim);
    }
    state.store(content.id, content.size, now + ttu_local, now);
    return out;
}

}  // namespace cachenet
