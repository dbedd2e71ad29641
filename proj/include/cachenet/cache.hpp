#pragma once

// One node's cache: entry store with expiry, recency, frequency and
// insertion-order indices, per-content inter-request estimators, and the
// FIFO/LRU/LFU victim rules. Expired entries are removed lazily (on lookup
// or while making room for an insert) and are always evicted before any
// policy rule is consulted.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cachenet/catalog.hpp"

namespace cachenet {

enum class Policy { Fifo, Lru, Lfu, Tlru };

inline constexpr double kNeverExpires = std::numeric_limits<double>::infinity();

struct CacheEntry {
    ContentId content = 0;
    int size = 1;
    double expiry = kNeverExpires;  // absolute simulated time
    double insert_time = 0.0;
    double last_access = 0.0;
    std::uint64_t insert_seq = 0;
    std::uint64_t access_count = 0;  // hits served during this residency
};

struct RateEstimator {
    std::optional<double> last_request_time;
    std::optional<double> ewma_gap;  // smoothed inter-request gap, > 0
    std::uint64_t sample_count = 0;
};

enum class AccessResult { Hit, Miss, ExpiredMiss };

struct AccessOutcome {
    AccessResult result = AccessResult::Miss;
    std::optional<CacheEntry> served_entry;  // snapshot on Hit
};

class CacheState {
public:
    static constexpr double kEwmaWeight = 0.125;

    explicit CacheState(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::domain_error("CacheState: capacity must be >= 1");
    }

    int capacity() const { return capacity_; }
    int used() const { return used_; }
    bool empty() const { return entries_.empty(); }
    std::size_t entry_count() const { return entries_.size(); }
    std::uint64_t expiry_violations() const { return expiry_violations_; }

    const CacheEntry* find(ContentId content) const {
        auto it = entries_.find(content);
        return it == entries_.end() ? nullptr : &it->second;
    }

    bool contains_live(ContentId content, double now) const {
        const CacheEntry* e = find(content);
        return e != nullptr && e->expiry > now;
    }

    // Observes one request in the node's stream and returns the current
    // smoothed inter-request gap (absent until two requests were seen).
    std::optional<double> record_request(ContentId content, double now) {
        RateEstimator& est = estimators_[content];
        if (est.last_request_time && now < *est.last_request_time)
            throw std::invalid_argument("record_request: time went backwards");
        if (!est.last_request_time) {
            est.last_request_time = now;
            est.sample_count = 1;
            return std::nullopt;
        }
        double gap = now - *est.last_request_time;
        if (gap <= 0.0) gap = 1e-12;  // same-instant duplicates keep the gap positive
        est.last_request_time = now;
        ++est.sample_count;
        const double old_rate = est.ewma_gap ? 1.0 / *est.ewma_gap : 0.0;
        if (!est.ewma_gap)
            est.ewma_gap = gap;
        else
            est.ewma_gap = (1.0 - kEwmaWeight) * *est.ewma_gap + kEwmaWeight * gap;
        rate_sum_ += 1.0 / *est.ewma_gap - old_rate;
        return est.ewma_gap;
    }

    std::optional<double> tau(ContentId content) const {
        auto it = estimators_.find(content);
        if (it == estimators_.end()) return std::nullopt;
        return it->second.ewma_gap;
    }

    // Sum of estimated per-content rates (1/ewma_gap) over all observed
    // contents; the denominator feed for TLRU's g function.
    double estimated_rate_sum() const { return rate_sum_; }

    double estimated_rate(ContentId content) const {
        auto it = estimators_.find(content);
        if (it == estimators_.end() || !it->second.ewma_gap) return 0.0;
        return 1.0 / *it->second.ewma_gap;
    }

    AccessOutcome lookup(ContentId content, double now) {
        auto it = entries_.find(content);
        if (it == entries_.end()) return {AccessResult::Miss, std::nullopt};
        CacheEntry& e = it->second;
        if (e.expiry <= now) {
            remove(content);
            return {AccessResult::ExpiredMiss, std::nullopt};
        }
        // recency/frequency bookkeeping on hit only
        lru_index_.erase({e.last_access, e.insert_seq});
        lfu_index_.erase({e.access_count, e.last_access, e.insert_seq});
        e.last_access = now;
        ++e.access_count;
        lru_index_.emplace(std::make_pair(e.last_access, e.insert_seq), content);
        lfu_index_.emplace(std::make_tuple(e.access_count, e.last_access, e.insert_seq), content);
        if (e.expiry <= now) ++expiry_violations_;  // must be unreachable
        return {AccessResult::Hit, e};
    }

    ContentId evict_victim_fifo() const {
        require_nonempty();
        return fifo_index_.begin()->second;
    }

    // Least-recently-accessed entry, ties by insertion order. With a
    // candidate set, the minimum is taken over that subset only.
    ContentId evict_victim_lru(
        const std::unordered_set<ContentId>* candidates = nullptr) const {
        if (candidates == nullptr) {
            require_nonempty();
            return lru_index_.begin()->second;
        }
        if (candidates->empty())
            throw std::logic_error("evict_victim_lru: empty candidate set");
        for (const auto& [key, content] : lru_index_)
            if (candidates->count(content)) return content;
        throw std::logic_error("evict_victim_lru: no candidate is cached");
    }

    ContentId evict_victim_lfu() const {
        require_nonempty();
        return lfu_index_.begin()->second;
    }

    // First entry in LRU order satisfying pred, or nullopt. Lets TLRU find
    // the LRU element of its contraction set without materializing it.
    template <class Pred>
    std::optional<ContentId> lru_victim_matching(Pred&& pred) const {
        for (const auto& [key, content] : lru_index_)
            if (pred(entries_.find(content)->second)) return content;
        return std::nullopt;
    }

    template <class Fn>
    void for_each_entry(Fn&& fn) const {
        for (const auto& [content, entry] : entries_) fn(entry);
    }

    // Removes expired entries (in expiry order), then policy victims, until
    // the new entry fits; then stores it. Returns the evicted contents, or
    // nullopt if the entry can never fit (size > capacity).
    std::optional<std::vector<ContentId>> insert(ContentId content, int size,
                                                 double expiry, double now,
                                                 Policy policy) {
        if (size > capacity_) return std::nullopt;
        if (expiry <= now) throw std::invalid_argument("insert: entry already expired");
        std::vector<ContentId> evicted;
        if (auto it = entries_.find(content); it != entries_.end()) {
            // refreshed copy replaces the stale one
            evicted.push_back(content);
            remove(content);
        }
        while (used_ + size > capacity_) {
            ContentId victim = 0;
            if (!expiry_index_.empty() && expiry_index_.begin()->first.first <= now) {
                victim = expiry_index_.begin()->second;
            } else {
                switch (policy) {
                    case Policy::Fifo: victim = evict_victim_fifo(); break;
                    case Policy::Lfu: victim = evict_victim_lfu(); break;
                    case Policy::Lru:
                    case Policy::Tlru: victim = evict_victim_lru(); break;
                }
            }
            evicted.push_back(victim);
            remove(victim);
        }
        store(content, size, expiry, now);
        return evicted;
    }

    void store(ContentId content, int size, double expiry, double now) {
        CacheEntry e;
        e.content = content;
        e.size = size;
        e.expiry = expiry;
        e.insert_time = now;
        e.last_access = now;
        e.insert_seq = seq_counter_++;
        e.access_count = 0;
        entries_.emplace(content, e);
        lru_index_.emplace(std::make_pair(e.last_access, e.insert_seq), content);
        fifo_index_.emplace(e.insert_seq, content);
        lfu_index_.emplace(std::make_tuple(e.access_count, e.last_access, e.insert_seq), content);
        expiry_index_.emplace(std::make_pair(e.expiry, e.insert_seq), content);
        used_ += size;
    }

    void remove(ContentId content) {
        auto it = entries_.find(content);
        if (it == entries_.end()) return;
        const CacheEntry& e = it->second;
        lru_index_.erase({e.last_access, e.insert_seq});
        fifo_index_.erase(e.insert_seq);
        lfu_index_.erase({e.access_count, e.last_access, e.insert_seq});
        expiry_index_.erase({e.expiry, e.insert_seq});
        used_ -= e.size;
        entries_.erase(it);
    }

private:
    void require_nonempty() const {
        if (entries_.empty()) throw std::logic_error("eviction from empty cache");
    }

    int capacity_;
    int used_ = 0;
    std::uint64_t seq_counter_ = 0;
    std::uint64_t expiry_violations_ = 0;
    double rate_sum_ = 0.0;
    std::unordered_map<ContentId, CacheEntry> entries_;
    std::unordered_map<ContentId, RateEstimator> estimators_;
    std::map<std::pair<double, std::uint64_t>, ContentId> lru_index_;
    std::map<std::uint64_t, ContentId> fifo_index_;
    std::map<std::tuple<std::uint64_t, double, std::uint64_t>, ContentId> lfu_index_;
    std::map<std::pair<double, std::uint64_t>, ContentId> expiry_index_;
};

}  // namespace cachenet
