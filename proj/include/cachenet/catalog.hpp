#pragma once

// Content catalog, Zipf popularity, Poisson arrivals and TTU stamp
// assignment. Content id i carries popularity rank i (id 1 most popular).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cachenet/rng.hpp"

namespace cachenet {

using ContentId = std::int32_t;  // 1..k

struct ContentMeta {
    ContentId id = 0;
    int size = 1;                           // cache-capacity units
    std::optional<double> publisher_ttu;    // seconds; nullopt = never cache
    int popularity_rank = 0;                // 1..k
};

struct TtuLaw {
    enum class Kind { Constant, Normal, Absent };
    Kind kind = Kind::Constant;
    double value = 0.0;     // Constant
    double mean = 0.0;      // Normal
    double stddev = 0.0;    // Normal
    double floor = 0.001;   // Normal: clamp for negative draws
};

struct WorkloadSpec {
    int catalog_size = 1;
    double zipf_alpha = 0.8;
    double total_rate = 1.0;   // aggregate exogenous requests/second per node
    TtuLaw ttu_law;
    std::uint64_t seed = 0;
};

inline double zipf_weight(int rank, double alpha) {
    if (rank < 1) throw std::domain_error("zipf_weight: rank must be >= 1");
    if (alpha <= 0.0) throw std::domain_error("zipf_weight: alpha must be > 0");
    return std::pow(static_cast<double>(rank), -alpha);
}

inline std::vector<double> zipf_distribution(int k, double alpha) {
    if (k < 1) throw std::domain_error("zipf_distribution: k must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        p[static_cast<std::size_t>(i)] = zipf_weight(i + 1, alpha);
        sum += p[static_cast<std::size_t>(i)];
    }
    for (auto& v : p) v /= sum;
    return p;
}

inline double next_arrival(double rate, Rng& rng) { return rng.exponential(rate); }

inline std::optional<double> assign_ttu(const TtuLaw& law, Rng& rng) {
    switch (law.kind) {
        case TtuLaw::Kind::Constant:
            return law.value;
        case TtuLaw::Kind::Normal:
            return std::max(law.floor, rng.normal(law.mean, law.stddev));
        case TtuLaw::Kind::Absent:
            return std::nullopt;
    }
    return std::nullopt;
}

// Inverse-CDF sampler over the catalog's Zipf law.
class ZipfSampler {
public:
    ZipfSampler(int k, double alpha) : cdf_(zipf_distribution(k, alpha)) {
        double acc = 0.0;
        for (auto& v : cdf_) {
            acc += v;
            v = acc;
        }
        cdf_.back() = 1.0;  // guard against rounding at the top
    }

    ContentId sample(Rng& rng) const {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<ContentId>(std::distance(cdf_.begin(), it)) + 1;
    }

private:
    std::vector<double> cdf_;
};

struct Catalog {
    std::vector<ContentMeta> contents;  // index i holds id i+1
    std::vector<double> popularity;     // normalized Zipf probabilities
    double zipf_alpha = 1.0;

    const ContentMeta& meta(ContentId id) const {
        return contents.at(static_cast<std::size_t>(id - 1));
    }
    int size() const { return static_cast<int>(contents.size()); }
};

// TTU stamps are drawn once per content from a catalog-owned stream so
// they do not depend on the policy under test or on node count.
inline Catalog build_catalog(const WorkloadSpec& spec, int content_size = 1) {
    Catalog cat;
    cat.zipf_alpha = spec.zipf_alpha;
    cat.popularity = zipf_distribution(spec.catalog_size, spec.zipf_alpha);
    cat.contents.resize(static_cast<std::size_t>(spec.catalog_size));
    Rng ttu_rng = Rng::stream(spec.seed, "catalog/ttu");
    for (int i = 0; i < spec.catalog_size; ++i) {
        auto& m = cat.contents[static_cast<std::size_t>(i)];
        m.id = i + 1;
        m.size = content_size;
        m.popularity_rank = i + 1;
        m.publisher_ttu = assign_ttu(spec.ttu_law, ttu_rng);
    }
    return cat;
}

}  // namespace cachenet
