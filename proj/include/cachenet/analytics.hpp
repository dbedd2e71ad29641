#pragma once

// Closed-form toolkit: characteristic-time fixed point of the cache
// capacity constraint (solved by Newton iteration with a bracketing
// bisection safeguard), per-content hit probabilities for LRU and TLRU,
// and the M/M/1 hop-delay chain.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cachenet/catalog.hpp"

namespace cachenet {

struct CheProblem {
    double capacity = 0.0;                         // cache size in entries
    std::vector<double> rates;                     // per-content total rates
    std::optional<std::vector<double>> ttu_admit_prob;  // optional per-content admission factor
};

struct CheSolution {
    double T = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> iterates;  // T after each Newton/bisection step
};

// F(T) = capacity - sum(1 - e^{-rho T}); strictly decreasing whenever any
// rate is positive, so the positive root (when it exists) is unique.
inline double che_F(double T, const CheProblem& p) {
    double occ = 0.0;
    for (double r : p.rates) occ += 1.0 - std::exp(-r * T);
    return p.capacity - occ;
}

inline double che_F_derivative(double T, const CheProblem& p) {
    double d = 0.0;
    for (double r : p.rates) d -= r * std::exp(-r * T);
    return d;
}

inline double che_initial_guess(const CheProblem& p) {
    double sum = 0.0;
    for (double r : p.rates) sum += r;
    if (sum <= 0.0) throw std::domain_error("che_initial_guess: all rates are zero");
    return p.capacity / sum;
}

inline CheSolution solve_characteristic_time(const CheProblem& p, double tolerance = 1e-12,
                                             int max_iter = 100) {
    if (p.capacity <= 0.0) throw std::domain_error("solve: capacity must be > 0");
    if (tolerance <= 0.0) throw std::domain_error("solve: tolerance must be > 0");
    std::size_t positive = 0;
    for (double r : p.rates) {
        if (r < 0.0) throw std::domain_error("solve: negative rate");
        if (r > 0.0) ++positive;
    }
    if (p.capacity >= static_cast<double>(positive))
        throw std::domain_error(
            "solve: capacity >= number of active contents, F(T) has no positive root");

    CheSolution sol;
    double T = che_initial_guess(p);
    // bracket: F(0) = capacity > 0; double until F(hi) < 0
    double lo = 0.0, hi = std::max(T, 1e-12);
    while (che_F(hi, p) > 0.0) hi *= 2.0;
    if (T <= lo || T >= hi) T = 0.5 * (lo + hi);
    sol.iterates.push_back(T);  // iterate 0 is the initial guess

    for (int it = 0; it < max_iter; ++it) {
        const double f = che_F(T, p);
        sol.residual = std::abs(f);
        if (sol.residual < tolerance) {
            sol.converged = true;
            break;
        }
        if (f > 0.0) lo = T; else hi = T;
        const double df = che_F_derivative(T, p);
        double next = (df != 0.0) ? T - f / df : lo - 1.0;  // force bisection
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        T = next;
        sol.iterates.push_back(T);
        ++sol.iterations;
    }
    sol.T = T;
    sol.residual = std::abs(che_F(T, p));
    if (sol.residual < tolerance) sol.converged = true;
    return sol;
}

// 1 - e^{-rho T}: the content is resident iff requested within the
// characteristic window.
inline double hit_probability_lru(double rho, double T) {
    if (rho < 0.0 || T < 0.0) throw std::domain_error("hit_probability_lru: negative input");
    return 1.0 - std::exp(-rho * T);
}

inline double hit_probability_tlru(double rho, double T, double admit_prob) {
    if (admit_prob < 0.0 || admit_prob > 1.0)
        throw std::domain_error("hit_probability_tlru: admit_prob outside [0, 1]");
    return hit_probability_lru(rho, T) * admit_prob;
}

inline double gaussian_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// P(TTU > 1/rho) under the workload's TTU law, with 1/rho standing in for
// the mean inter-request gap. The normal law accounts for the floor clamp:
// draws below the floor are moved onto it, so thresholds under the floor
// are cleared with probability 1.
inline double admit_probability(const TtuLaw& law, double rho) {
    if (rho <= 0.0) throw std::domain_error("admit_probability: rho must be > 0");
    const double threshold = 1.0 / rho;
    switch (law.kind) {
        case TtuLaw::Kind::Constant:
            return law.value > threshold ? 1.0 : 0.0;
        case TtuLaw::Kind::Normal:
            if (threshold < law.floor) return 1.0;
            return gaussian_upper_tail((threshold - law.mean) / law.stddev);
        case TtuLaw::Kind::Absent:
            return 0.0;
    }
    return 0.0;
}

// M/M/1 mean waiting time, sigma arrivals/s against service rate mu.
inline double mm1_waiting_time(double sigma, double service_rate) {
    if (sigma < 0.0) throw std::domain_error("mm1_waiting_time: sigma must be >= 0");
    if (sigma >= service_rate)
        throw std::domain_error("mm1_waiting_time: unstable queue (sigma >= service rate)");
    return sigma / (service_rate * (service_rate - sigma));
}

struct HopLoad {
    double sigma = 0.0;
    double service_rate = 1.0;
};

// Expected delay over a chain of hops: each hop's waiting time weighted by
// the probability the request is still unserved there. The inclusive mode
// multiplies miss probabilities through hop i itself; exclusive stops at
// i-1.
enum class ChainProductMode { Inclusive, Exclusive };

inline double chain_delay(const std::vector<HopLoad>& per_hop,
                          const std::vector<double>& hit_probs,
                          ChainProductMode mode = ChainProductMode::Inclusive) {
    if (per_hop.size() != hit_probs.size())
        throw std::invalid_argument("chain_delay: per_hop and hit_probs length mismatch");
    double total = 0.0, miss_product = 1.0;
    for (std::size_t i = 0; i < per_hop.size(); ++i) {
        const double w = mm1_waiting_time(per_hop[i].sigma, per_hop[i].service_rate);
        if (mode == ChainProductMode::Exclusive) total += w * miss_product;
        miss_product *= 1.0 - hit_probs[i];
        if (mode == ChainProductMode::Inclusive) total += w * miss_product;
    }
    return total;
}

struct HitPrediction {
    double lru = 0.0;
    double tlru = 0.0;
};

// Solves T once, then maps the two closed forms across the catalog.
inline std::vector<HitPrediction> predict_hit_curve(const CheProblem& p, const TtuLaw& law,
                                                    double tolerance = 1e-12,
                                                    int max_iter = 100) {
    const CheSolution sol = solve_characteristic_time(p, tolerance, max_iter);
    std::vector<HitPrediction> out(p.rates.size());
    for (std::size_t i = 0; i < p.rates.size(); ++i) {
        const double rho = p.rates[i];
        const double lru = hit_probability_lru(rho, sol.T);
        double ap = 0.0;
        if (p.ttu_admit_prob)
            ap = p.ttu_admit_prob->at(i);
        else if (rho > 0.0)
            ap = admit_probability(law, rho);
        out[i] = {lru, hit_probability_tlru(rho, sol.T, ap)};
    }
    return out;
}

}  // namespace cachenet
