#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "speclab/ensembles.hpp"
#include "speclab/params.hpp"
#include "speclab/rng.hpp"
#include "speclab/structure.hpp"

namespace speclab {

namespace defaults {
inline constexpr double C_smallball = 2.0;
inline constexpr double c_pz = 0.05;
inline constexpr double delta0_floor = 0.01;
}  // namespace defaults

enum class LevyCenterMode { scalar_sliding_window, vector_candidate_centers };

struct LevyEstimate {
    double eps = 0.0;
    double estimate = 0.0;
    long long samples = 0;
    double std_error = 0.0;
    LevyCenterMode center_mode = LevyCenterMode::scalar_sliding_window;
};

// Exact empirical concentration: the largest fraction of samples inside any
// closed interval of length 2*eps. Left edges at sample points suffice.
inline LevyEstimate levy_scalar(const std::vector<double>& samples, double eps) {
    if (samples.empty()) throw std::invalid_argument("levy_scalar: no samples");
    if (eps < 0) throw std::invalid_argument("levy_scalar: negative radius");
    if (!std::is_sorted(samples.begin(), samples.end()))
        throw std::invalid_argument("levy_scalar: samples must be sorted");
    const long long N = (long long)(samples.size());
    long long best = 0;
    size_t j = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (j < i) j = i;
        while (j < samples.size() && samples[j] <= samples[i] + 2 * eps) ++j;
        best = std::max(best, (long long)(j - i));
    }
    LevyEstimate r;
    r.eps = eps;
    r.samples = N;
    r.estimate = double(best) / double(N);
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / double(N));
    return r;
}

// N sorted samples of delta*xi with delta ~ Bernoulli(p).
inline std::vector<double> sample_scalar_entries(const EntryDist& dist, double p, long long N,
                                                 std::uint64_t seed) {
    if (N <= 0) throw std::invalid_argument("sample_scalar_entries: need a positive sample count");
    std::vector<double> out(static_cast<std::size_t>(N), 0.0);
    for (long long k = 0; k < N; ++k) {
        const bool on = rng::u01(rng::mix(seed, std::uint64_t(k), 0, 0)) < p;
        out[size_t(k)] = on ? dist.sample(seed, std::uint64_t(k), 0) : 0.0;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// N sorted samples of X . v where X has iid delta*xi coordinates.
inline std::vector<double> sample_dot_products(const EntryDist& dist, double p,
                                               const std::vector<double>& v, long long N,
                                               std::uint64_t seed) {
    if (N <= 0) throw std::invalid_argument("sample_dot_products: need a positive sample count");
    if (v.empty()) throw std::invalid_argument("sample_dot_products: empty direction");
    std::vector<double> out(static_cast<std::size_t>(N), 0.0);
    for (long long t = 0; t < N; ++t) {
        double acc = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
            if (rng::u01(rng::mix(seed, std::uint64_t(t), std::uint64_t(i), 0)) < p)
                acc += dist.sample(seed, std::uint64_t(t), std::uint64_t(i)) * v[i];
        }
        out[size_t(t)] = acc;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// (1 - L(delta xi, eps_bar0)) / p, clamped into (0, 1]. A fully concentrated
// sample gives no signal, so fall back to a conservative floor.
inline double estimate_delta0(const EntryDist& dist, double p, double eps_bar0, long long N,
                              std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("estimate_delta0: p outside (0,1]");
    auto s = sample_scalar_entries(dist, p, N, seed);
    const double L = levy_scalar(s, eps_bar0).estimate;
    if (L >= 1.0) {
        std::cerr << "estimate_delta0: degenerate concentration estimate, using floor "
                  << defaults::delta0_floor << "\n";
        return defaults::delta0_floor;
    }
    return std::min(1.0, (1.0 - L) / p);
}

inline double lcd_smallball_bound(const std::vector<double>& v, double eps, double p, double C,
                                  double lcd_value) {
    (void)v;
    if (!(lcd_value > 0)) throw std::invalid_argument("lcd_smallball_bound: lcd_value must be positive");
    const double term = std::isinf(lcd_value) ? 0.0 : 1.0 / (std::sqrt(p) * lcd_value);
    return std::clamp(C * (eps + term), 0.0, 1.0);
}

// Log of (C eps + C/(sqrt(p) D))^(n - ceil(alpha n)) with D the block LCD.
// Nonnegative return values mean the bound is vacuous.
inline double tensorized_bound(const std::vector<double>& v, const Params& P,
                               const std::vector<int>& block, double eps,
                               double C = defaults::C_smallball, double grid_step = 1e-3) {
    if (block.empty()) throw std::invalid_argument("tensorized_bound: empty block");
    std::vector<double> y;
    y.reserve(block.size());
    double l2 = 0.0;
    for (int i : block) {
        y.push_back(v[size_t(i)]);
        l2 += v[size_t(i)] * v[size_t(i)];
    }
    l2 = std::sqrt(l2);
    if (l2 == 0.0) throw std::invalid_argument("tensorized_bound: block carries no mass");
    for (double& t : y) t /= l2;

    LcdResult r = lcd(y, P.delta0, P.p, P.theta_max(), grid_step);
    const double term = r.finite() ? 1.0 / (std::sqrt(P.p) * r.value) : 0.0;
    const double inner = C * (eps + term);
    const long long expo = P.n - P.block_size();
    if (expo <= 0) return 0.0;
    return double(expo) * std::log(inner);
}

inline double pz_levy_bound(const std::vector<double>& x, double p, double c = defaults::c_pz) {
    double l2 = 0.0, linf = 0.0;
    for (double v : x) {
        l2 += v * v;
        linf = std::max(linf, std::abs(v));
    }
    if (l2 == 0.0) throw std::invalid_argument("pz_levy_bound: zero vector");
    const double ratio2 = linf * linf / l2;
    return 1.0 - c * p / (ratio2 + p);
}

struct TensorizationCheck {
    double rate = 0.0;       // fraction of trials with sum <= c q n / log(1/q)
    double envelope = 0.0;   // exp(-c' n) plus three binomial standard errors
    bool pass = false;
};

inline TensorizationCheck tensorization_check(double q, int n, long long trials,
                                              std::uint64_t seed, double c, double cprime) {
    if (!(q > 0.0 && q < 0.5)) throw std::invalid_argument("tensorization_check: q outside (0, 1/2)");
    if (n < 1 || trials < 1) throw std::invalid_argument("tensorization_check: bad sizes");
    const double threshold = c * q * double(n) / std::log(1.0 / q);
    long long hits = 0;
    for (long long t = 0; t < trials; ++t) {
        long long sum = 0;
        for (int j = 0; j < n; ++j)
            if (rng::u01(rng::mix(seed, std::uint64_t(t), std::uint64_t(j), 0)) < q) ++sum;
        if (double(sum) <= threshold) ++hits;
    }
    TensorizationCheck r;
    r.rate = double(hits) / double(trials);
    const double se = std::sqrt(r.rate * (1.0 - r.rate) / double(trials));
    r.envelope = std::exp(-cprime * double(n)) + 3.0 * se;
    r.pass = r.rate <= r.envelope;
    return r;
}

// Rows in the upper half-block with exactly one admissible signed hit in J and
// no support on Jprime.
inline long long count_structured_rows(const SymMatrix& M, const std::vector<int>& J,
                                       const std::vector<int>& Jprime,
                                       const std::vector<int>& signs) {
    if (signs.size() != J.size())
        throw std::invalid_argument("count_structured_rows: signs must align with J");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("count_structured_rows: signs must be +-1");
    for (int j : J)
        for (int jp : Jprime)
            if (j == jp) throw std::invalid_argument("count_structured_rows: J and Jprime overlap");
    auto in_range = [&](int j) { return j >= 0 && j < M.n; };
    for (int j : J)
        if (!in_range(j)) throw std::invalid_argument("count_structured_rows: J index out of range");
    for (int j : Jprime)
        if (!in_range(j)) throw std::invalid_argument("count_structured_rows: Jprime index out of range");

    const int rows = M.n / 2;
    long long count = 0;
    for (int i = 0; i < rows; ++i) {
        bool blocked = false;
        for (int jp : Jprime)
            if (M(i, jp) != 0.0) {
                blocked = true;
                break;
            }
        if (blocked) continue;
        int hits = 0;
        for (size_t k = 0; k < J.size() && hits < 2; ++k) {
            const int j = J[k];
            if (j != i && M(i, j) * double(signs[k]) >= 1.0) ++hits;
        }
        if (hits == 1) ++count;
    }
    return count;
}

}  // namespace speclab
