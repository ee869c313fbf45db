#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "speclab/params.hpp"

namespace speclab {

// Indices sorted by decreasing magnitude, ties resolved toward the lower index.
inline std::vector<int> magnitude_order(const std::vector<double>& x) {
    std::vector<int> ord(x.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
        return std::abs(x[size_t(a)]) > std::abs(x[size_t(b)]);
    });
    return ord;
}

// Keeps coordinates whose magnitude rank lies in [m, m2] (1-based), zeroes the rest.
inline std::vector<double> rearranged_segment(const std::vector<double>& x, int m, int m2) {
    const int n = int(x.size());
    if (m < 1 || m2 < m || m2 > n)
        throw std::invalid_argument("rearranged_segment: rank range out of bounds");
    auto ord = magnitude_order(x);
    std::vector<double> out(x.size(), 0.0);
    for (int r = m - 1; r < m2; ++r) out[size_t(ord[size_t(r)])] = x[size_t(ord[size_t(r)])];
    return out;
}

inline double dist_to_sparse(const std::vector<double>& x, long long M) {
    if (M < 0) throw std::invalid_argument("dist_to_sparse: negative sparsity");
    const long long n = (long long)(x.size());
    if (M >= n) return 0.0;
    std::vector<double> mags(x.size());
    for (size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
    std::nth_element(mags.begin(), mags.begin() + size_t(M), mags.end(), std::greater<>());
    double tail = 0.0;
    for (size_t i = size_t(M); i < mags.size(); ++i) tail += mags[i] * mags[i];
    return std::sqrt(tail);
}

enum class Classification { Comp, Incomp };

inline Classification classify(const std::vector<double>& x, long long M, double rho) {
    return dist_to_sparse(x, M) <= rho ? Classification::Comp : Classification::Incomp;
}

inline bool is_dominated(const std::vector<double>& x, int m, double alpha_dom) {
    const int n = int(x.size());
    if (m < 1 || m > n) throw std::invalid_argument("is_dominated: bad head length");
    if (m == n) return true;  // empty tail
    auto ord = magnitude_order(x);
    double t2 = 0.0, tinf = 0.0;
    for (int r = m; r < n; ++r) {
        const double v = std::abs(x[size_t(ord[size_t(r)])]);
        t2 += v * v;
        tinf = std::max(tinf, v);
    }
    return std::sqrt(t2) <= alpha_dom * std::sqrt(double(m)) * tinf;
}

// Coordinates with rho/sqrt(2n) <= |v_k| <= 1/sqrt(M).
inline std::vector<int> spread_set(const std::vector<double>& v, const Params& P) {
    const double lo = P.rho / std::sqrt(2.0 * double(P.n));
    const double hi = 1.0 / std::sqrt(double(P.M));
    std::vector<int> out;
    for (size_t k = 0; k < v.size(); ++k) {
        const double a = std::abs(v[k]);
        if (a >= lo && a <= hi) out.push_back(int(k));
    }
    return out;
}

struct Partition {
    std::vector<int> sigma;               // retained spread-set core, ascending
    std::vector<int> tau;                 // large coordinates excluded from blocks
    std::vector<int> I0;                  // tau plus the leftover indices
    std::vector<std::vector<int>> blocks; // each ascending
    Params params;
};

inline Partition build_partition(const std::vector<double>& v, const Params& P) {
    const int n = P.n;
    if (int(v.size()) != n) throw std::invalid_argument("build_partition: size mismatch");
    const double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (std::abs(nrm - 1.0) > 1e-9)
        throw std::invalid_argument("build_partition: input must be a unit vector");
    if (classify(v, P.M, P.rho) != Classification::Incomp)
        throw std::invalid_argument("build_partition: input is not Incomp at these parameters");

    const long long s = P.sigma_size();
    auto band = spread_set(v, P);
    if ((long long)(band.size()) < s)
        throw std::runtime_error("build_partition: spread set smaller than its floor");

    // sigma: the s largest-magnitude members of the band
    std::stable_sort(band.begin(), band.end(), [&](int a, int b) {
        return std::abs(v[size_t(a)]) > std::abs(v[size_t(b)]);
    });
    std::vector<int> ord_sigma(band.begin(), band.begin() + size_t(s));

    std::vector<char> in_sigma(size_t(n), 0);
    for (int i : ord_sigma) in_sigma[size_t(i)] = 1;

    // tau: top-M magnitudes minus sigma
    auto ord = magnitude_order(v);
    std::vector<char> in_tau(size_t(n), 0);
    for (long long r = 0; r < std::min<long long>(P.M, n); ++r) {
        const int i = ord[size_t(r)];
        if (!in_sigma[size_t(i)]) in_tau[size_t(i)] = 1;
    }

    // remaining pool outside tau, split into sigma and the rest (magnitude order)
    std::vector<int> ord_rest;
    for (int r = 0; r < n; ++r) {
        const int i = ord[size_t(r)];
        if (!in_tau[size_t(i)] && !in_sigma[size_t(i)]) ord_rest.push_back(i);
    }
    const long long pool = s + (long long)(ord_rest.size());

    Partition part;
    part.params = P;
    for (int i = 0; i < n; ++i) {
        if (in_sigma[size_t(i)]) part.sigma.push_back(i);
        else if (in_tau[size_t(i)]) part.tau.push_back(i);
    }

    const long long b = P.block_size();
    std::vector<int> leftover;
    if (pool < b) {
        std::vector<int> blk(ord_sigma);
        blk.insert(blk.end(), ord_rest.begin(), ord_rest.end());
        std::sort(blk.begin(), blk.end());
        part.blocks.push_back(std::move(blk));
    } else {
        const long long k0 = std::max<long long>(1, pool / b);
        const long long chunk = (s + k0 - 1) / k0;
        size_t cs = 0, cr = 0;
        for (long long k = 0; k < k0; ++k) {
            std::vector<int> blk;
            for (long long t = 0; t < chunk && cs < ord_sigma.size(); ++t) blk.push_back(ord_sigma[cs++]);
            while ((long long)(blk.size()) < b && cr < ord_rest.size()) blk.push_back(ord_rest[cr++]);
            while ((long long)(blk.size()) < b && cs < ord_sigma.size()) blk.push_back(ord_sigma[cs++]);
            std::sort(blk.begin(), blk.end());
            part.blocks.push_back(std::move(blk));
        }
        while (cs < ord_sigma.size()) leftover.push_back(ord_sigma[cs++]);
        while (cr < ord_rest.size()) leftover.push_back(ord_rest[cr++]);
    }

    part.I0 = part.tau;
    part.I0.insert(part.I0.end(), leftover.begin(), leftover.end());
    std::sort(part.I0.begin(), part.I0.end());
    return part;
}

// Empty result means every structural invariant holds.
inline std::vector<std::string> check_partition_invariants(const std::vector<double>& v,
                                                           const Partition& part) {
    const Params& P = part.params;
    std::vector<std::string> bad;
    const int n = P.n;

    std::vector<int> seen(size_t(n), 0);
    for (int i : part.I0) ++seen[size_t(i)];
    for (const auto& blk : part.blocks)
        for (int i : blk) ++seen[size_t(i)];
    for (int i = 0; i < n; ++i)
        if (seen[size_t(i)] != 1) {
            bad.push_back("index " + std::to_string(i) + " covered " +
                          std::to_string(seen[size_t(i)]) + " times");
            break;
        }

    if ((long long)(part.I0.size()) > 2 * P.M) bad.push_back("|I0| exceeds 2M");

    for (int i : part.sigma) {
        bool found = false;
        for (const auto& blk : part.blocks)
            found |= std::binary_search(blk.begin(), blk.end(), i);
        if (!found) {
            bad.push_back("sigma member outside all blocks");
            break;
        }
    }

    const double cap_inf = (1.0 + 1e-12) / std::sqrt(double(P.M));
    const double cap_l2 = 2.0 * std::sqrt(P.alpha * double(P.n) / double(P.M)) * (1.0 + 1e-12);
    const double floor_l2 = P.rho_prime * (1.0 - 1e-12);
    for (size_t k = 0; k < part.blocks.size(); ++k) {
        double l2 = 0.0, linf = 0.0;
        for (int i : part.blocks[k]) {
            const double a = std::abs(v[size_t(i)]);
            l2 += a * a;
            linf = std::max(linf, a);
        }
        l2 = std::sqrt(l2);
        if (l2 < floor_l2) bad.push_back("block " + std::to_string(k) + " below rho_prime");
        if (linf > cap_inf) bad.push_back("block " + std::to_string(k) + " exceeds 1/sqrt(M)");
        if (l2 > cap_l2) bad.push_back("block " + std::to_string(k) + " exceeds 2 sqrt(alpha n/M)");
    }
    return bad;
}

struct LcdResult {
    double value = std::numeric_limits<double>::infinity();
    double theta_witness = std::numeric_limits<double>::quiet_NaN();
    double dist_at_witness = std::numeric_limits<double>::quiet_NaN();
    double threshold_at_witness = std::numeric_limits<double>::quiet_NaN();
    double search_ceiling = 0.0;
    bool finite() const { return std::isfinite(value); }
};

// Least common denominator of a unit vector: the first dilation theta whose
// distance to the integer lattice drops below the logarithmic threshold.
inline LcdResult lcd(const std::vector<double>& x, double delta0, double p, double theta_max,
                     double grid_step) {
    if (x.empty()) throw std::invalid_argument("lcd: empty vector");
    if (grid_step <= 0) throw std::invalid_argument("lcd: grid step must be positive");
    const double d0p = delta0 * p;
    if (!(d0p > 0)) throw std::invalid_argument("lcd: delta0 * p must be positive");
    const double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (std::abs(nrm - 1.0) > 1e-9) throw std::invalid_argument("lcd: input must be a unit vector");
    double linf = 0.0;
    for (double v : x) linf = std::max(linf, std::abs(v));
    const double floor = 0.5 / linf;
    if (theta_max <= floor)
        throw std::invalid_argument("lcd: theta_max does not exceed the trivial floor 1/(2 max|x|)");

    const auto dist = [&](double t) {
        double d2 = 0.0;
        for (double v : x) {
            const double y = t * v - std::round(t * v);
            d2 += y * y;
        }
        return std::sqrt(d2);
    };
    const auto thresh = [&](double t) {
        const double arg = std::log(std::sqrt(d0p) * t);
        return std::sqrt(std::max(arg, 0.0) / d0p);
    };

    LcdResult r;
    r.search_ceiling = theta_max;

    // Below max(1/sqrt(d0p), floor) no crossing is possible: the threshold is
    // zero up to the first bound, and dist(theta x, Z) = theta ||x|| below the
    // second because every coordinate rounds to zero.
    const double start = std::max(1.0 / std::sqrt(d0p), floor);
    if (start > theta_max) return r;

    auto fill = [&](double t) {
        r.value = t;
        r.theta_witness = t;
        r.dist_at_witness = dist(t);
        r.threshold_at_witness = thresh(t);
    };

    if (dist(start) < thresh(start)) {
        fill(start);
        return r;
    }

    double prev = start;
    bool done = false;
    for (double t = start + grid_step; !done; t += grid_step) {
        if (t >= theta_max) {
            t = theta_max;
            done = true;
        }
        if (dist(t) < thresh(t)) {
            double lo = prev, hi = t;
            for (int it = 0; it < 80 && hi - lo > grid_step * 1e-6; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dist(mid) < thresh(mid)) hi = mid;
                else lo = mid;
            }
            fill(hi);
            return r;
        }
        prev = t;
    }
    return r;
}

// Regularized variant: the largest block-restricted value over the partition.
inline double regularized_lcd(const std::vector<double>& v, const Params& P,
                              double grid_step = 1e-3) {
    Partition part = build_partition(v, P);
    double dhat = 0.0;
    for (const auto& blk : part.blocks) {
        std::vector<double> y;
        y.reserve(blk.size());
        double l2 = 0.0;
        for (int i : blk) {
            y.push_back(v[size_t(i)]);
            l2 += v[size_t(i)] * v[size_t(i)];
        }
        l2 = std::sqrt(l2);
        for (double& t : y) t /= l2;
        LcdResult r = lcd(y, P.delta0, P.p, P.theta_max(), grid_step);
        dhat = std::max(dhat, r.value);
    }
    const double guaranteed = 0.5 * P.rho_prime * std::sqrt(double(P.M));
    if (dhat < guaranteed - grid_step)
        throw std::logic_error("regularized_lcd: value fell below its guaranteed floor");
    return dhat;
}

}  // namespace speclab
