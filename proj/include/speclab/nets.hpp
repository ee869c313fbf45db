#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "speclab/params.hpp"
#include "speclab/rng.hpp"
#include "speclab/structure.hpp"

namespace speclab {

namespace defaults {
inline constexpr double c_net = 0.25;
}

inline double beta_for(double D0, double delta0, double p) {
    const double root = std::sqrt(delta0 * p);
    const double arg = 2.0 * root * D0;
    if (!(arg > 1.0)) throw std::invalid_argument("beta_for: below beta-validity range");
    return 2.0 * std::sqrt(std::log(arg)) / (D0 * root);
}

struct DirectionNet {
    int m = 0;
    double D0 = 0.0;
    std::vector<std::vector<double>> points;  // unit vectors
    double bound = 0.0;                       // (2 + c_bar D0/sqrt(m))^m at configured c_bar
    double min_cbar = 0.0;                    // smallest c_bar for which |points| <= bound
};

// All directions of nonzero integer points with norm <= 4 D0, deduplicated by
// primitive integer vector so that no floating-point tolerance is needed.
inline DirectionNet integer_net(int m, double D0, double c_bar = defaults::c_bar) {
    if (m < 1 || m > 3) throw std::invalid_argument("integer_net: dimension must be 1, 2 or 3");
    if (!(D0 > 0)) throw std::invalid_argument("integer_net: D0 must be positive");
    const double R = 4.0 * D0;
    const long long B = (long long)(std::floor(R));
    const double cube = std::pow(2.0 * double(B) + 1.0, double(m));
    if (cube > 1e7) throw std::invalid_argument("integer_net: enumeration too large");

    std::set<std::array<long long, 3>> prim;
    const long long lo1 = -B, hi1 = B;
    const long long lo2 = (m >= 2) ? -B : 0, hi2 = (m >= 2) ? B : 0;
    const long long lo3 = (m >= 3) ? -B : 0, hi3 = (m >= 3) ? B : 0;
    for (long long a = lo1; a <= hi1; ++a)
        for (long long b = lo2; b <= hi2; ++b)
            for (long long c = lo3; c <= hi3; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                const double n2 = double(a * a + b * b + c * c);
                if (n2 > R * R) continue;
                long long g = std::gcd(std::abs(a), std::gcd(std::abs(b), std::abs(c)));
                prim.insert({a / g, b / g, c / g});
            }

    DirectionNet net;
    net.m = m;
    net.D0 = D0;
    for (const auto& z : prim) {
        const double nrm = std::sqrt(double(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
        std::vector<double> q(static_cast<std::size_t>(m), 0.0);
        for (int i = 0; i < m; ++i) q[size_t(i)] = double(z[size_t(i)]) / nrm;
        net.points.push_back(std::move(q));
    }
    net.bound = std::pow(2.0 + c_bar * D0 / std::sqrt(double(m)), double(m));
    const double root = std::pow(double(net.points.size()), 1.0 / double(m));
    net.min_cbar = std::max(0.0, (root - 2.0) * std::sqrt(double(m)) / D0);
    return net;
}

struct CoveringCheck {
    double max_gap = 0.0;
    long long accepted = 0;
    double beta = 0.0;
    double grid = 0.0;
    bool pass = true;
};

// Samples unit directions, keeps those whose LCD lands in (D0, 2 D0], and
// measures the farthest accepted sample from the net.
inline CoveringCheck net_covering_check(const DirectionNet& net, double delta0, double p,
                                        long long trials, std::uint64_t seed) {
    CoveringCheck r;
    r.beta = beta_for(net.D0, delta0, p);
    r.grid = 1e-4;
    const double theta_max = 2.2 * net.D0 + 1.0;
    for (long long t = 0; t < trials; ++t) {
        std::vector<double> v(static_cast<std::size_t>(net.m), 0.0);
        double nrm = 0.0;
        for (int i = 0; i < net.m; ++i) {
            v[size_t(i)] = rng::gaussian(seed, std::uint64_t(t), std::uint64_t(i), 0);
            nrm += v[size_t(i)] * v[size_t(i)];
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;
        double linf = 0.0;
        for (double& x : v) {
            x /= nrm;
            linf = std::max(linf, std::abs(x));
        }
        if (theta_max <= 0.5 / linf) continue;
        LcdResult d = lcd(v, delta0, p, theta_max, r.grid);
        if (!d.finite() || d.value <= net.D0 || d.value > 2.0 * net.D0) continue;
        ++r.accepted;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : net.points) {
            double g = 0.0;
            for (int i = 0; i < net.m; ++i) {
                const double dd = v[size_t(i)] - q[size_t(i)];
                g += dd * dd;
            }
            best = std::min(best, std::sqrt(g));
        }
        r.max_gap = std::max(r.max_gap, best);
    }
    if (r.accepted == 0)
        std::cerr << "net_covering_check: no samples fell in the LCD window (D0, 2 D0]\n";
    r.pass = r.max_gap <= r.beta + r.grid;
    return r;
}

// Evenly spaced covering of [-radius, radius] with gap <= spacing.
inline std::vector<double> interval_net(double radius, double spacing) {
    if (!(radius > 0.0) || !(spacing > 0.0))
        throw std::invalid_argument("interval_net: radius and spacing must be positive");
    if (spacing > 2.0 * radius) return {0.0};
    const long long steps = (long long)(std::ceil(2.0 * radius / spacing));
    std::vector<double> out;
    out.reserve(size_t(steps + 1));
    for (long long i = 0; i <= steps; ++i)
        out.push_back(-radius + 2.0 * radius * double(i) / double(steps));
    out.front() = -radius;
    out.back() = radius;
    return out;
}

enum class Regime { mid, small };

inline std::string to_string(Regime r) { return r == Regime::mid ? "mid" : "small"; }

inline Regime parse_regime(std::string_view s) {
    if (s == "mid") return Regime::mid;
    if (s == "small") return Regime::small;
    throw std::invalid_argument("unknown regime: " + std::string(s));
}

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct UnionBoundExponent {
    Regime regime = Regime::mid;
    double D = 0.0;
    // log of each factor in the counting product
    double choose_I0 = 0.0;
    double choose_sigma = 0.0;
    double interval_nets = 0.0;
    double direction_nets = 0.0;
    double level_sets = 0.0;
    double anchor_net = 0.0;
    double smallball = 0.0;
    double exponent = 0.0;
    double exponent_per_n = 0.0;
    bool binom_clamped = false;
    bool log2d_clamped = false;
    bool limit_negative = false;  // configured constants admit a negative asymptotic limit
    bool closes = false;          // exponent_per_n < 0 at this size
};

inline UnionBoundExponent union_bound_exponent(const Params& P, double D, Regime regime,
                                               double c_net = defaults::c_net) {
    const double n = double(P.n);
    const double b = double(P.block_size());
    const double sqan = std::sqrt(P.alpha * n);
    if (regime == Regime::mid) {
        if (!(D >= P.D_mid * (1 - 1e-9) && D <= P.D_high * (1 + 1e-9)))
            throw std::domain_error("union_bound_exponent: D outside the mid regime window");
    } else {
        if (!(D >= P.D_low * (1 - 1e-9) && D <= P.D_mid * (1 + 1e-9)))
            throw std::domain_error("union_bound_exponent: D outside the small regime window");
    }

    double M, rho_prime, eps0, k0;
    if (regime == Regime::mid) {
        M = double(P.M);
        rho_prime = P.rho_prime;
        eps0 = P.c71 * sqan / D;
        k0 = double(P.k0);
    } else {
        M = double(std::llround(n / std::pow(n * P.p, 1.0 / 8.0)));
        rho_prime = P.rho * P.rho / 4.0 * std::sqrt(M * P.alpha / n);
        eps0 = P.eps0_prime;
        const double s = std::ceil(M * P.rho * P.rho / 2.0);
        k0 = std::max(1.0, std::floor((n - M + s) / b));
    }

    UnionBoundExponent e;
    e.regime = regime;
    e.D = D;

    double k1 = 2.0 * M;
    if (k1 > n) {
        k1 = n;
        e.binom_clamped = true;
    }
    e.choose_I0 = log_binomial(n, k1);
    e.choose_sigma = log_binomial(n, std::min(M * P.rho * P.rho, n));
    e.interval_nets = 2.0 * M * std::log(10.0 * P.K_opnorm / (c_net * eps0 * rho_prime));
    e.direction_nets = (regime == Regime::mid) ? n * std::log(2.0 * P.c_bar * D / sqan)
                                               : n * std::log(13.0);
    const double ln2d = std::log(2.0 * D);
    if (ln2d > 0.0) {
        e.level_sets = std::log(ln2d) / P.alpha;
    } else {
        e.level_sets = 0.0;
        e.log2d_clamped = true;
    }
    e.anchor_net = std::log(30.0 * P.K_opnorm * k0 / (c_net * eps0 * rho_prime)) / P.alpha;
    e.smallball = (n - b) * std::log(eps0);

    e.exponent = e.choose_I0 + e.choose_sigma + e.interval_nets + e.direction_nets +
                 e.level_sets + e.anchor_net + e.smallball;
    e.exponent_per_n = e.exponent / n;
    e.limit_negative = 2.0 * P.c_bar * P.c71 < 1.0;
    e.closes = e.exponent_per_n < 0.0;
    return e;
}

// All-double evaluation at the mid-window bottom for sizes far beyond what the
// integer Params path can represent; ln binomials via the entropy form.
inline double union_bound_exponent_raw(double n, double p, Regime regime,
                                       double rho_base = defaults::rho_base,
                                       double K = defaults::K_opnorm,
                                       double c_bar = defaults::c_bar,
                                       double c71 = defaults::c71,
                                       double c_net = defaults::c_net) {
    const double np = n * p;
    const double alpha = std::pow(np, -1.0 / 16.0);
    const double ell0 = std::max(1.0, std::ceil(std::log(1.0 / (8.0 * p)) / std::log(std::sqrt(np))));
    const double rho = std::pow(rho_base, -(ell0 + 6.0));
    const double M = (regime == Regime::mid) ? n * alpha : n * std::pow(np, -1.0 / 8.0);
    const double rho_prime = rho * rho / 4.0 * std::sqrt(M * alpha / n);
    const double k0 = std::max(1.0, (n - M) / (alpha * n));
    const double sqan = std::sqrt(alpha * n);
    const double D = sqan / c_bar;
    const double eps0 = (regime == Regime::mid) ? c71 * sqan / D
                                                : 1.0 / std::sqrt(rho_prime * std::sqrt(p * M));

    const auto H = [](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
    };
    double e = 0.0;
    e += H(std::min(2.0 * M / n, 1.0));
    e += H(std::min(M * rho * rho / n, 1.0));
    e += (2.0 * M / n) * std::log(10.0 * K / (c_net * eps0 * rho_prime));
    e += (regime == Regime::mid) ? std::log(2.0 * c_bar * D / sqan) : std::log(13.0);
    const double ln2d = std::log(2.0 * D);
    if (ln2d > 0.0) e += std::log(ln2d) / (alpha * n);
    e += std::log(30.0 * K * k0 / (c_net * eps0 * rho_prime)) / (alpha * n);
    e += (1.0 - alpha) * std::log(eps0);
    return e;
}

}  // namespace speclab
