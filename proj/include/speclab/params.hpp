#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace speclab {

// Every scalar the analysis fixes as a function of (n, p), plus the handful of
// universal constants that are exposed as knobs (rho_base, c_bar, c71, K, delta0).
// All other modules consume one Params object so the numbers stay consistent.
struct Params {
    int n = 0;
    double p = 0.0;
    double delta = 0.0;      // exponent with p = n^(-1+delta)
    int ell0 = 0;            // ceil(log(1/(8p)) / log(sqrt(pn))), clamped >= 1
    double rho = 0.0;        // rho_base^(-ell0-6)
    double rho_base = 0.0;
    long long M = 0;         // round(n / (np)^(1/16)), >= 1
    double alpha = 0.0;      // (np)^(-1/16)
    double rho_prime = 0.0;  // (rho^2/4) sqrt(M alpha / n)
    long long k0 = 0;        // block count, clamped >= 1
    double K_opnorm = 0.0;
    double delta0 = 0.0;     // small-ball constant; default is the gaussian value
    double eps_bar0 = 0.0;
    double D_low = 0.0;      // rho_prime sqrt(M)
    double D_mid = 0.0;      // sqrt(n) / (c_bar (pn)^(1/32))
    double D_high = 0.0;     // exp((np)^(1/32))
    double eps0 = 0.0;       // mid-range net scale, evaluated at D = D_mid
    double eps0_prime = 0.0; // small-range net scale (rho' sqrt(pM))^(-1/2) at M = n/(np)^(1/8)
    double c_bar = 0.0;
    double c71 = 0.0;

    long long block_size() const {
        return static_cast<long long>(std::ceil(alpha * double(n)));
    }
    long long sigma_size() const {
        return static_cast<long long>(std::ceil(double(M) * rho * rho / 2.0));
    }
    // LCD search ceiling keeping D_high inside the window
    double theta_max() const { return 4.0 * D_high; }
};

struct ParamOverrides {
    std::optional<double> rho_base;
    std::optional<double> delta0;
    std::optional<double> eps_bar0;
    std::optional<double> K_opnorm;
    std::optional<double> c_bar;
    std::optional<double> c71;
    std::optional<double> alpha;   // expert knob; breaks the M = alpha*n coupling
    std::optional<long long> M;    // expert knob
};

namespace defaults {
inline constexpr double rho_base = 20.0;
inline constexpr double K_opnorm = 10.0;
inline constexpr double eps_bar0 = 0.1;
// erfc(0.1/sqrt(2)): the closed-form delta0 of a standard gaussian entry at
// eps_bar0 = 0.1. Empirical estimates (smallball module) replace it per entry law.
inline constexpr double delta0_gaussian = 0.920344325445942;
inline constexpr double c_bar = 30.0;
inline constexpr double c71 = 0.01;
}  // namespace defaults

inline Params derive_params(int n, double p, const ParamOverrides& o = {}) {
    if (n < 16) throw std::invalid_argument("derive_params: n must be at least 16");
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("derive_params: p must be in (0,1]");
    const double np = double(n) * p;
    if (np <= 1.0)
        throw std::invalid_argument(
            "derive_params: np <= 1 is below connectivity scale; formulas degenerate");

    Params P;
    P.n = n;
    P.p = p;
    P.rho_base = o.rho_base.value_or(defaults::rho_base);
    P.K_opnorm = o.K_opnorm.value_or(defaults::K_opnorm);
    P.delta0 = o.delta0.value_or(defaults::delta0_gaussian);
    P.eps_bar0 = o.eps_bar0.value_or(defaults::eps_bar0);
    P.c_bar = o.c_bar.value_or(defaults::c_bar);
    P.c71 = o.c71.value_or(defaults::c71);

    P.delta = std::log(np) / std::log(double(n));

    const double raw_ell0 = std::log(1.0 / (8.0 * p)) / std::log(std::sqrt(np));
    P.ell0 = std::max(1, int(std::ceil(raw_ell0)));
    P.rho = std::pow(P.rho_base, -double(P.ell0) - 6.0);

    P.M = o.M.value_or(std::max<long long>(1, std::llround(double(n) / std::pow(np, 1.0 / 16.0))));
    P.alpha = o.alpha.value_or(std::pow(np, -1.0 / 16.0));
    P.rho_prime = (P.rho * P.rho / 4.0) * std::sqrt(double(P.M) * P.alpha / double(n));

    const long long pool = n - P.M + P.sigma_size();
    P.k0 = std::max<long long>(1, pool > 0 ? pool / P.block_size() : 0);

    P.D_low = P.rho_prime * std::sqrt(double(P.M));
    P.D_mid = std::sqrt(double(n)) / (P.c_bar * std::pow(np, 1.0 / 32.0));
    P.D_high = std::exp(std::pow(np, 1.0 / 32.0));
    P.eps0 = P.c71 * std::sqrt(P.alpha * double(n)) / P.D_mid;

    const long long M_small =
        std::max<long long>(1, std::llround(double(n) / std::pow(np, 1.0 / 8.0)));
    const double rho_prime_small =
        (P.rho * P.rho / 4.0) * std::sqrt(double(M_small) * P.alpha / double(n));
    P.eps0_prime = 1.0 / std::sqrt(rho_prime_small * std::sqrt(p * double(M_small)));

    return P;
}

inline std::vector<std::string> validate_regime(const Params& P) {
    std::vector<std::string> warnings;
    if (P.D_mid >= P.D_high) {
        warnings.push_back("asymptotic window inverted at this scale: D_mid = " +
                           std::to_string(P.D_mid) + " >= D_high = " + std::to_string(P.D_high));
    }
    const double pM = P.p * double(P.M);
    if (std::abs(pM - 1.0) <= 1e-9) {
        warnings.push_back("at Corollary range boundary p = 1/M");
    } else if (pM < 1.0) {
        warnings.push_back("p below 1/M: outside the range p >= 1/M (pM = " +
                           std::to_string(pM) + ")");
    }
    if (P.D_low > P.D_mid) {
        warnings.push_back("small-LCD floor D_low exceeds D_mid; regime windows overlap");
    }
    return warnings;
}

inline void to_json(nlohmann::json& j, const Params& P) {
    j = nlohmann::json{{"n", P.n},
                       {"p", P.p},
                       {"delta", P.delta},
                       {"ell0", P.ell0},
                       {"rho", P.rho},
                       {"rho_base", P.rho_base},
                       {"M", P.M},
                       {"alpha", P.alpha},
                       {"rho_prime", P.rho_prime},
                       {"k0", P.k0},
                       {"K_opnorm", P.K_opnorm},
                       {"delta0", P.delta0},
                       {"eps_bar0", P.eps_bar0},
                       {"D_low", P.D_low},
                       {"D_mid", P.D_mid},
                       {"D_high", P.D_high},
                       {"eps0", P.eps0},
                       {"eps0_prime", P.eps0_prime},
                       {"c_bar", P.c_bar},
                       {"c71", P.c71}};
}

inline void from_json(const nlohmann::json& j, Params& P) {
    j.at("n").get_to(P.n);
    j.at("p").get_to(P.p);
    j.at("delta").get_to(P.delta);
    j.at("ell0").get_to(P.ell0);
    j.at("rho").get_to(P.rho);
    j.at("rho_base").get_to(P.rho_base);
    j.at("M").get_to(P.M);
    j.at("alpha").get_to(P.alpha);
    j.at("rho_prime").get_to(P.rho_prime);
    j.at("k0").get_to(P.k0);
    j.at("K_opnorm").get_to(P.K_opnorm);
    j.at("delta0").get_to(P.delta0);
    j.at("eps_bar0").get_to(P.eps_bar0);
    j.at("D_low").get_to(P.D_low);
    j.at("D_mid").get_to(P.D_mid);
    j.at("D_high").get_to(P.D_high);
    j.at("eps0").get_to(P.eps0);
    j.at("eps0_prime").get_to(P.eps0_prime);
    j.at("c_bar").get_to(P.c_bar);
    j.at("c71").get_to(P.c71);
}

}  // namespace speclab
