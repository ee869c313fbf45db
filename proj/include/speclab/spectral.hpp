#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "speclab/ensembles.hpp"

namespace speclab {

// Full symmetric eigendecomposition. Eigenvalues are reported in descending
// order (lambda_1 >= ... >= lambda_n) so interlacing statements read verbatim.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::optional<Eigen::MatrixXd> vectors;  // columns aligned with eigenvalues
    double backward_error = -1.0;            // negative when vectors were not requested
};

inline Spectrum eigen_sym(const SymMatrix& M, bool want_vectors) {
    for (double v : M.a)
        if (!std::isfinite(v))
            throw std::invalid_argument("eigen_sym: matrix has non-finite entries");
    Eigen::Map<const Eigen::MatrixXd> A(M.a.data(), M.n, M.n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        A, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen_sym: eigensolver failed to converge");

    Spectrum s;
    s.eigenvalues.resize(size_t(M.n));
    for (int i = 0; i < M.n; ++i)
        s.eigenvalues[size_t(i)] = solver.eigenvalues()(M.n - 1 - i);

    if (want_vectors) {
        Eigen::MatrixXd V = solver.eigenvectors().rowwise().reverse();
        Eigen::MatrixXd R = A * V;
        double be = 0.0;
        for (int i = 0; i < M.n; ++i) {
            const double r = (R.col(i) - s.eigenvalues[size_t(i)] * V.col(i)).norm();
            be = std::max(be, r);
        }
        s.vectors = std::move(V);
        s.backward_error = be;
    }
    return s;
}

// Consecutive-gap statistics and the tolerance-based multiplicity clustering
// that underlies the "simple spectrum" verdict.
struct GapReport {
    std::vector<double> gaps;  // lambda_i - lambda_{i+1}
    double delta_min = std::numeric_limits<double>::infinity();
    int argmin = -1;
    std::vector<std::pair<int, int>> clusters;  // inclusive index ranges
    bool simple = true;
    double tol_abs = 0.0;
    double tol_scale = 0.0;
};

inline GapReport gap_report(const Spectrum& s, double tol_abs, double tol_scale) {
    if (tol_abs < 0.0 || tol_scale < 0.0)
        throw std::invalid_argument("gap_report: tolerances must be nonnegative");
    const auto& ev = s.eigenvalues;
    const int n = int(ev.size());
    for (int i = 0; i + 1 < n; ++i)
        if (ev[size_t(i)] < ev[size_t(i) + 1])
            throw std::invalid_argument("gap_report: spectrum must be sorted descending");

    GapReport g;
    g.tol_abs = tol_abs;
    g.tol_scale = tol_scale;
    if (n == 0) return g;

    const double scale = std::max({1.0, std::abs(ev.front()), std::abs(ev.back())});
    const double thresh = tol_abs + tol_scale * scale;

    g.gaps.resize(size_t(n - 1));
    for (int i = 0; i + 1 < n; ++i) {
        g.gaps[size_t(i)] = ev[size_t(i)] - ev[size_t(i) + 1];
        if (g.gaps[size_t(i)] < g.delta_min) {
            g.delta_min = g.gaps[size_t(i)];
            g.argmin = i;
        }
    }

    int lo = 0;
    for (int i = 0; i + 1 < n; ++i) {
        if (g.gaps[size_t(i)] > thresh) {
            g.clusters.emplace_back(lo, i);
            lo = i + 1;
        }
    }
    g.clusters.emplace_back(lo, n - 1);
    for (auto [l, h] : g.clusters)
        if (h > l) g.simple = false;
    return g;
}

// Largest violation of the Cauchy chain lambda_{j+1} <= mu_j <= lambda_j between
// the spectrum of M and of its principal minor at drop_index. Exact math says 0;
// anything above floating-point noise indicates a defect.
inline double interlacing_violation(const SymMatrix& M, int drop_index) {
    if (M.n < 2) throw std::invalid_argument("interlacing: need n >= 2");
    if (drop_index < 0 || drop_index >= M.n)
        throw std::out_of_range("interlacing: drop index out of range");
    auto [minor, X, corner] = principal_minor(M, drop_index);
    const auto lam = eigen_sym(M, false).eigenvalues;
    const auto mu = eigen_sym(minor, false).eigenvalues;
    double worst = 0.0;
    for (int j = 0; j + 1 < M.n; ++j) {
        worst = std::max(worst, mu[size_t(j)] - lam[size_t(j)]);
        worst = std::max(worst, lam[size_t(j) + 1] - mu[size_t(j)]);
    }
    return std::max(worst, 0.0);
}

inline bool interlacing_check(const SymMatrix& M, int drop_index, double slack) {
    return interlacing_violation(M, drop_index) <= slack;
}

// Residual of |a w^T X| = |lambda_i(minor) - lambda_i(M)| |w^T x'| where x is the
// i-th eigenvector of M, a its last coordinate, x' the rest, w the i-th
// eigenvector of the last-coordinate minor, and X the deleted column.
struct IdentityResidual {
    double value = 0.0;
    bool degenerate = false;  // |a| below 1e-12: both sides vanish structurally
    double a_coord = 0.0;
};

inline IdentityResidual gap_identity_residual(const SymMatrix& M, int i) {
    if (M.n < 2) throw std::invalid_argument("gap_identity_residual: need n >= 2");
    if (i < 0 || i >= M.n - 1)
        throw std::out_of_range("gap_identity_residual: index must pair with the minor spectrum");
    auto [minor, X, corner] = principal_minor(M, M.n - 1);
    Spectrum full = eigen_sym(M, true);
    Spectrum part = eigen_sym(minor, true);

    const auto& V = *full.vectors;
    const auto& W = *part.vectors;
    const int m = M.n - 1;
    const double a = V(m, i);

    double wx = 0.0, wX = 0.0;
    for (int k = 0; k < m; ++k) {
        wx += W(k, i) * V(k, i);
        wX += W(k, i) * X[size_t(k)];
    }
    const double lhs = std::abs(a * wX);
    const double rhs =
        std::abs(part.eigenvalues[size_t(i)] - full.eigenvalues[size_t(i)]) * std::abs(wx);

    IdentityResidual r;
    r.value = std::abs(lhs - rhs);
    r.a_coord = a;
    r.degenerate = std::abs(a) < 1e-12;
    return r;
}

inline double operator_norm(const SymMatrix& M) {
    if (M.n == 0) return 0.0;
    const auto ev = eigen_sym(M, false).eigenvalues;
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace speclab
