#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclab/rng.hpp"

namespace speclab {

// Entry law for the off-diagonal/diagonal values: mean 0, variance 1,
// bounded subgaussian moment. two_point(q) takes value sqrt((1-q)/q) with
// probability q and -sqrt(q/(1-q)) otherwise.
struct EntryDist {
    enum class Kind { gaussian, rademacher, uniform, two_point };

    Kind kind = Kind::gaussian;
    double a = 0.0;  // two-point high value
    double b = 0.0;  // two-point low value
    double q = 0.0;  // two-point high-mass probability
    double subgaussian_bound = 1.0;

    static EntryDist standard_gaussian() { return {Kind::gaussian, 0, 0, 0, 1.0}; }
    static EntryDist rademacher() { return {Kind::rademacher, 0, 0, 0, 1.0}; }
    static EntryDist uniform_scaled() {
        return {Kind::uniform, 0, 0, 0, 1.7320508075688772};
    }
    static EntryDist two_point(double q) {
        if (!(q > 0.0) || !(q < 1.0))
            throw std::invalid_argument("two_point: q must be in (0,1)");
        const double hi = std::sqrt((1.0 - q) / q);
        const double lo = -std::sqrt(q / (1.0 - q));
        return {Kind::two_point, hi, lo, q, std::max(hi, -lo)};
    }

    // one variate on streams (1, 2) of the (seed, i, j) counter cell
    double sample(std::uint64_t seed, std::uint64_t i, std::uint64_t j) const {
        switch (kind) {
            case Kind::gaussian:
                return rng::gaussian(seed, i, j, 1);
            case Kind::rademacher:
                return (rng::mix(seed, i, j, 1) >> 63) ? 1.0 : -1.0;
            case Kind::uniform:
                return (2.0 * rng::u01(rng::mix(seed, i, j, 1)) - 1.0) * 1.7320508075688772;
            case Kind::two_point:
                return rng::u01(rng::mix(seed, i, j, 1)) < q ? a : b;
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::gaussian: return "gaussian";
            case Kind::rademacher: return "rademacher";
            case Kind::uniform: return "uniform";
            case Kind::two_point: return "two-point";
        }
        return "?";
    }

    static EntryDist parse(const std::string& s, double q = 0.5) {
        if (s == "gaussian" || s == "standard-gaussian") return standard_gaussian();
        if (s == "rademacher") return rademacher();
        if (s == "uniform" || s == "uniform-scaled") return uniform_scaled();
        if (s == "two-point" || s == "two_point") return two_point(q);
        throw std::invalid_argument("unknown entry distribution: " + s);
    }
};

inline void to_json(nlohmann::json& j, const EntryDist& d) {
    j = nlohmann::json{{"kind", d.name()}};
    if (d.kind == EntryDist::Kind::two_point) j["q"] = d.q;
}

inline void from_json(const nlohmann::json& j, EntryDist& d) {
    d = EntryDist::parse(j.at("kind").get<std::string>(),
                         j.value("q", 0.5));
}

enum class MatrixKind { centered_sparse, adjacency };

inline std::string to_string(MatrixKind k) {
    return k == MatrixKind::centered_sparse ? "centered-sparse" : "adjacency";
}

inline MatrixKind parse_matrix_kind(const std::string& s) {
    if (s == "centered-sparse" || s == "sparse") return MatrixKind::centered_sparse;
    if (s == "adjacency") return MatrixKind::adjacency;
    throw std::invalid_argument("unknown matrix kind: " + s);
}

struct EnsembleSpec {
    int n = 0;
    double p = 0.0;
    EntryDist dist;
    MatrixKind kind = MatrixKind::centered_sparse;

    void validate() const {
        if (n < 1) throw std::invalid_argument("EnsembleSpec: n must be positive");
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("EnsembleSpec: p must be in [0,1]");
    }
};

// Dense symmetric storage; both halves are written from the same draw so the
// symmetry is exact down to the bit.
struct SymMatrix {
    int n = 0;
    std::vector<double> a;

    static SymMatrix zero(int n) { return {n, std::vector<double>(size_t(n) * n, 0.0)}; }

    double operator()(int i, int j) const { return a[size_t(i) * n + j]; }
    double& at(int i, int j) { return a[size_t(i) * n + j]; }
    void set_sym(int i, int j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }
};

// value the sparse sampler assigns to cell (i, j), i <= j: Bernoulli(p) gate on
// stream 0 times an entry variate on streams 1-2
inline double entry_value(const EnsembleSpec& spec, std::uint64_t seed, int i, int j) {
    const bool hit = rng::u01(rng::mix(seed, std::uint64_t(i), std::uint64_t(j), 0)) < spec.p;
    if (!hit) return 0.0;
    return spec.dist.sample(seed, std::uint64_t(i), std::uint64_t(j));
}

inline SymMatrix sample_sparse_symmetric(const EnsembleSpec& spec, std::uint64_t seed) {
    spec.validate();
    SymMatrix M = SymMatrix::zero(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        for (int j = i; j < spec.n; ++j) {
            const double v = entry_value(spec, seed, i, j);
            if (v != 0.0) M.set_sym(i, j, v);
        }
    }
    return M;
}

inline SymMatrix sample_adjacency(int n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_adjacency: n must be positive");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_adjacency: p must be in [0,1]");
    SymMatrix A = SymMatrix::zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng::u01(rng::mix(seed, std::uint64_t(i), std::uint64_t(j), 0)) < p)
                A.set_sym(i, j, 1.0);
        }
    }
    return A;
}

inline void require_zero_diagonal(const SymMatrix& A, const char* who) {
    for (int i = 0; i < A.n; ++i)
        if (A(i, i) != 0.0)
            throw std::invalid_argument(std::string(who) + ": input must have a zero diagonal");
}

// A - p(J - I): mean-zero shift of an adjacency matrix
inline SymMatrix center_adjacency(const SymMatrix& A, double p) {
    require_zero_diagonal(A, "center_adjacency");
    SymMatrix C = SymMatrix::zero(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            if (i != j) C.at(i, j) = A(i, j) - p;
    return C;
}

// J - I - A
inline SymMatrix complement_adjacency(const SymMatrix& A) {
    require_zero_diagonal(A, "complement_adjacency");
    SymMatrix C = SymMatrix::zero(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            if (i != j) C.at(i, j) = 1.0 - A(i, j);
    return C;
}

// delete row/column drop_index: returns the minor, the removed off-diagonal
// column X, and the removed diagonal entry
inline std::tuple<SymMatrix, std::vector<double>, double> principal_minor(const SymMatrix& M,
                                                                          int drop_index) {
    if (drop_index < 0 || drop_index >= M.n)
        throw std::out_of_range("principal_minor: drop index out of range");
    const int m = M.n - 1;
    SymMatrix R = SymMatrix::zero(m);
    std::vector<double> X(static_cast<std::size_t>(m), 0.0);
    for (int i = 0, ri = 0; i < M.n; ++i) {
        if (i == drop_index) continue;
        X[size_t(ri)] = M(i, drop_index);
        for (int j = 0, rj = 0; j < M.n; ++j) {
            if (j == drop_index) continue;
            R.at(ri, rj) = M(i, j);
            ++rj;
        }
        ++ri;
    }
    return {std::move(R), std::move(X), M(drop_index, drop_index)};
}

inline int count_zero_rows(const SymMatrix& M) {
    int c = 0;
    for (int i = 0; i < M.n; ++i) {
        bool zero = true;
        for (int j = 0; j < M.n && zero; ++j) zero = M(i, j) == 0.0;
        if (zero) ++c;
    }
    return c;
}

}  // namespace speclab
