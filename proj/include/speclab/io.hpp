#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "speclab/ensembles.hpp"

// Matrix files come in two interchangeable formats:
//  - triplet text: '%'-comment lines, then "n n nnz", then 1-based "i j value"
//    lines for the upper triangle (symmetry implied);
//  - raw binary: an 8-byte little-endian unsigned n, then n*n doubles row-major.
// read_matrix sniffs the format from the leading bytes.

namespace speclab {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_matrix_triplet(const std::string& path, const SymMatrix& M) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    int nnz = 0;
    for (int i = 0; i < M.n; ++i)
        for (int j = i; j < M.n; ++j)
            if (M(i, j) != 0.0) ++nnz;
    out << "% symmetric triplet, upper triangle, 1-based\n";
    out << M.n << ' ' << M.n << ' ' << nnz << '\n';
    for (int i = 0; i < M.n; ++i)
        for (int j = i; j < M.n; ++j)
            if (M(i, j) != 0.0)
                out << (i + 1) << ' ' << (j + 1) << ' ' << format_double(M(i, j)) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_matrix_binary(const std::string& path, const SymMatrix& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint64_t n = std::uint64_t(M.n);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(M.a.data()),
              std::streamsize(M.a.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline SymMatrix read_matrix_triplet(std::istream& in, const std::string& path) {
    std::string line;
    long long n = -1, nnz = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        long long rows, cols;
        std::istringstream hs(line);
        if (!(hs >> rows >> cols >> nnz) || rows != cols || rows < 1)
            throw std::runtime_error("bad triplet header in " + path);
        n = rows;
        break;
    }
    if (n < 0) throw std::runtime_error("missing triplet header in " + path);
    SymMatrix M = SymMatrix::zero(int(n));
    long long seen = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        long long i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw std::runtime_error("bad triplet line in " + path);
        if (i < 1 || i > n || j < 1 || j > n)
            throw std::runtime_error("triplet index out of range in " + path);
        M.set_sym(int(i - 1), int(j - 1), v);
        ++seen;
    }
    if (nnz >= 0 && seen != nnz)
        throw std::runtime_error("triplet count mismatch in " + path);
    return M;
}

inline SymMatrix read_matrix_binary(std::istream& in, const std::string& path) {
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in || n == 0 || n > (1ull << 20))
        throw std::runtime_error("bad binary matrix header in " + path);
    SymMatrix M = SymMatrix::zero(int(n));
    in.read(reinterpret_cast<char*>(M.a.data()), std::streamsize(M.a.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated binary matrix in " + path);
    return M;
}

inline SymMatrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char head[16] = {};
    in.read(head, sizeof head);
    const std::streamsize got = in.gcount();
    bool texty = got > 0;
    for (std::streamsize k = 0; k < got; ++k) {
        const unsigned char c = static_cast<unsigned char>(head[k]);
        if (!(std::isprint(c) || std::isspace(c))) {
            texty = false;
            break;
        }
    }
    in.clear();
    in.seekg(0);
    return texty ? read_matrix_triplet(in, path) : read_matrix_binary(in, path);
}

inline void write_vector(const std::string& path, const std::vector<double>& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (double x : v) out << format_double(x) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<double> read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%' || line[0] == '#') continue;
        v.push_back(std::stod(line));
    }
    return v;
}

}  // namespace speclab
