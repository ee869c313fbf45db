#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speclab/rng.hpp"
#include "speclab/structure.hpp"

using namespace speclab;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> random_unit(int n, std::uint64_t seed) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    double nrm = 0;
    for (int i = 0; i < n; ++i) {
        x[size_t(i)] = rng::gaussian(seed, std::uint64_t(i), 0, 1);
        nrm += x[size_t(i)] * x[size_t(i)];
    }
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
    return x;
}

std::vector<double> uniform_unit(int n) {
    return std::vector<double>(size_t(n), 1.0 / std::sqrt(double(n)));
}

double norm2(const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

}  // namespace

TEST_CASE("rearranged_segment selects magnitude rank ranges") {
    std::vector<double> x{3, 1, 2};
    CHECK(rearranged_segment(x, 1, 1) == std::vector<double>{3, 0, 0});
    CHECK(rearranged_segment(x, 2, 3) == std::vector<double>{0, 1, 2});
    auto r = random_unit(10, 5);
    CHECK(rearranged_segment(r, 1, 10) == r);
    CHECK_THROWS_AS(rearranged_segment(x, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(rearranged_segment(x, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(rearranged_segment(x, 3, 2), std::invalid_argument);
}

TEST_CASE("dist_to_sparse equals the tail norm and the exhaustive minimum") {
    SECTION("sparse vectors have distance zero") {
        std::vector<double> x(16, 0.0);
        x[3] = 0.6;
        x[9] = 0.8;
        CHECK(dist_to_sparse(x, 2) == 0.0);
        CHECK(dist_to_sparse(x, 16) == 0.0);
        CHECK(dist_to_sparse(x, 20) == 0.0);
    }
    SECTION("uniform vector, half the budget") {
        CHECK_THAT(dist_to_sparse(uniform_unit(16), 8), WithinAbs(std::sqrt(0.5), 1e-12));
    }
    SECTION("exhaustive support oracle at n=8, M=3") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto x = random_unit(8, 1000 + seed);
            // min over all 3-element supports of || x - P_S x ||
            double best = 1e300;
            for (int a = 0; a < 8; ++a)
                for (int b = a + 1; b < 8; ++b)
                    for (int c = b + 1; c < 8; ++c) {
                        double t = 0;
                        for (int k = 0; k < 8; ++k)
                            if (k != a && k != b && k != c) t += x[size_t(k)] * x[size_t(k)];
                        best = std::min(best, std::sqrt(t));
                    }
            CHECK_THAT(dist_to_sparse(x, 3), WithinAbs(best, 1e-14));
        }
    }
}

TEST_CASE("classify splits on the rho boundary with <= meaning compressible") {
    std::vector<double> e1(16, 0.0);
    e1[0] = 1.0;
    CHECK(classify(e1, 1, 0.01) == Classification::Comp);
    CHECK(classify(e1, 5, 0.5) == Classification::Comp);

    CHECK(classify(uniform_unit(256), 2, 0.1) == Classification::Incomp);

    // construct tail norm exactly rho
    const double rho = 0.3;
    std::vector<double> x(5);
    const double b = rho / std::sqrt(3.0);
    const double a = std::sqrt((1.0 - rho * rho) / 2.0);
    x = {a, a, b, b, b};
    CHECK_THAT(norm2(x), WithinAbs(1.0, 1e-14));
    CHECK(classify(x, 2, rho) == Classification::Comp);
    CHECK(classify(x, 2, rho * 0.999) == Classification::Incomp);
}

TEST_CASE("is_dominated evaluates the tail inequality verbatim") {
    std::vector<double> e1(8, 0.0);
    e1[0] = 1.0;
    CHECK(is_dominated(e1, 1, 0.5));  // 0 <= 0

    CHECK_FALSE(is_dominated(uniform_unit(16), 8, 0.5));

    // equal-coordinate tail with alpha_dom = 1 and m = tail size: equality holds
    std::vector<double> y(12, 0.0);
    y[0] = 0.8;
    for (int i = 1; i < 7; ++i) y[size_t(i)] = 0.1;
    double nrm = norm2(y);
    for (double& v : y) v /= nrm;
    CHECK(is_dominated(y, 6, 1.0));
}

TEST_CASE("spread_set follows the magnitude band") {
    Params P = derive_params(64, 0.5);
    // uniform coordinates 1/8 sit inside [rho/sqrt(128), 1/sqrt(M)] iff M <= 64
    auto u = uniform_unit(64);
    auto s = spread_set(u, P);
    if (1.0 / 8.0 <= 1.0 / std::sqrt(double(P.M)))
        CHECK(s.size() == 64);

    std::vector<double> e1(64, 0.0);
    e1[0] = 1.0;
    CHECK(spread_set(e1, P).empty());  // 1 > 1/sqrt(M), zeros below the floor
}

TEST_CASE("spread set of incompressible vectors meets the counting bound") {
    Params P = derive_params(2000, 0.05);
    const double floor = double(P.M) * P.rho * P.rho / 2.0;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto v = random_unit(2000, seed);
        if (classify(v, P.M, P.rho) != Classification::Incomp) continue;
        ++checked;
        CHECK(double(spread_set(v, P).size()) >= floor);
    }
    CHECK(checked == 200);  // at this scale every sampled vector is incompressible
}

TEST_CASE("partition invariants at derived parameters (degenerate single block)") {
    Params P = derive_params(2000, 0.05);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto v = random_unit(2000, 40000 + seed);
        REQUIRE(classify(v, P.M, P.rho) == Classification::Incomp);
        Partition part = build_partition(v, P);
        INFO("seed=" << seed);
        CHECK(check_partition_invariants(v, part).empty());
        CHECK(part.sigma.size() == size_t(P.sigma_size()));
        CHECK(part.blocks.size() == 1);  // pool is smaller than one nominal block
    }
}

TEST_CASE("partition with overridden small alpha exercises the interleaved path") {
    ParamOverrides o;
    o.alpha = 0.05;
    o.M = 100;
    Params P = derive_params(2000, 0.05, o);
    REQUIRE(P.k0 == 19);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto v = random_unit(2000, 90000 + seed);
        Partition part = build_partition(v, P);
        INFO("seed=" << seed);
        CHECK(check_partition_invariants(v, part).empty());
        CHECK(part.blocks.size() == 19);
        for (const auto& blk : part.blocks) CHECK(blk.size() == size_t(P.block_size()));
        // every sigma member lands in some block, never in I0
        for (int s : part.sigma) {
            bool found = false;
            for (const auto& blk : part.blocks)
                found |= std::binary_search(blk.begin(), blk.end(), s);
            CHECK(found);
        }
    }
}

TEST_CASE("partition rejects compressible input") {
    Params P = derive_params(2000, 0.05);
    std::vector<double> e1(2000, 0.0);
    e1[0] = 1.0;
    CHECK_THROWS_WITH(build_partition(e1, P),
                      Catch::Matchers::ContainsSubstring("Incomp"));
}

TEST_CASE("partition is equivariant under coordinate permutation") {
    Params P = derive_params(256, 0.25);
    auto v = random_unit(256, 31337);  // gaussian coordinates: magnitudes distinct
    Partition base = build_partition(v, P);

    // rotate indices by 101 (coprime with 256)
    std::vector<double> w(256);
    auto perm = [](int i) { return (i * 101 + 7) % 256; };
    for (int i = 0; i < 256; ++i) w[size_t(perm(i))] = v[size_t(i)];
    Partition moved = build_partition(w, P);

    auto mapped = [&](std::vector<int> idx) {
        for (int& i : idx) i = perm(i);
        std::sort(idx.begin(), idx.end());
        return idx;
    };
    CHECK(moved.sigma == mapped(base.sigma));
    CHECK(moved.tau == mapped(base.tau));
    CHECK(moved.I0 == mapped(base.I0));
    REQUIRE(moved.blocks.size() == base.blocks.size());
    for (size_t k = 0; k < base.blocks.size(); ++k)
        CHECK(moved.blocks[k] == mapped(base.blocks[k]));
}

TEST_CASE("lcd matches the fine-grid oracle on R^2 benchmarks") {
    const double grid = 1e-3;
    SECTION("e_1 crosses right after the threshold turns positive") {
        std::vector<double> x{1.0, 0.0};
        LcdResult r = lcd(x, 0.2, 0.2, 20.0, grid);  // delta0 p = 0.04
        REQUIRE(r.finite());
        CHECK_THAT(r.value, WithinAbs(5.0, 1e-5));
        CHECK(r.dist_at_witness < r.threshold_at_witness);
        CHECK(r.value >= 0.5 - grid);  // 1/(2 linf)
    }
    SECTION("the diagonal direction crosses by 4 sqrt(2)") {
        std::vector<double> x{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
        LcdResult r = lcd(x, 0.2, 0.2, 20.0, grid);
        REQUIRE(r.finite());
        CHECK(r.value <= 4.0 * std::sqrt(2.0) + grid);
        // frozen fine-grid value
        CHECK_THAT(r.value, WithinAbs(5.069481, 5e-4));
    }
    SECTION("fine grid agrees within resolution for random directions") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto x = random_unit(4, 500 + seed);
            LcdResult r = lcd(x, 0.9203443, 0.25, 15.0, grid);
            // brute force at 20x finer resolution
            const double d0p = 0.9203443 * 0.25;
            const double t0 = 1.0 / std::sqrt(d0p);
            double linf = 0;
            for (double v : x) linf = std::max(linf, std::abs(v));
            double oracle = std::numeric_limits<double>::infinity();
            for (double t = std::max(t0, 0.5 / linf); t <= 15.0; t += grid / 20.0) {
                double d2 = 0;
                for (double v : x) {
                    const double y = t * v - std::round(t * v);
                    d2 += y * y;
                }
                const double arg = std::sqrt(d0p) * t;
                const double h = std::sqrt(std::max(std::log(arg), 0.0) / d0p);
                if (std::sqrt(d2) < h) {
                    oracle = t;
                    break;
                }
            }
            INFO("seed=" << seed);
            if (std::isfinite(oracle)) {
                REQUIRE(r.finite());
                CHECK_THAT(r.value, WithinAbs(oracle, grid));
            } else {
                CHECK_FALSE(r.finite());
            }
        }
    }
}

TEST_CASE("lcd respects the half-linf floor for random unit vectors") {
    const double grid = 1e-3;
    for (int n : {4, 16}) {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            auto x = random_unit(n, 7000 + seed);
            LcdResult r = lcd(x, 0.9203443, 0.2, 12.0, grid);
            double linf = 0;
            for (double v : x) linf = std::max(linf, std::abs(v));
            if (r.finite()) CHECK(r.value >= 1.0 / (2.0 * linf) - grid);
        }
    }
}

TEST_CASE("lcd returns the sentinel when the window closes before a crossing") {
    std::vector<double> x{1.0, 0.0};
    // threshold turns positive only at theta = 5 > theta_max = 4
    LcdResult r = lcd(x, 0.2, 0.2, 4.0, 1e-3);
    CHECK_FALSE(r.finite());
    CHECK(r.search_ceiling == 4.0);
}

TEST_CASE("lcd input validation") {
    std::vector<double> x{1.0, 0.0};
    CHECK_THROWS_AS(lcd(x, 0.2, 0.2, 10.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lcd(x, 0.2, 0.2, 0.4, 1e-3), std::invalid_argument);  // below floor
    std::vector<double> notunit{1.0, 1.0};
    CHECK_THROWS_AS(lcd(notunit, 0.2, 0.2, 10.0, 1e-3), std::invalid_argument);
}

TEST_CASE("lcd monotonicity under threshold relaxation near the onset zone") {
    // For spike-like vectors the crossing happens where the threshold rises from
    // zero, and relaxing delta0*p moves it earlier. (For flat vectors that cross
    // at the distance plateau this can genuinely reverse, so the property is
    // asserted only in its provable zone.)
    std::vector<double> x{1.0, 0.0};
    double last = 1e300;
    for (double d0p : {0.04, 0.09, 0.16, 0.25}) {
        LcdResult r = lcd(x, 1.0, d0p, 30.0, 1e-3);
        REQUIRE(r.finite());
        CHECK(r.value <= last + 1e-3);
        last = r.value;
    }
}

TEST_CASE("regularized lcd of the uniform vector clears the documented floor") {
    Params P = derive_params(1024, 0.25);
    auto u = uniform_unit(1024);
    double dhat = regularized_lcd(u, P);
    CHECK(dhat >= 0.5 * P.rho_prime * std::sqrt(double(P.M)));

    Params Q = derive_params(256, 0.25);
    auto u2 = uniform_unit(256);
    double dhat2 = regularized_lcd(u2, Q);
    REQUIRE(std::isfinite(dhat2));
    CHECK(dhat2 >= Q.D_high);  // flat blocks are highly unstructured at this scale
    CHECK_THAT(dhat2, WithinAbs(5.657, 0.05));  // frozen from the plateau-crossing analysis
}

TEST_CASE("regularized lcd is deterministic and clears D_low on eigen-like input") {
    Params P = derive_params(512, 0.1);
    auto v = random_unit(512, 246810);
    const double a = regularized_lcd(v, P);
    const double b = regularized_lcd(v, P);
    CHECK(a == b);
    CHECK(a > P.D_low);
}
