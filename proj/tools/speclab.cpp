#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <speclab/ensembles.hpp>
#include <speclab/harness.hpp>
#include <speclab/io.hpp>
#include <speclab/nets.hpp>
#include <speclab/params.hpp>
#include <speclab/smallball.hpp>
#include <speclab/spectral.hpp>
#include <speclab/structure.hpp>

#include <glob.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

// JSON has no IEEE specials: infinities become the string "inf", NaN null.
json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

std::vector<std::string> expand_glob(const std::vector<std::string>& patterns) {
    std::vector<std::string> files;
    for (const std::string& pat : patterns) {
        ::glob_t g{};
        const int rc = ::glob(pat.c_str(), 0, nullptr, &g);
        if (rc == 0)
            for (size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
        ::globfree(&g);
        if (rc != 0 && rc != GLOB_NOMATCH)
            throw std::runtime_error("cannot expand pattern " + pat);
    }
    return files;
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sampling, spectra, and eigenvector structure of sparse random symmetric matrices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "speclab 0.1.0");

    // sample: draw one matrix and write it out
    auto* sample = app.add_subcommand("sample", "draw one matrix and write it to a file");
    std::string s_kind = "sparse", s_dist = "gaussian", s_out, s_format = "triplet";
    int s_n = 0;
    double s_p = 0.0, s_q = 0.5;
    std::uint64_t s_seed = 0;
    sample->add_option("--kind", s_kind, "sparse|adjacency")->capture_default_str();
    sample->add_option("--n", s_n, "dimension")->required();
    sample->add_option("--p", s_p, "density in [0,1]")->required();
    sample->add_option("--dist", s_dist, "gaussian|rademacher|uniform|two-point")
        ->capture_default_str();
    sample->add_option("--q", s_q, "high-mass probability for two-point")->capture_default_str();
    sample->add_option("--seed", s_seed, "sampler seed")->capture_default_str();
    sample->add_option("--out", s_out, "output path")->required();
    sample->add_option("--format", s_format, "triplet|binary")->capture_default_str();

    // spectrum: eigenvalues, minimum gap, multiplicity clusters
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and gap statistics of a matrix");
    std::string sp_in;
    bool sp_vectors = false, sp_json = false;
    double sp_tol_abs = 0.0, sp_tol_scale = 1e-10;
    spectrum->add_option("--in", sp_in, "matrix file (triplet or binary)")->required();
    spectrum->add_flag("--vectors", sp_vectors, "also compute and emit eigenvectors");
    spectrum->add_option("--tol-abs", sp_tol_abs, "absolute degeneracy tolerance")
        ->capture_default_str();
    spectrum->add_option("--tol-scale", sp_tol_scale, "norm-relative degeneracy tolerance")
        ->capture_default_str();
    spectrum->add_flag("--json", sp_json, "emit the full JSON schema");

    // lcd: essential least common denominator scan of a vector
    auto* lcd_cmd = app.add_subcommand("lcd", "lcd scan of a unit vector");
    std::string l_in;
    double l_p = 0.0, l_delta0 = speclab::defaults::delta0_gaussian, l_theta_max = 0.0,
           l_grid = 1e-3;
    lcd_cmd->add_option("--in", l_in, "vector file, one float per line")->required();
    lcd_cmd->add_option("--p", l_p, "density entering the detection threshold")->required();
    lcd_cmd->add_option("--delta0", l_delta0, "small-ball constant")->capture_default_str();
    lcd_cmd->add_option("--theta-max", l_theta_max, "scan ceiling")->required();
    lcd_cmd->add_option("--grid", l_grid, "scan step")->capture_default_str();

    // levy: concentration function of a sampled sparse entry
    auto* levy_cmd = app.add_subcommand("levy", "empirical Levy concentration of delta*xi");
    std::string lv_dist = "gaussian";
    double lv_p = 0.0, lv_eps = 0.0, lv_q = 0.5;
    long long lv_n = 100000;
    std::uint64_t lv_seed = 0;
    levy_cmd->add_option("--dist", lv_dist, "gaussian|rademacher|uniform|two-point")
        ->capture_default_str();
    levy_cmd->add_option("--q", lv_q, "high-mass probability for two-point")
        ->capture_default_str();
    levy_cmd->add_option("--p", lv_p, "Bernoulli gate density")->required();
    levy_cmd->add_option("--eps", lv_eps, "window half-width")->required();
    levy_cmd->add_option("--n-samples", lv_n, "sample count")->capture_default_str();
    levy_cmd->add_option("--seed", lv_seed, "sampler seed")->capture_default_str();

    // nets: integer direction nets and the counting exponent
    auto* nets_cmd = app.add_subcommand("nets", "integer direction nets and counting bounds");
    int nt_m = 0;
    double nt_d0 = 0.0;
    bool nt_points = false;
    nets_cmd->add_option("--m", nt_m, "ambient dimension (1-3)");
    nets_cmd->add_option("--d0", nt_d0, "dyadic level");
    nets_cmd->add_flag("--points", nt_points, "include the net points in the output");
    auto* nets_exp = nets_cmd->add_subcommand("exponent", "log of the union-bound product");
    int ne_n = 0;
    double ne_p = 0.0, ne_d = 0.0;
    std::string ne_regime = "mid";
    nets_exp->add_option("--n", ne_n, "dimension")->required();
    nets_exp->add_option("--p", ne_p, "density")->required();
    nets_exp->add_option("--regime", ne_regime, "mid|small")->capture_default_str();
    nets_exp->add_option("--d", ne_d, "lcd level inside the regime window")->required();

    // campaign: batch runs and aggregation
    auto* camp = app.add_subcommand("campaign", "batch experiments over an (n, p) grid");
    camp->require_subcommand(1);
    auto* crun = camp->add_subcommand("run", "execute a campaign config");
    std::string cr_config;
    crun->add_option("--config", cr_config, "JSON config file")->required();
    auto* crep = camp->add_subcommand("report", "aggregate campaign files into summary tables");
    std::vector<std::string> cp_in;
    std::string cp_out;
    crep->add_option("--in", cp_in, "input files or glob patterns")->required();
    crep->add_option("--out", cp_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace speclab;

        if (sample->parsed()) {
            const MatrixKind kind = parse_matrix_kind(s_kind);
            const EntryDist dist = EntryDist::parse(s_dist, s_q);
            SymMatrix A;
            if (kind == MatrixKind::adjacency) {
                A = sample_adjacency(s_n, s_p, s_seed);
            } else {
                EnsembleSpec spec;
                spec.n = s_n;
                spec.p = s_p;
                spec.dist = dist;
                spec.kind = kind;
                spec.validate();
                A = sample_sparse_symmetric(spec, s_seed);
            }
            if (s_format == "triplet")
                write_matrix_triplet(s_out, A);
            else if (s_format == "binary")
                write_matrix_binary(s_out, A);
            else
                throw std::invalid_argument("unknown format: " + s_format);
            emit(json{{"out", s_out},
                      {"n", s_n},
                      {"p", s_p},
                      {"kind", to_string(kind)},
                      {"dist", dist.name()},
                      {"seed", s_seed},
                      {"format", s_format}});
        } else if (spectrum->parsed()) {
            const SymMatrix M = read_matrix(sp_in);
            const Spectrum s = eigen_sym(M, sp_vectors);
            const GapReport g = gap_report(s, sp_tol_abs, sp_tol_scale);
            if (sp_json) {
                json out;
                out["eigenvalues"] = s.eigenvalues;
                out["delta_min"] = number_or_inf(g.delta_min);
                out["simple"] = g.simple;
                json clusters = json::array();
                for (auto [lo, hi] : g.clusters) clusters.push_back(json::array({lo, hi}));
                out["clusters"] = std::move(clusters);
                if (sp_vectors && s.vectors) {
                    json vx = json::array();
                    for (int i = 0; i < M.n; ++i) {
                        json col = json::array();
                        for (int r = 0; r < M.n; ++r) col.push_back((*s.vectors)(r, i));
                        vx.push_back(std::move(col));
                    }
                    out["vectors"] = std::move(vx);
                    out["backward_error"] = s.backward_error;
                }
                emit(out);
            } else {
                std::cout << "n " << M.n << '\n'
                          << "simple " << (g.simple ? "true" : "false") << '\n'
                          << "delta_min " << format_double(g.delta_min) << '\n';
                std::cout << "nonsingleton_clusters";
                for (auto [lo, hi] : g.clusters)
                    if (hi > lo) std::cout << ' ' << (hi - lo + 1);
                std::cout << '\n';
            }
        } else if (lcd_cmd->parsed()) {
            std::vector<double> v = read_vector(l_in);
            double nrm = 0.0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (!(nrm > 0.0)) throw std::invalid_argument("input vector is zero");
            for (double& x : v) x /= nrm;
            const LcdResult r = lcd(v, l_delta0, l_p, l_theta_max, l_grid);
            emit(json{{"value", number_or_inf(r.value)},
                      {"theta_witness", number_or_inf(r.theta_witness)},
                      {"dist_at_witness", number_or_inf(r.dist_at_witness)},
                      {"threshold_at_witness", number_or_inf(r.threshold_at_witness)},
                      {"search_ceiling", r.search_ceiling},
                      {"finite", r.finite()},
                      {"input_norm", nrm}});
        } else if (levy_cmd->parsed()) {
            const EntryDist dist = EntryDist::parse(lv_dist, lv_q);
            const std::vector<double> samples = sample_scalar_entries(dist, lv_p, lv_n, lv_seed);
            const LevyEstimate e = levy_scalar(samples, lv_eps);
            emit(json{{"estimate", e.estimate},
                      {"stderr", e.std_error},
                      {"samples", e.samples},
                      {"eps", e.eps}});
        } else if (nets_cmd->parsed()) {
            if (nets_exp->parsed()) {
                const Params P = derive_params(ne_n, ne_p);
                const UnionBoundExponent r = union_bound_exponent(P, ne_d, parse_regime(ne_regime));
                emit(json{{"regime", to_string(r.regime)},
                          {"D", r.D},
                          {"choose_I0", r.choose_I0},
                          {"choose_sigma", r.choose_sigma},
                          {"interval_nets", r.interval_nets},
                          {"direction_nets", r.direction_nets},
                          {"level_sets", r.level_sets},
                          {"anchor_net", r.anchor_net},
                          {"smallball", r.smallball},
                          {"exponent", r.exponent},
                          {"exponent_per_n", r.exponent_per_n},
                          {"binom_clamped", r.binom_clamped},
                          {"log2d_clamped", r.log2d_clamped},
                          {"limit_negative", r.limit_negative},
                          {"closes", r.closes}});
            } else {
                if (nt_m < 1 || !(nt_d0 > 0.0))
                    throw std::invalid_argument("nets enumeration needs --m and --d0");
                const DirectionNet net = integer_net(nt_m, nt_d0);
                json out{{"m", net.m},
                         {"d0", net.D0},
                         {"count", (long long)net.points.size()},
                         {"bound", net.bound},
                         {"min_cbar", net.min_cbar}};
                if (nt_points) out["points"] = net.points;
                emit(out);
            }
        } else if (crun->parsed()) {
            std::ifstream f(cr_config);
            if (!f) throw std::runtime_error("cannot open config " + cr_config);
            const json j = json::parse(f);
            const CampaignConfig cfg = j.get<CampaignConfig>();
            const CampaignResult res = run_campaign(cfg);
            emit(json{{"path", res.path}, {"written", res.written}, {"skipped", res.skipped}});
        } else if (crep->parsed()) {
            const std::vector<std::string> files = expand_glob(cp_in);
            if (files.empty()) throw std::runtime_error("no input files match");
            write_report(files, cp_out);
            emit(json{{"files", (long long)files.size()}, {"out", cp_out}});
        }
    } catch (const std::exception& e) {
        std::cerr << "speclab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
