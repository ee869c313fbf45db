#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclab/ensembles.hpp"
#include "speclab/io.hpp"
#include "speclab/params.hpp"
#include "speclab/rng.hpp"
#include "speclab/spectral.hpp"
#include "speclab/structure.hpp"

namespace speclab {

// Batch experiment driver: samples matrices over an (n, p) grid, records one
// JSON line per trial, and aggregates the results into summary tables. Output
// is byte-reproducible for a fixed config regardless of worker count, and an
// interrupted file can be resumed in place.

enum class Experiment {
    simple_spectrum,
    gap_dist,
    zero_rows,
    opnorm,
    eigvec_structure,
    interlacing,
    identity_check,
};

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::simple_spectrum: return "simple-spectrum";
        case Experiment::gap_dist: return "gap-dist";
        case Experiment::zero_rows: return "zero-rows";
        case Experiment::opnorm: return "opnorm";
        case Experiment::eigvec_structure: return "eigvec-structure";
        case Experiment::interlacing: return "interlacing";
        case Experiment::identity_check: return "identity-check";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    for (Experiment e : {Experiment::simple_spectrum, Experiment::gap_dist, Experiment::zero_rows,
                         Experiment::opnorm, Experiment::eigvec_structure, Experiment::interlacing,
                         Experiment::identity_check})
        if (s == to_string(e)) return e;
    throw std::invalid_argument("unknown experiment: " + s);
}

// How p depends on n along the grid.
struct PRule {
    enum class Kind { fixed, exponent, near_threshold, complement };

    Kind kind = Kind::fixed;
    double value = 0.1;  // fixed p, the exponent delta, or the log-density multiplier

    double p_for(int n) const {
        double p = 0.0;
        switch (kind) {
            case Kind::fixed: p = value; break;
            case Kind::exponent: p = std::pow(double(n), -1.0 + value); break;
            case Kind::near_threshold: p = value * std::log(double(n)) / double(n); break;
            case Kind::complement: p = 1.0 - std::pow(double(n), -1.0 + value); break;
        }
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::domain_error("p rule leaves [0,1] at n = " + std::to_string(n));
        return p;
    }
};

inline std::string to_string(PRule::Kind k) {
    switch (k) {
        case PRule::Kind::fixed: return "fixed";
        case PRule::Kind::exponent: return "exponent";
        case PRule::Kind::near_threshold: return "near-threshold";
        case PRule::Kind::complement: return "complement";
    }
    return "?";
}

inline PRule::Kind parse_p_rule_kind(const std::string& s) {
    for (PRule::Kind k : {PRule::Kind::fixed, PRule::Kind::exponent, PRule::Kind::near_threshold,
                          PRule::Kind::complement})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown p rule: " + s);
}

struct CampaignConfig {
    Experiment experiment = Experiment::simple_spectrum;
    std::vector<int> n_grid;
    PRule p_rule;
    MatrixKind kind = MatrixKind::centered_sparse;
    EntryDist dist = EntryDist::standard_gaussian();
    long long trials = 0;
    std::uint64_t master_seed = 0;
    double tol_abs = 0.0;
    double tol_scale = 1e-10;
    std::string out;
    int workers = 0;  // 0: hardware concurrency; SPECLAB_WORKERS overrides either way
    bool record_timing = false;
    int eigvec_sample = 8;
};

inline void to_json(nlohmann::json& j, const CampaignConfig& c) {
    j = nlohmann::json{{"experiment", to_string(c.experiment)},
                       {"n_grid", c.n_grid},
                       {"p_rule", to_string(c.p_rule.kind)},
                       {"p_value", c.p_rule.value},
                       {"kind", to_string(c.kind)},
                       {"dist", c.dist.name()},
                       {"trials", c.trials},
                       {"master_seed", c.master_seed},
                       {"tol_abs", c.tol_abs},
                       {"tol_scale", c.tol_scale},
                       {"out", c.out},
                       {"workers", c.workers},
                       {"record_timing", c.record_timing},
                       {"eigvec_sample", c.eigvec_sample}};
    if (c.dist.kind == EntryDist::Kind::two_point) j["dist_q"] = c.dist.q;
}

inline void from_json(const nlohmann::json& j, CampaignConfig& c) {
    c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    c.n_grid = j.at("n_grid").get<std::vector<int>>();
    c.p_rule.kind = parse_p_rule_kind(j.at("p_rule").get<std::string>());
    c.p_rule.value = j.at("p_value").get<double>();
    c.kind = parse_matrix_kind(j.at("kind").get<std::string>());
    c.dist = EntryDist::parse(j.at("dist").get<std::string>(), j.value("dist_q", 0.5));
    c.trials = j.at("trials").get<long long>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.tol_abs = j.value("tol_abs", 0.0);
    c.tol_scale = j.value("tol_scale", 1e-10);
    c.out = j.at("out").get<std::string>();
    c.workers = j.value("workers", 0);
    c.record_timing = j.value("record_timing", false);
    c.eigvec_sample = j.value("eigvec_sample", 8);
}

// One surveyed eigenvector: sparsity distance, compressibility verdict, and
// the regularized lcd bucketed against the D_low / D_mid / D_high thresholds.
struct EigvecRecord {
    int index = 0;
    double dist_sparse = 0.0;
    bool comp = false;
    double dhat = 0.0;  // NaN when comp, +inf when no crossing below theta_max
    int bucket = -1;    // -1 comp, 0 below D_low, 1 [D_low,D_mid), 2 [D_mid,D_high), 3 above
};

inline void to_json(nlohmann::json& j, const EigvecRecord& e) {
    j = nlohmann::json{{"i", e.index}, {"dist_sparse", e.dist_sparse}, {"comp", e.comp}};
    if (!e.comp) {
        if (std::isinf(e.dhat))
            j["dhat"] = "inf";
        else
            j["dhat"] = e.dhat;
        j["bucket"] = e.bucket;
    }
}

inline void from_json(const nlohmann::json& j, EigvecRecord& e) {
    e.index = j.at("i").get<int>();
    e.dist_sparse = j.at("dist_sparse").get<double>();
    e.comp = j.at("comp").get<bool>();
    if (e.comp) {
        e.dhat = std::numeric_limits<double>::quiet_NaN();
        e.bucket = -1;
    } else {
        e.dhat = j.at("dhat").is_string() ? std::numeric_limits<double>::infinity()
                                          : j.at("dhat").get<double>();
        e.bucket = j.at("bucket").get<int>();
    }
}

struct TrialRecord {
    int schema = 1;
    int n = 0;
    double p = 0.0;
    long long trial = 0;
    std::uint64_t seed = 0;
    bool simple = false;
    double delta_min = 0.0;
    std::vector<long long> clusters;  // sizes of the nonsingleton multiplicity clusters
    double opnorm = 0.0;
    long long zero_rows = 0;
    long long null_dim = 0;
    std::optional<std::vector<EigvecRecord>> eigvecs;
    std::optional<double> interlace;
    std::optional<double> identity;
    std::optional<double> wall_ms;
};

inline void to_json(nlohmann::json& j, const TrialRecord& r) {
    j = nlohmann::json{{"type", "trial"},
                       {"schema", r.schema},
                       {"n", r.n},
                       {"p", r.p},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"simple", r.simple},
                       {"delta_min", r.delta_min},
                       {"clusters", r.clusters},
                       {"opnorm", r.opnorm},
                       {"zero_rows", r.zero_rows},
                       {"null_dim", r.null_dim}};
    if (r.eigvecs) j["eigvecs"] = *r.eigvecs;
    if (r.interlace) j["interlace"] = *r.interlace;
    if (r.identity) j["identity"] = *r.identity;
    if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
}

inline void from_json(const nlohmann::json& j, TrialRecord& r) {
    r.schema = j.at("schema").get<int>();
    r.n = j.at("n").get<int>();
    r.p = j.at("p").get<double>();
    r.trial = j.at("trial").get<long long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.simple = j.at("simple").get<bool>();
    r.delta_min = j.at("delta_min").get<double>();
    r.clusters = j.at("clusters").get<std::vector<long long>>();
    r.opnorm = j.at("opnorm").get<double>();
    r.zero_rows = j.at("zero_rows").get<long long>();
    r.null_dim = j.at("null_dim").get<long long>();
    r.eigvecs.reset();
    if (j.contains("eigvecs")) r.eigvecs = j.at("eigvecs").get<std::vector<EigvecRecord>>();
    r.interlace.reset();
    if (j.contains("interlace")) r.interlace = j.at("interlace").get<double>();
    r.identity.reset();
    if (j.contains("identity")) r.identity = j.at("identity").get<double>();
    r.wall_ms.reset();
    if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
}

inline std::uint64_t trial_seed(std::uint64_t master, int n, double p, long long trial) {
    return rng::derive_seed(master, std::uint64_t(n), std::bit_cast<std::uint64_t>(p),
                            std::uint64_t(trial));
}

inline int lcd_bucket(double dhat, const Params& P) {
    if (dhat < P.D_low) return 0;
    if (dhat < P.D_mid) return 1;
    if (dhat < P.D_high) return 2;
    return 3;
}

// The header is written without the worker count or output path, so a run
// re-sharded across workers produces the same bytes and a moved file still
// resumes. Grid points outside the derivable-parameter regime (np <= 1) get
// a null slot.
inline nlohmann::json campaign_header(const CampaignConfig& cfg) {
    nlohmann::json jc = cfg;
    jc.erase("workers");
    jc.erase("out");
    nlohmann::json params = nlohmann::json::array();
    for (int n : cfg.n_grid) {
        const double p = cfg.p_rule.p_for(n);
        try {
            params.push_back(derive_params(n, p));
        } catch (const std::exception&) {
            params.push_back(nullptr);
        }
    }
    return nlohmann::json{{"type", "header"}, {"schema", 1}, {"config", jc}, {"params", params}};
}

inline TrialRecord run_trial(const CampaignConfig& cfg, int n, double p,
                             const std::optional<Params>& P, long long trial) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = trial_seed(cfg.master_seed, n, p, trial);

    SymMatrix A;
    if (cfg.kind == MatrixKind::adjacency) {
        A = sample_adjacency(n, p, seed);
    } else {
        EnsembleSpec spec;
        spec.n = n;
        spec.p = p;
        spec.dist = cfg.dist;
        spec.kind = cfg.kind;
        A = sample_sparse_symmetric(spec, seed);
    }

    const bool want_vectors = cfg.experiment == Experiment::eigvec_structure;
    const Spectrum s = eigen_sym(A, want_vectors);
    const GapReport g = gap_report(s, cfg.tol_abs, cfg.tol_scale);

    TrialRecord rec;
    rec.n = n;
    rec.p = p;
    rec.trial = trial;
    rec.seed = seed;
    rec.simple = g.simple;
    rec.delta_min = g.delta_min;
    for (auto [lo, hi] : g.clusters)
        if (hi > lo) rec.clusters.push_back(hi - lo + 1);
    rec.opnorm = std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
    rec.zero_rows = count_zero_rows(A);
    const double null_tol = cfg.tol_abs + cfg.tol_scale * std::max(1.0, rec.opnorm);
    for (double ev : s.eigenvalues)
        if (std::abs(ev) <= null_tol) ++rec.null_dim;

    if (cfg.experiment == Experiment::interlacing) rec.interlace = interlacing_violation(A, n - 1);

    if (cfg.experiment == Experiment::identity_check) {
        double worst = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const IdentityResidual r = gap_identity_residual(A, i);
            if (!r.degenerate) worst = std::max(worst, r.value);
        }
        rec.identity = worst;
    }

    if (want_vectors) {
        if (!P) throw std::logic_error("eigvec survey requires derived parameters");
        std::set<int> idx;
        idx.insert(0);
        if (n > 1) idx.insert(n - 1);
        const int target = std::min<int>(std::max(1, cfg.eigvec_sample), n);
        for (std::uint64_t k = 0; int(idx.size()) < target; ++k)
            idx.insert(1 + int(rng::mix(seed, 0xE16u, k, 0) % std::uint64_t(n - 2)));

        std::vector<EigvecRecord> evs;
        for (int i : idx) {
            std::vector<double> v(static_cast<std::size_t>(n), 0.0);
            double nrm = 0.0;
            for (int row = 0; row < n; ++row) {
                v[size_t(row)] = (*s.vectors)(row, i);
                nrm += v[size_t(row)] * v[size_t(row)];
            }
            nrm = std::sqrt(nrm);
            for (double& x : v) x /= nrm;

            EigvecRecord e;
            e.index = i;
            e.dist_sparse = dist_to_sparse(v, P->M);
            e.comp = e.dist_sparse <= P->rho;
            if (e.comp) {
                e.dhat = std::numeric_limits<double>::quiet_NaN();
                e.bucket = -1;
            } else {
                e.dhat = regularized_lcd(v, *P);
                e.bucket = lcd_bucket(e.dhat, *P);
            }
            evs.push_back(e);
        }
        rec.eigvecs = std::move(evs);
    }

    if (cfg.record_timing) {
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return rec;
}

struct CampaignResult {
    std::string path;
    long long written = 0;
    long long skipped = 0;
};

inline int effective_workers(const CampaignConfig& cfg) {
    if (const char* env = std::getenv("SPECLAB_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

inline void validate_campaign(const CampaignConfig& cfg) {
    if (cfg.n_grid.empty()) throw std::invalid_argument("campaign: n_grid is empty");
    for (int n : cfg.n_grid)
        if (n < 2) throw std::invalid_argument("campaign: n must be at least 2");
    if (cfg.trials < 1) throw std::invalid_argument("campaign: trials must be positive");
    if (cfg.out.empty()) throw std::invalid_argument("campaign: out path is empty");
    if (cfg.eigvec_sample < 1)
        throw std::invalid_argument("campaign: eigvec_sample must be positive");
}

inline CampaignResult run_campaign(const CampaignConfig& cfg) {
    validate_campaign(cfg);
    namespace fs = std::filesystem;

    const size_t grid = cfg.n_grid.size();
    std::vector<double> ps(grid, 0.0);
    std::vector<std::optional<Params>> params(grid);
    for (size_t i = 0; i < grid; ++i) {
        ps[i] = cfg.p_rule.p_for(cfg.n_grid[i]);
        try {
            params[i] = derive_params(cfg.n_grid[i], ps[i]);
        } catch (const std::exception&) {
            params[i] = std::nullopt;
        }
    }
    if (cfg.experiment == Experiment::eigvec_structure)
        for (size_t i = 0; i < grid; ++i)
            if (!params[i])
                throw std::invalid_argument(
                    "campaign: eigvec-structure needs derivable parameters (np > 1) at n = " +
                    std::to_string(cfg.n_grid[i]));

    const nlohmann::json header = campaign_header(cfg);

    // Resume: keep every complete line of an existing file, drop a torn tail.
    std::set<std::pair<int, long long>> done;
    bool have_header = false;
    if (fs::exists(cfg.out) && fs::file_size(cfg.out) > 0) {
        std::string bytes;
        {
            std::ifstream in(cfg.out, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            bytes = ss.str();
        }
        std::vector<std::pair<size_t, std::string>> lines;  // (start offset, text)
        size_t pos = 0;
        while (true) {
            const size_t nl = bytes.find('\n', pos);
            if (nl == std::string::npos) break;
            lines.emplace_back(pos, bytes.substr(pos, nl - pos));
            pos = nl + 1;
        }
        size_t keep = pos;
        if (!lines.empty()) {
            nlohmann::json hdr;
            try {
                hdr = nlohmann::json::parse(lines[0].second);
            } catch (const nlohmann::json::exception&) {
                throw std::runtime_error("campaign: unreadable header in " + cfg.out);
            }
            if (hdr.value("type", std::string()) != "header" || hdr.value("schema", 0) != 1)
                throw std::runtime_error("campaign: unrecognized header schema in " + cfg.out);
            if (hdr.at("config").dump() != header.at("config").dump())
                throw std::runtime_error("campaign: existing file " + cfg.out +
                                         " was written with a different config");
            for (size_t li = 1; li < lines.size(); ++li) {
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(lines[li].second);
                } catch (const nlohmann::json::exception&) {
                    if (li + 1 == lines.size()) {
                        keep = lines[li].first;
                        break;
                    }
                    throw std::runtime_error("campaign: corrupt record line in " + cfg.out);
                }
                done.insert({j.at("n").get<int>(), j.at("trial").get<long long>()});
            }
            have_header = true;
        } else {
            keep = 0;
        }
        if (keep < bytes.size()) fs::resize_file(cfg.out, keep);
    }

    if (const fs::path parent = fs::path(cfg.out).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream outf(cfg.out, std::ios::binary | (have_header ? std::ios::app : std::ios::trunc));
    if (!outf) throw std::runtime_error("campaign: cannot open output file " + cfg.out);
    if (!have_header) {
        outf << header.dump() << '\n';
        outf.flush();
    }

    struct Task {
        size_t gi;
        long long trial;
    };
    std::vector<Task> pending;
    long long skipped = 0;
    for (size_t gi = 0; gi < grid; ++gi)
        for (long long t = 0; t < cfg.trials; ++t) {
            if (done.count({cfg.n_grid[gi], t}))
                ++skipped;
            else
                pending.push_back({gi, t});
        }
    if (pending.empty()) return {cfg.out, 0, skipped};

    // Reorder buffer: workers fill slots, the main thread drains them in
    // canonical (grid, trial) order so the file bytes never depend on timing.
    const int workers = int(std::min<size_t>(size_t(effective_workers(cfg)), pending.size()));
    std::vector<std::optional<std::string>> slots(pending.size());
    std::vector<std::exception_ptr> errors(pending.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<size_t> next{0};

    auto work = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            std::string line;
            std::exception_ptr err;
            try {
                const Task& tk = pending[i];
                const TrialRecord rec =
                    run_trial(cfg, cfg.n_grid[tk.gi], ps[tk.gi], params[tk.gi], tk.trial);
                line = nlohmann::json(rec).dump();
            } catch (...) {
                err = std::current_exception();
            }
            {
                std::lock_guard<std::mutex> lk(mu);
                if (err)
                    errors[i] = err;
                else
                    slots[i] = std::move(line);
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    long long written = 0;
    std::exception_ptr first_error;
    for (size_t i = 0; i < pending.size(); ++i) {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return slots[i].has_value() || errors[i] != nullptr; });
        if (errors[i]) {
            first_error = errors[i];
            break;
        }
        const std::string line = std::move(*slots[i]);
        lk.unlock();
        outf << line << '\n';
        outf.flush();
        if (!outf) {
            first_error = std::make_exception_ptr(
                std::runtime_error("campaign: write failed on " + cfg.out));
            break;
        }
        ++written;
    }
    next.store(pending.size());  // stop idle workers early on error
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return {cfg.out, written, skipped};
}

inline CampaignResult eigvec_structure_survey(const CampaignConfig& cfg) {
    if (cfg.experiment != Experiment::eigvec_structure)
        throw std::invalid_argument("eigvec_structure_survey: config runs a different experiment");
    return run_campaign(cfg);
}

// Wilson 95% score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long long successes, long long total) {
    if (total < 1 || successes < 0 || successes > total)
        throw std::invalid_argument("wilson_interval: need 0 <= successes <= total, total >= 1");
    constexpr double z = 1.959963984540054;
    const double t = double(total);
    const double ph = double(successes) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double center = (ph + z2 / (2.0 * t)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / t + z2 / (4.0 * t * t)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Report {
    std::string csv;
    std::string markdown;
};

namespace detail {

struct ReportGroup {
    long long trials = 0;
    long long simple = 0;
    std::vector<double> dmins;
    long long opnorm_exceed = 0;
    long long null_ge2 = 0;
    long long eigvec_count = 0;
    long long comp_count = 0;
    long long buckets[4] = {0, 0, 0, 0};
};

inline double quantile(const std::vector<double>& sorted, double q) {
    return sorted[size_t(double(sorted.size() - 1) * q)];
}

}  // namespace detail

inline Report make_report(const std::vector<std::string>& files, double K = defaults::K_opnorm) {
    std::map<std::pair<int, double>, detail::ReportGroup> groups;
    for (const std::string& path : files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("report: cannot open " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const nlohmann::json j = nlohmann::json::parse(line);
            if (j.value("schema", 0) != 1)
                throw std::runtime_error("report: unsupported schema in " + path);
            if (j.value("type", std::string()) != "trial") continue;
            const TrialRecord r = j.get<TrialRecord>();
            detail::ReportGroup& g = groups[{r.n, r.p}];
            ++g.trials;
            if (r.simple) ++g.simple;
            g.dmins.push_back(r.delta_min);
            if (r.opnorm > K * std::sqrt(r.p * double(r.n))) ++g.opnorm_exceed;
            if (r.null_dim >= 2) ++g.null_ge2;
            if (r.eigvecs)
                for (const EigvecRecord& e : *r.eigvecs) {
                    ++g.eigvec_count;
                    if (e.comp)
                        ++g.comp_count;
                    else if (e.bucket >= 0 && e.bucket < 4)
                        ++g.buckets[e.bucket];
                }
        }
    }

    std::string csv =
        "n,p,trials,simple_count,simple_freq,wilson_lo,wilson_hi,delta_min_q10,delta_min_q50,"
        "delta_min_q90,opnorm_exceed_freq,null_ge2_freq,eigvec_count,comp_count,bucket0,bucket1,"
        "bucket2,bucket3\n";
    std::string md =
        "# Campaign summary\n\n"
        "| n | p | trials | simple freq | wilson 95% | delta_min median | opnorm exceed freq |"
        " null>=2 freq | buckets 0/1/2/3 (comp) |\n"
        "| - | - | - | - | - | - | - | - | - |\n";

    for (auto& [key, g] : groups) {
        std::sort(g.dmins.begin(), g.dmins.end());
        const auto [lo, hi] = wilson_interval(g.simple, g.trials);
        const double freq = double(g.simple) / double(g.trials);
        const double q10 = detail::quantile(g.dmins, 0.1);
        const double q50 = detail::quantile(g.dmins, 0.5);
        const double q90 = detail::quantile(g.dmins, 0.9);
        const double exceed = double(g.opnorm_exceed) / double(g.trials);
        const double null2 = double(g.null_ge2) / double(g.trials);

        std::ostringstream row;
        row << key.first << ',' << format_double(key.second) << ',' << g.trials << ',' << g.simple
            << ',' << format_double(freq) << ',' << format_double(lo) << ',' << format_double(hi)
            << ',' << format_double(q10) << ',' << format_double(q50) << ',' << format_double(q90)
            << ',' << format_double(exceed) << ',' << format_double(null2) << ',' << g.eigvec_count
            << ',' << g.comp_count << ',' << g.buckets[0] << ',' << g.buckets[1] << ','
            << g.buckets[2] << ',' << g.buckets[3] << '\n';
        csv += row.str();

        std::ostringstream mrow;
        mrow << "| " << key.first << " | " << format_double(key.second) << " | " << g.trials
             << " | " << format_double(freq) << " | [" << format_double(lo) << ", "
             << format_double(hi) << "] | " << format_double(q50) << " | "
             << format_double(exceed) << " | " << format_double(null2) << " | " << g.buckets[0]
             << "/" << g.buckets[1] << "/" << g.buckets[2] << "/" << g.buckets[3] << " ("
             << g.comp_count << ") |\n";
        md += mrow.str();
    }
    return {csv, md};
}

inline void write_report(const std::vector<std::string>& files, const std::string& out_dir,
                         double K = defaults::K_opnorm) {
    namespace fs = std::filesystem;
    const Report rep = make_report(files, K);
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "summary.csv", std::ios::binary);
        if (!f) throw std::runtime_error("report: cannot write summary.csv in " + out_dir);
        f << rep.csv;
    }
    {
        std::ofstream f(fs::path(out_dir) / "summary.md", std::ios::binary);
        if (!f) throw std::runtime_error("report: cannot write summary.md in " + out_dir);
        f << rep.markdown;
    }
}

}  // namespace speclab
