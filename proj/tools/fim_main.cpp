#include "fim/envelope.hpp"
#include "fim/hedge.hpp"
#include "fim/json_io.hpp"
#include "fim/lawdensity.hpp"
#include "fim/models.hpp"
#include "fim/rng.hpp"
#include "fim/semistatic.hpp"
#include "fim/steering.hpp"
#include "fim/stopvalue.hpp"
#include "fim/verify.hpp"

#include <CLI11.hpp>

#include "schemas.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace fim;
using fim::io::json;
using fim::io::JsonWriter;

constexpr std::uint64_t kDefaultSeed = 424242;

struct CommonOpts {
    std::string in_path;
    std::string out_path;
    std::uint64_t seed = kDefaultSeed;
    int threads = 0;
    bool schema = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--in", o.in_path, "input JSON file");
    cmd->add_option("--out", o.out_path, "output file (CSV or JSON depending on subcommand)");
    cmd->add_option("--seed", o.seed, "RNG seed (default 424242; FIM_SEED overrides)");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = auto, 1 = serial");
    cmd->add_flag("--schema", o.schema, "print the input schema and exit");
}

std::uint64_t effective_seed(const CommonOpts& o) {
    if (const char* env = std::getenv("FIM_SEED")) return std::strtoull(env, nullptr, 10);
    return o.seed;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_input(const CommonOpts& o) {
    if (o.in_path.empty()) throw std::invalid_argument("missing --in <file.json>");
    std::string text = read_file(o.in_path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Map the byte offset onto a line/column diagnostic.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw std::invalid_argument("malformed JSON at line " + std::to_string(line) + ", column " +
                                    std::to_string(col) + ": " + e.what());
    }
}

void write_output(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + o.out_path);
    out << text;
}

std::string fmt(double v) { return io::format_double(v); }

// ---------------------------------------------------------------- envelope

int run_envelope(const CommonOpts& o) {
    json j = parse_input(o);
    GamePayoffPair pair = io::parse_pair(j.at("pair"));
    double s0 = j.value("s0", 100.0);
    GridOptions opt;
    opt.n_points = j.value("n_points", 4096);
    opt.tol = j.value("tol", 1e-9);
    double lo, hi;
    if (j.contains("domain")) {
        lo = j["domain"][0].get<double>();
        hi = j["domain"][1].get<double>();
    } else {
        std::tie(lo, hi) = choose_domain(pair, s0, opt.n_points);
    }
    EnvelopeResult env = g_grid(pair, lo, hi, opt);

    std::string csv = "x,g,dplus,f1,f2,stop_mask\n";
    for (Eigen::Index i = 0; i < env.xs.size(); ++i) {
        csv += fmt(env.xs[i]) + "," + fmt(env.g[i]) + "," + fmt(env.dplus[i]) + "," +
               fmt(pair.f1(env.xs[i])) + "," + fmt(pair.f2(env.xs[i])) + "," +
               (env.stop_mask[static_cast<std::size_t>(i)] ? "1" : "0") + "\n";
    }
    write_output(o, csv);
    return 0;
}

// ------------------------------------------------------------------- hedge

int run_hedge(const CommonOpts& o) {
    json j = parse_input(o);
    GamePayoffPair pair = io::parse_pair(j.at("pair"));
    double s0 = j.at("s0").get<double>();
    bool rate_is_zero = j.value("rate_is_zero", true);
    bool allow_override = j.value("allow_override", false);
    std::string method = j.value("method", pair.both_convex() ? "closed_form" : "grid");

    TrivialHedge h;
    if (method == "closed_form") {
        h = build_hedge(convex_params(pair), pair, s0, rate_is_zero, allow_override);
    } else if (method == "grid") {
        GridOptions opt;
        opt.n_points = j.value("n_points", 4096);
        auto [lo, hi] = choose_domain(pair, s0, opt.n_points);
        h = build_hedge(g_grid(pair, lo, hi, opt), pair, s0, rate_is_zero, allow_override);
    } else {
        throw std::invalid_argument("hedge 'method' must be closed_form or grid");
    }

    JsonWriter w;
    w.begin_object();
    w.key("capital").value(h.initial_capital);
    w.key("gamma").value(h.gamma);
    w.key("cash0").value(h.cash0);
    w.key("exit_lo").value(h.exit_interval.empty ? h.s0 : h.exit_interval.lo);
    w.key("exit_hi").value(h.exit_interval.empty ? h.s0 : h.exit_interval.hi);
    w.key("exit_empty").value(h.exit_interval.empty);
    w.key("assumption_ok").value(h.assumption_ok);
    w.key("override_used").value(h.override_used);
    w.end_object();
    write_output(o, w.str());
    return 0;
}

// ---------------------------------------------------------------- simulate

void write_batch_csv(const CommonOpts& o, const PathBatch& b) {
    std::string csv = "path,t,S,nu,B,W\n";
    for (Eigen::Index p = 0; p < b.S.rows(); ++p)
        for (Eigen::Index k = 0; k < b.times.size(); ++k)
            csv += std::to_string(p) + "," + fmt(b.times[k]) + "," + fmt(b.S(p, k)) + "," +
                   fmt(b.nu(p, k)) + "," + fmt(b.bank[k]) + "," + fmt(b.W(p, k)) + "\n";
    write_output(o, csv);
}

void write_batch_binary(const CommonOpts& o, const PathBatch& b) {
    if (o.out_path.empty()) throw std::invalid_argument("binary output requires --out");
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + o.out_path);
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f64s = [&](const double* p, std::size_t n) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(8 * n));
    };
    out.write("FIMPB1", 6);
    put_u64(static_cast<std::uint64_t>(b.times.size()));
    put_u64(static_cast<std::uint64_t>(b.S.rows()));
    const char* fields[] = {"t", "B", "S", "nu", "W"};
    put_u32(5);
    for (const char* f : fields) {
        std::uint32_t len = static_cast<std::uint32_t>(std::string(f).size());
        put_u32(len);
        out.write(f, len);
    }
    put_f64s(b.times.data(), static_cast<std::size_t>(b.times.size()));
    put_f64s(b.bank.data(), static_cast<std::size_t>(b.bank.size()));
    for (Eigen::Index p = 0; p < b.S.rows(); ++p) {
        put_f64s(b.S.row(p).data(), static_cast<std::size_t>(b.S.cols()));
        put_f64s(b.nu.row(p).data(), static_cast<std::size_t>(b.nu.cols()));
        put_f64s(b.W.row(p).data(), static_cast<std::size_t>(b.W.cols()));
    }
}

int run_simulate(const CommonOpts& o) {
    json j = parse_input(o);
    ModelSpec spec = io::parse_model(j.at("model"));
    int n_steps = j.value("n_steps", 512);
    int n_paths = j.value("n_paths", 10000);
    PathBatch b = simulate(spec, n_steps, n_paths, effective_seed(o), o.threads);
    std::string format = j.value("format", "csv");
    if (format == "binary") write_batch_binary(o, b);
    else if (format == "csv") write_batch_csv(o, b);
    else throw std::invalid_argument("simulate 'format' must be csv or binary");
    return 0;
}

// ------------------------------------------------------------------ verify

std::string report_json(const SuperRepReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("n_paths").value(static_cast<long>(rep.n_paths));
    w.key("violation_fraction").value(rep.violation_fraction);
    w.key("min_slack").value(rep.min_slack);
    w.key("slack_tolerance").value(rep.slack_tolerance);
    w.key("max_overshoot").value(rep.max_overshoot);
    w.key("capital").value(rep.capital);
    w.key("gamma").value(rep.gamma);
    w.key("seed").value(static_cast<long>(rep.seed));
    w.end_object();
    return w.str();
}

int run_verify(const CommonOpts& o) {
    json j = parse_input(o);
    ModelSpec spec = io::parse_model(j.at("model"));
    GamePayoffPair pair = io::parse_pair(j.at("pair"));
    double s0 = j.value("s0", spec.s0);
    SuperRepReport rep =
        mc_superreplication(spec, pair, s0, j.value("n_paths", 10000), j.value("n_steps", 512),
                            effective_seed(o), j.value("allow_override", false), o.threads);
    std::puts(report_json(rep).c_str());
    if (!o.out_path.empty()) {
        std::string csv = "path,sigma_index,slack_min\n";
        for (int p = 0; p < rep.n_paths; ++p)
            csv += std::to_string(p) + "," +
                   std::to_string(rep.per_path_sigma[static_cast<std::size_t>(p)]) + "," +
                   fmt(rep.per_path_slack[static_cast<std::size_t>(p)]) + "\n";
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + o.out_path);
        out << csv;
    }
    return 0;
}

int run_counterexample(const CommonOpts& o) {
    CounterexampleConfig cfg;
    if (!o.in_path.empty()) {
        json j = parse_input(o);
        cfg.r = j.value("r", cfg.r);
        cfg.delta = j.value("delta", cfg.delta);
        cfg.c2 = j.value("c2", cfg.c2);
        cfg.s0 = j.value("s0", cfg.s0);
        cfg.n_paths = j.value("n_paths", cfg.n_paths);
        cfg.n_steps = j.value("n_steps", cfg.n_steps);
    }
    SuperRepReport rep = counterexample_run(effective_seed(o), cfg, o.threads);
    write_output(o, report_json(rep));
    return 0;
}

// --------------------------------------------------------------- stopvalue

int run_stopvalue(const CommonOpts& o) {
    json j = parse_input(o);
    GamePayoffPair pair = io::parse_pair(j.at("pair"));
    double x0 = j.at("x0").get<double>();
    LatticeSpec spec = io::parse_lattice(j.value("lattice", json::object()));
    ValueSurface surf = solve_g_lattice(pair, spec);

    JsonWriter w;
    w.begin_object();
    w.key("x0").value(x0);
    w.key("value").value(surf.value0_at(x0));
    w.key("n_t").value(static_cast<long>(spec.n_t));
    w.key("v_lo").value(spec.v_lo);
    w.key("v_hi").value(spec.v_hi);
    w.end_object();
    std::puts(w.str().c_str());

    if (!o.out_path.empty()) {
        std::string csv = "t,x,V,feedback_vol\n";
        for (std::size_t sl = 0; sl < surf.values.size(); ++sl) {
            for (Eigen::Index i = 0; i < surf.y.size(); ++i) {
                double vol = surf.feedback_hi[sl][static_cast<std::size_t>(i)] ? spec.v_hi
                                                                               : spec.v_lo;
                csv += fmt(surf.slice_times[sl]) + "," + fmt(std::exp(surf.y[i])) + "," +
                       fmt(surf.values[sl][i]) + "," + fmt(vol) + "\n";
            }
        }
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + o.out_path);
        out << csv;
    }
    return 0;
}

// -------------------------------------------------------------- semistatic

void lp_report_json(JsonWriter& w, const char* name, const LPReport& rep) {
    w.key(name).begin_object();
    const char* status = rep.status == LpStatus::Optimal
                             ? "optimal"
                             : (rep.status == LpStatus::Infeasible ? "infeasible" : "unbounded");
    w.key("status").value(std::string(status));
    if (rep.status == LpStatus::Optimal) {
        w.key("dual_value").value(rep.dual_value);
        w.key("primal_value").value(rep.primal_value);
        w.key("statics_coef").begin_array();
        for (Eigen::Index i = 0; i < rep.statics_coef.size(); ++i) w.value(rep.statics_coef[i]);
        w.end_array();
        w.key("gamma").begin_array();
        for (double g : rep.gamma) w.value(g);
        w.end_array();
        w.key("q").begin_array();
        for (Eigen::Index i = 0; i < rep.q.size(); ++i) w.value(rep.q[i]);
        w.end_array();
    }
    w.end_object();
}

int run_semistatic(const CommonOpts& o) {
    json j = parse_input(o);
    TreeMarket tree = io::parse_tree(j.at("tree"));
    VectorXd claim = io::parse_claim(j.at("claim"), tree);
    std::vector<StaticInstrument> statics = io::parse_statics(j.value("statics", json()), tree);

    LPReport dual = dual_price(tree, claim, statics);
    LPReport primal = primal_superhedge(tree, claim, statics);

    JsonWriter w;
    w.begin_object();
    w.key("n_paths").value(static_cast<long>(tree.n_paths()));
    lp_report_json(w, "dual", dual);
    lp_report_json(w, "primal", primal);
    if (j.contains("eps"))
        w.key("feasibility_ball").value(feasibility_ball(tree, statics, j["eps"].get<double>()));
    w.end_object();
    write_output(o, w.str());
    return 0;
}

// -------------------------------------------------------------- lawdensity

int run_lawdensity(const CommonOpts& o) {
    json j = parse_input(o);
    DiscreteMartingaleLaw law = io::parse_law(j.at("law"));
    int n_samples = j.value("n_samples", 100000);
    std::uint64_t seed = effective_seed(o);

    auto samples = quantile_coupling_sample(law, n_samples, seed, o.threads);
    LawMatchResult match = law_match_test(samples, law);

    // Interpolation diagnostics on a small subsample.
    double max_grid_err = 0.0;
    bool monotone = true;
    int n_check = std::min<int>(64, n_samples);
    for (int s = 0; s < n_check; ++s) {
        const auto& cs = samples[static_cast<std::size_t>(s)];
        for (int k = 0; k <= law.n; ++k) {
            double t = law.T * k / law.n;
            double v = brownian_interpolation(law, cs, t, 0.0);
            max_grid_err =
                std::max(max_grid_err, std::abs(v - cs.m[static_cast<std::size_t>(k)]));
        }
        double t = 0.5 * law.T / law.n;
        double prev = -kInf;
        for (int i = 0; i <= 16; ++i) {
            double w = -2.0 + 4.0 * i / 16.0;
            double v = brownian_interpolation(law, cs, t, w);
            if (v < prev - 1e-12) monotone = false;
            prev = v;
        }
    }

    JsonWriter w;
    w.begin_object();
    w.key("law_match").begin_object();
    w.key("tv_distance").value(match.tv_distance);
    w.key("chi2_stat").value(match.chi2_stat);
    w.key("chi2_crit").value(match.chi2_crit);
    w.key("cells").value(static_cast<long>(match.cells));
    w.key("pass").value(match.pass);
    w.end_object();
    w.key("interpolation").begin_object();
    w.key("max_grid_time_error").value(max_grid_err);
    w.key("monotone_in_increment").value(monotone);
    w.end_object();
    if (j.contains("refine")) {
        const json& r = j["refine"];
        std::vector<int> n_list = r.value("n_list", std::vector<int>{4, 8, 16});
        auto rows = weak_distance_diag(law.s0, r.value("sigma", 0.4), law.T, n_list,
                                       r.value("n_samples", 20000), seed, o.threads);
        w.key("weak_distance").begin_array();
        for (const auto& row : rows) {
            w.begin_object();
            w.key("n").value(static_cast<long>(row.n));
            w.key("proxy").value(row.proxy);
            w.key("mc_stderr").value(row.mc_stderr);
            w.end_object();
        }
        w.end_array();
    }
    w.end_object();
    write_output(o, w.str());
    return 0;
}

// ------------------------------------------------------------------- steer

int run_steer(const CommonOpts& o) {
    json j = parse_input(o);
    ModelSpec spec = io::parse_model(j.at("model"));
    SteerTarget target = io::parse_target(j.value("target", json::object()), spec.nu_start());
    SteerReport rep = steer_volatility(spec, target, j.value("n_blocks", 64), j.value("eps", 0.05),
                                       j.value("n_paths", 10000), j.value("n_steps", 1024),
                                       effective_seed(o), o.threads);
    JsonWriter w;
    w.begin_object();
    w.key("prob_exceed").value(rep.prob_exceed);
    w.key("mc_stderr").value(rep.mc_stderr);
    w.key("n_blocks").value(static_cast<long>(rep.n_blocks));
    w.key("block_threshold").value(rep.block_threshold);
    w.key("below_threshold").value(rep.below_threshold);
    w.end_object();
    write_output(o, w.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"super-replication toolkit for game options in fully incomplete markets"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* desc;
        const char* schema;
        int (*fn)(const CommonOpts&);
    };
    const Sub subs[] = {
        {"envelope", "game concave envelope on a price grid (CSV)", fim::cli::kEnvelopeSchema,
         run_envelope},
        {"hedge", "cheapest trivial super-replicating strategy (JSON)", fim::cli::kHedgeSchema,
         run_hedge},
        {"simulate", "stochastic / rough volatility path batches", fim::cli::kSimulateSchema,
         run_simulate},
        {"verify", "pathwise super-replication audit (JSON)", fim::cli::kVerifySchema, run_verify},
        {"counterexample", "the negative configuration under r > 0",
         fim::cli::kCounterexampleSchema, run_counterexample},
        {"stopvalue", "stopping value under volatility uncertainty", fim::cli::kStopvalueSchema,
         run_stopvalue},
        {"semistatic", "finite-tree superhedging LPs", fim::cli::kSemistaticSchema, run_semistatic},
        {"lawdensity", "quantile coupling and interpolation diagnostics",
         fim::cli::kLawdensitySchema, run_lawdensity},
        {"steer", "volatility steering experiment", fim::cli::kSteerSchema, run_steer},
    };

    constexpr std::size_t n_subs = std::size(subs);
    std::vector<CommonOpts> opts(n_subs);
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < n_subs; ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].desc);
        add_common(cmd, opts[i]);
        cmds.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < n_subs; ++i) {
        if (!cmds[i]->parsed()) continue;
        if (opts[i].schema) {
            std::fputs(subs[i].schema, stdout);
            std::string name = subs[i].name;
            if (name != "simulate" && name != "steer" && name != "semistatic" &&
                name != "lawdensity" && name != "counterexample")
                std::fputs(fim::cli::kPayoffSchema, stdout);
            std::fputc('\n', stdout);
            return 0;
        }
        try {
            return subs[i].fn(opts[i]);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        } catch (const std::domain_error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "internal error: %s\n", e.what());
            return 1;
        }
    }
    return 2;
}
