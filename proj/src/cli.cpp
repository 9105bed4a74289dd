#include "bcrt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "bcrt/analysis.hpp"
#include "bcrt/curvature.hpp"
#include "bcrt/parallel.hpp"
#include "bcrt/selftest.hpp"
#include "bcrt/transport.hpp"

namespace bcrt::cli {

namespace {

using Cell = std::variant<std::string, double, std::uint64_t>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t grid_n = 16384;
    std::size_t replicas = 4000;
    double delta = 0.02;
    double ell_lo = 0.45;
    double ell_hi = 0.55;
    std::vector<double> eps{0.1, 0.2, 0.3, 0.5};
    std::string format = "csv";
    std::string out;
    unsigned threads = default_thread_count();
    std::string sampler = "bessel";
    bool inject_w1_fault = false;
    bool lemma = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string cell_text(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::to_string(std::get<std::uint64_t>(c));
}

std::string gate(bool ok) { return ok ? "pass" : "fail"; }

std::string metadata(const RunConfig& c) {
    std::ostringstream s;
    s << "seed=" << c.seed << " grid_n=" << c.grid_n << " replicas=" << c.replicas << " version=" << kVersion;
    return s.str();
}

void write_table(const Table& t, const std::string& command, const RunConfig& c, std::ostream& os) {
    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["columns"] = t.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            nlohmann::ordered_json row;
            for (std::size_t k = 0; k < t.columns.size(); ++k) {
                std::visit(
                    [&](const auto& v) {
                        using V = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<V, double>) {
                            if (std::isfinite(v)) row[t.columns[k]] = v;
                            else row[t.columns[k]] = nullptr;
                        } else {
                            row[t.columns[k]] = v;
                        }
                    },
                    r[k]);
            }
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        j["meta"] = {{"seed", c.seed}, {"grid_n", c.grid_n}, {"replicas", c.replicas}, {"version", kVersion}};
        os << j.dump(2) << '\n';
        return;
    }
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell_text(r[k]);
        os << '\n';
    }
    os << "# " << metadata(c) << '\n';
}

SamplerKind sampler_kind(const RunConfig& c) {
    if (c.sampler == "bessel") return SamplerKind::kBesselBridge;
    if (c.sampler == "vervaat") return SamplerKind::kVervaat;
    throw ConfigError("unknown sampler: " + c.sampler);
}

void validate(const RunConfig& c) {
    if (c.grid_n < 2) throw ConfigError("--grid-n must be at least 2");
    if (c.replicas < 1) throw ConfigError("--replicas must be at least 1");
    if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
    if (c.threads < 1) throw ConfigError("--threads must be at least 1");
    sampler_kind(c);
}

VolumeConfig volume_config(const RunConfig& c) {
    if (c.replicas < 2) throw ConfigError("volume needs at least 2 replicas");
    for (double e : c.eps)
        if (!(e > 0.0)) throw ConfigError("--eps values must be positive");
    VolumeConfig v;
    v.n = c.grid_n;
    v.seed = c.seed;
    v.replicas = c.replicas;
    v.eps = c.eps;
    v.threads = c.threads;
    v.sampler = sampler_kind(c);
    return v;
}

int cmd_selftest(const RunConfig& c, std::size_t n, Table& t) {
    SelftestOptions opt;
    opt.seed = c.seed;
    opt.n = n;
    opt.threads = c.threads;
    opt.w1_fault = c.inject_w1_fault ? 1e-3 : 0.0;
    t.columns = {"suite", "checks", "failures", "worst_error", "status"};
    bool ok = true;
    for (const auto& r : run_selftest(opt)) {
        t.rows.push_back({r.name, std::uint64_t{r.checks}, std::uint64_t{r.failures}, r.worst, gate(r.passed())});
        ok = ok && r.passed();
    }
    return ok ? kPass : kGateFailure;
}

int cmd_volume(const RunConfig& c, Table& t) {
    const VolumeConfig v = volume_config(c);
    bool ok = true;
    if (c.lemma) {
        t.columns = {"part", "function", "eps", "mean_a", "mean_b", "diff_se", "gate"};
        for (const auto& r : fundamental_lemma_tests(v)) {
            t.rows.push_back({r.part, r.function, r.eps, r.mean_a, r.mean_b, r.se, gate(r.pass)});
            ok = ok && r.pass;
        }
        return ok ? kPass : kGateFailure;
    }
    t.columns = {"eps",           "closed_form", "mc_mean",        "se",           "gate",
                 "root_mean",     "root_se",     "reroot_gate",    "half_closed_form",
                 "ancestry_mean", "ancestry_se", "ancestry_gate",  "offspring_mean",
                 "offspring_se",  "offspring_gate"};
    for (const auto& r : volume_law_experiment(v)) {
        t.rows.push_back({r.eps, r.closed_form, r.mc_mean, r.se, gate(r.volume_pass), r.root_mean, r.root_se,
                          gate(r.reroot_pass), 0.5 * r.closed_form, r.ancestry_mean, r.ancestry_se,
                          gate(r.ancestry_pass), r.offspring_mean, r.offspring_se, gate(r.offspring_pass)});
        ok = ok && r.volume_pass && r.reroot_pass && r.ancestry_pass && r.offspring_pass;
    }
    return ok ? kPass : kGateFailure;
}

int cmd_curvature(const RunConfig& c, Table& t) {
    CurvatureConfig cc;
    cc.n = c.grid_n;
    cc.seed = c.seed;
    cc.replicas = c.replicas;
    cc.delta = c.delta;
    cc.ell_lo = c.ell_lo;
    cc.ell_hi = c.ell_hi;
    cc.threads = c.threads;
    cc.sampler = sampler_kind(c);
    if (!(cc.delta > 0.0) || !(cc.delta < cc.ell_lo) || !(cc.ell_lo < cc.ell_hi))
        throw ConfigError("curvature needs 0 < --delta < --ell-lo < --ell-hi");
    const CurvatureRun run = run_curvature_experiment(cc);
    const auto est = summarize_curvature(run);
    const auto ks = summarize_kantorovich(run);
    t.columns = {"delta",          "ell_lo",         "ell_hi",        "ell_mid",         "replicas",
                 "attempts",       "mean_ell",       "mean_kappa",    "se_kappa",        "band_lo",
                 "band_hi",        "band_gate",      "scale_free_kappa", "mean_w1",      "se_w1",
                 "w1_excess_over_delta", "kantorovich_excess", "kantorovich_se", "kantorovich_threshold",
                 "kantorovich_gate"};
    t.rows.push_back({cc.delta, cc.ell_lo, cc.ell_hi, est.scale.ell, std::uint64_t{est.replicas},
                      std::uint64_t{run.attempts}, est.mean_ell, est.mean_kappa, est.std_error, est.band_lo,
                      est.band_hi, gate(est.in_band), scale_free_kappa(est.mean_kappa, cc.delta), est.mean_w1,
                      est.w1_std_error, (est.mean_w1 - est.mean_ell) / cc.delta, ks.mean_excess, ks.std_error,
                      ks.threshold, gate(ks.pass)});
    const bool full = est.replicas == cc.replicas;
    return full && est.in_band && ks.pass ? kPass : kGateFailure;
}

int cmd_analysis(Table& t) {
    const AppendixReport rep = appendix_report();
    t.columns = {"quantity", "value"};
    t.rows.push_back({"f_at_zero", rep.f_at_zero.decimal()});
    t.rows.push_back({"f_at_zero_rational",
                      std::to_string(rep.f_at_zero.num) + "/" + std::to_string(rep.f_at_zero.den)});
    t.rows.push_back({"f_max_location", rep.max_location});
    t.rows.push_back({"f_max_value", rep.max_value});
    t.rows.push_back({"f_dominated", gate(rep.dominated)});
    t.rows.push_back({"f_prime_at_zero_central", rep.derivative_at_zero_numeric});
    t.rows.push_back({"slope_ratio_remainder", rep.ratio_remainder});
    t.rows.push_back({"expected_ball_volume_0.3", expected_ball_volume(0.3)});
    for (const auto& [d, v] : rep.numeric_f) t.rows.push_back({"f(" + format_double(d) + ")", v});
    const bool ok = rep.f_at_zero == Rational{19, 128} && rep.dominated &&
                    std::abs(rep.derivative_at_zero_numeric) < 1e-6;
    return ok ? kPass : kGateFailure;
}

int cmd_transport_bench(const RunConfig& c, Table& t, std::ostream& err) {
    Engine rng = make_engine(c.seed, 0, 0xbe7c);
    const MetricTree tree(sample_excursion(c.grid_n, sampler_kind(c), rng));
    std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
    for (std::size_t k = 0; k < c.replicas; ++k) {
        const std::size_t x = uniform_index(rng, c.grid_n), y = uniform_index(rng, c.grid_n);
        pairs.emplace_back(uniform_ball_measure(tree, GridIndex{x}, c.delta),
                           uniform_ball_measure(tree, GridIndex{y}, c.delta));
    }
    std::vector<double> costs(pairs.size());
    const auto start = std::chrono::steady_clock::now();
    parallel_for(0, pairs.size(), c.threads,
                 [&](std::size_t k) { costs[k] = w1_edge_cut(tree, pairs[k].first, pairs[k].second).cost; });
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::size_t atoms = 0;
    for (const auto& [a, b] : pairs) atoms += a.size() + b.size();
    const auto s = summarize(costs);
    t.columns = {"method", "instances", "mean_atoms", "mean_cost", "nodes"};
    t.rows.push_back({std::string("edge_cut"), std::uint64_t{pairs.size()},
                      static_cast<double>(atoms) / static_cast<double>(pairs.size()), s.mean,
                      std::uint64_t{tree.edges().node_count()}});
    err << "edge_cut: " << pairs.size() << " solves in " << elapsed.count() << " s ("
        << 1e6 * elapsed.count() / static_cast<double>(pairs.size()) << " us per solve)\n";
    return kPass;
}

void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    auto given = [&](const char* flag) { return app.get_option(flag)->count() > 0; };
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "seed") { if (!given("--seed")) c.seed = value.get<std::uint64_t>(); }
            else if (key == "grid_n") { if (!given("--grid-n")) c.grid_n = value.get<std::size_t>(); }
            else if (key == "replicas") { if (!given("--replicas")) c.replicas = value.get<std::size_t>(); }
            else if (key == "delta") { if (!given("--delta")) c.delta = value.get<double>(); }
            else if (key == "ell_lo") { if (!given("--ell-lo")) c.ell_lo = value.get<double>(); }
            else if (key == "ell_hi") { if (!given("--ell-hi")) c.ell_hi = value.get<double>(); }
            else if (key == "eps") { if (!given("--eps")) c.eps = value.get<std::vector<double>>(); }
            else if (key == "format") { if (!given("--format")) c.format = value.get<std::string>(); }
            else if (key == "threads") { if (!given("--threads")) c.threads = value.get<unsigned>(); }
            else if (key == "sampler") { if (!given("--sampler")) c.sampler = value.get<std::string>(); }
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    std::string config_path;
    CLI::App app{"Brownian tree curvature experiments", "bcrt"};
    app.require_subcommand(1);
    app.add_option("--seed", c.seed, "master seed");
    app.add_option("--grid-n", c.grid_n, "grid resolution n");
    app.add_option("--replicas", c.replicas, "replica count (accepted pairs for curvature)");
    app.add_option("--delta", c.delta, "ball radius");
    app.add_option("--ell-lo", c.ell_lo, "lower end of the distance bin");
    app.add_option("--ell-hi", c.ell_hi, "upper end of the distance bin");
    app.add_option("--eps", c.eps, "ball radius for the volume law (repeatable)")->allow_extra_args(false);
    app.add_option("--format", c.format, "csv or json");
    app.add_option("--out", c.out, "output file (default stdout)");
    app.add_option("--threads", c.threads, "worker threads");
    app.add_option("--sampler", c.sampler, "bessel or vervaat");
    app.add_option("--config", config_path, "JSON file with default values");
    app.add_flag("--inject-w1-fault", c.inject_w1_fault, "debug: perturb the edge-cut solver by 1e-3");

    auto* selftest = app.add_subcommand("selftest", "run the geometry and transport self-test suites")->fallthrough();
    auto* volume = app.add_subcommand("volume", "expected ball volume law")->fallthrough();
    volume->add_flag("--lemma", c.lemma, "emit the paired-expectation table instead");
    auto* curvature = app.add_subcommand("curvature", "Monte Carlo curvature and transport bounds")->fallthrough();
    auto* analysis = app.add_subcommand("analysis", "closed-form constants of the curvature bound")->fallthrough();
    auto* bench = app.add_subcommand("transport-bench", "edge-cut W1 throughput")->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    Table table;
    std::string command;
    int code = kPass;
    try {
        if (!config_path.empty()) apply_config_file(config_path, c, app);
        validate(c);
        if (selftest->parsed()) {
            command = "selftest";
            if (app.get_option("--grid-n")->count() == 0 && config_path.empty()) c.grid_n = SelftestOptions{}.n;
            code = cmd_selftest(c, c.grid_n, table);
        } else if (volume->parsed()) {
            command = "volume";
            code = cmd_volume(c, table);
        } else if (curvature->parsed()) {
            command = "curvature";
            code = cmd_curvature(c, table);
        } else if (analysis->parsed()) {
            command = "analysis";
            code = cmd_analysis(table);
        } else if (bench->parsed()) {
            command = "transport-bench";
            code = cmd_transport_bench(c, table, err);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kGateFailure;
    }

    if (c.out.empty()) {
        write_table(table, command, c, out);
    } else {
        std::ofstream file(c.out);
        if (!file) {
            err << "config error: cannot write " << c.out << '\n';
            return kConfigError;
        }
        write_table(table, command, c, file);
    }
    return code;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace bcrt::cli
