// Acceptance checks, one line per criterion. Usage: acceptance [--criterion N]
// Exit status is 0 only when every selected criterion passes.

#include <CLI11.hpp>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bcrt/analysis.hpp"
#include "bcrt/cli.hpp"
#include "bcrt/curvature.hpp"
#include "bcrt/parallel.hpp"
#include "bcrt/selftest.hpp"

using namespace bcrt;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
    bool pass = false;
    std::string detail;
};

unsigned threads() { return default_thread_count(); }

const std::vector<VolumeRow>& volume_rows() {
    static const std::vector<VolumeRow> rows = [] {
        VolumeConfig c;
        c.n = 1 << 14;
        c.seed = kSeed;
        c.replicas = 4000;
        c.threads = threads();
        return volume_law_experiment(c);
    }();
    return rows;
}

const CurvatureRun& curvature_run() {
    static const CurvatureRun run = [] {
        CurvatureConfig c;
        c.n = 1 << 14;
        c.seed = kSeed;
        c.replicas = 4000;
        c.delta = 0.02;
        c.ell_lo = 0.45;
        c.ell_hi = 0.55;
        c.threads = threads();
        return run_curvature_experiment(c);
    }();
    return run;
}

Verdict volume_law() {
    std::ostringstream s;
    bool ok = true;
    for (const auto& r : volume_rows()) {
        ok = ok && r.volume_pass;
        s << " eps=" << r.eps << " mc=" << r.mc_mean << " se=" << r.se << " cf=" << r.closed_form;
    }
    return {ok, s.str()};
}

Verdict half_split() {
    std::ostringstream s;
    bool ok = true;
    for (const auto& r : volume_rows()) {
        ok = ok && r.ancestry_pass && r.offspring_pass;
        s << " eps=" << r.eps << " half=" << 0.5 * r.closed_form << " anc=" << r.ancestry_mean << "+-"
          << r.ancestry_se << " off=" << r.offspring_mean << "+-" << r.offspring_se;
    }
    return {ok, s.str()};
}

Verdict constants() {
    const auto rep = appendix_report();
    const bool exact = rep.f_at_zero == Rational{19, 128} && rep.f_at_zero.decimal() == "0.1484375";
    const bool deriv = std::abs(rep.derivative_at_zero_numeric) < 1e-6;
    std::ostringstream s;
    s << " f(0)=" << rep.f_at_zero.num << "/" << rep.f_at_zero.den << " max_at=" << rep.max_location
      << " dominated=" << rep.dominated << " f'(0)=" << rep.derivative_at_zero_numeric;
    return {exact && rep.dominated && deriv, s.str()};
}

Verdict suites(const std::vector<std::function<SuiteResult(const SelftestOptions&)>>& run) {
    SelftestOptions opt;
    opt.seed = kSeed;
    opt.threads = threads();
    std::ostringstream s;
    bool ok = true;
    for (const auto& f : run) {
        const SuiteResult r = f(opt);
        ok = ok && r.passed();
        s << ' ' << r.name << '=' << r.failures << '/' << r.checks << " worst=" << r.worst;
    }
    return {ok, s.str()};
}

Verdict pathwise(const PathwiseReport& r) {
    std::ostringstream s;
    s << " instances=" << r.instances << " violations=" << r.violations << " worst_margin=" << r.worst_margin
      << " tolerance=" << r.tolerance;
    return {r.instances >= 10000 && r.violations == 0, s.str()};
}

PathwiseConfig pathwise_config() {
    PathwiseConfig c;
    c.seed = kSeed;
    c.threads = threads();
    return c;
}

Verdict kantorovich() {
    const auto k = summarize_kantorovich(curvature_run());
    std::ostringstream s;
    s << " pairs=" << k.replicas << " mean(gap-ell)=" << k.mean_excess << " se=" << k.std_error
      << " threshold=" << k.threshold << " mean(w1-ell)=" << k.mean_w1_excess;
    return {k.pass && k.replicas >= 4000, s.str()};
}

Verdict band() {
    const auto e = summarize_curvature(curvature_run());
    std::ostringstream s;
    s << " pairs=" << e.replicas << " mean_ell=" << e.mean_ell << " kappa=" << e.mean_kappa << " se=" << e.std_error
      << " band=[" << e.band_lo << ", " << e.band_hi << "]";
    return {e.in_band && e.replicas >= 4000, s.str()};
}

Verdict determinism() {
    const std::vector<std::vector<std::string>> commands = {
        {"selftest", "--grid-n", "512"},
        {"analysis"},
        {"volume", "--grid-n", "1024", "--replicas", "200"},
        {"volume", "--lemma", "--grid-n", "1024", "--replicas", "200", "--format", "json"},
        {"curvature", "--grid-n", "1024", "--replicas", "40"},
        {"transport-bench", "--grid-n", "4096", "--replicas", "200", "--delta", "0.05"},
    };
    std::ostringstream s;
    bool ok = true;
    for (const auto& cmd : commands) {
        std::string text[2];
        int code[2];
        const char* counts[2] = {"1", "4"};
        for (int k = 0; k < 2; ++k) {
            std::vector<std::string> args = cmd;
            args.insert(args.end(), {"--seed", "3", "--threads", counts[k]});
            std::ostringstream out, err;
            code[k] = cli::run(args, out, err);
            text[k] = out.str();
        }
        const bool same = text[0] == text[1] && code[0] == code[1] && !text[0].empty();
        ok = ok && same;
        s << ' ' << cmd.front() << (cmd.size() > 1 && cmd[1] == "--lemma" ? "(lemma)" : "") << '='
          << (same ? "identical" : "differs");
    }
    return {ok, s.str()};
}

Verdict criterion(int k) {
    switch (k) {
    case 1: return volume_law();
    case 2: return half_split();
    case 3: return constants();
    case 4: return suites({oracle_equivalence_suite});
    case 5: return pathwise(w1_upper_bound_sweep(pathwise_config()));
    case 6: return kantorovich();
    case 7: return band();
    case 8: return pathwise(recursive_bound_sweep(pathwise_config()));
    case 9:
        return suites({metric_axioms_suite, four_point_suite, edge_list_suite, meet_suite, ball_intersection_suite,
                       lipschitz_suite, rerooting_suite, distortion_suite});
    case 10: return determinism();
    default: throw std::out_of_range("criterion must be 1..10");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("acceptance checks");
    std::optional<int> only;
    app.add_option("--criterion", only, "run a single criterion (1..10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    std::vector<int> selected;
    if (only) selected.push_back(*only);
    else
        for (int k = 1; k <= 10; ++k) selected.push_back(k);

    bool all = true;
    for (int k : selected) {
        const Verdict v = criterion(k);
        all = all && v.pass;
        std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << v.detail << std::endl;
    }
    return all ? 0 : 1;
}
