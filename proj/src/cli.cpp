#include "tst/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tst/examples.hpp"
#include "tst/io.hpp"
#include "tst/lookahead.hpp"
#include "tst/perm.hpp"
#include "tst/simulate.hpp"
#include "tst/solver.hpp"

namespace tst {
namespace {

// Flag values in string form; numeric parsing happens per numeric mode.
struct Opts {
    std::string model_path;
    std::string mode;    // "", "exact", "float"
    std::string format;  // "", then per-command default
    std::string alpha;
    std::string lambda;
    std::string method = "string";  // solve: "string" | "comp"
    bool fallback = false;          // comp: fall back instead of refusing
    bool monotone = false;          // check: also run the monotone certificate
    int kappa = 0;                  // horizon override (0 = keep the model's)
    int depth = 2;
    int points = 11;
    int max_kappa = 0;  // bench: largest horizon (0 = the model's)
    long samples = 100000;
    long cap = 1'000'000;
    std::uint64_t seed = 12345;
    std::string name, p, eps, x1;  // example selection + parameters
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("model: cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join_issues(std::vector<std::string> issues) {
    std::string msg;
    for (const auto& s : issues) {
        if (!msg.empty()) msg += "; ";
        msg += s;
    }
    return msg;
}

// Parse the model from --model or stdin, resolve the numeric mode, and apply
// the --kappa override. Float literals in the file switch the run to float
// mode (the parser's notices go to stderr) unless --mode pins it down.
ParsedModel load_model(const Opts& o, const std::string& stdin_text, std::ostream& err,
                       bool& exact) {
    std::string text = o.model_path.empty() ? stdin_text : read_file(o.model_path);
    if (text.empty()) throw std::invalid_argument("model: no --model path and nothing on stdin");
    ParsedModel pm = parse_model_json(text);
    for (const auto& n : pm.notices) err << "note: " << n << "\n";
    if (o.mode == "exact" && !pm.exact)
        throw std::invalid_argument(
            "model: float literals present; exact mode unavailable (use --mode float)");
    exact = o.mode == "float" ? false : pm.exact;
    if (o.kappa > 0) {
        pm.rmodel.kappa = o.kappa;
        pm.fmodel.kappa = o.kappa;
        auto revalidate = [](const auto& m, const auto& rule) {
            auto issues = validate_model(m);
            auto more = validate_rule(m, rule);
            issues.insert(issues.end(), more.begin(), more.end());
            if (!issues.empty()) throw std::invalid_argument("model: " + join_issues(issues));
        };
        if (exact)
            revalidate(pm.rmodel, pm.rrule);
        else
            revalidate(pm.fmodel, pm.frule);
    }
    return pm;
}

template <class N>
Ext<N> parse_ext(const std::string& s) {
    if (s == "inf") return Ext<N>::infinity();
    return Ext<N>(numeric_traits<N>::parse(s));
}

// Index bytes -> comma-joined symbol labels, for witness messages.
std::string label_string(const std::vector<std::string>& labels, const std::string& bytes) {
    std::string s;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i) s += ",";
        s += labels.at(static_cast<unsigned char>(bytes[i]));
    }
    return s;
}

std::string fmt_ms(double ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ms);
    return buf;
}

template <class N>
int cmd_solve(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
              std::ostream& out, std::ostream& err) {
    const std::string fmt = o.format.empty() ? "csv" : o.format;
    if (o.method == "comp") {
        CompPolicy policy = o.fallback ? CompPolicy::fallback : CompPolicy::require_invariant;
        CompCurve<N> c = comp_breakpoint_sweep(m, rule, policy);
        if (c.fell_back)
            err << "note: rule not certified permutation-invariant; "
                   "fell back to the string-level sweep\n";
        out << (fmt == "json" ? curve_to_json(c) : curve_to_csv(c));
    } else {
        BreakpointCurve<N> c = breakpoint_sweep(m, rule);
        out << (fmt == "json" ? curve_to_json(c, m.y_labels) : curve_to_csv(c));
    }
    return 0;
}

template <class N>
int cmd_curve(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
              std::ostream& out) {
    using T = numeric_traits<N>;
    BreakpointCurve<N> c = breakpoint_sweep(m, rule);
    if (!o.alpha.empty()) {
        out << T::str(evaluate_curve(c, T::parse(o.alpha)).delay) << "\n";
        return 0;
    }
    const N am = c.entries.back().alpha;  // delay floor is reached at alpha_M
    out << "alpha,delay\n";
    if (T::is_zero(am)) {  // degenerate curve: a single point
        out << T::str(am) << "," << T::str(c.entries.back().delay) << "\n";
        return 0;
    }
    for (int i = 0; i < o.points; ++i) {
        N a = am * T::from_ratio(i, o.points - 1);
        out << T::str(a) << "," << T::str(evaluate_curve(c, a).delay) << "\n";
    }
    return 0;
}

template <class N>
int cmd_bound(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
              std::ostream& out) {
    using T = numeric_traits<N>;
    out << T::str(lower_bound(m, rule, T::parse(o.alpha), o.depth)) << "\n";
    return 0;
}

template <class N>
int cmd_lookahead(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
                  std::ostream& out) {
    StoppingTree<N> t = lookahead_tree(m, rule, parse_ext<N>(o.lambda));
    const std::string fmt = o.format.empty() ? "text" : o.format;
    out << (fmt == "dot" ? tree_to_dot(t, m.y_labels) : tree_to_text(t, m.y_labels));
    return 0;
}

template <class N>
int cmd_check(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
              std::ostream& out) {
    using T = numeric_traits<N>;
    out << "model: ok\n"
        << "rule: ok\n";  // parsing already ran the validators
    RuleInvariance inv = is_rule_perm_invariant(m, rule);
    if (inv.invariant)
        out << "invariance: yes (" << (inv.structural ? "structural" : "checked") << ")\n";
    else
        out << "invariance: no (q changes when positions " << inv.witness_pos << ","
            << inv.witness_pos + 1 << " of x=[" << label_string(m.x_labels, inv.witness_x)
            << "] swap)\n";
    if (o.monotone) {
        MonotoneReport<N> r = monotone_check(m, rule);
        if (r.passed)
            out << "monotone: passed\n";
        else
            out << "monotone: violated at level " << r.n << ", y=["
                << label_string(m.y_labels, r.y) << "]: " << T::str(r.left) << " < "
                << T::str(r.right) << "\n";
    }
    return 0;
}

template <class N>
int cmd_oracle(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
               std::ostream& out) {
    using T = numeric_traits<N>;
    std::vector<BrutePoint<N>> brute = brute_force_breakpoints(m, rule, o.cap);
    BreakpointCurve<N> c = breakpoint_sweep(m, rule);
    std::vector<std::pair<N, N>> sweep = c.vertices();
    bool match = sweep.size() == brute.size();
    for (std::size_t i = 0; match && i < sweep.size(); ++i)
        match = T::eq(sweep[i].first, brute[i].alpha) && T::eq(sweep[i].second, brute[i].delay);
    if (match) {
        out << "MATCH\n"
            << "vertices: " << sweep.size() << "\n";
        return 0;
    }
    out << "MISMATCH\n";
    out << "sweep:";
    for (const auto& [a, d] : sweep) out << " (" << T::str(a) << "," << T::str(d) << ")";
    out << "\nbrute:";
    for (const auto& p : brute) out << " (" << T::str(p.alpha) << "," << T::str(p.delay) << ")";
    out << "\n";
    return 1;
}

template <class N>
int cmd_simulate(const JointModel<N>& m, const StoppingRule<N>& rule, const Opts& o,
                 std::ostream& out) {
    using T = numeric_traits<N>;
    Ext<N> lam = parse_ext<N>(o.lambda);
    StoppingTree<N> tree = optimal_subtree(complete_tree(m, rule), lam);
    SimResult r = simulate(m, rule, tree, o.samples, o.seed);
    out << "lambda: " << lam.str() << "\n"
        << "samples: " << o.samples << "\n"
        << "seed: " << o.seed << "\n";
    auto line = [&](const char* what, double est, double rad, const N& ref) {
        bool ok = std::fabs(est - T::to_double(ref)) <= rad;
        out << what << ": estimate=" << numeric_traits<double>::str(est)
            << " radius=" << numeric_traits<double>::str(rad) << " analytic=" << T::str(ref)
            << (ok ? " ok" : " outside") << "\n";
    };
    line("alarm", r.alarm, r.alarm_radius, tree.alpha());
    line("delay", r.delay, r.delay_radius, tree.delay());
    return 0;
}

int cmd_example(const Opts& o, std::ostream& out) {
    auto param = [](const std::string& given, const char* fallback) {
        return Rat(given.empty() ? fallback : given);
    };
    ModelAndRule<Rat> ex;
    if (o.name == "ex6-bsc")
        ex = ex6_bsc<Rat>(param(o.p, "1/4"), o.kappa);
    else if (o.name == "ex7-bec")
        ex = ex7_bec<Rat>(param(o.eps, "1/2"), param(o.p, "1/5"), o.kappa);
    else if (o.name == "ex12-geometric")
        ex = ex12_geometric<Rat>(param(o.x1, "3/5"), param(o.p, "2/5"), o.kappa);
    else if (o.name == "ex13-sum2")
        ex = ex13_sum2<Rat>(param(o.x1, "4/5"), param(o.p, "2/5"), o.kappa);
    else
        throw std::invalid_argument("example: unknown name '" + o.name +
                                    "' (expected ex6-bsc, ex7-bec, ex12-geometric, ex13-sum2)");
    auto issues = validate_model(ex.model);
    auto more = validate_rule(ex.model, ex.rule);
    issues.insert(issues.end(), more.begin(), more.end());
    if (!issues.empty()) throw std::invalid_argument("example: " + join_issues(issues));
    out << model_to_json(ex.model, ex.rule);
    return 0;
}

template <class N>
int cmd_bench(const JointModel<N>& base, const StoppingRule<N>& rule, const Opts& o,
              std::ostream& out, std::ostream& err) {
    const int hi = o.max_kappa > 0 ? o.max_kappa : base.kappa;
    if (hi < 2) throw std::invalid_argument("bench: horizon must be at least 2");
    auto time_ms = [](auto&& f) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(t1 - t0).count();
    };
    out << "kappa,string_ms,comp_ms,M\n";
    for (int k = 2; k <= hi; ++k) {
        JointModel<N> m = base;
        m.kappa = k;
        if (auto issues = validate_rule(m, rule); !issues.empty()) {
            err << "note: kappa " << k << ": " << issues.front() << "\n";
            continue;
        }
        std::string scol = "skipped", ccol = "skipped", mcol = "-";
        try {
            BreakpointCurve<N> c;
            scol = fmt_ms(time_ms([&] { c = breakpoint_sweep(m, rule); }));
            mcol = std::to_string(c.M());
        } catch (const RefusalError&) {  // horizon too deep for the string sweep
        }
        try {
            CompCurve<N> c;
            ccol = fmt_ms(time_ms([&] { c = comp_breakpoint_sweep(m, rule); }));
            mcol = std::to_string(c.M());
        } catch (const RefusalError&) {  // rule not certified invariant
        }
        out << k << "," << scol << "," << ccol << "," << mcol << "\n";
    }
    return 0;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text) {
    std::ostringstream out, err;
    Opts o;

    CLI::App app{"exact delay/false-alarm tradeoffs for tracking a stopping time"};
    app.name("tst");
    app.require_subcommand(1);

    auto add_model_flags = [&](CLI::App* c) {
        c->add_option("--model", o.model_path, "model JSON file (default: read stdin)");
        c->add_option("--mode", o.mode, "numeric mode (default: follow the file)")
            ->check(CLI::IsMember({"exact", "float"}));
        c->add_option("--kappa", o.kappa, "override the model's horizon")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* solve = app.add_subcommand("solve", "emit the full breakpoint curve");
    add_model_flags(solve);
    solve->add_option("--format", o.format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    solve->add_option("--method", o.method, "string (default) or comp")
        ->check(CLI::IsMember({"string", "comp"}));
    solve->add_flag("--fallback", o.fallback,
                    "with --method comp: fall back to the string sweep instead of refusing");

    CLI::App* curve = app.add_subcommand("curve", "evaluate d(alpha) at a point or on a grid");
    add_model_flags(curve);
    curve->add_option("--alpha", o.alpha, "evaluate at this false-alarm budget");
    curve->add_option("--points", o.points, "grid size when --alpha is absent (default 11)")
        ->check(CLI::Range(2, 1000000));

    CLI::App* bound = app.add_subcommand("bound", "convexity lower bound on d(alpha)");
    add_model_flags(bound);
    bound->add_option("--alpha", o.alpha, "false-alarm budget")->required();
    bound->add_option("--depth", o.depth, "1: tangent at alpha=0; 2: exact first segment")
        ->check(CLI::Range(1, 2));

    CLI::App* lookahead = app.add_subcommand("lookahead", "emit the one-step lookahead tree");
    add_model_flags(lookahead);
    lookahead->add_option("--lambda", o.lambda, "Lagrange multiplier (finite, > 0)")->required();
    lookahead->add_option("--format", o.format, "text (default) or dot")
        ->check(CLI::IsMember({"text", "dot"}));

    CLI::App* check = app.add_subcommand("check", "validate the model and run certificates");
    add_model_flags(check);
    check->add_flag("--monotone", o.monotone, "also run the monotone-case certificate");

    CLI::App* oracle = app.add_subcommand("oracle", "diff the sweep against brute force");
    add_model_flags(oracle);
    oracle->add_option("--cap", o.cap, "refuse above this many enumerated trees")
        ->check(CLI::PositiveNumber);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check of one swept tree");
    add_model_flags(simulate);
    simulate->add_option("--lambda", o.lambda, "prune the complete tree at this multiplier")
        ->required();
    simulate->add_option("--samples", o.samples, "sample count (default 100000)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", o.seed, "RNG seed (default 12345)");

    CLI::App* example = app.add_subcommand("example", "emit a built-in model as JSON");
    example->add_option("name", o.name, "ex6-bsc | ex7-bec | ex12-geometric | ex13-sum2")
        ->required();
    example->add_option("--kappa", o.kappa, "horizon")->required()->check(CLI::PositiveNumber);
    example->add_option("--p", o.p, "channel/firing parameter (rational)");
    example->add_option("--eps", o.eps, "erasure probability (ex7-bec)");
    example->add_option("--x1", o.x1, "P(X=1) (ex12-geometric, ex13-sum2)");

    CLI::App* bench = app.add_subcommand("bench", "time string vs composition sweeps across kappa");
    add_model_flags(bench);
    bench->add_option("--max-kappa", o.max_kappa, "largest horizon (default: the model's)")
        ->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int c = app.exit(e, out, err);
        return {c == 0 ? 0 : 1, out.str(), err.str()};
    }

    int code = 0;
    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        auto dispatch = [&](auto handler) {
            bool exact = true;
            ParsedModel pm = load_model(o, stdin_text, err, exact);
            return exact ? handler(pm.rmodel, pm.rrule) : handler(pm.fmodel, pm.frule);
        };
        if (cmd == "example")
            code = cmd_example(o, out);
        else if (cmd == "solve")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_solve(m, r, o, out, err); });
        else if (cmd == "curve")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_curve(m, r, o, out); });
        else if (cmd == "bound")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_bound(m, r, o, out); });
        else if (cmd == "lookahead")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_lookahead(m, r, o, out); });
        else if (cmd == "check")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_check(m, r, o, out); });
        else if (cmd == "oracle")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_oracle(m, r, o, out); });
        else if (cmd == "simulate")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_simulate(m, r, o, out); });
        else if (cmd == "bench")
            code = dispatch([&](const auto& m, const auto& r) { return cmd_bench(m, r, o, out, err); });
    } catch (const RefusalError& e) {
        err << "refused: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    }
    return {code, out.str(), err.str()};
}

}  // namespace tst
