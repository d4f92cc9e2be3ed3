#include "tst/io.hpp"

#include <tuple>
#include <type_traits>

#include "json.hpp"

namespace tst {

namespace {

using ojson = nlohmann::ordered_json;

// ---- parsing helpers -------------------------------------------------------

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("model: " + msg); }

struct PVal {
    bool is_float = false;
    Rat r;
    double d = 0.0;
};

PVal parse_prob(const ojson& j, const std::string& where) {
    if (j.is_string()) {
        Rat r(0);
        try {
            r = Rat(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(where + ": " + e.what());
        }
        return {false, r, r.to_double()};
    }
    if (j.is_number_integer()) {
        long v = j.get<long>();
        return {false, Rat(v), static_cast<double>(v)};
    }
    if (j.is_number_float()) return {true, Rat(0), j.get<double>()};
    fail(where + ": expected a \"p/q\" string or a number");
}

std::vector<std::string> parse_labels(const ojson& j, const char* field) {
    if (!j.is_array() || j.empty()) fail(std::string(field) + ": expected a nonempty array");
    std::vector<std::string> out;
    for (const ojson& e : j) {
        if (!e.is_string()) fail(std::string(field) + ": entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

int parse_symbol(const ojson& j, const std::vector<std::string>& labels, const std::string& where) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == s) return static_cast<int>(i);
        fail(where + ": unknown x symbol '" + s + "'");
    }
    if (j.is_number_integer()) {
        long v = j.get<long>();
        if (v < 0 || v >= static_cast<long>(labels.size()))
            fail(where + ": x index " + std::to_string(v) + " out of range");
        return static_cast<int>(v);
    }
    fail(where + ": expected an x label or index");
}

// ---- rendering helpers -----------------------------------------------------

template <class N>
const char* mode_name() {
    return numeric_traits<N>::exact ? "exact" : "float";
}

std::string symbol_name(int g, const std::vector<std::string>& y_labels) {
    if (g >= 0 && g < static_cast<int>(y_labels.size())) return y_labels[g];
    return std::to_string(g);
}

std::string path_name(const std::string& key, const std::vector<std::string>& y_labels) {
    if (key.empty()) return "\xCF\x81";  // rho
    std::string out;
    for (char c : key) out += symbol_name(static_cast<unsigned char>(c), y_labels);
    return out;
}

template <class N>
std::string tree_text(const StoppingTree<N>& t, const std::vector<std::string>& y_labels) {
    using T = numeric_traits<N>;
    std::string out;
    auto walk = [&](auto&& self, const std::string& key) -> void {
        const TreeNode<N>& node = t.at(key);
        out.append(2 * key.size(), ' ');
        out += path_name(key, y_labels);
        out += node.internal ? " internal" : " leaf";
        out += " w=" + T::str(node.stats.w);
        out += " a=" + T::str(node.stats.a);
        out += " b=" + T::str(node.stats.b);
        out += '\n';
        if (!node.internal) return;
        for (int g = 0;; ++g) {
            std::string ck = key + static_cast<char>(g);
            if (t.nodes.find(ck) == t.nodes.end()) break;
            self(self, ck);
        }
    };
    walk(walk, std::string());
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

template <class N>
std::string tree_dot(const StoppingTree<N>& t, const std::vector<std::string>& y_labels) {
    using T = numeric_traits<N>;
    std::string out = "digraph stopping_tree {\n";
    int next_id = 0;
    auto walk = [&](auto&& self, const std::string& key, int parent, int edge) -> void {
        const TreeNode<N>& node = t.at(key);
        int id = next_id++;
        out += "  n" + std::to_string(id);
        out += node.internal ? " [shape=ellipse, label=\"" : " [shape=box, label=\"";
        out += dot_escape(path_name(key, y_labels)) + " | " + T::str(node.stats.a) + " | " +
               T::str(node.stats.b);
        out += "\"];\n";
        if (parent >= 0)
            out += "  n" + std::to_string(parent) + " -> n" + std::to_string(id) + " [label=\"" +
                   dot_escape(symbol_name(edge, y_labels)) + "\"];\n";
        if (!node.internal) return;
        for (int g = 0;; ++g) {
            std::string ck = key + static_cast<char>(g);
            if (t.nodes.find(ck) == t.nodes.end()) break;
            self(self, ck, id, g);
        }
    };
    walk(walk, std::string(), -1, -1);
    out += "}\n";
    return out;
}

template <class C>
std::string csv_of(const C& c) {
    std::string out = "m,lambda,alpha,delay\n";
    using T = numeric_traits<decltype(c.entries.front().alpha)>;
    for (std::size_t m = 0; m < c.entries.size(); ++m) {
        out += std::to_string(m) + ',' + c.entries[m].lambda.str() + ',' +
               T::str(c.entries[m].alpha) + ',' + T::str(c.entries[m].delay) + '\n';
    }
    return out;
}

template <class N, class C>
ojson curve_common(const C& c) {
    using T = numeric_traits<N>;
    ojson j;
    j["mode"] = mode_name<N>();
    j["M"] = c.M();
    if (c.entries.size() > 1)
        j["lambda1"] = c.entries[1].lambda.str();
    else
        j["lambda1"] = nullptr;
    j["vertices"] = ojson::array();
    for (const auto& [alpha, delay] : c.vertices())
        j["vertices"].push_back(ojson::array({T::str(alpha), T::str(delay)}));
    return j;
}

template <class N>
std::string curve_json(const BreakpointCurve<N>& c, const std::vector<std::string>& y_labels) {
    using T = numeric_traits<N>;
    ojson j = curve_common<N>(c);
    j["entries"] = ojson::array();
    for (std::size_t m = 0; m < c.entries.size(); ++m) {
        ojson e;
        e["m"] = m;
        e["lambda"] = c.entries[m].lambda.str();
        e["alpha"] = T::str(c.entries[m].alpha);
        e["delay"] = T::str(c.entries[m].delay);
        e["tree"] = tree_text(c.entries[m].tree, y_labels);
        j["entries"].push_back(std::move(e));
    }
    j["terminal"] = tree_text(c.terminal, y_labels);
    j["warnings"] = ojson::array();
    return j.dump(2) + "\n";
}

template <class N>
std::string comp_curve_json(const CompCurve<N>& c) {
    using T = numeric_traits<N>;
    ojson j = curve_common<N>(c);
    j["method"] = "comp";
    j["fell_back"] = c.fell_back;
    j["entries"] = ojson::array();
    for (std::size_t m = 0; m < c.entries.size(); ++m) {
        ojson e;
        e["m"] = m;
        e["lambda"] = c.entries[m].lambda.str();
        e["alpha"] = T::str(c.entries[m].alpha);
        e["delay"] = T::str(c.entries[m].delay);
        e["internal_classes"] = c.entries[m].internal_classes;
        j["entries"].push_back(std::move(e));
    }
    j["warnings"] = ojson::array();
    if (c.fell_back)
        j["warnings"].push_back(
            "rule not certified permutation-invariant; fell back to the string-level sweep");
    return j.dump(2) + "\n";
}

template <class N>
ojson rule_json(const StoppingRule<N>& rule, const std::vector<std::string>& x_labels) {
    using T = numeric_traits<N>;
    ojson r;
    switch (rule.kind) {
        case RuleKind::first_hit: {
            r["type"] = "first_hit";
            r["targets"] = ojson::array();
            for (int t : rule.targets) r["targets"].push_back(x_labels[t]);
            break;
        }
        case RuleKind::sum_threshold:
            r["type"] = "sum_threshold";
            r["weights"] = rule.weights;
            r["threshold"] = rule.threshold;
            break;
        case RuleKind::table_prefix: {
            r["type"] = "table";
            r["entries"] = ojson::array();
            for (const auto& [key, q] : rule.prefix_entries) {
                ojson e;
                e["x"] = ojson::array();
                for (char c : key) e["x"].push_back(x_labels[static_cast<unsigned char>(c)]);
                e["q"] = T::str(q);
                r["entries"].push_back(std::move(e));
            }
            break;
        }
        case RuleKind::table_composition: {
            r["type"] = "table";
            r["entries"] = ojson::array();
            for (const auto& [counts, q] : rule.comp_entries) {
                ojson e;
                e["counts"] = counts;
                e["q"] = T::str(q);
                r["entries"].push_back(std::move(e));
            }
            break;
        }
    }
    return r;
}

template <class N>
std::string model_json(const JointModel<N>& m, const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    ojson j;
    j["x_alphabet"] = m.x_labels;
    j["y_alphabet"] = m.y_labels;
    j["pmf"] = ojson::array();
    for (int x = 0; x < m.nx(); ++x) {
        ojson row = ojson::array();
        for (int y = 0; y < m.ny(); ++y) row.push_back(T::str(m.pmf[x][y]));
        j["pmf"].push_back(std::move(row));
    }
    j["kappa"] = m.kappa;
    j["rule"] = rule_json(rule, m.x_labels);
    return j.dump(2) + "\n";
}

}  // namespace

// ---- model parsing ---------------------------------------------------------

ParsedModel parse_model_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("JSON parse error: ") + e.what());
    }
    if (!j.is_object()) fail("top level must be an object");
    for (const char* field : {"x_alphabet", "y_alphabet", "pmf", "kappa", "rule"})
        if (!j.contains(field)) fail(std::string("missing field ") + field);

    ParsedModel out;
    std::vector<std::string> xl = parse_labels(j["x_alphabet"], "x_alphabet");
    std::vector<std::string> yl = parse_labels(j["y_alphabet"], "y_alphabet");
    const int nx = static_cast<int>(xl.size());
    const int ny = static_cast<int>(yl.size());

    if (!j["kappa"].is_number_integer()) fail("kappa: expected an integer");
    int kappa = j["kappa"].get<int>();

    std::string float_trigger;

    const ojson& pj = j["pmf"];
    if (!pj.is_array() || static_cast<int>(pj.size()) != nx)
        fail("pmf: row count != |x_alphabet|");
    std::vector<std::vector<PVal>> pmf(nx);
    for (int x = 0; x < nx; ++x) {
        if (!pj[x].is_array() || static_cast<int>(pj[x].size()) != ny)
            fail("pmf: row " + std::to_string(x) + " must have |y_alphabet| entries");
        for (int y = 0; y < ny; ++y) {
            std::string where =
                "pmf[" + std::to_string(x) + "][" + std::to_string(y) + "]";
            PVal v = parse_prob(pj[x][y], where);
            if (v.is_float && float_trigger.empty()) float_trigger = where;
            pmf[x].push_back(std::move(v));
        }
    }

    const ojson& rj = j["rule"];
    if (!rj.is_object() || !rj.contains("type") || !rj["type"].is_string())
        fail("rule: expected an object with a string `type`");
    const std::string type = rj["type"].get<std::string>();

    StoppingRule<Rat> rr;
    std::vector<std::pair<std::string, PVal>> table_q;  // deferred q values
    std::vector<std::vector<int>> table_counts;
    std::vector<std::string> table_prefix;
    bool comp_table = false;
    if (type == "first_hit") {
        if (!rj.contains("targets") || !rj["targets"].is_array())
            fail("rule: first_hit needs a `targets` array");
        std::vector<int> targets;
        for (const ojson& t : rj["targets"])
            targets.push_back(parse_symbol(t, xl, "rule.targets"));
        rr = make_first_hit<Rat>(std::move(targets));
    } else if (type == "sum_threshold") {
        if (!rj.contains("weights") || !rj["weights"].is_array())
            fail("rule: sum_threshold needs a `weights` array");
        if (!rj.contains("threshold") || !rj["threshold"].is_number_integer())
            fail("rule: sum_threshold needs an integer `threshold`");
        std::vector<long> w;
        for (const ojson& e : rj["weights"]) {
            if (!e.is_number_integer()) fail("rule.weights: entries must be integers");
            w.push_back(e.get<long>());
        }
        rr = make_sum_threshold<Rat>(std::move(w), rj["threshold"].get<long>());
    } else if (type == "table") {
        if (!rj.contains("entries") || !rj["entries"].is_array())
            fail("rule: table needs an `entries` array");
        int idx = 0;
        for (const ojson& e : rj["entries"]) {
            std::string where = "rule.entries[" + std::to_string(idx++) + "]";
            if (!e.is_object() || !e.contains("q")) fail(where + ": needs a `q` value");
            bool has_x = e.contains("x"), has_c = e.contains("counts");
            if (has_x == has_c) fail(where + ": needs exactly one of `x` or `counts`");
            PVal q = parse_prob(e["q"], where + ".q");
            if (q.is_float && float_trigger.empty()) float_trigger = where + ".q";
            if (has_x) {
                if (comp_table) fail("rule.entries: cannot mix `x` and `counts` entries");
                if (!e["x"].is_array()) fail(where + ".x: expected an array");
                std::string key;
                for (const ojson& s : e["x"])
                    key.push_back(static_cast<char>(parse_symbol(s, xl, where + ".x")));
                table_prefix.push_back(key);
                table_q.emplace_back(where, std::move(q));
            } else {
                if (!table_prefix.empty())
                    fail("rule.entries: cannot mix `x` and `counts` entries");
                comp_table = true;
                if (!e["counts"].is_array()) fail(where + ".counts: expected an array");
                std::vector<int> counts;
                for (const ojson& v : e["counts"]) {
                    if (!v.is_number_integer()) fail(where + ".counts: entries must be integers");
                    counts.push_back(v.get<int>());
                }
                table_counts.push_back(std::move(counts));
                table_q.emplace_back(where, std::move(q));
            }
        }
    } else {
        fail("unknown rule type '" + type + "' (supported: first_hit, sum_threshold, table)");
    }

    out.exact = float_trigger.empty();
    if (!out.exact)
        out.notices.push_back(float_trigger +
                              " is a floating-point literal; model switches to float mode");

    // assemble both numeric views; the inactive one is still usable
    auto build = [&](auto tag) {
        using N = decltype(tag);
        JointModel<N> m;
        m.x_labels = xl;
        m.y_labels = yl;
        m.kappa = kappa;
        m.pmf.assign(nx, {});
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                if constexpr (std::is_same_v<N, Rat>)
                    m.pmf[x].push_back(pmf[x][y].r);
                else
                    m.pmf[x].push_back(pmf[x][y].d);
            }
        StoppingRule<N> rule;
        if (type == "table") {
            if (comp_table) {
                std::map<std::vector<int>, N> entries;
                for (std::size_t i = 0; i < table_counts.size(); ++i) {
                    if constexpr (std::is_same_v<N, Rat>)
                        entries[table_counts[i]] = table_q[i].second.r;
                    else
                        entries[table_counts[i]] = table_q[i].second.d;
                }
                rule = make_table_composition<N>(std::move(entries));
            } else {
                std::map<std::string, N> entries;
                for (std::size_t i = 0; i < table_prefix.size(); ++i) {
                    if constexpr (std::is_same_v<N, Rat>)
                        entries[table_prefix[i]] = table_q[i].second.r;
                    else
                        entries[table_prefix[i]] = table_q[i].second.d;
                }
                rule = make_table_prefix<N>(std::move(entries));
            }
        } else {
            if constexpr (std::is_same_v<N, Rat>)
                rule = rr;
            else
                rule = to_float(rr);
        }
        return std::pair<JointModel<N>, StoppingRule<N>>{std::move(m), std::move(rule)};
    };

    std::tie(out.fmodel, out.frule) = build(double{});
    if (out.exact) std::tie(out.rmodel, out.rrule) = build(Rat(0));

    // schema shape is fine; now enforce the semantic invariants
    std::vector<std::string> issues =
        out.exact ? validate_model(out.rmodel) : validate_model(out.fmodel);
    std::vector<std::string> rissues =
        out.exact ? validate_rule(out.rmodel, out.rrule) : validate_rule(out.fmodel, out.frule);
    issues.insert(issues.end(), rissues.begin(), rissues.end());
    if (!issues.empty()) {
        std::string msg = issues.front();
        for (std::size_t i = 1; i < issues.size(); ++i) msg += "; " + issues[i];
        fail(msg);
    }
    return out;
}

JointModel<double> to_float(const JointModel<Rat>& m) {
    JointModel<double> f;
    f.x_labels = m.x_labels;
    f.y_labels = m.y_labels;
    f.kappa = m.kappa;
    f.pmf.assign(m.nx(), {});
    for (int x = 0; x < m.nx(); ++x)
        for (int y = 0; y < m.ny(); ++y) f.pmf[x].push_back(m.pmf[x][y].to_double());
    return f;
}

StoppingRule<double> to_float(const StoppingRule<Rat>& rule) {
    StoppingRule<double> f;
    f.kind = rule.kind;
    f.targets = rule.targets;
    f.weights = rule.weights;
    f.threshold = rule.threshold;
    for (const auto& [k, q] : rule.prefix_entries) f.prefix_entries[k] = q.to_double();
    for (const auto& [k, q] : rule.comp_entries) f.comp_entries[k] = q.to_double();
    return f;
}

std::string model_to_json(const JointModel<Rat>& m, const StoppingRule<Rat>& rule) {
    return model_json(m, rule);
}
std::string model_to_json(const JointModel<double>& m, const StoppingRule<double>& rule) {
    return model_json(m, rule);
}

// ---- exports ----------------------------------------------------------------

std::string curve_to_csv(const BreakpointCurve<Rat>& c) { return csv_of(c); }
std::string curve_to_csv(const BreakpointCurve<double>& c) { return csv_of(c); }
std::string curve_to_csv(const CompCurve<Rat>& c) { return csv_of(c); }
std::string curve_to_csv(const CompCurve<double>& c) { return csv_of(c); }

std::string curve_to_json(const BreakpointCurve<Rat>& c, const std::vector<std::string>& y_labels) {
    return curve_json(c, y_labels);
}
std::string curve_to_json(const BreakpointCurve<double>& c,
                          const std::vector<std::string>& y_labels) {
    return curve_json(c, y_labels);
}
std::string curve_to_json(const CompCurve<Rat>& c) { return comp_curve_json(c); }
std::string curve_to_json(const CompCurve<double>& c) { return comp_curve_json(c); }

std::string tree_to_text(const StoppingTree<Rat>& t, const std::vector<std::string>& y_labels) {
    return tree_text(t, y_labels);
}
std::string tree_to_text(const StoppingTree<double>& t, const std::vector<std::string>& y_labels) {
    return tree_text(t, y_labels);
}

std::string tree_to_dot(const StoppingTree<Rat>& t, const std::vector<std::string>& y_labels) {
    return tree_dot(t, y_labels);
}
std::string tree_to_dot(const StoppingTree<double>& t, const std::vector<std::string>& y_labels) {
    return tree_dot(t, y_labels);
}

}  // namespace tst
