#pragma once

#include <string>
#include <vector>

#include "tst/perm.hpp"
#include "tst/solver.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// Model files are JSON:
//   {
//     "x_alphabet": ["0","1"], "y_alphabet": ["0","1"],
//     "pmf": [["3/8","1/8"],["1/8","3/8"]],   // row = x, column = y
//     "kappa": 2,
//     "rule": {"type": "first_hit", "targets": ["1"]}
//   }
// Probabilities are exact-rational strings ("3/4") or JSON numbers; integers
// stay exact, any fractional literal switches the whole model to float mode
// (recorded as a notice, surfaced on stderr by the CLI). Rule shapes:
//   first_hit:     {"type":"first_hit","targets":[labels or indices]}
//   sum_threshold: {"type":"sum_threshold","weights":[ints],"threshold":int}
//   table:         {"type":"table","entries":[{"x":[labels],"q":v}, ...]}
//                  or entries of {"counts":[ints],"q":v} for a composition
//                  table (the two entry shapes cannot be mixed)
// ---------------------------------------------------------------------------

struct ParsedModel {
    bool exact = true;
    JointModel<Rat> rmodel;      // valid iff exact
    StoppingRule<Rat> rrule;     // valid iff exact
    JointModel<double> fmodel;   // always valid
    StoppingRule<double> frule;  // always valid
    std::vector<std::string> notices;
};

// Throws std::invalid_argument with field-level messages on schema errors.
ParsedModel parse_model_json(const std::string& text);

std::string model_to_json(const JointModel<Rat>& m, const StoppingRule<Rat>& rule);
std::string model_to_json(const JointModel<double>& m, const StoppingRule<double>& rule);

JointModel<double> to_float(const JointModel<Rat>& m);
StoppingRule<double> to_float(const StoppingRule<Rat>& rule);

// ---------------------------------------------------------------------------
// Exports. All emitters are deterministic byte-for-byte for a fixed input;
// numbers render as p/q strings in exact mode and 17-significant-digit
// decimals in float mode, with the literal `inf` for an infinite multiplier.
// ---------------------------------------------------------------------------

// CSV: header `m,lambda,alpha,delay`, one row per curve entry (m = 0..M).
std::string curve_to_csv(const BreakpointCurve<Rat>& c);
std::string curve_to_csv(const BreakpointCurve<double>& c);
std::string curve_to_csv(const CompCurve<Rat>& c);
std::string curve_to_csv(const CompCurve<double>& c);

// JSON: mode, M, lambda1, entries (with nested-text tree dumps or internal
// class lists), vertex list, and warnings.
std::string curve_to_json(const BreakpointCurve<Rat>& c,
                          const std::vector<std::string>& y_labels = {});
std::string curve_to_json(const BreakpointCurve<double>& c,
                          const std::vector<std::string>& y_labels = {});
std::string curve_to_json(const CompCurve<Rat>& c);
std::string curve_to_json(const CompCurve<double>& c);

// Nested-text dump: one line per node, two-space indent per level, children
// in symbol order. The root prints as the rho glyph.
std::string tree_to_text(const StoppingTree<Rat>& t,
                         const std::vector<std::string>& y_labels = {});
std::string tree_to_text(const StoppingTree<double>& t,
                         const std::vector<std::string>& y_labels = {});

// Graphviz DOT: preorder ids n0, n1, ...; labels "y-string | a | b"; leaves
// drawn as boxes, internal nodes as ellipses; edges labeled by the symbol.
std::string tree_to_dot(const StoppingTree<Rat>& t,
                        const std::vector<std::string>& y_labels = {});
std::string tree_to_dot(const StoppingTree<double>& t,
                        const std::vector<std::string>& y_labels = {});

}  // namespace tst
