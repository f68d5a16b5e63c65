#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbkc/dense.hpp"
#include "pbkc/semiring.hpp"
#include "pbkc/vtree.hpp"

namespace pbkc {

struct ttn;

enum class gate_kind { input, plus, times };

/// Three-valued answer of the property checks.
enum class tristate { no, yes, unknown };

enum class check_mode { semantic, structural };

struct weighted_edge {
  int gate = 0;
  value weight;
};

/// A circuit gate. Input gates are indicators 1[x = bit]; plus gates sum
/// their children scaled by edge weights; times gates multiply their
/// children. An empty plus gate denotes the constant-0 function and is
/// permitted only as a conversion intermediate.
struct gate {
  int id = 0;
  gate_kind kind = gate_kind::plus;
  std::string var;                      ///< input gates
  int bit = 0;                          ///< input gates
  std::vector<weighted_edge> plus_in;   ///< plus gates
  std::vector<int> times_in;            ///< times gates
  std::optional<int> vnode;             ///< explicit vtree assignment
};

/// Weighted (+, x)-circuit over indicator inputs, optionally carrying a
/// vtree. Gate ids are arbitrary distinct integers.
struct circuit {
  semiring_id semiring = semiring_id::rational;
  std::optional<vtree> vt;
  std::vector<gate> gates;
  std::vector<int> outputs;

  const gate& at(int id) const;
  bool has_gate(int id) const;

  /// Number of variables of the circuit: the vtree's count when present,
  /// otherwise the largest referenced variable index.
  std::size_t var_count() const;

  /// Throws invariant_violation on: duplicate gate ids, unknown references,
  /// a cycle, parallel edges into the same child, an input gate with a bad
  /// variable name or bit, empty outputs, a weight from a foreign semiring,
  /// or a vnode annotation naming a missing vtree node.
  void validate() const;
};

/// Memoized evaluation of the function of gate out at assignment a;
/// variables not read below out are ignored.
value eval(const circuit& c, const assignment& a, int out);

/// Variable index sets (1-based) per gate id.
std::map<int, std::set<std::size_t>> gate_vars(const circuit& c);

/// True iff the children of every times gate have pairwise disjoint
/// variable sets.
bool check_decomposable(const circuit& c);

/// Canonical vtree assignment: each gate maps to the lowest node covering
/// its variables; variable-free gates map to the root's leftmost leaf.
/// Throws variable_not_in_vtree when a circuit variable is missing from v.
std::map<int, int> infer_phi(const circuit& c, const vtree& v);

/// The assignment used by conversions: explicit vnode annotations are kept;
/// unannotated gates get the lowest node covering their own variables and
/// their children's assigned nodes. Coincides with infer_phi on circuits
/// without annotations or variable-free subcircuits.
std::map<int, int> effective_phi(const circuit& c, const vtree& v);

/// The three structuredness conditions for phi: (1) each gate's variables
/// are covered by its node; (2) each times gate has exactly two children
/// assigned into opposite child subtrees of its internal node; (3) each
/// plus child is assigned to its parent's node or a descendant.
/// Variable-free gates are exempt from (2).
bool check_structured(const circuit& c, const vtree& v, const std::map<int, int>& phi);

/// Boolean table over the sorted variables of a gate.
struct support_table {
  std::vector<std::size_t> vars; ///< ascending variable indices
  std::vector<char> bits;        ///< 2^|vars| flags, assignment-indexed
};

/// Support of the function of gate out. Semantic mode tabulates the gate and
/// marks nonzero entries (cancellation-aware); structural mode replaces every
/// weight by its zero test and propagates bottom-up, an over-approximation.
/// Both enumerate 2^|var(out)| entries and respect max_vars.
support_table support(const circuit& c, int out, check_mode mode,
                      std::size_t max_vars = default_max_vars,
                      double tol = default_float_tol);

/// Determinism of every plus gate: all pairwise products of distinct
/// nonzero-weight children are the zero function. Semantic mode checks
/// exhaustively (unknown when a pair exceeds max_vars); structural mode
/// reports yes when all structural supports are pairwise disjoint and
/// unknown otherwise, never no.
tristate check_deterministic(const circuit& c, check_mode mode,
                             std::size_t max_vars = default_max_vars,
                             double tol = default_float_tol);

/// True iff every plus gate is a decision gate: its children are indicators
/// of one variable with distinct bits, or at most two times-gate branches
/// guarded by complementary indicators of one variable, or a single
/// times-gate child.
bool check_decision(const circuit& c, double tol = default_float_tol);

/// A circuit in the layered normal form read off by to_ttn, together with
/// the per-vtree-node order of its plus gates.
struct normalized_circuit {
  circuit c;
  std::map<int, std::vector<int>> node_plus_gates; ///< vtree node -> plus gate ids
};

/// Rewrites a structured circuit into the layered form: outputs are plus
/// gates at the root; plus gates at a leaf have only indicator children of
/// that leaf's variable; plus gates at an internal node have only binary
/// times children whose factors are plus gates at the node's two children.
/// Same-node plus-of-plus edges are flattened by weight distribution;
/// children assigned strictly deeper are promoted with constant-1 gadgets;
/// duplicate edges merge by summing weights. Every original plus gate keeps
/// a normalized image at its node. Throws not_structured when the circuit is
/// not structured by its vtree.
normalized_circuit normalize_for_ttn(const circuit& c);

/// Reads a tree tensor network off the normalized form: d(v) counts the plus
/// gates at v, leaf tensors hold indicator weights, internal tensors hold the
/// weights into the shared times gates. Root gates are ordered outputs-first,
/// so output k is root function k.
ttn to_ttn(const circuit& c);

} // namespace pbkc
