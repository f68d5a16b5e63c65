#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pbkc/semiring.hpp"

namespace pbkc {

struct assignment;
struct tensor_train;

/// Diagram node; var is empty exactly for the sink.
struct evdd_node {
  int id = 0;
  std::optional<std::string> var;
};

struct evdd_edge {
  int from = 0;
  int to = 0;
  int bit = 0;
  value weight;
};

/// Non-deterministic edge-valued decision diagram: a DAG with a single
/// source and a single sink, whose b-labeled weighted edges assign to each
/// assignment the sum over consistent source-to-sink paths of the product of
/// edge weights.
///
/// vars lists the read order and must be exactly x1..xn in index order.
/// Nodes with no incoming or no outgoing edges besides the declared
/// source/sink are tolerated; they lie on no source-to-sink path and
/// contribute nothing. Such dead nodes arise from zero rows or unreferenced
/// columns of sparse tensor-train cores.
struct evdd {
  semiring_id semiring = semiring_id::rational;
  std::vector<std::string> vars;
  std::vector<evdd_node> nodes;
  int source = 0;
  int sink = 0;
  std::vector<evdd_edge> edges;

  const evdd_node& node(int id) const;
  bool has_node(int id) const;
  /// Position of a node's variable in vars; vars.size() for the sink.
  std::size_t level(int id) const;

  /// Throws invariant_violation on: unknown node references, bad bits, a
  /// labeled sink or unlabeled non-sink, variables outside vars, incoming
  /// edges at the source, outgoing edges at the sink, a cycle, or a
  /// duplicate node id.
  void validate() const;
};

/// Path-sum semantics via memoized backward recursion; the sink has value 1.
value eval(const evdd& g, const assignment& a);

/// True iff no variable labels two nodes on a common source-to-sink path.
bool check_read_once(const evdd& g);

/// True iff along every edge the variable position strictly increases (the
/// sink counts as past the last variable).
bool check_ordered(const evdd& g);

/// True iff every node has at most one outgoing 0-edge and at most one
/// outgoing 1-edge, counting edges as stored.
bool check_deterministic(const evdd& g);

/// True iff the source reads the first variable and every edge advances by
/// exactly one position, so every source-to-sink path reads all variables in
/// order. Requires an ordered diagram (throws not_ordered).
bool check_complete(const evdd& g);

/// Inserts fresh chain nodes on every variable-skipping edge (the original
/// weight stays on the first chain edge; inserted nodes carry weight-1
/// 0- and 1-edges to the next) and pads above the source when it does not
/// read the first variable. Idempotent; preserves eval. Requires an ordered
/// diagram (throws not_ordered).
evdd complete(const evdd& g);

/// Merges parallel edges with identical (from, to, bit) by summing weights,
/// then removes zero-weight edges whose removal leaves both endpoints with
/// their remaining in/out degree intact. Preserves eval.
evdd normalize_parallel_edges(const evdd& g, double tol = default_float_tol);

/// Reads a tensor train off the completed, normalized diagram: level r nodes
/// are enumerated breadth-first from the source (undiscovered nodes follow in
/// id order) and core r holds one entry per edge between levels r and r+1.
/// Requires an ordered diagram (throws not_ordered).
tensor_train to_tt(const evdd& g);

} // namespace pbkc
