#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pbkc/circuit.hpp"
#include "pbkc/dense.hpp"
#include "pbkc/semiring.hpp"

namespace pbkc {

struct ttn_node {
  int id = 0;
  int left = -1;
  int right = -1;
  std::optional<std::string> var; ///< set exactly at leaves
  std::size_t d = 0;              ///< number of functions carried by the node

  bool is_leaf() const { return left < 0; }
};

/// Tree tensor network over a binary tree whose leaves carry the variables.
/// A leaf v holds a 2 x d(v) tensor (row b, column k); an internal v holds a
/// d(left) x d(right) x d(v) tensor. Entry k of a node's vector is
/// sum_{i,j} A[i,j,k] * left_i * right_j; the root's d functions are the
/// functions represented.
///
/// Tensors are sparse maps; leaf entries are keyed (b, k, 0) and internal
/// entries (i, j, k), all 0-based.
struct ttn {
  semiring_id semiring = semiring_id::rational;
  std::map<int, ttn_node> nodes;
  int root = 0;
  std::map<int, std::map<std::array<std::size_t, 3>, value>> tensors;

  const ttn_node& node(int id) const;
  bool has_node(int id) const;
  std::size_t var_count() const;

  value leaf_weight(int id, std::size_t b, std::size_t k) const;
  value internal_weight(int id, std::size_t i, std::size_t j, std::size_t k) const;
  void set_leaf(int id, std::size_t b, std::size_t k, value v);
  void set_internal(int id, std::size_t i, std::size_t j, std::size_t k, value v);

  /// Variable indices below a node, ascending.
  std::set<std::size_t> vars_below(int id) const;

  /// Throws invariant_violation on: non-tree node links, duplicate or
  /// non-canonical leaf variables, d == 0, tensor indices out of range, or
  /// weights from a foreign semiring.
  void validate() const;
};

/// Bottom-up evaluation; returns the root's d values.
std::vector<value> eval(const ttn& t, const assignment& a);

/// The 2^m x d(v) table of the m-variable functions carried by node id,
/// rows indexed by assignments to the sorted subtree variables.
/// Throws too_many_variables when m > max_vars.
dense_tensor hat_tensor(const ttn& t, int id, std::size_t max_vars = default_max_vars);

/// Decision sparsity patterns: every leaf column touches a single row; at an
/// internal node with a leaf child every slice has at most two nonzero
/// entries whose leaf-side columns are complementary single-sided
/// indicators; at an internal node without a leaf child every slice has at
/// most one nonzero entry. One-nonzero slices are accepted everywhere.
bool check_decision(const ttn& t, double tol = default_float_tol);

/// Determinism: for every node and slice, every pair of distinct nonzero
/// entries (i1,j1), (i2,j2) has elementwise product zero between the child
/// columns i1,i2 or between j1,j2. Semantic mode compares hat-tensor columns
/// (unknown when a child exceeds max_vars); structural mode propagates
/// support over-approximations and answers yes or unknown only.
tristate check_deterministic(const ttn& t, check_mode mode,
                             std::size_t max_vars = default_max_vars,
                             double tol = default_float_tol);

/// Layered circuit with one plus gate per node function: leaf gates weight
/// the two indicators of the leaf variable, internal gates weight shared
/// binary times gates over the children's plus gates; zero weights are
/// omitted. The circuit carries the tree as its vtree (same node ids) and
/// explicit vnode annotations, and lists the root gates as outputs.
circuit to_circuit(const ttn& t);

} // namespace pbkc
