#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pbkc {

struct vtree_node {
  int id = 0;
  std::optional<std::string> var; ///< set exactly at leaves
  int left = -1;
  int right = -1;

  bool is_leaf() const { return !left_valid(); }
  bool left_valid() const { return left >= 0; }
};

/// Rooted binary tree whose leaves are in bijection with the variables
/// x1..xn. Internal nodes have exactly two children.
struct vtree {
  std::map<int, vtree_node> nodes;
  int root = 0;

  const vtree_node& node(int id) const;
  bool has_node(int id) const;
  std::size_t leaf_count() const;

  /// Throws invariant_violation unless the node map forms a binary tree
  /// rooted at root whose leaf variables are exactly {x1..xn}.
  void validate() const;

  /// Variable indices (1-based) below a node, ascending.
  const std::set<std::size_t>& vars_below(int id) const;

  /// Leaf holding variable k; throws variable_not_in_vtree when absent.
  int leaf_of(std::size_t var_index) const;

  /// True iff id lies in the subtree rooted at ancestor (inclusive).
  bool in_subtree(int id, int ancestor) const;

  /// Lowest node whose variable set contains all of vs; vs must be nonempty
  /// and covered by the root (throws variable_not_in_vtree otherwise).
  int lowest_covering(const std::set<std::size_t>& vs) const;

  /// Lowest common ancestor of two nodes.
  int lca(int a, int b) const;

  /// Leftmost leaf below the root.
  int leftmost_leaf() const;

private:
  mutable std::map<int, std::set<std::size_t>> vars_cache_;
  mutable std::map<int, int> parent_cache_;
  void build_caches() const;
};

} // namespace pbkc
