#include "pbkc/vtree.hpp"

#include <stdexcept>

#include "pbkc/errors.hpp"
#include "pbkc/var_names.hpp"

namespace pbkc {

std::size_t parse_var_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'x' || name[1] == '0') return 0;
  std::size_t k = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return 0;
    k = k * 10 + static_cast<std::size_t>(name[i] - '0');
  }
  return k;
}

std::string var_name(std::size_t index) { return "x" + std::to_string(index); }

const vtree_node& vtree::node(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end())
    throw invariant_violation("unknown vtree node id " + std::to_string(id));
  return it->second;
}

bool vtree::has_node(int id) const { return nodes.count(id) != 0; }

std::size_t vtree::leaf_count() const {
  std::size_t k = 0;
  for (const auto& [id, nd] : nodes)
    if (nd.is_leaf()) ++k;
  return k;
}

void vtree::validate() const {
  if (!has_node(root)) throw invariant_violation("vtree root id missing");
  std::set<int> seen;
  std::set<std::size_t> vars;
  // Walk from the root; every node must be visited exactly once.
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second)
      throw invariant_violation("vtree node " + std::to_string(id) +
                                " reached twice (not a tree)");
    const vtree_node& nd = node(id);
    bool l = nd.left >= 0, r = nd.right >= 0;
    if (l != r)
      throw invariant_violation("vtree node " + std::to_string(id) +
                                " must have zero or two children");
    if (nd.is_leaf()) {
      if (!nd.var)
        throw invariant_violation("vtree leaf " + std::to_string(id) +
                                  " carries no variable");
      std::size_t k = parse_var_index(*nd.var);
      if (k == 0)
        throw invariant_violation("vtree leaf variable \"" + *nd.var +
                                  "\" is not of the form x<k>");
      if (!vars.insert(k).second)
        throw invariant_violation("variable " + *nd.var + " on two vtree leaves");
    } else {
      if (nd.var)
        throw invariant_violation("internal vtree node " + std::to_string(id) +
                                  " carries a variable");
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }
  if (seen.size() != nodes.size())
    throw invariant_violation("vtree has nodes unreachable from the root");
  for (std::size_t k = 1; k <= vars.size(); ++k)
    if (!vars.count(k))
      throw invariant_violation("vtree variables must be exactly x1..xn");
}

void vtree::build_caches() const {
  if (!vars_cache_.empty()) return;
  // Bottom-up variable sets and child->parent links.
  std::vector<int> order;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const vtree_node& nd = node(id);
    if (!nd.is_leaf()) {
      parent_cache_[nd.left] = id;
      parent_cache_[nd.right] = id;
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const vtree_node& nd = node(*it);
    std::set<std::size_t>& vs = vars_cache_[*it];
    if (nd.is_leaf()) {
      vs.insert(parse_var_index(*nd.var));
    } else {
      const auto& lv = vars_cache_.at(nd.left);
      const auto& rv = vars_cache_.at(nd.right);
      vs.insert(lv.begin(), lv.end());
      vs.insert(rv.begin(), rv.end());
    }
  }
}

const std::set<std::size_t>& vtree::vars_below(int id) const {
  build_caches();
  auto it = vars_cache_.find(id);
  if (it == vars_cache_.end())
    throw invariant_violation("unknown vtree node id " + std::to_string(id));
  return it->second;
}

int vtree::leaf_of(std::size_t var_index) const {
  for (const auto& [id, nd] : nodes)
    if (nd.is_leaf() && nd.var && parse_var_index(*nd.var) == var_index) return id;
  throw variable_not_in_vtree(var_name(var_index) + " labels no vtree leaf");
}

bool vtree::in_subtree(int id, int ancestor) const {
  build_caches();
  int cur = id;
  while (true) {
    if (cur == ancestor) return true;
    auto it = parent_cache_.find(cur);
    if (it == parent_cache_.end()) return false;
    cur = it->second;
  }
}

int vtree::lowest_covering(const std::set<std::size_t>& vs) const {
  if (vs.empty()) throw invariant_violation("lowest_covering of an empty set");
  for (std::size_t k : vs)
    if (!vars_below(root).count(k))
      throw variable_not_in_vtree(var_name(k) + " is not in the vtree");
  int cur = root;
  while (true) {
    const vtree_node& nd = node(cur);
    if (nd.is_leaf()) return cur;
    auto covers = [&](int child) {
      const auto& cv = vars_below(child);
      for (std::size_t k : vs)
        if (!cv.count(k)) return false;
      return true;
    };
    if (covers(nd.left))
      cur = nd.left;
    else if (covers(nd.right))
      cur = nd.right;
    else
      return cur;
  }
}

int vtree::lca(int a, int b) const {
  build_caches();
  std::set<int> anc;
  int cur = a;
  while (true) {
    anc.insert(cur);
    auto it = parent_cache_.find(cur);
    if (it == parent_cache_.end()) break;
    cur = it->second;
  }
  cur = b;
  while (!anc.count(cur)) cur = parent_cache_.at(cur);
  return cur;
}

int vtree::leftmost_leaf() const {
  int cur = root;
  while (!node(cur).is_leaf()) cur = node(cur).left;
  return cur;
}

} // namespace pbkc
