#include "pbkc/ttn.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "pbkc/var_names.hpp"
#include "pbkc/vtree.hpp"

namespace pbkc {

const ttn_node& ttn::node(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end())
    throw invariant_violation("unknown tree node id " + std::to_string(id));
  return it->second;
}

bool ttn::has_node(int id) const { return nodes.count(id) != 0; }

std::size_t ttn::var_count() const {
  std::size_t n = 0;
  for (const auto& [id, nd] : nodes)
    if (nd.is_leaf()) ++n;
  return n;
}

value ttn::leaf_weight(int id, std::size_t b, std::size_t k) const {
  auto it = tensors.find(id);
  if (it == tensors.end()) return zero(semiring);
  auto e = it->second.find({b, k, 0});
  return e == it->second.end() ? zero(semiring) : e->second;
}

value ttn::internal_weight(int id, std::size_t i, std::size_t j, std::size_t k) const {
  auto it = tensors.find(id);
  if (it == tensors.end()) return zero(semiring);
  auto e = it->second.find({i, j, k});
  return e == it->second.end() ? zero(semiring) : e->second;
}

void ttn::set_leaf(int id, std::size_t b, std::size_t k, value v) {
  if (is_zero(v, 0.0))
    tensors[id].erase({b, k, 0});
  else
    tensors[id].insert_or_assign({b, k, 0}, std::move(v));
}

void ttn::set_internal(int id, std::size_t i, std::size_t j, std::size_t k, value v) {
  if (is_zero(v, 0.0))
    tensors[id].erase({i, j, k});
  else
    tensors[id].insert_or_assign({i, j, k}, std::move(v));
}

std::set<std::size_t> ttn::vars_below(int id) const {
  std::set<std::size_t> vs;
  std::function<void(int)> go = [&](int nid) {
    const ttn_node& nd = node(nid);
    if (nd.is_leaf()) {
      vs.insert(parse_var_index(*nd.var));
      return;
    }
    go(nd.left);
    go(nd.right);
  };
  go(id);
  return vs;
}

void ttn::validate() const {
  if (nodes.empty()) throw invariant_violation("tree has no nodes");
  if (!has_node(root)) throw invariant_violation("root id is not a node");
  for (const auto& [id, nd] : nodes)
    if (nd.id != id)
      throw invariant_violation("node id mismatch at " + std::to_string(id));

  std::unordered_set<int> visited;
  std::set<std::size_t> vars;
  std::function<void(int)> walk = [&](int id) {
    if (!visited.insert(id).second)
      throw invariant_violation("node " + std::to_string(id) +
                                " is reachable more than once");
    const ttn_node& nd = node(id);
    if (nd.d == 0)
      throw invariant_violation("node " + std::to_string(id) + " has d = 0");
    if ((nd.left < 0) != (nd.right < 0))
      throw invariant_violation("node " + std::to_string(id) +
                                " must have zero or two children");
    if (nd.is_leaf()) {
      if (!nd.var)
        throw invariant_violation("leaf " + std::to_string(id) + " carries no variable");
      std::size_t k = parse_var_index(*nd.var);
      if (k == 0)
        throw invariant_violation("leaf variable \"" + *nd.var +
                                  "\" is not of the form x<k>");
      if (!vars.insert(k).second)
        throw invariant_violation("variable " + *nd.var + " appears on two leaves");
    } else {
      if (nd.var)
        throw invariant_violation("internal node " + std::to_string(id) +
                                  " carries a variable");
      walk(nd.left);
      walk(nd.right);
    }
  };
  walk(root);
  if (visited.size() != nodes.size())
    throw invariant_violation("tree has nodes unreachable from the root");
  std::size_t n = vars.size();
  for (std::size_t k = 1; k <= n; ++k)
    if (!vars.count(k))
      throw invariant_violation("leaf variables must be exactly x1..xn");

  for (const auto& [id, entries] : tensors) {
    const ttn_node& nd = node(id); // throws for foreign ids
    for (const auto& [key, w] : entries) {
      if (w.semiring() != semiring)
        throw invariant_violation("tensor entry from a foreign semiring");
      if (nd.is_leaf()) {
        if (key[0] > 1 || key[1] >= nd.d || key[2] != 0)
          throw invariant_violation("leaf tensor index out of range at node " +
                                    std::to_string(id));
      } else {
        if (key[0] >= node(nd.left).d || key[1] >= node(nd.right).d ||
            key[2] >= nd.d)
          throw invariant_violation("tensor index out of range at node " +
                                    std::to_string(id));
      }
    }
  }
}

namespace {

std::vector<value> eval_vec(const ttn& t, const assignment& a, int id) {
  const ttn_node& nd = t.node(id);
  std::vector<value> out(nd.d, zero(t.semiring));
  if (nd.is_leaf()) {
    std::size_t k = parse_var_index(*nd.var);
    if (k == 0 || k > a.size())
      throw unassigned_variable("variable " + *nd.var +
                                " is not covered by the assignment");
    auto it = t.tensors.find(id);
    if (it != t.tensors.end())
      for (const auto& [key, w] : it->second)
        if (key[0] == a[k - 1]) out[key[1]] = add(out[key[1]], w);
    return out;
  }
  std::vector<value> l = eval_vec(t, a, nd.left);
  std::vector<value> r = eval_vec(t, a, nd.right);
  auto it = t.tensors.find(id);
  if (it != t.tensors.end())
    for (const auto& [key, w] : it->second)
      out[key[2]] = add(out[key[2]], mul(w, mul(l[key[0]], r[key[1]])));
  return out;
}

} // namespace

std::vector<value> eval(const ttn& t, const assignment& a) {
  return eval_vec(t, a, t.root);
}

dense_tensor hat_tensor(const ttn& t, int id, std::size_t max_vars) {
  std::size_t m = t.vars_below(id).size();
  if (m > max_vars)
    throw too_many_variables(std::to_string(m) + " subtree variables exceeds cap " +
                             std::to_string(max_vars));

  std::function<dense_tensor(int)> hat = [&](int nid) -> dense_tensor {
    const ttn_node& nd = t.node(nid);
    if (nd.is_leaf()) {
      dense_tensor h = dense_tensor::zeros(t.semiring, {2, nd.d});
      auto it = t.tensors.find(nid);
      if (it != t.tensors.end())
        for (const auto& [key, w] : it->second) h.at({key[0], key[1]}) = w;
      return h;
    }
    dense_tensor hl = hat(nd.left);
    dense_tensor hr = hat(nd.right);
    std::set<std::size_t> sl = t.vars_below(nd.left);
    std::set<std::size_t> sr = t.vars_below(nd.right);
    std::vector<std::size_t> vl(sl.begin(), sl.end());
    std::vector<std::size_t> vr(sr.begin(), sr.end());
    std::vector<std::size_t> vv;
    std::merge(vl.begin(), vl.end(), vr.begin(), vr.end(), std::back_inserter(vv));
    std::size_t mm = vv.size(), ml = vl.size(), mr = vr.size();
    dense_tensor h = dense_tensor::zeros(t.semiring, {std::size_t(1) << mm, nd.d});
    const auto it = t.tensors.find(nid);
    if (it == t.tensors.end()) return h;
    for (std::size_t row = 0; row < (std::size_t(1) << mm); ++row) {
      // Split the row over the interleaved child variable lists.
      std::size_t rl = 0, rr = 0, pl = 0, pr = 0;
      for (std::size_t p = 0; p < mm; ++p) {
        std::size_t bit = (row >> (mm - 1 - p)) & 1u;
        if (pl < ml && vl[pl] == vv[p]) {
          rl = (rl << 1) | bit;
          ++pl;
        } else {
          rr = (rr << 1) | bit;
          ++pr;
        }
      }
      (void)mr;
      (void)pr;
      for (const auto& [key, w] : it->second) {
        value term = mul(w, mul(hl.at({rl, key[0]}), hr.at({rr, key[1]})));
        value& slot = h.at({row, key[2]});
        slot = add(slot, term);
      }
    }
    return h;
  };
  return hat(id);
}

namespace {

/// Nonzero rows of a leaf column: bit 0 / bit 1 presence.
std::pair<bool, bool> leaf_column_rows(const ttn& t, int leaf, std::size_t k,
                                       double tol) {
  return {!is_zero(t.leaf_weight(leaf, 0, k), tol),
          !is_zero(t.leaf_weight(leaf, 1, k), tol)};
}

/// Whether column a can play the 1[x=0] role and column b the 1[x=1] role
/// (all-zero columns may play either).
bool complementary_pair(const ttn& t, int leaf, std::size_t a, std::size_t b,
                        double tol) {
  auto [a0, a1] = leaf_column_rows(t, leaf, a, tol);
  auto [b0, b1] = leaf_column_rows(t, leaf, b, tol);
  auto fits = [](bool r0, bool r1, int side) {
    return side == 0 ? !r1 : !r0; // support within the named row only
  };
  return (fits(a0, a1, 0) && fits(b0, b1, 1)) || (fits(a0, a1, 1) && fits(b0, b1, 0));
}

} // namespace

bool check_decision(const ttn& t, double tol) {
  double tl = effective_tol(t.semiring, tol);
  for (const auto& [id, nd] : t.nodes) {
    auto it = t.tensors.find(id);
    if (nd.is_leaf()) {
      for (std::size_t k = 0; k < nd.d; ++k) {
        auto [r0, r1] = leaf_column_rows(t, id, k, tl);
        if (r0 && r1) return false;
      }
      continue;
    }
    std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> slices;
    if (it != t.tensors.end())
      for (const auto& [key, w] : it->second)
        if (!is_zero(w, tl)) slices[key[2]].push_back({key[0], key[1]});
    bool left_leaf = t.node(nd.left).is_leaf();
    bool right_leaf = t.node(nd.right).is_leaf();
    for (const auto& [k, entries] : slices) {
      if (entries.size() <= 1) continue;
      if (entries.size() > 2) return false;
      auto [i1, j1] = entries[0];
      auto [i2, j2] = entries[1];
      bool ok = (left_leaf && complementary_pair(t, nd.left, i1, i2, tl)) ||
                (right_leaf && complementary_pair(t, nd.right, j1, j2, tl));
      if (!ok) return false;
    }
  }
  return true;
}

namespace {

/// Structural support over-approximation: per column, the truth table over
/// the node's sorted subtree variables with weights collapsed to zero tests.
/// Empty optional means the subtree exceeded the cap.
using support_cols = std::optional<std::vector<std::vector<bool>>>;

struct support_builder {
  const ttn& t;
  std::size_t cap;
  double tol;
  std::map<int, support_cols> memo;

  support_cols& of(int id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const ttn_node& nd = t.node(id);
    support_cols result;
    std::size_t m = t.vars_below(id).size();
    if (m > cap) {
      result = std::nullopt;
    } else if (nd.is_leaf()) {
      std::vector<std::vector<bool>> cols(nd.d, std::vector<bool>(2, false));
      for (std::size_t k = 0; k < nd.d; ++k) {
        cols[k][0] = !is_zero(t.leaf_weight(id, 0, k), tol);
        cols[k][1] = !is_zero(t.leaf_weight(id, 1, k), tol);
      }
      result = std::move(cols);
    } else {
      const support_cols& sl = of(nd.left);
      const support_cols& sr = of(nd.right);
      if (!sl || !sr) {
        result = std::nullopt;
      } else {
        std::set<std::size_t> setl = t.vars_below(nd.left);
        std::set<std::size_t> setr = t.vars_below(nd.right);
        std::vector<std::size_t> vl(setl.begin(), setl.end());
        std::vector<std::size_t> vr(setr.begin(), setr.end());
        std::vector<std::size_t> vv;
        std::merge(vl.begin(), vl.end(), vr.begin(), vr.end(),
                   std::back_inserter(vv));
        std::size_t mm = vv.size(), ml = vl.size();
        std::vector<std::vector<bool>> cols(
            nd.d, std::vector<bool>(std::size_t(1) << mm, false));
        auto it2 = t.tensors.find(id);
        if (it2 != t.tensors.end()) {
          for (std::size_t row = 0; row < (std::size_t(1) << mm); ++row) {
            std::size_t rl = 0, rr = 0, pl = 0;
            for (std::size_t p = 0; p < mm; ++p) {
              std::size_t bit = (row >> (mm - 1 - p)) & 1u;
              if (pl < ml && vl[pl] == vv[p]) {
                rl = (rl << 1) | bit;
                ++pl;
              } else {
                rr = (rr << 1) | bit;
              }
            }
            for (const auto& [key, w] : it2->second)
              if (!is_zero(w, tol) && (*sl)[key[0]][rl] && (*sr)[key[1]][rr])
                cols[key[2]][row] = true;
          }
        }
        result = std::move(cols);
      }
    }
    return memo[id] = std::move(result);
  }
};

bool disjoint(const std::vector<bool>& a, const std::vector<bool>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

} // namespace

tristate check_deterministic(const ttn& t, check_mode mode, std::size_t max_vars,
                             double tol) {
  double tl = effective_tol(t.semiring, tol);
  bool any_unknown = false;

  std::map<int, std::optional<dense_tensor>> hat_memo;
  auto hat_of = [&](int id) -> const std::optional<dense_tensor>& {
    auto it = hat_memo.find(id);
    if (it != hat_memo.end()) return it->second;
    std::optional<dense_tensor> h;
    if (t.vars_below(id).size() <= max_vars) h = hat_tensor(t, id, max_vars);
    return hat_memo[id] = std::move(h);
  };
  auto cols_disjoint = [&](const dense_tensor& h, std::size_t c1, std::size_t c2) {
    std::size_t rows = h.dims[0];
    for (std::size_t r = 0; r < rows; ++r)
      if (!is_zero(mul(h.at({r, c1}), h.at({r, c2})), tl)) return false;
    return true;
  };

  support_builder sb{t, max_vars, tl, {}};

  for (const auto& [id, nd] : t.nodes) {
    if (nd.is_leaf()) continue; // leaf columns weight disjoint indicators
    auto it = t.tensors.find(id);
    if (it == t.tensors.end()) continue;
    std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> slices;
    for (const auto& [key, w] : it->second)
      if (!is_zero(w, tl)) slices[key[2]].push_back({key[0], key[1]});

    for (const auto& [k, entries] : slices) {
      for (std::size_t a = 0; a < entries.size(); ++a)
        for (std::size_t b = a + 1; b < entries.size(); ++b) {
          auto [i1, j1] = entries[a];
          auto [i2, j2] = entries[b];
          if (mode == check_mode::semantic) {
            const auto& hl = hat_of(nd.left);
            const auto& hr = hat_of(nd.right);
            if (!hl || !hr) {
              any_unknown = true;
              continue;
            }
            if (!cols_disjoint(*hl, i1, i2) && !cols_disjoint(*hr, j1, j2))
              return tristate::no;
          } else {
            const support_cols& sl = sb.of(nd.left);
            const support_cols& sr = sb.of(nd.right);
            if (!sl || !sr) {
              any_unknown = true;
              continue;
            }
            if (!disjoint((*sl)[i1], (*sl)[i2]) && !disjoint((*sr)[j1], (*sr)[j2]))
              any_unknown = true; // overlap may be a cancellation phantom
          }
        }
    }
  }
  return any_unknown ? tristate::unknown : tristate::yes;
}

circuit to_circuit(const ttn& t) {
  t.validate();

  vtree vt;
  for (const auto& [id, nd] : t.nodes) {
    vtree_node vn;
    vn.id = id;
    vn.left = nd.left;
    vn.right = nd.right;
    vn.var = nd.var;
    vt.nodes[id] = vn;
  }
  vt.root = t.root;
  vt.validate();

  circuit c;
  c.semiring = t.semiring;
  c.vt = vt;
  int next_id = 0;
  std::map<std::pair<std::size_t, int>, int> inputs; // (var index, bit)
  std::map<int, std::vector<int>> plus_of;           // node -> plus gate per column

  auto input_gate = [&](std::size_t var, int bit) {
    auto it = inputs.find({var, bit});
    if (it != inputs.end()) return it->second;
    gate g;
    g.id = next_id++;
    g.kind = gate_kind::input;
    g.var = var_name(var);
    g.bit = bit;
    c.gates.push_back(g);
    inputs[{var, bit}] = g.id;
    return g.id;
  };

  std::function<void(int)> build = [&](int id) {
    const ttn_node& nd = t.node(id);
    if (nd.is_leaf()) {
      std::size_t v = parse_var_index(*nd.var);
      std::vector<int>& cols = plus_of[id];
      for (std::size_t k = 0; k < nd.d; ++k) {
        gate g;
        g.id = next_id++;
        g.kind = gate_kind::plus;
        g.vnode = id;
        for (std::size_t b = 0; b < 2; ++b) {
          value w = t.leaf_weight(id, b, k);
          if (!is_zero(w, 0.0))
            g.plus_in.push_back({input_gate(v, static_cast<int>(b)), w});
        }
        c.gates.push_back(g);
        cols.push_back(g.id);
      }
      return;
    }
    build(nd.left);
    build(nd.right);

    // Shared binary product gates, one per (i, j) pair used by any slice.
    std::map<std::pair<std::size_t, std::size_t>, int> pair_gate;
    auto it = t.tensors.find(id);
    if (it != t.tensors.end())
      for (const auto& [key, w] : it->second)
        if (!is_zero(w, 0.0)) pair_gate[{key[0], key[1]}] = -1;
    for (auto& [pr, gid] : pair_gate) {
      gate g;
      g.id = next_id++;
      g.kind = gate_kind::times;
      g.times_in = {plus_of.at(nd.left)[pr.first], plus_of.at(nd.right)[pr.second]};
      c.gates.push_back(g);
      gid = g.id;
    }
    std::vector<int>& cols = plus_of[id];
    for (std::size_t k = 0; k < nd.d; ++k) {
      gate g;
      g.id = next_id++;
      g.kind = gate_kind::plus;
      g.vnode = id;
      if (it != t.tensors.end())
        for (const auto& [key, w] : it->second)
          if (key[2] == k && !is_zero(w, 0.0))
            g.plus_in.push_back({pair_gate.at({key[0], key[1]}), w});
      c.gates.push_back(g);
      cols.push_back(g.id);
    }
  };
  build(t.root);
  c.outputs = plus_of.at(t.root);
  c.validate();
  return c;
}

} // namespace pbkc
