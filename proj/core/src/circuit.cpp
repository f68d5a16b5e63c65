#include "pbkc/circuit.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "pbkc/ttn.hpp"
#include "pbkc/var_names.hpp"

namespace pbkc {

namespace {

std::unordered_map<int, std::size_t> position_map(const circuit& c) {
  std::unordered_map<int, std::size_t> m;
  m.reserve(c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) m[c.gates[i].id] = i;
  return m;
}

std::vector<int> children_of(const gate& g) {
  std::vector<int> ch;
  if (g.kind == gate_kind::plus)
    for (const weighted_edge& e : g.plus_in) ch.push_back(e.gate);
  if (g.kind == gate_kind::times) ch = g.times_in;
  return ch;
}

/// Gate ids with every child before its parents; throws on cycles.
std::vector<int> topo_gates(const circuit& c) {
  auto pos = position_map(c);
  std::unordered_map<int, std::size_t> pending;
  std::unordered_map<int, std::vector<int>> dependents;
  for (const gate& g : c.gates) {
    std::vector<int> ch = children_of(g);
    pending[g.id] = ch.size();
    for (int cid : ch) dependents[cid].push_back(g.id);
  }
  std::vector<int> ready, order;
  for (const gate& g : c.gates)
    if (pending[g.id] == 0) ready.push_back(g.id);
  while (!ready.empty()) {
    int id = ready.back();
    ready.pop_back();
    order.push_back(id);
    for (int p : dependents[id])
      if (--pending[p] == 0) ready.push_back(p);
  }
  if (order.size() != c.gates.size())
    throw invariant_violation("circuit contains a cycle");
  return order;
}

} // namespace

const gate& circuit::at(int id) const {
  for (const gate& g : gates)
    if (g.id == id) return g;
  throw invariant_violation("unknown gate id " + std::to_string(id));
}

bool circuit::has_gate(int id) const {
  for (const gate& g : gates)
    if (g.id == id) return true;
  return false;
}

std::size_t circuit::var_count() const {
  if (vt) return vt->leaf_count();
  std::size_t n = 0;
  for (const gate& g : gates)
    if (g.kind == gate_kind::input) n = std::max(n, parse_var_index(g.var));
  return n;
}

void circuit::validate() const {
  std::unordered_set<int> ids;
  for (const gate& g : gates)
    if (!ids.insert(g.id).second)
      throw invariant_violation("duplicate gate id " + std::to_string(g.id));
  if (outputs.empty()) throw invariant_violation("circuit outputs must be nonempty");
  for (int o : outputs)
    if (!ids.count(o)) throw invariant_violation("output references an unknown gate");
  if (vt) vt->validate();
  for (const gate& g : gates) {
    switch (g.kind) {
    case gate_kind::input: {
      std::size_t k = parse_var_index(g.var);
      if (k == 0)
        throw invariant_violation("input gate variable \"" + g.var +
                                  "\" is not of the form x<k>");
      if (g.bit != 0 && g.bit != 1)
        throw invariant_violation("input gate bit must be 0 or 1");
      if (vt && !vt->vars_below(vt->root).count(k))
        throw invariant_violation("input variable " + g.var + " is not in the vtree");
      break;
    }
    case gate_kind::plus: {
      std::unordered_set<int> seen;
      for (const weighted_edge& e : g.plus_in) {
        if (!ids.count(e.gate))
          throw invariant_violation("plus gate references an unknown gate");
        if (!seen.insert(e.gate).second)
          throw invariant_violation("parallel edges into gate " +
                                    std::to_string(e.gate));
        if (e.weight.semiring() != semiring)
          throw invariant_violation("edge weight from a foreign semiring");
      }
      if (g.vnode && (!vt || !vt->has_node(*g.vnode)))
        throw invariant_violation("vnode annotation names a missing vtree node");
      break;
    }
    case gate_kind::times: {
      std::unordered_set<int> seen;
      for (int cid : g.times_in) {
        if (!ids.count(cid))
          throw invariant_violation("times gate references an unknown gate");
        if (!seen.insert(cid).second)
          throw invariant_violation("parallel edges into gate " + std::to_string(cid));
      }
      break;
    }
    }
  }
  topo_gates(*this); // throws on cycles
}

value eval(const circuit& c, const assignment& a, int out) {
  if (!c.has_gate(out))
    throw invariant_violation("unknown gate id " + std::to_string(out));
  std::unordered_map<int, value> memo;
  // Iterative post-order walk from out, so only gates below out are touched.
  std::vector<std::pair<int, bool>> stack{{out, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (memo.count(id)) continue;
    const gate& g = c.at(id);
    if (!expanded) {
      stack.push_back({id, true});
      for (int ch : children_of(g)) stack.push_back({ch, false});
      continue;
    }
    switch (g.kind) {
    case gate_kind::input: {
      std::size_t k = parse_var_index(g.var);
      if (k == 0 || k > a.size())
        throw unassigned_variable("variable " + g.var +
                                  " is not covered by the assignment");
      memo.emplace(id, a[k - 1] == g.bit ? one(c.semiring) : zero(c.semiring));
      break;
    }
    case gate_kind::plus: {
      value acc = zero(c.semiring);
      for (const weighted_edge& e : g.plus_in)
        acc = add(acc, mul(e.weight, memo.at(e.gate)));
      memo.emplace(id, std::move(acc));
      break;
    }
    case gate_kind::times: {
      value acc = one(c.semiring);
      for (int ch : g.times_in) acc = mul(acc, memo.at(ch));
      memo.emplace(id, std::move(acc));
      break;
    }
    }
  }
  return memo.at(out);
}

std::map<int, std::set<std::size_t>> gate_vars(const circuit& c) {
  std::map<int, std::set<std::size_t>> vars;
  for (int id : topo_gates(c)) {
    const gate& g = c.at(id);
    std::set<std::size_t>& vs = vars[id];
    if (g.kind == gate_kind::input) {
      vs.insert(parse_var_index(g.var));
    } else {
      for (int ch : children_of(g)) {
        const auto& cv = vars.at(ch);
        vs.insert(cv.begin(), cv.end());
      }
    }
  }
  return vars;
}

bool check_decomposable(const circuit& c) {
  auto vars = gate_vars(c);
  for (const gate& g : c.gates) {
    if (g.kind != gate_kind::times) continue;
    std::set<std::size_t> seen;
    for (int ch : g.times_in) {
      for (std::size_t k : vars.at(ch))
        if (!seen.insert(k).second) return false;
    }
  }
  return true;
}

std::map<int, int> infer_phi(const circuit& c, const vtree& v) {
  auto vars = gate_vars(c);
  std::map<int, int> phi;
  int fallback = v.leftmost_leaf();
  for (const gate& g : c.gates) {
    const auto& vs = vars.at(g.id);
    phi[g.id] = vs.empty() ? fallback : v.lowest_covering(vs);
  }
  return phi;
}

std::map<int, int> effective_phi(const circuit& c, const vtree& v) {
  auto vars = gate_vars(c);
  std::map<int, int> phi;
  int fallback = v.leftmost_leaf();
  for (int id : topo_gates(c)) {
    const gate& g = c.at(id);
    if (g.vnode) {
      phi[id] = *g.vnode;
      continue;
    }
    if (g.kind == gate_kind::input) {
      phi[id] = v.leaf_of(parse_var_index(g.var));
      continue;
    }
    std::vector<int> ch = children_of(g);
    if (ch.empty()) {
      phi[id] = fallback;
      continue;
    }
    int node = phi.at(ch[0]);
    for (std::size_t i = 1; i < ch.size(); ++i) node = v.lca(node, phi.at(ch[i]));
    // The node must still cover the gate's own variables.
    const auto& vs = vars.at(id);
    while (true) {
      const auto& below = v.vars_below(node);
      bool ok = true;
      for (std::size_t k : vs)
        if (!below.count(k)) {
          ok = false;
          break;
        }
      if (ok) break;
      node = v.lca(node, v.lowest_covering(vs));
    }
    phi[id] = node;
  }
  return phi;
}

bool check_structured(const circuit& c, const vtree& v, const std::map<int, int>& phi) {
  auto vars = gate_vars(c);
  for (const gate& g : c.gates) {
    auto it = phi.find(g.id);
    if (it == phi.end())
      throw invariant_violation("phi is not total: gate " + std::to_string(g.id));
    int node = it->second;
    if (!v.has_node(node)) return false;
    const auto& below = v.vars_below(node);
    for (std::size_t k : vars.at(g.id))
      if (!below.count(k)) return false;

    if (g.kind == gate_kind::times && !vars.at(g.id).empty()) {
      if (g.times_in.size() != 2) return false;
      const vtree_node& vn = v.node(node);
      if (vn.is_leaf()) return false;
      int pa = phi.at(g.times_in[0]);
      int pb = phi.at(g.times_in[1]);
      bool split = (v.in_subtree(pa, vn.left) && v.in_subtree(pb, vn.right)) ||
                   (v.in_subtree(pa, vn.right) && v.in_subtree(pb, vn.left));
      if (!split) return false;
    }
    if (g.kind == gate_kind::plus) {
      for (const weighted_edge& e : g.plus_in)
        if (!v.in_subtree(phi.at(e.gate), node)) return false;
    }
  }
  return true;
}

namespace {

/// Assignment over all variables with the bits of vars set per idx
/// (big-endian over the sorted var list) and 0 elsewhere.
assignment scatter(std::size_t idx, const std::vector<std::size_t>& vars, std::size_t n) {
  assignment a;
  a.bits.assign(n, 0);
  std::size_t m = vars.size();
  for (std::size_t i = 0; i < m; ++i)
    a.bits[vars[i] - 1] = static_cast<std::uint8_t>((idx >> (m - 1 - i)) & 1u);
  return a;
}

/// Structural truth of a gate: weights collapse to their zero test and the
/// circuit is read over the boolean semiring.
bool structural_truth(const circuit& c, const assignment& a, int out, double tol) {
  std::unordered_map<int, bool> memo;
  std::function<bool(int)> go = [&](int id) -> bool {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const gate& g = c.at(id);
    bool r = false;
    switch (g.kind) {
    case gate_kind::input: {
      std::size_t k = parse_var_index(g.var);
      if (k == 0 || k > a.size())
        throw unassigned_variable("variable " + g.var +
                                  " is not covered by the assignment");
      r = a[k - 1] == g.bit;
      break;
    }
    case gate_kind::plus:
      for (const weighted_edge& e : g.plus_in)
        if (!is_zero(e.weight, tol) && go(e.gate)) {
          r = true;
          break;
        }
      break;
    case gate_kind::times:
      r = true;
      for (int ch : g.times_in)
        if (!go(ch)) {
          r = false;
          break;
        }
      break;
    }
    memo[id] = r;
    return r;
  };
  return go(out);
}

} // namespace

support_table support(const circuit& c, int out, check_mode mode,
                      std::size_t max_vars, double tol) {
  auto vars = gate_vars(c);
  auto it = vars.find(out);
  if (it == vars.end())
    throw invariant_violation("unknown gate id " + std::to_string(out));
  support_table st;
  st.vars.assign(it->second.begin(), it->second.end());
  if (st.vars.size() > max_vars)
    throw too_many_variables(std::to_string(st.vars.size()) +
                             " support variables exceeds cap " +
                             std::to_string(max_vars));
  double tl = effective_tol(c.semiring, tol);
  std::size_t n = c.var_count();
  for (const std::size_t k : st.vars) n = std::max(n, k);
  std::size_t rows = std::size_t(1) << st.vars.size();
  st.bits.resize(rows);
  for (std::size_t idx = 0; idx < rows; ++idx) {
    assignment a = scatter(idx, st.vars, n);
    bool nz = mode == check_mode::semantic ? !is_zero(eval(c, a, out), tl)
                                           : structural_truth(c, a, out, tl);
    st.bits[idx] = nz ? 1 : 0;
  }
  return st;
}

namespace {

/// Tables of every plus-gate child over all 2^n assignments, computed in one
/// bottom-up pass per assignment. Semantic mode stores values, structural
/// mode stores truth flags. Re-evaluating the circuit per child pair would
/// repeat the same work exponentially often.
struct child_tables {
  std::map<int, std::vector<value>> values;
  std::map<int, std::vector<char>> truth;
};

child_tables tabulate_plus_children(const circuit& c, check_mode mode,
                                    std::size_t n, double tl) {
  std::set<int> wanted;
  for (const gate& g : c.gates)
    if (g.kind == gate_kind::plus)
      for (const weighted_edge& e : g.plus_in)
        if (!is_zero(e.weight, tl)) wanted.insert(e.gate);

  child_tables t;
  std::vector<int> order = topo_gates(c);
  std::size_t total = std::size_t(1) << n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    assignment a = assignment::from_index(idx, n);
    if (mode == check_mode::semantic) {
      std::unordered_map<int, value> val;
      for (int id : order) {
        const gate& g = c.at(id);
        switch (g.kind) {
        case gate_kind::input: {
          std::size_t k = parse_var_index(g.var);
          if (k == 0 || k > a.size())
            throw unassigned_variable("variable " + g.var +
                                      " is not covered by the assignment");
          val.emplace(id, a[k - 1] == g.bit ? one(c.semiring) : zero(c.semiring));
          break;
        }
        case gate_kind::plus: {
          value acc = zero(c.semiring);
          for (const weighted_edge& e : g.plus_in)
            acc = add(acc, mul(e.weight, val.at(e.gate)));
          val.emplace(id, std::move(acc));
          break;
        }
        case gate_kind::times: {
          value acc = one(c.semiring);
          for (int ch : g.times_in) acc = mul(acc, val.at(ch));
          val.emplace(id, std::move(acc));
          break;
        }
        }
      }
      for (int id : wanted) t.values[id].push_back(val.at(id));
    } else {
      std::unordered_map<int, char> val;
      for (int id : order) {
        const gate& g = c.at(id);
        char r = 0;
        switch (g.kind) {
        case gate_kind::input: {
          std::size_t k = parse_var_index(g.var);
          if (k == 0 || k > a.size())
            throw unassigned_variable("variable " + g.var +
                                      " is not covered by the assignment");
          r = a[k - 1] == g.bit ? 1 : 0;
          break;
        }
        case gate_kind::plus:
          for (const weighted_edge& e : g.plus_in)
            if (!is_zero(e.weight, tl) && val.at(e.gate)) {
              r = 1;
              break;
            }
          break;
        case gate_kind::times:
          r = 1;
          for (int ch : g.times_in)
            if (!val.at(ch)) {
              r = 0;
              break;
            }
          break;
        }
        val.emplace(id, r);
      }
      for (int id : wanted) t.truth[id].push_back(val.at(id));
    }
  }
  return t;
}

} // namespace

tristate check_deterministic(const circuit& c, check_mode mode,
                             std::size_t max_vars, double tol) {
  auto vars = gate_vars(c);
  double tl = effective_tol(c.semiring, tol);
  std::size_t n = c.var_count();
  bool any_unknown = false;

  // When the whole assignment space fits the cap, tabulate every child in one
  // shared sweep; pair checks then scan the stored tables. Otherwise fall
  // back to per-pair enumeration over the pair's own variable union.
  bool shared = n <= max_vars;
  child_tables tables;
  if (shared) tables = tabulate_plus_children(c, mode, n, tl);

  for (const gate& g : c.gates) {
    if (g.kind != gate_kind::plus) continue;
    std::vector<const weighted_edge*> live;
    for (const weighted_edge& e : g.plus_in)
      if (!is_zero(e.weight, tl)) live.push_back(&e);

    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        std::set<std::size_t> uni = vars.at(live[i]->gate);
        const auto& vj = vars.at(live[j]->gate);
        uni.insert(vj.begin(), vj.end());
        if (uni.size() > max_vars) {
          any_unknown = true;
          continue;
        }
        bool overlap = false;
        if (shared) {
          if (mode == check_mode::semantic) {
            const auto& ti = tables.values.at(live[i]->gate);
            const auto& tj = tables.values.at(live[j]->gate);
            value wij = mul(live[i]->weight, live[j]->weight);
            for (std::size_t idx = 0; idx < ti.size(); ++idx)
              if (!is_zero(mul(wij, mul(ti[idx], tj[idx])), tl)) {
                overlap = true;
                break;
              }
          } else {
            const auto& ti = tables.truth.at(live[i]->gate);
            const auto& tj = tables.truth.at(live[j]->gate);
            for (std::size_t idx = 0; idx < ti.size(); ++idx)
              if (ti[idx] && tj[idx]) {
                overlap = true;
                break;
              }
          }
        } else {
          std::vector<std::size_t> uvars(uni.begin(), uni.end());
          for (std::size_t idx = 0; idx < (std::size_t(1) << uvars.size()); ++idx) {
            assignment a = scatter(idx, uvars, n);
            if (mode == check_mode::semantic) {
              value p = mul(mul(live[i]->weight, eval(c, a, live[i]->gate)),
                            mul(live[j]->weight, eval(c, a, live[j]->gate)));
              if (!is_zero(p, tl)) {
                overlap = true;
                break;
              }
            } else {
              if (structural_truth(c, a, live[i]->gate, tl) &&
                  structural_truth(c, a, live[j]->gate, tl)) {
                overlap = true;
                break;
              }
            }
          }
        }
        if (overlap) {
          if (mode == check_mode::semantic) return tristate::no;
          any_unknown = true; // structural overlap may be a phantom
        }
      }
  }
  return any_unknown ? tristate::unknown : tristate::yes;
}

namespace {

/// Indicator guards of a branch child of a decision candidate: (var, bit)
/// pairs the child is multiplied with, either directly or through a
/// single-sided plus gadget.
std::set<std::pair<std::size_t, int>> branch_guards(const circuit& c, const gate& g,
                                                    double tol) {
  std::set<std::pair<std::size_t, int>> guards;
  auto single_sided = [&](const gate& p) -> std::optional<std::pair<std::size_t, int>> {
    // A plus gate whose live children are indicators of one (var, bit).
    std::optional<std::pair<std::size_t, int>> side;
    for (const weighted_edge& e : p.plus_in) {
      if (is_zero(e.weight, tol)) continue;
      const gate& ch = c.at(e.gate);
      if (ch.kind != gate_kind::input) return std::nullopt;
      std::pair<std::size_t, int> key{parse_var_index(ch.var), ch.bit};
      if (side && *side != key) return std::nullopt;
      side = key;
    }
    return side;
  };
  if (g.kind == gate_kind::input) {
    guards.insert({parse_var_index(g.var), g.bit});
    return guards;
  }
  if (g.kind != gate_kind::times) return guards;
  for (int cid : g.times_in) {
    const gate& ch = c.at(cid);
    if (ch.kind == gate_kind::input)
      guards.insert({parse_var_index(ch.var), ch.bit});
    else if (ch.kind == gate_kind::plus)
      if (auto s = single_sided(ch)) guards.insert(*s);
  }
  return guards;
}

} // namespace

bool check_decision(const circuit& c, double tol) {
  double tl = effective_tol(c.semiring, tol);
  for (const gate& g : c.gates) {
    if (g.kind != gate_kind::plus) continue;
    std::vector<const gate*> live;
    for (const weighted_edge& e : g.plus_in)
      if (!is_zero(e.weight, tl)) live.push_back(&c.at(e.gate));

    if (live.empty()) continue; // constant-0 intermediate
    if (live.size() == 1) {
      if (live[0]->kind == gate_kind::plus) return false;
      continue; // single weighted indicator or times child
    }
    if (live.size() != 2) return false;
    auto ga = branch_guards(c, *live[0], tl);
    auto gb = branch_guards(c, *live[1], tl);
    bool complementary = false;
    for (const auto& [var, bit] : ga)
      if (gb.count({var, 1 - bit})) {
        complementary = true;
        break;
      }
    if (!complementary) return false;
  }
  return true;
}

// --- normalization into the layered form -----------------------------------

namespace {

struct normalizer {
  const circuit& src;
  const vtree& vt;
  std::map<int, int> phi;
  std::map<int, std::set<std::size_t>> vars;

  circuit out;
  int next_id = 0;
  std::map<int, int> norm_of;                        // original plus -> image
  std::map<std::pair<std::size_t, int>, int> inputs; // (var, bit) -> input gate
  std::map<std::pair<std::size_t, int>, int> input_wraps;
  std::map<int, int> one_gates;                      // vtree node -> unit gate
  std::map<std::pair<int, int>, int> times_gates;    // (left, right) -> times
  std::map<int, int> times_wraps;                    // original times -> wrapper
  std::map<std::pair<int, int>, int> promotions;     // (plus, node) -> plus
  std::map<int, int> norm_times_memo;                // original times -> times

  // Registration for per-node ordering: plus gate -> (vtree node, sort key).
  // Images sort before synthesized gates, images by original id, synthesized
  // by creation order.
  std::map<int, std::pair<int, std::pair<int, int>>> plus_reg;
  int synth_seq = 0;

  explicit normalizer(const circuit& c)
      : src(c), vt(*c.vt), phi(effective_phi(c, vt)), vars(gate_vars(c)) {
    out.semiring = c.semiring;
    out.vt = vt;
  }

  int fresh_plus(int vnode, std::optional<int> image_of) {
    gate g;
    g.id = next_id++;
    g.kind = gate_kind::plus;
    g.vnode = vnode;
    out.gates.push_back(g);
    std::pair<int, int> key =
        image_of ? std::pair<int, int>{0, *image_of} : std::pair<int, int>{1, synth_seq++};
    plus_reg[g.id] = {vnode, key};
    return g.id;
  }

  gate& gref(int id) { return out.gates[static_cast<std::size_t>(id)]; }

  void set_edges(int plus_id, const std::map<int, value>& acc) {
    gate& g = gref(plus_id);
    g.plus_in.clear();
    for (const auto& [child, w] : acc) {
      if (is_zero(w, 0.0)) continue;
      g.plus_in.push_back({child, w});
    }
  }

  int input_gate(std::size_t var, int bit) {
    auto it = inputs.find({var, bit});
    if (it != inputs.end()) return it->second;
    gate g;
    g.id = next_id++;
    g.kind = gate_kind::input;
    g.var = var_name(var);
    g.bit = bit;
    out.gates.push_back(g);
    inputs[{var, bit}] = g.id;
    return g.id;
  }

  int times_gate(int left, int right) {
    auto it = times_gates.find({left, right});
    if (it != times_gates.end()) return it->second;
    gate g;
    g.id = next_id++;
    g.kind = gate_kind::times;
    g.times_in = {left, right};
    out.gates.push_back(g);
    times_gates[{left, right}] = g.id;
    return g.id;
  }

  /// Constant-1 plus gate at a vtree node.
  int one_gate(int vnode) {
    auto it = one_gates.find(vnode);
    if (it != one_gates.end()) return it->second;
    int id = fresh_plus(vnode, std::nullopt);
    one_gates[vnode] = id;
    const vtree_node& vn = vt.node(vnode);
    std::map<int, value> acc;
    if (vn.is_leaf()) {
      std::size_t k = parse_var_index(*vn.var);
      acc[input_gate(k, 0)] = one(out.semiring);
      acc[input_gate(k, 1)] = one(out.semiring);
    } else {
      acc[times_gate(one_gate(vn.left), one_gate(vn.right))] = one(out.semiring);
    }
    set_edges(id, acc);
    return id;
  }

  /// Plus gate at vnode computing the constant k.
  int const_gate(int vnode, const value& k) {
    int id = fresh_plus(vnode, std::nullopt);
    const vtree_node& vn = vt.node(vnode);
    std::map<int, value> acc;
    if (vn.is_leaf()) {
      std::size_t v = parse_var_index(*vn.var);
      acc[input_gate(v, 0)] = k;
      acc[input_gate(v, 1)] = k;
    } else {
      acc[times_gate(one_gate(vn.left), one_gate(vn.right))] = k;
    }
    set_edges(id, acc);
    return id;
  }

  /// Times gate at internal node `to` computing the function of the plus
  /// gate p sitting at node `from` strictly below `to`, smoothed with
  /// constant-1 gadgets on the missing side.
  int promote_times(int p, int from, int to) {
    const vtree_node& tn = vt.node(to);
    bool on_left = vt.in_subtree(from, tn.left);
    int side = on_left ? tn.left : tn.right;
    int other = on_left ? tn.right : tn.left;
    int sp = side == from ? p : promote_plus(p, from, side);
    int op = one_gate(other);
    return on_left ? times_gate(sp, op) : times_gate(op, sp);
  }

  /// Plus gate at `to` computing the function of plus gate p at `from`.
  int promote_plus(int p, int from, int to) {
    if (from == to) return p;
    auto it = promotions.find({p, to});
    if (it != promotions.end()) return it->second;
    int id = fresh_plus(to, std::nullopt);
    promotions[{p, to}] = id;
    std::map<int, value> acc;
    acc[promote_times(p, from, to)] = one(out.semiring);
    set_edges(id, acc);
    return id;
  }

  /// Unit plus wrapper around a bare indicator, at the indicator's leaf.
  int wrap_input(std::size_t var, int bit) {
    auto it = input_wraps.find({var, bit});
    if (it != input_wraps.end()) return it->second;
    int id = fresh_plus(vt.leaf_of(var), std::nullopt);
    input_wraps[{var, bit}] = id;
    std::map<int, value> acc;
    acc[input_gate(var, bit)] = one(out.semiring);
    set_edges(id, acc);
    return id;
  }

  /// Unit plus wrapper around a normalized times gate, at the times gate's
  /// node.
  int wrap_times(int orig_times) {
    auto it = times_wraps.find(orig_times);
    if (it != times_wraps.end()) return it->second;
    int at = phi.at(orig_times);
    int id = fresh_plus(at, std::nullopt);
    times_wraps[orig_times] = id;
    std::map<int, value> acc;
    acc[norm_times(orig_times, at)] = one(out.semiring);
    set_edges(id, acc);
    return id;
  }

  bool var_free(int orig_id) const { return vars.at(orig_id).empty(); }

  value const_value(int orig_id) const {
    assignment empty;
    return eval(src, empty, orig_id);
  }

  /// Normalized plus gate at side node `target` for an arbitrary original
  /// child gate assigned at or below `target`.
  int side_plus(int orig_child, int target) {
    const gate& ch = src.at(orig_child);
    int at = phi.at(orig_child);
    int p;
    switch (ch.kind) {
    case gate_kind::plus: p = norm_plus(orig_child); break;
    case gate_kind::input: p = wrap_input(parse_var_index(ch.var), ch.bit); at = vt.leaf_of(parse_var_index(ch.var)); break;
    case gate_kind::times: p = wrap_times(orig_child); break;
    default: throw error("bad gate kind");
    }
    return promote_plus(p, at, target);
  }

  /// Normalized binary times gate at internal node `at` for an original
  /// times gate assigned there.
  int norm_times(int orig_times, int at) {
    auto it = norm_times_memo.find(orig_times);
    if (it != norm_times_memo.end()) return it->second;
    const gate& g = src.at(orig_times);
    const vtree_node& vn = vt.node(at);
    int a = g.times_in[0], b = g.times_in[1];
    bool a_left = vt.in_subtree(phi.at(a), vn.left);
    int left_child = a_left ? a : b;
    int right_child = a_left ? b : a;
    int lp = side_plus(left_child, vn.left);
    int rp = side_plus(right_child, vn.right);
    int id = times_gate(lp, rp);
    norm_times_memo[orig_times] = id;
    return id;
  }

  /// Scales the edges of normalized plus gate p into acc.
  void flatten_into(std::map<int, value>& acc, int p, const value& scale) {
    for (const weighted_edge& e : gref(p).plus_in) {
      value w = mul(scale, e.weight);
      auto [it, inserted] = acc.emplace(e.gate, w);
      if (!inserted) it->second = add(it->second, w);
    }
  }

  void add_edge(std::map<int, value>& acc, int child, const value& w) {
    auto [it, inserted] = acc.emplace(child, w);
    if (!inserted) it->second = add(it->second, w);
  }

  /// Image of an original plus gate: a plus gate at phi(g) whose children
  /// are indicators (leaf) or normalized times gates (internal).
  int norm_plus(int orig) {
    auto done = norm_of.find(orig);
    if (done != norm_of.end()) return done->second;
    int u = phi.at(orig);
    int id = fresh_plus(u, orig);
    norm_of[orig] = id;

    const vtree_node& un = vt.node(u);
    std::map<int, value> acc;
    value const_acc = zero(out.semiring);

    for (const weighted_edge& e : src.at(orig).plus_in) {
      if (is_zero(e.weight, 0.0)) continue;
      int ch = e.gate;
      if (var_free(ch)) {
        const_acc = add(const_acc, mul(e.weight, const_value(ch)));
        continue;
      }
      const gate& cg = src.at(ch);
      switch (cg.kind) {
      case gate_kind::input: {
        std::size_t k = parse_var_index(cg.var);
        if (un.is_leaf()) {
          add_edge(acc, input_gate(k, cg.bit), e.weight);
        } else {
          add_edge(acc, promote_times(wrap_input(k, cg.bit), vt.leaf_of(k), u),
                   e.weight);
        }
        break;
      }
      case gate_kind::times: {
        int at = phi.at(ch);
        if (at == u) {
          add_edge(acc, norm_times(ch, u), e.weight);
        } else {
          add_edge(acc, promote_times(wrap_times(ch), at, u), e.weight);
        }
        break;
      }
      case gate_kind::plus: {
        int at = phi.at(ch);
        int p = norm_plus(ch);
        if (at == u) {
          flatten_into(acc, p, e.weight);
        } else {
          add_edge(acc, promote_times(p, at, u), e.weight);
        }
        break;
      }
      }
    }
    if (!is_zero(const_acc, 0.0)) {
      if (un.is_leaf()) {
        std::size_t k = parse_var_index(*un.var);
        add_edge(acc, input_gate(k, 0), const_acc);
        add_edge(acc, input_gate(k, 1), const_acc);
      } else {
        add_edge(acc, times_gate(one_gate(un.left), one_gate(un.right)), const_acc);
      }
    }
    set_edges(id, acc);
    return id;
  }

  /// Root-level plus gate for an output reference of any kind. A plus output
  /// always routes through its image so it keeps exactly one column even when
  /// it computes a constant; other variable-free outputs become a fresh
  /// constant column.
  int output_gate(int orig) {
    const gate& g = src.at(orig);
    if (var_free(orig) && g.kind != gate_kind::plus)
      return const_gate(vt.root, const_value(orig));
    int p, at;
    switch (g.kind) {
    case gate_kind::plus:
      p = norm_plus(orig);
      at = phi.at(orig);
      break;
    case gate_kind::input:
      p = wrap_input(parse_var_index(g.var), g.bit);
      at = vt.leaf_of(parse_var_index(g.var));
      break;
    case gate_kind::times:
      p = wrap_times(orig);
      at = phi.at(orig);
      break;
    default: throw error("bad gate kind");
    }
    return promote_plus(p, at, vt.root);
  }

  normalized_circuit finish() {
    // Images for every original plus gate, ascending id, so unreferenced
    // gates keep their column.
    std::vector<int> plus_ids;
    for (const gate& g : src.gates)
      if (g.kind == gate_kind::plus) plus_ids.push_back(g.id);
    std::sort(plus_ids.begin(), plus_ids.end());
    for (int id : plus_ids) norm_plus(id);

    std::vector<int> new_outputs;
    std::map<int, std::size_t> output_rank;
    for (int o : src.outputs) {
      int g = output_gate(o);
      if (!output_rank.count(g)) output_rank[g] = output_rank.size();
      new_outputs.push_back(g);
    }
    out.outputs = new_outputs;

    // Every vtree node carries at least one plus gate.
    std::vector<int> vnodes;
    for (const auto& [id, nd] : vt.nodes) vnodes.push_back(id);
    for (int vid : vnodes) {
      bool found = false;
      for (const auto& [pid, reg] : plus_reg)
        if (reg.first == vid) {
          found = true;
          break;
        }
      if (!found) one_gate(vid);
    }

    normalized_circuit result;
    std::map<int, std::vector<int>> per_node;
    for (const auto& [pid, reg] : plus_reg) per_node[reg.first].push_back(pid);
    for (auto& [vid, list] : per_node) {
      std::sort(list.begin(), list.end(), [&](int a, int b) {
        bool ra = output_rank.count(a), rb = output_rank.count(b);
        if (vid == vt.root && (ra || rb)) {
          if (ra != rb) return ra;
          if (ra) return output_rank.at(a) < output_rank.at(b);
        }
        return plus_reg.at(a).second < plus_reg.at(b).second;
      });
    }
    result.node_plus_gates = std::move(per_node);
    result.c = std::move(out);
    result.c.validate();
    return result;
  }
};

} // namespace

normalized_circuit normalize_for_ttn(const circuit& c) {
  c.validate();
  if (!c.vt) throw not_structured("the circuit carries no vtree");
  std::map<int, int> phi = effective_phi(c, *c.vt);
  if (!check_structured(c, *c.vt, phi))
    throw not_structured("the circuit is not structured by its vtree");
  normalizer nz(c);
  return nz.finish();
}

ttn to_ttn(const circuit& c) {
  normalized_circuit nc = normalize_for_ttn(c);
  const vtree& vt = *nc.c.vt;

  ttn t;
  t.semiring = nc.c.semiring;
  t.root = vt.root;

  std::map<int, std::size_t> colum; // plus gate -> column in its node
  for (const auto& [vid, list] : nc.node_plus_gates)
    for (std::size_t k = 0; k < list.size(); ++k) colum[list[k]] = k;

  for (const auto& [vid, vn] : vt.nodes) {
    ttn_node nd;
    nd.id = vid;
    nd.left = vn.left;
    nd.right = vn.right;
    nd.var = vn.var;
    nd.d = nc.node_plus_gates.at(vid).size();
    t.nodes[vid] = nd;
  }

  for (const auto& [vid, list] : nc.node_plus_gates) {
    const vtree_node& vn = vt.node(vid);
    for (std::size_t k = 0; k < list.size(); ++k) {
      const gate& g = nc.c.at(list[k]);
      for (const weighted_edge& e : g.plus_in) {
        const gate& ch = nc.c.at(e.gate);
        if (vn.is_leaf()) {
          t.set_leaf(vid, static_cast<std::size_t>(ch.bit), k, e.weight);
        } else {
          std::size_t i = colum.at(ch.times_in[0]);
          std::size_t j = colum.at(ch.times_in[1]);
          t.set_internal(vid, i, j, k, e.weight);
        }
      }
    }
  }
  t.validate();
  return t;
}

} // namespace pbkc
