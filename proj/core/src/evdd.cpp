#include "pbkc/evdd.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pbkc/dense.hpp"
#include "pbkc/tensor_train.hpp"
#include "pbkc/var_names.hpp"

namespace pbkc {

namespace {

std::unordered_map<int, std::size_t> index_map(const evdd& g) {
  std::unordered_map<int, std::size_t> m;
  m.reserve(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) m[g.nodes[i].id] = i;
  return m;
}

/// Node ids in an order where every edge goes forward.
std::vector<int> topo_order(const evdd& g) {
  std::unordered_map<int, std::size_t> indeg;
  std::map<int, std::vector<int>> out;
  for (const evdd_node& nd : g.nodes) indeg[nd.id];
  for (const evdd_edge& e : g.edges) {
    ++indeg[e.to];
    out[e.from].push_back(e.to);
  }
  std::vector<int> ready, order;
  for (const evdd_node& nd : g.nodes)
    if (indeg[nd.id] == 0) ready.push_back(nd.id);
  std::sort(ready.begin(), ready.end());
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int u : out[v])
      if (--indeg[u] == 0) ready.push_back(u);
  }
  if (order.size() != g.nodes.size())
    throw invariant_violation("diagram contains a cycle");
  return order;
}

} // namespace

const evdd_node& evdd::node(int id) const {
  for (const evdd_node& nd : nodes)
    if (nd.id == id) return nd;
  throw invariant_violation("unknown node id " + std::to_string(id));
}

bool evdd::has_node(int id) const {
  for (const evdd_node& nd : nodes)
    if (nd.id == id) return true;
  return false;
}

std::size_t evdd::level(int id) const {
  const evdd_node& nd = node(id);
  if (!nd.var) return vars.size();
  std::size_t k = parse_var_index(*nd.var);
  return k - 1;
}

void evdd::validate() const {
  if (vars.empty()) throw invariant_violation("diagram needs at least one variable");
  for (std::size_t r = 0; r < vars.size(); ++r)
    if (vars[r] != var_name(r + 1))
      throw invariant_violation("variable list must be x1..xn in order");
  std::unordered_set<int> ids;
  for (const evdd_node& nd : nodes)
    if (!ids.insert(nd.id).second)
      throw invariant_violation("duplicate node id " + std::to_string(nd.id));
  if (!ids.count(source) || !ids.count(sink))
    throw invariant_violation("source or sink id missing from the node list");
  if (source == sink) throw invariant_violation("source and sink must differ");
  for (const evdd_node& nd : nodes) {
    if (nd.id == sink) {
      if (nd.var) throw invariant_violation("the sink must be unlabeled");
      continue;
    }
    if (!nd.var) throw invariant_violation("non-sink node " + std::to_string(nd.id) +
                                           " must read a variable");
    std::size_t k = parse_var_index(*nd.var);
    if (k == 0 || k > vars.size())
      throw invariant_violation("node variable " + *nd.var +
                                " is not in the variable list");
  }
  for (const evdd_edge& e : edges) {
    if (!ids.count(e.from) || !ids.count(e.to))
      throw invariant_violation("edge references an unknown node");
    if (e.bit != 0 && e.bit != 1)
      throw invariant_violation("edge bit must be 0 or 1");
    if (e.to == source) throw invariant_violation("the source must have no incoming edges");
    if (e.from == sink) throw invariant_violation("the sink must have no outgoing edges");
    if (e.weight.semiring() != semiring)
      throw invariant_violation("edge weight from a foreign semiring");
  }
  topo_order(*this); // throws on cycles
}

value eval(const evdd& g, const assignment& a) {
  if (a.size() != g.vars.size())
    throw length_mismatch("assignment of length " + std::to_string(a.size()) +
                          " for a diagram over " + std::to_string(g.vars.size()) +
                          " variables");
  // Backward accumulation over a reverse topological order: the sink is
  // worth 1, every other node sums its bit-consistent outgoing edges.
  std::map<int, std::vector<const evdd_edge*>> out;
  for (const evdd_edge& e : g.edges) out[e.from].push_back(&e);

  std::vector<int> order = topo_order(g);
  std::unordered_map<int, value> val;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int id = *it;
    if (id == g.sink) {
      val[id] = one(g.semiring);
      continue;
    }
    std::size_t pos = g.level(id);
    value acc = zero(g.semiring);
    for (const evdd_edge* e : out[id]) {
      if (e->bit != a[pos]) continue;
      acc = add(acc, mul(e->weight, val.at(e->to)));
    }
    val[id] = acc;
  }
  return val.at(g.source);
}

bool check_read_once(const evdd& g) {
  std::map<std::string, std::vector<int>> by_var;
  for (const evdd_node& nd : g.nodes)
    if (nd.var) by_var[*nd.var].push_back(nd.id);

  std::map<int, std::vector<int>> out;
  for (const evdd_edge& e : g.edges) out[e.from].push_back(e.to);
  auto reaches = [&](int from, int to) {
    std::vector<int> stack{from};
    std::unordered_set<int> seen;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (!seen.insert(v).second) continue;
      for (int u : out[v]) stack.push_back(u);
    }
    return false;
  };

  for (const auto& [var, ids] : by_var)
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (reaches(ids[i], ids[j]) || reaches(ids[j], ids[i])) return false;
  return true;
}

bool check_ordered(const evdd& g) {
  for (const evdd_edge& e : g.edges) {
    if (e.to == g.sink) continue;
    if (g.level(e.from) >= g.level(e.to)) return false;
  }
  return true;
}

bool check_deterministic(const evdd& g) {
  std::map<std::pair<int, int>, std::size_t> fanout;
  for (const evdd_edge& e : g.edges)
    if (++fanout[{e.from, e.bit}] > 1) return false;
  return true;
}

bool check_complete(const evdd& g) {
  if (!check_ordered(g)) return false;
  if (g.level(g.source) != 0) return false;
  std::size_t n = g.vars.size();
  for (const evdd_edge& e : g.edges) {
    std::size_t to_level = e.to == g.sink ? n : g.level(e.to);
    if (to_level != g.level(e.from) + 1) return false;
  }
  return true;
}

evdd complete(const evdd& g) {
  if (!check_ordered(g))
    throw not_ordered("completion is defined for ordered diagrams");
  evdd r = g;
  int next_id = 0;
  for (const evdd_node& nd : r.nodes) next_id = std::max(next_id, nd.id + 1);
  std::size_t n = r.vars.size();

  auto chain = [&](int from, int to, int bit, value w, std::size_t from_level,
                   std::size_t to_level, std::vector<evdd_edge>& acc) {
    // Fresh nodes for the skipped positions; the original weight rides the
    // first edge and every inserted node branches on both bits with weight 1.
    int prev = from;
    bool first = true;
    for (std::size_t lvl = from_level + 1; lvl < to_level; ++lvl) {
      evdd_node fresh;
      fresh.id = next_id++;
      fresh.var = r.vars[lvl];
      r.nodes.push_back(fresh);
      if (first) {
        acc.push_back({prev, fresh.id, bit, w});
        first = false;
      } else {
        acc.push_back({prev, fresh.id, 0, one(r.semiring)});
        acc.push_back({prev, fresh.id, 1, one(r.semiring)});
      }
      prev = fresh.id;
    }
    if (first) {
      acc.push_back({prev, to, bit, w});
    } else {
      acc.push_back({prev, to, 0, one(r.semiring)});
      acc.push_back({prev, to, 1, one(r.semiring)});
    }
  };

  std::vector<evdd_edge> new_edges;
  for (const evdd_edge& e : r.edges) {
    std::size_t from_level = r.level(e.from);
    std::size_t to_level = e.to == r.sink ? n : r.level(e.to);
    if (to_level == from_level + 1) {
      new_edges.push_back(e);
    } else {
      chain(e.from, e.to, e.bit, e.weight, from_level, to_level, new_edges);
    }
  }
  r.edges = std::move(new_edges);

  // Pad above the source when it does not read x1.
  std::size_t src_level = r.level(r.source);
  if (src_level > 0) {
    int below = r.source;
    for (std::size_t lvl = src_level; lvl-- > 0;) {
      evdd_node pad;
      pad.id = next_id++;
      pad.var = r.vars[lvl];
      r.nodes.push_back(pad);
      r.edges.push_back({pad.id, below, 0, one(r.semiring)});
      r.edges.push_back({pad.id, below, 1, one(r.semiring)});
      below = pad.id;
    }
    r.source = below;
  }
  return r;
}

evdd normalize_parallel_edges(const evdd& g, double tol) {
  double tl = effective_tol(g.semiring, tol);
  evdd r = g;

  std::map<std::tuple<int, int, int>, value> merged;
  for (const evdd_edge& e : r.edges) {
    auto key = std::make_tuple(e.from, e.bit, e.to);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(key, e.weight);
    else
      it->second = add(it->second, e.weight);
  }

  std::unordered_map<int, std::size_t> outdeg, indeg;
  for (const auto& [key, w] : merged) {
    ++outdeg[std::get<0>(key)];
    ++indeg[std::get<2>(key)];
  }
  // Zero-weight edges are dropped unless removal would strand an endpoint:
  // every node keeps its last outgoing and its last incoming edge.
  std::vector<evdd_edge> kept;
  for (const auto& [key, w] : merged) {
    auto [from, bit, to] = key;
    if (is_zero(w, tl) && outdeg[from] > 1 && indeg[to] > 1) {
      --outdeg[from];
      --indeg[to];
      continue;
    }
    kept.push_back({from, to, bit, w});
  }
  r.edges = std::move(kept);
  return r;
}

tensor_train to_tt(const evdd& g0) {
  g0.validate();
  if (!check_ordered(g0))
    throw not_ordered("tensor-train extraction is defined for ordered diagrams");
  evdd g = complete(normalize_parallel_edges(g0));
  std::size_t n = g.vars.size();

  // Nodes that read x1 without being the source sit on no source-to-sink
  // path; dropping them keeps the first bond at 1.
  std::set<int> drop;
  for (const evdd_node& nd : g.nodes)
    if (nd.var && parse_var_index(*nd.var) == 1 && nd.id != g.source)
      drop.insert(nd.id);
  std::erase_if(g.edges, [&](const evdd_edge& e) { return drop.count(e.from) != 0; });
  std::erase_if(g.nodes, [&](const evdd_node& nd) { return drop.count(nd.id) != 0; });

  // Enumerate each level breadth-first from the source; nodes no search
  // reaches follow in id order.
  std::map<int, std::vector<std::pair<int, int>>> out; // id -> (bit, to)
  for (const evdd_edge& e : g.edges) out[e.from].push_back({e.bit, e.to});
  for (auto& [id, v] : out) std::sort(v.begin(), v.end());

  std::unordered_map<int, std::size_t> discovery;
  std::queue<int> q;
  q.push(g.source);
  discovery[g.source] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [bit, to] : out[v])
      if (!discovery.count(to)) {
        discovery[to] = discovery.size();
        q.push(to);
      }
  }

  std::vector<std::vector<int>> levels(n + 1);
  for (const evdd_node& nd : g.nodes) levels[g.level(nd.id)].push_back(nd.id);
  for (auto& lvl : levels)
    std::sort(lvl.begin(), lvl.end(), [&](int a, int b) {
      auto ia = discovery.find(a), ib = discovery.find(b);
      bool da = ia != discovery.end(), db = ib != discovery.end();
      if (da != db) return da;
      if (da) return ia->second < ib->second;
      return a < b;
    });

  // A level no surviving node occupies carries one fresh dead node so every
  // bond stays positive; such levels only occur when no path reaches the
  // sink and the function is identically zero.
  int next_id = 0;
  for (const evdd_node& nd : g.nodes) next_id = std::max(next_id, nd.id + 1);
  for (std::size_t r = 0; r < n; ++r)
    if (levels[r].empty()) {
      evdd_node dead;
      dead.id = next_id++;
      dead.var = g.vars[r];
      g.nodes.push_back(dead);
      levels[r].push_back(dead.id);
    }

  std::unordered_map<int, std::size_t> pos;
  for (const auto& lvl : levels)
    for (std::size_t i = 0; i < lvl.size(); ++i) pos[lvl[i]] = i;

  tensor_train t;
  t.semiring = g.semiring;
  t.n = n;
  t.bond.resize(n + 1);
  for (std::size_t r = 0; r <= n; ++r) t.bond[r] = levels[r].size();
  t.cores.resize(n);
  for (const evdd_edge& e : g.edges) {
    std::size_t r = g.level(e.from);
    t.cores[r].set(pos.at(e.from), pos.at(e.to), static_cast<std::size_t>(e.bit),
                   e.weight);
  }
  t.validate();
  return t;
}

} // namespace pbkc
