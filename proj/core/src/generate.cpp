#include "pbkc/generate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "pbkc/var_names.hpp"

namespace pbkc {

namespace {

struct rng {
  std::mt19937_64 eng;

  explicit rng(std::uint64_t seed) : eng(seed) {}

  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p;
  }
  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng);
  }
  long pick(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(eng);
  }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }

  value nonzero(semiring_id s) {
    switch (s) {
    case semiring_id::boolean: return value(true);
    case semiring_id::integer: {
      long v = 0;
      while (v == 0) v = pick(-9, 9);
      return value(mpz_class(v));
    }
    case semiring_id::rational: {
      long num = 0;
      while (num == 0) num = pick(-9, 9);
      return value(mpq_class(mpz_class(num), mpz_class(pick(1, 9))));
    }
    case semiring_id::float64: {
      double v = 0;
      while (std::abs(v) < 0.125) v = real(-2.0, 2.0);
      return value(v);
    }
    case semiring_id::complex128: {
      double re = 0, im = 0;
      while (std::abs(std::complex<double>(re, im)) < 0.125) {
        re = real(-2.0, 2.0);
        im = real(-2.0, 2.0);
      }
      return value(std::complex<double>(re, im));
    }
    }
    return value(false);
  }
};

// --- tensor train -----------------------------------------------------------

tensor_train gen_tt(const generator_spec& sp, rng& r) {
  if (sp.flavor == gen_flavor::decision)
    throw unsupported_flavor("decision is undefined for tensor trains");
  tensor_train t;
  t.semiring = sp.semiring;
  t.n = sp.n;
  t.bond.push_back(1);
  for (std::size_t i = 1; i < sp.n; ++i) t.bond.push_back(r.uniform(1, sp.max_dim));
  t.bond.push_back(1);
  for (std::size_t rr = 0; rr < sp.n; ++rr) {
    tt_core core;
    for (std::size_t s = 0; s < t.bond[rr]; ++s)
      for (std::size_t b = 0; b < 2; ++b) {
        if (sp.flavor == gen_flavor::deterministic) {
          if (r.chance(sp.density))
            core.set(s, r.uniform(0, t.bond[rr + 1] - 1), b, r.nonzero(sp.semiring));
        } else {
          for (std::size_t tt_ = 0; tt_ < t.bond[rr + 1]; ++tt_)
            if (r.chance(sp.density)) core.set(s, tt_, b, r.nonzero(sp.semiring));
        }
      }
    t.cores.push_back(std::move(core));
  }
  t.validate();
  return t;
}

// --- evdd -------------------------------------------------------------------

evdd gen_evdd(const generator_spec& sp, rng& r) {
  if (sp.flavor == gen_flavor::decision)
    throw unsupported_flavor("decision is undefined for decision diagrams here");
  std::size_t n = sp.n;
  std::vector<std::size_t> sz(n + 1);
  sz[0] = 1;
  for (std::size_t lv = 1; lv < n; ++lv) sz[lv] = r.uniform(1, sp.max_dim);
  sz[n] = 1;
  std::vector<int> base(n + 1);
  int next = 0;
  evdd g;
  g.semiring = sp.semiring;
  for (std::size_t lv = 0; lv <= n; ++lv) {
    base[lv] = next;
    for (std::size_t s = 0; s < sz[lv]; ++s) {
      evdd_node nd;
      nd.id = next++;
      if (lv < n) nd.var = var_name(lv + 1);
      g.nodes.push_back(nd);
    }
  }
  for (std::size_t k = 1; k <= n; ++k) g.vars.push_back(var_name(k));
  g.source = base[0];
  g.sink = base[n];

  bool skipped = false;
  for (std::size_t lv = 0; lv < n; ++lv)
    for (std::size_t s = 0; s < sz[lv]; ++s) {
      int from = base[lv] + static_cast<int>(s);
      for (int b = 0; b < 2; ++b) {
        if (sp.flavor == gen_flavor::deterministic) {
          if (!r.chance(sp.density)) continue;
          std::size_t q = lv + 1;
          if (q < n && r.chance(0.2)) q = r.uniform(lv + 2, n);
          if (q > lv + 1) skipped = true;
          g.edges.push_back({from, base[q] + static_cast<int>(r.uniform(0, sz[q] - 1)),
                             b, r.nonzero(sp.semiring)});
        } else {
          for (std::size_t t = 0; t < sz[lv + 1]; ++t)
            if (r.chance(sp.density))
              g.edges.push_back(
                  {from, base[lv + 1] + static_cast<int>(t), b, r.nonzero(sp.semiring)});
          if (lv + 2 <= n && r.chance(0.25)) {
            std::size_t q = r.uniform(lv + 2, n);
            skipped = true;
            g.edges.push_back({from, base[q] + static_cast<int>(r.uniform(0, sz[q] - 1)),
                               b, r.nonzero(sp.semiring)});
          }
        }
      }
    }
  if (sp.flavor == gen_flavor::any && n >= 2 && !skipped) {
    std::size_t q = r.uniform(2, n);
    g.edges.push_back({g.source, base[q] + static_cast<int>(r.uniform(0, sz[q] - 1)), 0,
                       r.nonzero(sp.semiring)});
  }
  g.validate();
  return g;
}

// --- shared tree builder ----------------------------------------------------

struct tree_spec {
  // id -> (left, right); -1 -1 for leaves
  std::map<int, std::pair<int, int>> children;
  std::map<int, std::size_t> leaf_var;
  int root = 0;
};

tree_spec random_tree(std::size_t n, rng& r) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), r.eng);
  tree_spec ts;
  int next = 0;
  std::function<int(std::size_t, std::size_t)> build =
      [&](std::size_t lo, std::size_t hi) -> int {
    int id = next++;
    if (hi - lo == 1) {
      ts.children[id] = {-1, -1};
      ts.leaf_var[id] = perm[lo];
      return id;
    }
    std::size_t split = r.uniform(lo + 1, hi - 1);
    int left = build(lo, split);
    int right = build(split, hi);
    ts.children[id] = {left, right};
    return id;
  };
  ts.root = build(0, n);
  return ts;
}

// --- ttn --------------------------------------------------------------------

ttn gen_ttn(const generator_spec& sp, rng& r) {
  tree_spec ts = random_tree(sp.n, r);
  ttn t;
  t.semiring = sp.semiring;
  t.root = ts.root;
  for (const auto& [id, ch] : ts.children) {
    ttn_node nd;
    nd.id = id;
    nd.left = ch.first;
    nd.right = ch.second;
    if (nd.is_leaf()) nd.var = var_name(ts.leaf_var.at(id));
    nd.d = r.uniform(1, sp.max_dim);
    t.nodes[id] = nd;
  }

  bool patterned =
      sp.flavor == gen_flavor::decision || sp.flavor == gen_flavor::deterministic;
  std::map<int, std::vector<int>> leaf_side; // leaf id -> side per column

  // Fill tensors bottom-up so leaf sides exist before their parents draw.
  std::vector<int> order;
  for (const auto& [id, ch] : ts.children) order.push_back(id);
  std::sort(order.begin(), order.end(), std::greater<int>()); // children first

  for (int id : order) {
    const ttn_node& nd = t.nodes.at(id);
    if (nd.is_leaf()) {
      if (patterned) {
        std::vector<int>& sides = leaf_side[id];
        for (std::size_t k = 0; k < nd.d; ++k) {
          int side = k == 0 ? 0 : k == 1 ? 1 : static_cast<int>(r.uniform(0, 1));
          sides.push_back(side);
          t.set_leaf(id, static_cast<std::size_t>(side), k, r.nonzero(sp.semiring));
        }
      } else {
        for (std::size_t b = 0; b < 2; ++b)
          for (std::size_t k = 0; k < nd.d; ++k)
            if (r.chance(sp.density)) t.set_leaf(id, b, k, r.nonzero(sp.semiring));
      }
      continue;
    }
    std::size_t dl = t.nodes.at(nd.left).d, dr = t.nodes.at(nd.right).d;
    if (!patterned) {
      for (std::size_t i = 0; i < dl; ++i)
        for (std::size_t j = 0; j < dr; ++j)
          for (std::size_t k = 0; k < nd.d; ++k)
            if (r.chance(sp.density)) t.set_internal(id, i, j, k, r.nonzero(sp.semiring));
      continue;
    }
    // Decision patterns: at most one entry per slice, or two entries whose
    // leaf-side columns are complementary single-sided indicators.
    auto side_cols = [&](int leaf, int side) {
      std::vector<std::size_t> cols;
      const std::vector<int>& sides = leaf_side.at(leaf);
      for (std::size_t k = 0; k < sides.size(); ++k)
        if (sides[k] == side) cols.push_back(k);
      return cols;
    };
    std::vector<int> guard_leaves;
    for (int ch : {nd.left, nd.right})
      if (t.nodes.at(ch).is_leaf() && !side_cols(ch, 0).empty() &&
          !side_cols(ch, 1).empty())
        guard_leaves.push_back(ch);
    for (std::size_t k = 0; k < nd.d; ++k) {
      if (!r.chance(sp.density)) continue; // empty slice: the zero function
      if (!guard_leaves.empty() && r.chance(0.6)) {
        int leaf = guard_leaves[r.uniform(0, guard_leaves.size() - 1)];
        auto zeros = side_cols(leaf, 0), ones = side_cols(leaf, 1);
        std::size_t c0 = zeros[r.uniform(0, zeros.size() - 1)];
        std::size_t c1 = ones[r.uniform(0, ones.size() - 1)];
        if (leaf == nd.left) {
          t.set_internal(id, c0, r.uniform(0, dr - 1), k, r.nonzero(sp.semiring));
          t.set_internal(id, c1, r.uniform(0, dr - 1), k, r.nonzero(sp.semiring));
        } else {
          t.set_internal(id, r.uniform(0, dl - 1), c0, k, r.nonzero(sp.semiring));
          t.set_internal(id, r.uniform(0, dl - 1), c1, k, r.nonzero(sp.semiring));
        }
      } else {
        t.set_internal(id, r.uniform(0, dl - 1), r.uniform(0, dr - 1), k,
                       r.nonzero(sp.semiring));
      }
    }
  }
  t.validate();
  return t;
}

// --- circuit ----------------------------------------------------------------

circuit gen_circuit(const generator_spec& sp, rng& r) {
  tree_spec ts = random_tree(sp.n, r);
  vtree vt;
  for (const auto& [id, ch] : ts.children) {
    vtree_node vn;
    vn.id = id;
    vn.left = ch.first;
    vn.right = ch.second;
    if (ch.first < 0) vn.var = var_name(ts.leaf_var.at(id));
    vt.nodes[id] = vn;
  }
  vt.root = ts.root;
  vt.validate();

  circuit c;
  c.semiring = sp.semiring;
  c.vt = vt;
  int next = 0;
  std::map<std::pair<std::size_t, int>, int> inputs;
  auto input_gate = [&](std::size_t var, int bit) {
    auto it = inputs.find({var, bit});
    if (it != inputs.end()) return it->second;
    gate g;
    g.id = next++;
    g.kind = gate_kind::input;
    g.var = var_name(var);
    g.bit = bit;
    c.gates.push_back(g);
    return inputs[{var, bit}] = g.id;
  };
  std::map<std::pair<int, int>, int> times_memo;
  std::vector<int> all_times;
  auto times_gate = [&](int lg, int rg) {
    auto it = times_memo.find({lg, rg});
    if (it != times_memo.end()) return it->second;
    gate g;
    g.id = next++;
    g.kind = gate_kind::times;
    g.times_in = {lg, rg};
    c.gates.push_back(g);
    all_times.push_back(g.id);
    return times_memo[{lg, rg}] = g.id;
  };

  std::map<int, std::vector<int>> pool; // vtree node -> layered plus gates
  std::map<int, std::vector<int>> deep; // vtree node -> plus gates in subtree
  std::map<int, std::vector<int>> leaf_side;

  bool patterned =
      sp.flavor == gen_flavor::decision || sp.flavor == gen_flavor::deterministic;

  std::vector<int> order;
  for (const auto& [id, ch] : ts.children) order.push_back(id);
  std::sort(order.begin(), order.end(), std::greater<int>()); // children first

  for (int u : order) {
    auto [lt, rt] = ts.children.at(u);
    std::size_t d = r.uniform(1, sp.max_dim);
    std::vector<int>& gates_here = pool[u];

    if (lt < 0) { // leaf vtree node
      std::size_t var = ts.leaf_var.at(u);
      for (std::size_t k = 0; k < d; ++k) {
        gate g;
        g.id = next++;
        g.kind = gate_kind::plus;
        if (patterned) {
          int side = k == 0 ? 0 : k == 1 ? 1 : static_cast<int>(r.uniform(0, 1));
          leaf_side[u].push_back(side);
          g.plus_in.push_back({input_gate(var, side), r.nonzero(sp.semiring)});
        } else {
          for (int b = 0; b < 2; ++b)
            if (r.chance(sp.density))
              g.plus_in.push_back({input_gate(var, b), r.nonzero(sp.semiring)});
          if (g.plus_in.empty())
            g.plus_in.push_back(
                {input_gate(var, static_cast<int>(r.uniform(0, 1))), r.nonzero(sp.semiring)});
        }
        c.gates.push_back(g);
        gates_here.push_back(g.id);
      }
    } else {
      const std::vector<int>& lp = pool.at(lt);
      const std::vector<int>& rp = pool.at(rt);
      auto rand_of = [&](const std::vector<int>& v) {
        return v[r.uniform(0, v.size() - 1)];
      };
      auto side_cols = [&](int leaf, int side) {
        std::vector<std::size_t> cols;
        auto it = leaf_side.find(leaf);
        if (it == leaf_side.end()) return cols;
        for (std::size_t k = 0; k < it->second.size(); ++k)
          if (it->second[k] == side) cols.push_back(k);
        return cols;
      };
      std::vector<int> guard_leaves;
      if (patterned)
        for (int ch : {lt, rt})
          if (ts.children.at(ch).first < 0 && !side_cols(ch, 0).empty() &&
              !side_cols(ch, 1).empty())
            guard_leaves.push_back(ch);

      for (std::size_t k = 0; k < d; ++k) {
        gate g;
        g.id = next; // reserved after children exist; assigned below
        g.kind = gate_kind::plus;
        std::set<int> used;
        auto add_edge = [&](int child) {
          if (used.insert(child).second)
            g.plus_in.push_back({child, r.nonzero(sp.semiring)});
        };

        if (patterned) {
          if (!guard_leaves.empty() && r.chance(0.6)) {
            int leaf = guard_leaves[r.uniform(0, guard_leaves.size() - 1)];
            auto zeros = side_cols(leaf, 0), ones = side_cols(leaf, 1);
            std::size_t c0 = zeros[r.uniform(0, zeros.size() - 1)];
            std::size_t c1 = ones[r.uniform(0, ones.size() - 1)];
            if (leaf == lt) {
              add_edge(times_gate(lp[c0], rand_of(rp)));
              add_edge(times_gate(lp[c1], rand_of(rp)));
            } else {
              add_edge(times_gate(rand_of(lp), rp[c0]));
              add_edge(times_gate(rand_of(lp), rp[c1]));
            }
          } else {
            add_edge(times_gate(rand_of(lp), rand_of(rp)));
          }
        } else {
          for (int lg : lp)
            for (int rg : rp)
              if (r.chance(sp.density * 0.6)) {
                int a = r.chance(0.2) ? rand_of(deep.at(lt)) : lg;
                int b = r.chance(0.2) ? rand_of(deep.at(rt)) : rg;
                add_edge(times_gate(a, b));
              }
          if (!gates_here.empty() && r.chance(0.3)) add_edge(rand_of(gates_here));
          if (r.chance(0.3))
            add_edge(rand_of(r.chance(0.5) ? deep.at(lt) : deep.at(rt)));
          if (g.plus_in.empty()) add_edge(times_gate(rand_of(lp), rand_of(rp)));
        }
        g.id = next++;
        c.gates.push_back(g);
        gates_here.push_back(g.id);
      }
    }
    std::vector<int>& dp = deep[u];
    dp = gates_here;
    if (lt >= 0) {
      dp.insert(dp.end(), deep.at(lt).begin(), deep.at(lt).end());
      dp.insert(dp.end(), deep.at(rt).begin(), deep.at(rt).end());
    }
  }

  c.outputs = pool.at(ts.root);
  if (!patterned && !all_times.empty() && r.chance(0.3))
    c.outputs.push_back(all_times[r.uniform(0, all_times.size() - 1)]);
  c.validate();
  return c;
}

// --- dense ------------------------------------------------------------------

dense_function gen_dense(const generator_spec& sp, rng& r) {
  if (sp.flavor != gen_flavor::any)
    throw unsupported_flavor("dense functions only support flavor any");
  if (sp.n >= 8 * sizeof(std::size_t))
    throw too_many_variables("cannot tabulate " + std::to_string(sp.n) + " variables");
  dense_function f;
  f.semiring = sp.semiring;
  f.n = sp.n;
  for (std::size_t i = 0; i < (std::size_t(1) << sp.n); ++i)
    f.values.push_back(r.chance(sp.density) ? r.nonzero(sp.semiring)
                                            : zero(sp.semiring));
  return f;
}

} // namespace

document generate(const generator_spec& spec) {
  if (spec.n == 0) throw invariant_violation("generator needs n >= 1");
  if (spec.max_dim == 0) throw invariant_violation("generator needs max-dim >= 1");
  if (!(spec.density > 0.0) || spec.density > 1.0)
    throw invariant_violation("generator density must lie in (0, 1]");
  rng r(spec.seed);
  document d;
  switch (spec.kind) {
  case gen_kind::tt: d.rep = gen_tt(spec, r); break;
  case gen_kind::evdd: d.rep = gen_evdd(spec, r); break;
  case gen_kind::ttn: d.rep = gen_ttn(spec, r); break;
  case gen_kind::circuit: d.rep = gen_circuit(spec, r); break;
  case gen_kind::dense: d.rep = gen_dense(spec, r); break;
  }
  return d;
}

} // namespace pbkc
