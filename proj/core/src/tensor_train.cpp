#include "pbkc/tensor_train.hpp"

#include <string>

#include "pbkc/dense.hpp"
#include "pbkc/evdd.hpp"
#include "pbkc/var_names.hpp"

namespace pbkc {

value tt_core::at(std::size_t s, std::size_t t, std::size_t b, semiring_id sr) const {
  auto it = w.find({s, t, b});
  return it == w.end() ? zero(sr) : it->second;
}

void tt_core::set(std::size_t s, std::size_t t, std::size_t b, value v) {
  w[{s, t, b}] = std::move(v);
}

void tensor_train::validate() const {
  if (n == 0) throw invariant_violation("tensor train needs at least one variable");
  if (bond.size() != n + 1)
    throw invariant_violation("expected " + std::to_string(n + 1) + " bond sizes, got " +
                              std::to_string(bond.size()));
  if (cores.size() != n)
    throw invariant_violation("expected " + std::to_string(n) + " cores, got " +
                              std::to_string(cores.size()));
  if (bond.front() != 1 || bond.back() != 1)
    throw invariant_violation("boundary bonds must be 1 (chi_1 = chi_{n+1} = 1)");
  for (std::size_t r = 0; r < n; ++r) {
    if (bond[r] == 0 || bond[r + 1] == 0)
      throw invariant_violation("bond sizes must be positive");
    for (const auto& [key, v] : cores[r].w) {
      auto [s, t, b] = key;
      if (s >= bond[r] || t >= bond[r + 1] || b > 1)
        throw invariant_violation("core " + std::to_string(r + 1) +
                                  " entry outside its " + std::to_string(bond[r]) + "x" +
                                  std::to_string(bond[r + 1]) + "x2 shape");
      if (v.semiring() != semiring)
        throw invariant_violation("core weight from a foreign semiring");
    }
  }
}

value eval(const tensor_train& t, const assignment& a) {
  if (a.size() != t.n)
    throw length_mismatch("assignment of length " + std::to_string(a.size()) +
                          " for a train over " + std::to_string(t.n) + " variables");
  std::vector<value> v{one(t.semiring)};
  for (std::size_t r = 0; r < t.n; ++r) {
    std::vector<value> next(t.bond[r + 1], zero(t.semiring));
    std::size_t b = a[r];
    for (const auto& [key, w] : t.cores[r].w) {
      if (key[2] != b) continue;
      next[key[1]] = add(next[key[1]], mul(v[key[0]], w));
    }
    v = std::move(next);
  }
  return v[0];
}

std::size_t bond_dimension(const tensor_train& t) {
  std::size_t m = 0;
  for (std::size_t x : t.bond) m = std::max(m, x);
  return m;
}

bool check_deterministic(const tensor_train& t, double tol) {
  double tl = effective_tol(t.semiring, tol);
  for (const tt_core& core : t.cores) {
    // Count nonzero entries per row slice (s, ., b).
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> row_nonzeros;
    for (const auto& [key, w] : core.w) {
      if (is_zero(w, tl)) continue;
      if (++row_nonzeros[{key[0], key[2]}] > 1) return false;
    }
  }
  return true;
}

evdd to_evdd(const tensor_train& t) {
  t.validate();
  evdd g;
  g.semiring = t.semiring;
  for (std::size_t r = 1; r <= t.n; ++r) g.vars.push_back(var_name(r));

  // Node ids are assigned level by level: level r holds bond[r] nodes.
  std::vector<std::size_t> level_base(t.n + 1);
  int next_id = 0;
  for (std::size_t r = 0; r <= t.n; ++r) {
    level_base[r] = static_cast<std::size_t>(next_id);
    for (std::size_t s = 0; s < t.bond[r]; ++s) {
      evdd_node nd;
      nd.id = next_id++;
      if (r < t.n) nd.var = var_name(r + 1);
      g.nodes.push_back(nd);
    }
  }
  g.source = static_cast<int>(level_base[0]);
  g.sink = static_cast<int>(level_base[t.n]);

  double tl = effective_tol(t.semiring);
  for (std::size_t r = 0; r < t.n; ++r)
    for (const auto& [key, w] : t.cores[r].w) {
      if (is_zero(w, tl)) continue;
      evdd_edge e;
      e.from = static_cast<int>(level_base[r] + key[0]);
      e.to = static_cast<int>(level_base[r + 1] + key[1]);
      e.bit = static_cast<int>(key[2]);
      e.weight = w;
      g.edges.push_back(e);
    }
  g.validate();
  return g;
}

} // namespace pbkc
