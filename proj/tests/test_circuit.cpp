#include <doctest.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pbkc/circuit.hpp"
#include "pbkc/dense.hpp"
#include "pbkc/generate.hpp"
#include "pbkc/io.hpp"
#include "pbkc/ttn.hpp"
#include "pbkc/var_names.hpp"

using namespace pbkc;

namespace {

// Reference evaluation: plain recursion with memoization, independent of the
// library's iterative topological pass.
value ref_eval_gate(const circuit& c, int id, const assignment& a,
                    std::map<int, value>& memo) {
  auto it = memo.find(id);
  if (it != memo.end()) return it->second;
  const gate* g = nullptr;
  for (const gate& cand : c.gates)
    if (cand.id == id) g = &cand;
  REQUIRE(g != nullptr);
  value v = zero(c.semiring);
  if (g->kind == gate_kind::input) {
    std::size_t var = parse_var_index(g->var);
    v = a[var - 1] == g->bit ? one(c.semiring) : zero(c.semiring);
  } else if (g->kind == gate_kind::times) {
    v = one(c.semiring);
    for (int ch : g->times_in) v = mul(v, ref_eval_gate(c, ch, a, memo));
  } else {
    for (const weighted_edge& e : g->plus_in)
      v = add(v, mul(e.weight, ref_eval_gate(c, e.gate, a, memo)));
  }
  memo[id] = v;
  return v;
}

circuit random_circuit(std::uint64_t seed, std::size_t n, double density,
                       gen_flavor flavor = gen_flavor::any,
                       semiring_id s = semiring_id::rational) {
  generator_spec sp;
  sp.kind = gen_kind::circuit;
  sp.semiring = s;
  sp.n = n;
  sp.max_dim = 3;
  sp.density = density;
  sp.flavor = flavor;
  sp.seed = seed;
  return std::get<circuit>(generate(sp).rep);
}

circuit load_fig1_circuit() {
  document d = load_file(std::string(GOLDEN_DIR) + "/fig1-circuit.json");
  return std::get<circuit>(d.rep);
}

ttn load_fig1_ttn() {
  document d = load_file(std::string(GOLDEN_DIR) + "/fig1-ttn.json");
  return std::get<ttn>(d.rep);
}

std::string dump(document d) {
  std::ostringstream os;
  save(d, os);
  return os.str();
}

value q(long num, long den = 1) { return value(mpq_class(num, den)); }

} // namespace

TEST_CASE("eval agrees with the recursive reference") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    circuit c = random_circuit(seed, 2 + seed % 5, seed % 2 ? 0.5 : 1.0);
    std::size_t n = c.var_count();
    for (std::size_t idx = 0; idx < (std::size_t(1) << n); ++idx) {
      assignment a = assignment::from_index(idx, n);
      for (int out : c.outputs) {
        std::map<int, value> memo;
        CHECK(eval(c, a, out) == ref_eval_gate(c, out, a, memo));
      }
    }
  }
}

TEST_CASE("evaluating a variable outside the assignment fails") {
  circuit c = random_circuit(1, 3, 1.0);
  assignment a;
  a.bits = {0}; // covers x1 only
  CHECK_THROWS_AS(eval(c, a, c.outputs.front()), unassigned_variable);
}

TEST_CASE("validate rejects malformed circuits") {
  circuit c = load_fig1_circuit();
  SUBCASE("duplicate gate ids") {
    c.gates.push_back(c.gates.front());
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("outputs must exist") {
    c.outputs.push_back(999);
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("parallel plus edges are rejected") {
    for (gate& g : c.gates)
      if (g.kind == gate_kind::plus && g.plus_in.size() >= 2) {
        g.plus_in.push_back(g.plus_in.front());
        break;
      }
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("parallel times children are rejected") {
    for (gate& g : c.gates)
      if (g.kind == gate_kind::times) {
        g.times_in.push_back(g.times_in.front());
        break;
      }
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("weights must match the semiring") {
    for (gate& g : c.gates)
      if (g.kind == gate_kind::plus && !g.plus_in.empty()) {
        g.plus_in.front().weight = value(0.5);
        break;
      }
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("vnode must name a vtree node") {
    for (gate& g : c.gates)
      if (g.kind == gate_kind::plus) {
        g.vnode = 77;
        break;
      }
    CHECK_THROWS_AS(c.validate(), invariant_violation);
  }
  SUBCASE("cycles are rejected") {
    // make a times gate feed on a later plus gate that feeds on it
    circuit cyc;
    cyc.semiring = semiring_id::rational;
    gate t;
    t.id = 0;
    t.kind = gate_kind::times;
    t.times_in = {1};
    gate p;
    p.id = 1;
    p.kind = gate_kind::plus;
    p.plus_in = {{0, q(1)}};
    cyc.gates = {t, p};
    cyc.outputs = {1};
    CHECK_THROWS_AS(cyc.validate(), invariant_violation);
  }
}

TEST_CASE("decomposability") {
  circuit c = load_fig1_circuit();
  CHECK(check_decomposable(c));
  // make a times gate whose children share x2
  gate g;
  g.id = 15;
  g.kind = gate_kind::times;
  g.times_in = {6, 7}; // both plus gates over x2
  c.gates.push_back(g);
  c.outputs.push_back(15);
  c.validate();
  CHECK_FALSE(check_decomposable(c));
}

TEST_CASE("structuredness of the worked example") {
  circuit c = load_fig1_circuit();
  REQUIRE(c.vt.has_value());
  std::map<int, int> phi = effective_phi(c, *c.vt);
  CHECK(check_structured(c, *c.vt, phi));

  // vnode annotations are respected: the file pins each plus gate
  for (const gate& g : c.gates)
    if (g.kind == gate_kind::plus) CHECK(phi.at(g.id) == *g.vnode);
}

TEST_CASE("phi inference covers unannotated circuits") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    circuit c = random_circuit(seed, 2 + seed % 4, 0.8);
    REQUIRE(c.vt.has_value());
    std::map<int, int> phi = effective_phi(c, *c.vt);
    for (const gate& g : c.gates) CHECK(phi.count(g.id) == 1);
    CHECK(check_structured(c, *c.vt, phi));
  }
}

TEST_CASE("a times gate straddling one leaf is not structured") {
  circuit c = load_fig1_circuit();
  gate g;
  g.id = 15;
  g.kind = gate_kind::times;
  g.times_in = {6, 8}; // two x2 functions multiplied
  c.gates.push_back(g);
  c.outputs.push_back(15);
  c.validate();
  CHECK_FALSE(check_structured(c, *c.vt, effective_phi(c, *c.vt)));
  CHECK_THROWS_AS(to_ttn(c), not_structured);
}

TEST_CASE("to_ttn without a vtree is rejected") {
  circuit c = load_fig1_circuit();
  c.vt.reset();
  for (gate& g : c.gates) g.vnode.reset();
  c.validate();
  CHECK_THROWS_AS(to_ttn(c), not_structured);
}

TEST_CASE("determinism checks on the worked example") {
  circuit c = load_fig1_circuit();
  CHECK(check_deterministic(c, check_mode::semantic) == tristate::no);
  CHECK(check_deterministic(c, check_mode::structural) == tristate::unknown);
  CHECK(check_deterministic(c, check_mode::semantic, 0) == tristate::unknown);
}

TEST_CASE("decision circuits are detected and deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    circuit c = random_circuit(seed, 2 + seed % 5, 0.9, gen_flavor::decision);
    CHECK(check_decision(c));
    CHECK(check_deterministic(c, check_mode::semantic) == tristate::yes);
  }
  circuit fig1 = load_fig1_circuit();
  CHECK_FALSE(check_decision(fig1)); // a three-way plus gate cannot branch
}

TEST_CASE("to_ttn of the worked circuit reproduces the worked network") {
  circuit c = load_fig1_circuit();
  ttn t = to_ttn(c);
  document got, want;
  got.rep = t;
  want.rep = load_fig1_ttn();
  CHECK(dump(got) == dump(want));
}

TEST_CASE("to_ttn preserves functions over random structured circuits") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    circuit c = random_circuit(seed, 2 + seed % 5, seed % 2 ? 0.6 : 1.0);
    ttn t = to_ttn(c);
    t.validate();
    REQUIRE(t.node(t.root).d >= c.outputs.size());
    for (std::size_t k = 1; k <= c.outputs.size(); ++k)
      CHECK(equal(tabulate(c, k), tabulate(t, k)));
  }
}

TEST_CASE("network-to-circuit round trip preserves widths and tensors") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    generator_spec sp;
    sp.kind = gen_kind::ttn;
    sp.n = 2 + seed % 5;
    sp.density = seed % 2 ? 0.7 : 1.0;
    sp.seed = seed;
    ttn t = std::get<ttn>(generate(sp).rep);
    ttn t2 = to_ttn(to_circuit(t));
    REQUIRE(t2.nodes.size() == t.nodes.size());
    for (const auto& [id, nd] : t.nodes) {
      REQUIRE(t2.has_node(id));
      CHECK(t2.node(id).d == nd.d);
    }
    for (std::size_t k = 1; k <= t.node(t.root).d; ++k)
      CHECK(equal(tabulate(t, k), tabulate(t2, k)));
  }
}

TEST_CASE("boolean circuits work end to end") {
  circuit c = random_circuit(31, 4, 0.8, gen_flavor::any, semiring_id::boolean);
  ttn t = to_ttn(c);
  for (std::size_t k = 1; k <= c.outputs.size(); ++k)
    CHECK(equal(tabulate(c, k), tabulate(t, k)));
}
