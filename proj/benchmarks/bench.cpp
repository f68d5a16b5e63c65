// Microbenchmarks over generator-drawn instances: evaluation, tabulation,
// and the four conversions, each at a few sizes.

#include <benchmark/benchmark.h>

#include <pbkc/circuit.hpp>
#include <pbkc/dense.hpp>
#include <pbkc/evdd.hpp>
#include <pbkc/generate.hpp>
#include <pbkc/tensor_train.hpp>
#include <pbkc/ttn.hpp>

namespace {

using namespace pbkc;

generator_spec spec(gen_kind kind, std::size_t n, std::size_t max_dim) {
  generator_spec sp;
  sp.kind = kind;
  sp.semiring = semiring_id::rational;
  sp.n = n;
  sp.max_dim = max_dim;
  sp.density = 0.7;
  sp.seed = 42;
  return sp;
}

void bm_tt_eval(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::tt, n, 4));
  const tensor_train& t = std::get<tensor_train>(doc.rep);
  assignment a = assignment::from_index(0, n);
  for (auto _ : state) {
    value v = eval(t, a);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_tt_eval)->Arg(6)->Arg(10)->Arg(14);

void bm_tt_tabulate(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::tt, n, 4));
  const tensor_train& t = std::get<tensor_train>(doc.rep);
  for (auto _ : state) {
    dense_function f = tabulate(t);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(bm_tt_tabulate)->Arg(6)->Arg(10);

void bm_tt_to_evdd(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::tt, n, 4));
  const tensor_train& t = std::get<tensor_train>(doc.rep);
  for (auto _ : state) {
    evdd g = to_evdd(t);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(bm_tt_to_evdd)->Arg(6)->Arg(10)->Arg(14);

void bm_evdd_to_tt(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::evdd, n, 4));
  const evdd& g = std::get<evdd>(doc.rep);
  for (auto _ : state) {
    tensor_train t = to_tt(g);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(bm_evdd_to_tt)->Arg(6)->Arg(10)->Arg(14);

void bm_evdd_eval(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::evdd, n, 4));
  const evdd& g = std::get<evdd>(doc.rep);
  assignment a = assignment::from_index(0, n);
  for (auto _ : state) {
    value v = eval(g, a);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_evdd_eval)->Arg(6)->Arg(10)->Arg(14);

void bm_ttn_eval(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::ttn, n, 3));
  const ttn& t = std::get<ttn>(doc.rep);
  assignment a = assignment::from_index(0, n);
  for (auto _ : state) {
    std::vector<value> v = eval(t, a);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_ttn_eval)->Arg(4)->Arg(8)->Arg(12);

void bm_ttn_to_circuit(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::ttn, n, 3));
  const ttn& t = std::get<ttn>(doc.rep);
  for (auto _ : state) {
    circuit c = to_circuit(t);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(bm_ttn_to_circuit)->Arg(4)->Arg(8)->Arg(12);

void bm_circuit_to_ttn(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::circuit, n, 3));
  const circuit& c = std::get<circuit>(doc.rep);
  for (auto _ : state) {
    ttn t = to_ttn(c);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(bm_circuit_to_ttn)->Arg(4)->Arg(8)->Arg(12);

void bm_circuit_eval(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  document doc = generate(spec(gen_kind::circuit, n, 3));
  const circuit& c = std::get<circuit>(doc.rep);
  assignment a = assignment::from_index(0, n);
  for (auto _ : state) {
    value v = eval(c, a, c.outputs.front());
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_circuit_eval)->Arg(4)->Arg(8)->Arg(12);

void bm_contract(benchmark::State& state) {
  std::size_t d = static_cast<std::size_t>(state.range(0));
  dense_tensor a = dense_tensor::zeros(semiring_id::float64, {d, d, d});
  dense_tensor b = dense_tensor::zeros(semiring_id::float64, {d, d, d});
  double x = 0.5;
  for (value& v : a.entries) v = value(x += 0.25);
  for (value& v : b.entries) v = value(x -= 0.125);
  for (auto _ : state) {
    dense_tensor r = contract(a, 2, b, 0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_contract)->Arg(8)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
