#include "pbkc/dense.hpp"

#include <string>

#include "pbkc/circuit.hpp"
#include "pbkc/evdd.hpp"
#include "pbkc/tensor_train.hpp"
#include "pbkc/ttn.hpp"

namespace pbkc {

std::size_t assignment::index() const {
  std::size_t idx = 0;
  for (std::uint8_t b : bits) idx = (idx << 1) | b;
  return idx;
}

assignment assignment::from_index(std::size_t idx, std::size_t n) {
  assignment a;
  a.bits.resize(n);
  for (std::size_t r = 0; r < n; ++r)
    a.bits[r] = static_cast<std::uint8_t>((idx >> (n - 1 - r)) & 1u);
  return a;
}

bool equal(const dense_function& f, const dense_function& g, double tol) {
  if (f.semiring != g.semiring)
    throw semiring_mismatch("comparing tables over " +
                            std::string(semiring_name(f.semiring)) + " and " +
                            semiring_name(g.semiring));
  if (f.n != g.n)
    throw shape_mismatch("comparing tables over " + std::to_string(f.n) +
                         " and " + std::to_string(g.n) + " variables");
  double t = effective_tol(f.semiring, tol);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (!approx_equal(f.values[i], g.values[i], t)) return false;
  return true;
}

std::size_t dense_tensor::size() const {
  std::size_t s = 1;
  for (std::size_t d : dims) s *= d;
  return s;
}

std::size_t dense_tensor::flat_index(const std::vector<std::size_t>& multi) const {
  if (multi.size() != dims.size())
    throw dim_mismatch("index order " + std::to_string(multi.size()) +
                       " for tensor of order " + std::to_string(dims.size()));
  std::size_t idx = 0;
  for (std::size_t ax = 0; ax < dims.size(); ++ax) {
    if (multi[ax] >= dims[ax])
      throw dim_mismatch("index out of range on axis " + std::to_string(ax));
    idx = idx * dims[ax] + multi[ax];
  }
  return idx;
}

const value& dense_tensor::at(const std::vector<std::size_t>& multi) const {
  return entries[flat_index(multi)];
}

value& dense_tensor::at(const std::vector<std::size_t>& multi) {
  return entries[flat_index(multi)];
}

dense_tensor dense_tensor::zeros(semiring_id s, std::vector<std::size_t> dims) {
  dense_tensor t;
  t.semiring = s;
  t.dims = std::move(dims);
  t.entries.assign(t.size(), zero(s));
  return t;
}

dense_tensor contract(const dense_tensor& a, std::size_t k, const dense_tensor& b, std::size_t l) {
  if (a.semiring != b.semiring)
    throw semiring_mismatch("contracting tensors over different semirings");
  if (k >= a.order() || l >= b.order())
    throw dim_mismatch("contraction axis out of range");
  if (a.dims[k] != b.dims[l])
    throw dim_mismatch("contracted axes have sizes " + std::to_string(a.dims[k]) +
                       " and " + std::to_string(b.dims[l]));

  std::vector<std::size_t> rdims;
  for (std::size_t ax = 0; ax < a.order(); ++ax)
    if (ax != k) rdims.push_back(a.dims[ax]);
  for (std::size_t ax = 0; ax < b.order(); ++ax)
    if (ax != l) rdims.push_back(b.dims[ax]);
  dense_tensor r = dense_tensor::zeros(a.semiring, rdims);

  std::vector<std::size_t> am(a.order()), bm(b.order()), rm(rdims.size());
  std::size_t rsize = r.size();
  for (std::size_t ri = 0; ri < rsize; ++ri) {
    // Unpack the row-major result index into per-axis coordinates.
    std::size_t rest = ri;
    for (std::size_t ax = rdims.size(); ax-- > 0;) {
      rm[ax] = rdims.empty() ? 0 : rest % rdims[ax];
      rest /= rdims[ax];
    }
    std::size_t pos = 0;
    for (std::size_t ax = 0; ax < a.order(); ++ax)
      if (ax != k) am[ax] = rm[pos++];
    for (std::size_t ax = 0; ax < b.order(); ++ax)
      if (ax != l) bm[ax] = rm[pos++];

    value acc = zero(a.semiring);
    for (std::size_t i = 0; i < a.dims[k]; ++i) {
      am[k] = i;
      bm[l] = i;
      acc = add(acc, mul(a.at(am), b.at(bm)));
    }
    r.entries[ri] = acc;
  }
  return r;
}

dense_tensor elementwise_product(const dense_tensor& a, const dense_tensor& b) {
  if (a.semiring != b.semiring)
    throw semiring_mismatch("elementwise product over different semirings");
  if (a.dims != b.dims)
    throw dim_mismatch("elementwise product of tensors with different dims");
  dense_tensor r = a;
  for (std::size_t i = 0; i < r.entries.size(); ++i)
    r.entries[i] = mul(a.entries[i], b.entries[i]);
  return r;
}

dense_function tabulate_with(semiring_id s, std::size_t n,
                             const std::function<value(const assignment&)>& eval_fn,
                             std::size_t max_vars) {
  if (n > max_vars)
    throw too_many_variables(std::to_string(n) + " variables exceeds cap " +
                             std::to_string(max_vars));
  dense_function f;
  f.semiring = s;
  f.n = n;
  f.values.reserve(std::size_t(1) << n);
  for (std::size_t idx = 0; idx < (std::size_t(1) << n); ++idx)
    f.values.push_back(eval_fn(assignment::from_index(idx, n)));
  return f;
}

dense_function tabulate(const tensor_train& t, std::size_t max_vars) {
  return tabulate_with(t.semiring, t.n,
                       [&](const assignment& a) { return eval(t, a); }, max_vars);
}

dense_function tabulate(const evdd& g, std::size_t max_vars) {
  return tabulate_with(g.semiring, g.vars.size(),
                       [&](const assignment& a) { return eval(g, a); }, max_vars);
}

dense_function tabulate(const ttn& t, std::size_t output, std::size_t max_vars) {
  std::size_t d_root = t.node(t.root).d;
  if (output < 1 || output > d_root)
    throw missing_output_index("output index " + std::to_string(output) +
                               " for a network with " + std::to_string(d_root) +
                               " root functions");
  return tabulate_with(t.semiring, t.var_count(),
                       [&](const assignment& a) { return eval(t, a)[output - 1]; },
                       max_vars);
}

dense_function tabulate(const circuit& c, std::size_t output, std::size_t max_vars) {
  if (output < 1 || output > c.outputs.size())
    throw missing_output_index("output index " + std::to_string(output) +
                               " for a circuit with " +
                               std::to_string(c.outputs.size()) + " outputs");
  return tabulate_with(c.semiring, c.var_count(),
                       [&](const assignment& a) {
                         return eval(c, a, c.outputs[output - 1]);
                       },
                       max_vars);
}

} // namespace pbkc
