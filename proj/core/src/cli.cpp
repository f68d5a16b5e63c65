#include "pbkc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pbkc/generate.hpp"
#include "pbkc/io.hpp"
#include "pbkc/var_names.hpp"

namespace pbkc::cli {

namespace {

std::size_t env_max_vars() {
  if (const char* e = std::getenv("PBKC_MAX_VARS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(e, &end, 10);
    if (end != e && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return default_max_vars;
}

assignment parse_bits(const std::string& s, std::size_t n) {
  if (s.size() != n)
    throw length_mismatch("assignment has " + std::to_string(s.size()) +
                          " bits but the input has " + std::to_string(n) +
                          " variables");
  assignment a;
  for (char ch : s) {
    if (ch != '0' && ch != '1')
      throw parse_error("assignment must be a string over {0, 1}");
    a.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return a;
}

std::size_t pick_output(const document& d, long long requested) {
  std::size_t m = d.output_count();
  if (requested == 0) {
    if (m != 1)
      throw missing_output_index("--output is required: the input has " +
                                 std::to_string(m) + " outputs");
    return 1;
  }
  if (requested < 1 || static_cast<std::size_t>(requested) > m)
    throw missing_output_index("output index " + std::to_string(requested) +
                               " is out of range 1.." + std::to_string(m));
  return static_cast<std::size_t>(requested);
}

dense_function tabulate_output(const document& d, std::size_t k, std::size_t cap) {
  if (const auto* t = std::get_if<tensor_train>(&d.rep)) return tabulate(*t, cap);
  if (const auto* g = std::get_if<evdd>(&d.rep)) return tabulate(*g, cap);
  if (const auto* t = std::get_if<ttn>(&d.rep)) return tabulate(*t, k, cap);
  if (const auto* c = std::get_if<circuit>(&d.rep)) return tabulate(*c, k, cap);
  return std::get<dense_function>(d.rep);
}

int do_convert(const std::string& to, const std::string& in_path,
               const std::string& out_path) {
  document d = load_file(in_path);
  document res;
  if (to == "evdd" && std::holds_alternative<tensor_train>(d.rep))
    res.rep = to_evdd(std::get<tensor_train>(d.rep));
  else if (to == "tt" && std::holds_alternative<evdd>(d.rep))
    res.rep = to_tt(std::get<evdd>(d.rep));
  else if (to == "circuit" && std::holds_alternative<ttn>(d.rep))
    res.rep = to_circuit(std::get<ttn>(d.rep));
  else if (to == "ttn" && std::holds_alternative<circuit>(d.rep))
    res.rep = to_ttn(std::get<circuit>(d.rep));
  else
    throw unsupported_conversion(std::string(d.kind()) + " -> " + to);
  save_file(res, out_path);
  return exit_ok;
}

int do_eval(const std::string& in_path, const std::string& bits,
            long long requested, std::ostream& out) {
  document d = load_file(in_path);
  assignment a = parse_bits(bits, d.var_count());
  std::size_t k = pick_output(d, requested);
  value v;
  if (const auto* t = std::get_if<tensor_train>(&d.rep)) v = eval(*t, a);
  else if (const auto* g = std::get_if<evdd>(&d.rep)) v = eval(*g, a);
  else if (const auto* t = std::get_if<ttn>(&d.rep)) v = eval(*t, a).at(k - 1);
  else if (const auto* c = std::get_if<circuit>(&d.rep))
    v = eval(*c, a, c->outputs.at(k - 1));
  else v = std::get<dense_function>(d.rep).at(a);
  out << to_string(v) << "\n";
  return exit_ok;
}

int do_check(const std::string& in_path, const std::string& property,
             const std::string& mode_name, std::size_t max_vars, double tol,
             std::ostream& out) {
  document d = load_file(in_path);
  check_mode mode = mode_name == "structural" ? check_mode::structural
                                              : check_mode::semantic;
  auto reject = [&]() -> parse_error {
    return parse_error("property " + property + " is not defined for kind " +
                       d.kind());
  };
  tristate t3;
  if (property == "read-once") {
    const auto* g = std::get_if<evdd>(&d.rep);
    if (!g) throw reject();
    t3 = check_read_once(*g) ? tristate::yes : tristate::no;
  } else if (property == "ordered") {
    const auto* g = std::get_if<evdd>(&d.rep);
    if (!g) throw reject();
    t3 = check_ordered(*g) ? tristate::yes : tristate::no;
  } else if (property == "complete") {
    const auto* g = std::get_if<evdd>(&d.rep);
    if (!g) throw reject();
    t3 = (check_ordered(*g) && check_complete(*g)) ? tristate::yes : tristate::no;
  } else if (property == "deterministic") {
    if (const auto* t = std::get_if<tensor_train>(&d.rep))
      t3 = check_deterministic(*t, tol) ? tristate::yes : tristate::no;
    else if (const auto* g = std::get_if<evdd>(&d.rep))
      t3 = check_deterministic(*g) ? tristate::yes : tristate::no;
    else if (const auto* t = std::get_if<ttn>(&d.rep))
      t3 = check_deterministic(*t, mode, max_vars, tol);
    else if (const auto* c = std::get_if<circuit>(&d.rep))
      t3 = check_deterministic(*c, mode, max_vars, tol);
    else
      throw reject();
  } else if (property == "decision") {
    if (const auto* t = std::get_if<ttn>(&d.rep))
      t3 = check_decision(*t, tol) ? tristate::yes : tristate::no;
    else if (const auto* c = std::get_if<circuit>(&d.rep))
      t3 = check_decision(*c, tol) ? tristate::yes : tristate::no;
    else
      throw reject();
  } else if (property == "decomposable") {
    const auto* c = std::get_if<circuit>(&d.rep);
    if (!c) throw reject();
    t3 = check_decomposable(*c) ? tristate::yes : tristate::no;
  } else { // structured
    const auto* c = std::get_if<circuit>(&d.rep);
    if (!c) throw reject();
    bool ok = false;
    if (c->vt) {
      try {
        ok = check_structured(*c, *c->vt, effective_phi(*c, *c->vt));
      } catch (const variable_not_in_vtree&) {
        ok = false;
      }
    }
    t3 = ok ? tristate::yes : tristate::no;
  }
  switch (t3) {
  case tristate::yes: out << "yes\n"; return exit_ok;
  case tristate::no: out << "no\n"; return exit_no;
  default: out << "unknown\n"; return exit_unknown;
  }
}

int do_compare(const std::string& a_path, const std::string& b_path,
               std::size_t max_vars, double tol, std::ostream& out) {
  document a = load_file(a_path);
  document b = load_file(b_path);
  bool eq = a.var_count() == b.var_count() &&
            a.output_count() == b.output_count();
  for (std::size_t k = 1; eq && k <= a.output_count(); ++k)
    eq = equal(tabulate_output(a, k, max_vars), tabulate_output(b, k, max_vars), tol);
  out << (eq ? "equal" : "unequal") << "\n";
  return eq ? exit_ok : exit_no;
}

int do_info(const std::string& in_path, std::ostream& out) {
  document d = load_file(in_path);
  out << "kind: " << d.kind() << "\n";
  out << "semiring: " << semiring_name(d.semiring()) << "\n";
  out << "variables: " << d.var_count() << "\n";
  out << "outputs: " << d.output_count() << "\n";
  if (const auto* t = std::get_if<tensor_train>(&d.rep)) {
    out << "bond:";
    for (std::size_t b : t->bond) out << " " << b;
    out << "\n";
    std::size_t entries = 0;
    for (const tt_core& c : t->cores) entries += c.w.size();
    out << "bond dimension: " << bond_dimension(*t) << "\n";
    out << "core entries: " << entries << "\n";
  } else if (const auto* g = std::get_if<evdd>(&d.rep)) {
    out << "nodes: " << g->nodes.size() << "\n";
    out << "edges: " << g->edges.size() << "\n";
  } else if (const auto* t = std::get_if<ttn>(&d.rep)) {
    out << "nodes: " << t->nodes.size() << "\n";
    out << "d:";
    std::size_t entries = 0;
    for (const auto& [id, nd] : t->nodes) out << " " << nd.d;
    out << "\n";
    for (const auto& [id, ten] : t->tensors) entries += ten.size();
    out << "tensor entries: " << entries << "\n";
  } else if (const auto* c = std::get_if<circuit>(&d.rep)) {
    std::size_t ni = 0, np = 0, nt = 0, edges = 0;
    for (const gate& g2 : c->gates) {
      if (g2.kind == gate_kind::input) ++ni;
      else if (g2.kind == gate_kind::plus) { ++np; edges += g2.plus_in.size(); }
      else ++nt;
    }
    out << "gates: " << c->gates.size() << "\n";
    out << "input gates: " << ni << "\n";
    out << "plus gates: " << np << "\n";
    out << "times gates: " << nt << "\n";
    out << "plus edges: " << edges << "\n";
    if (c->vt) out << "vtree nodes: " << c->vt->nodes.size() << "\n";
  } else {
    out << "values: " << std::get<dense_function>(d.rep).values.size() << "\n";
  }
  return exit_ok;
}

int do_random(const generator_spec& spec, const std::string& out_path,
              std::ostream& out) {
  document d = generate(spec);
  if (out_path.empty()) save(d, out);
  else save_file(d, out_path);
  return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pseudo-Boolean functions as tensor trains, tree tensor networks,"
               " edge-valued decision diagrams, and structured circuits"};
  app.name("pbkc");
  app.require_subcommand(1);

  std::string in_path, out_path, to_kind, bits, a_path, b_path;
  std::string property, mode_name = "semantic";
  std::size_t max_vars = env_max_vars();
  double tol = default_float_tol;
  long long output_k = 0;

  CLI::App* conv = app.add_subcommand("convert", "Convert between paired kinds");
  conv->add_option("--to", to_kind, "target kind")
      ->required()
      ->check(CLI::IsMember({"tt", "ttn", "evdd", "circuit"}));
  conv->add_option("input", in_path, "input file")->required();
  conv->add_option("-o,--output", out_path, "output file")->required();

  CLI::App* ev = app.add_subcommand("eval", "Evaluate at a 0/1 assignment");
  ev->add_option("input", in_path, "input file")->required();
  ev->add_option("-a,--assignment", bits, "bits of x1..xn")->required();
  ev->add_option("--output", output_k, "1-based output index");

  CLI::App* chk = app.add_subcommand("check", "Decide a property (yes/no/unknown)");
  chk->add_option("input", in_path, "input file")->required();
  chk->add_option("--property", property, "property to decide")
      ->required()
      ->check(CLI::IsMember({"read-once", "ordered", "complete", "deterministic",
                             "decision", "decomposable", "structured"}));
  chk->add_option("--mode", mode_name, "semantic or structural")
      ->check(CLI::IsMember({"semantic", "structural"}));
  chk->add_option("--max-vars", max_vars, "tabulation cap");
  chk->add_option("--tol", tol, "zero tolerance on inexact semirings");

  CLI::App* cmp = app.add_subcommand("compare", "Compare two inputs as functions");
  cmp->add_option("a", a_path, "first file")->required();
  cmp->add_option("b", b_path, "second file")->required();
  cmp->add_option("--max-vars", max_vars, "tabulation cap");
  cmp->add_option("--tol", tol, "entrywise tolerance on inexact semirings");

  CLI::App* inf = app.add_subcommand("info", "Print sizes and counts");
  inf->add_option("input", in_path, "input file")->required();

  CLI::App* rnd = app.add_subcommand("random", "Draw a seeded random instance");
  std::string kind_name, semiring = "rational", flavor_name = "any";
  generator_spec spec;
  rnd->add_option("--kind", kind_name, "tt, ttn, evdd, circuit, or dense")
      ->required()
      ->check(CLI::IsMember({"tt", "ttn", "evdd", "circuit", "dense"}));
  rnd->add_option("--semiring", semiring, "value semiring")
      ->check(CLI::IsMember({"boolean", "integer", "rational", "float64",
                             "complex128"}));
  rnd->add_option("--n", spec.n, "variable count");
  rnd->add_option("--max-dim", spec.max_dim, "bond / d bound");
  rnd->add_option("--density", spec.density, "nonzero fraction in (0, 1]");
  rnd->add_option("--flavor", flavor_name, "any, deterministic, or decision")
      ->check(CLI::IsMember({"any", "deterministic", "decision"}));
  rnd->add_option("--seed", spec.seed, "rng seed");
  rnd->add_option("-o,--output", out_path, "output file (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (conv->parsed()) return do_convert(to_kind, in_path, out_path);
    if (ev->parsed()) return do_eval(in_path, bits, output_k, out);
    if (chk->parsed())
      return do_check(in_path, property, mode_name, max_vars, tol, out);
    if (cmp->parsed()) return do_compare(a_path, b_path, max_vars, tol, out);
    if (inf->parsed()) return do_info(in_path, out);
    if (rnd->parsed()) {
      if (kind_name == "tt") spec.kind = gen_kind::tt;
      else if (kind_name == "ttn") spec.kind = gen_kind::ttn;
      else if (kind_name == "evdd") spec.kind = gen_kind::evdd;
      else if (kind_name == "circuit") spec.kind = gen_kind::circuit;
      else spec.kind = gen_kind::dense;
      spec.semiring = semiring_from_name(semiring);
      if (flavor_name == "any") spec.flavor = gen_flavor::any;
      else if (flavor_name == "deterministic") spec.flavor = gen_flavor::deterministic;
      else spec.flavor = gen_flavor::decision;
      return do_random(spec, out_path, out);
    }
  } catch (const error& e) {
    err << e.what() << "\n";
    return exit_usage;
  } catch (const std::ios_base::failure& e) {
    err << "IoError: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

} // namespace pbkc::cli
