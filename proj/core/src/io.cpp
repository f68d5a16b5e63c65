#include "pbkc/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pbkc/var_names.hpp"

namespace pbkc {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw parse_error(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

const json* opt_field(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

long long as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

std::size_t as_size(const json& j, const std::string& where) {
  long long v = as_int(j, where);
  if (v < 0) fail(where, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

int as_bit(const json& j, const std::string& where) {
  long long v = as_int(j, where);
  if (v != 0 && v != 1) fail(where, "expected 0 or 1");
  return static_cast<int>(v);
}

bool is_decimal_int(const std::string& s) {
  std::size_t i = s.size() && s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

mpz_class parse_mpz(const std::string& s, const std::string& where) {
  if (!is_decimal_int(s)) fail(where, "\"" + s + "\" is not a decimal integer");
  return mpz_class(s, 10);
}

value parse_rational_text(const std::string& s, const std::string& where) {
  std::size_t slash = s.find('/');
  if (slash == std::string::npos) return value(mpq_class(parse_mpz(s, where)));
  mpz_class num = parse_mpz(s.substr(0, slash), where);
  mpz_class den = parse_mpz(s.substr(slash + 1), where);
  if (den == 0) fail(where, "zero denominator");
  return value(mpq_class(num, den)); // the value constructor canonicalizes
}

value weight_from_json(const json& j, semiring_id s, const std::string& where) {
  switch (s) {
  case semiring_id::boolean:
    if (!j.is_boolean()) fail(where, "expected true or false");
    return value(j.get<bool>());
  case semiring_id::integer:
    if (j.is_number_integer())
      return value(mpz_class(static_cast<long>(j.get<long long>())));
    if (j.is_string()) return value(parse_mpz(j.get<std::string>(), where));
    fail(where, "expected a decimal-integer string");
  case semiring_id::rational:
    if (j.is_number_integer())
      return value(mpq_class(mpz_class(static_cast<long>(j.get<long long>()))));
    if (j.is_string()) return parse_rational_text(j.get<std::string>(), where);
    fail(where, "expected a \"p/q\" or \"p\" string");
  case semiring_id::float64:
    if (!j.is_number()) fail(where, "expected a number");
    return value(j.get<double>());
  case semiring_id::complex128: {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
      fail(where, "expected [re, im]");
    return value(std::complex<double>(j[0].get<double>(), j[1].get<double>()));
  }
  }
  fail(where, "unknown semiring tag");
}

json weight_to_json(const value& v) {
  switch (v.semiring()) {
  case semiring_id::boolean: return v.as_bool();
  case semiring_id::integer: return v.as_int().get_str();
  case semiring_id::rational: {
    const mpq_class& q = v.as_rat();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  }
  case semiring_id::float64: return v.as_float();
  case semiring_id::complex128:
    return json::array({v.as_complex().real(), v.as_complex().imag()});
  }
  return nullptr;
}

semiring_id semiring_field(const json& root) {
  return semiring_from_name(as_string(field(root, "semiring", "document"), "semiring"));
}

// --- tensor train -----------------------------------------------------------

tensor_train load_tt(const json& root) {
  tensor_train t;
  t.semiring = semiring_field(root);
  t.n = as_size(field(root, "n", "tt"), "tt.n");
  const json& bond = field(root, "bond", "tt");
  if (!bond.is_array()) fail("tt.bond", "expected an array");
  for (std::size_t r = 0; r < bond.size(); ++r)
    t.bond.push_back(as_size(bond[r], "tt.bond[" + std::to_string(r) + "]"));
  const json& cores = field(root, "cores", "tt");
  if (!cores.is_array()) fail("tt.cores", "expected an array");
  for (std::size_t r = 0; r < cores.size(); ++r) {
    const json& cj = cores[r];
    std::string where = "tt.cores[" + std::to_string(r) + "]";
    if (!cj.is_array()) fail(where, "expected an array of [s,t,b,weight] entries");
    tt_core core;
    for (std::size_t e = 0; e < cj.size(); ++e) {
      const json& ej = cj[e];
      std::string ew = where + "[" + std::to_string(e) + "]";
      if (!ej.is_array() || ej.size() != 4) fail(ew, "expected [s,t,b,weight]");
      std::size_t s = as_size(ej[0], ew + ".s");
      std::size_t tt_ = as_size(ej[1], ew + ".t");
      if (s == 0 || tt_ == 0) fail(ew, "s and t are 1-based");
      int b = as_bit(ej[2], ew + ".b");
      core.set(s - 1, tt_ - 1, static_cast<std::size_t>(b),
               weight_from_json(ej[3], t.semiring, ew + ".weight"));
    }
    t.cores.push_back(std::move(core));
  }
  t.validate();
  return t;
}

json save_tt(const tensor_train& t) {
  json root;
  root["kind"] = "tt";
  root["semiring"] = semiring_name(t.semiring);
  root["n"] = t.n;
  root["bond"] = t.bond;
  json cores = json::array();
  for (const tt_core& core : t.cores) {
    json cj = json::array();
    for (const auto& [key, w] : core.w)
      cj.push_back(json::array(
          {key[0] + 1, key[1] + 1, key[2], weight_to_json(w)}));
    cores.push_back(std::move(cj));
  }
  root["cores"] = std::move(cores);
  return root;
}

// --- evdd -------------------------------------------------------------------

evdd load_evdd(const json& root) {
  evdd g;
  g.semiring = semiring_field(root);
  const json& vars = field(root, "vars", "evdd");
  if (!vars.is_array()) fail("evdd.vars", "expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i)
    g.vars.push_back(as_string(vars[i], "evdd.vars[" + std::to_string(i) + "]"));
  const json& nodes = field(root, "nodes", "evdd");
  if (!nodes.is_array()) fail("evdd.nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& nj = nodes[i];
    std::string where = "evdd.nodes[" + std::to_string(i) + "]";
    evdd_node nd;
    nd.id = static_cast<int>(as_int(field(nj, "id", where), where + ".id"));
    if (const json* v = opt_field(nj, "var")) {
      nd.var = as_string(*v, where + ".var");
    } else {
      const json& s = field(nj, "sink", where);
      if (!s.is_boolean() || !s.get<bool>())
        fail(where, "node needs \"var\" or \"sink\": true");
    }
    g.nodes.push_back(std::move(nd));
  }
  g.source = static_cast<int>(as_int(field(root, "source", "evdd"), "evdd.source"));
  g.sink = static_cast<int>(as_int(field(root, "sink", "evdd"), "evdd.sink"));
  const json& edges = field(root, "edges", "evdd");
  if (!edges.is_array()) fail("evdd.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const json& ej = edges[i];
    std::string where = "evdd.edges[" + std::to_string(i) + "]";
    evdd_edge e;
    e.from = static_cast<int>(as_int(field(ej, "from", where), where + ".from"));
    e.to = static_cast<int>(as_int(field(ej, "to", where), where + ".to"));
    e.bit = as_bit(field(ej, "bit", where), where + ".bit");
    e.weight = weight_from_json(field(ej, "weight", where), g.semiring, where + ".weight");
    g.edges.push_back(std::move(e));
  }
  g.validate();
  return g;
}

json save_evdd(const evdd& g) {
  json root;
  root["kind"] = "evdd";
  root["semiring"] = semiring_name(g.semiring);
  root["vars"] = g.vars;
  json nodes = json::array();
  for (const evdd_node& nd : g.nodes) {
    json nj;
    nj["id"] = nd.id;
    if (nd.var)
      nj["var"] = *nd.var;
    else
      nj["sink"] = true;
    nodes.push_back(std::move(nj));
  }
  root["nodes"] = std::move(nodes);
  root["source"] = g.source;
  root["sink"] = g.sink;
  json edges = json::array();
  for (const evdd_edge& e : g.edges) {
    json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["bit"] = e.bit;
    ej["weight"] = weight_to_json(e.weight);
    edges.push_back(std::move(ej));
  }
  root["edges"] = std::move(edges);
  return root;
}

// --- ttn --------------------------------------------------------------------

void load_ttn_tree(const json& j, ttn& t, const std::string& where) {
  ttn_node nd;
  nd.id = static_cast<int>(as_int(field(j, "id", where), where + ".id"));
  nd.d = as_size(field(j, "d", where), where + ".d");
  const json* left = opt_field(j, "left");
  const json* right = opt_field(j, "right");
  if ((left == nullptr) != (right == nullptr))
    fail(where, "a node needs both \"left\" and \"right\" or neither");
  if (left) {
    nd.left = static_cast<int>(as_int(field(*left, "id", where + ".left"),
                                      where + ".left.id"));
    nd.right = static_cast<int>(as_int(field(*right, "id", where + ".right"),
                                       where + ".right.id"));
  } else {
    nd.var = as_string(field(j, "var", where), where + ".var");
  }
  if (t.nodes.count(nd.id)) fail(where, "duplicate node id " + std::to_string(nd.id));
  t.nodes[nd.id] = nd;
  if (left) {
    load_ttn_tree(*left, t, where + ".left");
    load_ttn_tree(*right, t, where + ".right");
  }
}

ttn load_ttn(const json& root) {
  ttn t;
  t.semiring = semiring_field(root);
  const json& tree = field(root, "tree", "ttn");
  load_ttn_tree(tree, t, "ttn.tree");
  t.root = static_cast<int>(as_int(field(tree, "id", "ttn.tree"), "ttn.tree.id"));
  const json& tensors = field(root, "tensors", "ttn");
  if (!tensors.is_object()) fail("ttn.tensors", "expected an object keyed by node id");
  for (auto it = tensors.begin(); it != tensors.end(); ++it) {
    std::string where = "ttn.tensors[\"" + it.key() + "\"]";
    int id;
    try {
      std::size_t pos = 0;
      id = std::stoi(it.key(), &pos);
      if (pos != it.key().size()) throw std::invalid_argument(it.key());
    } catch (const std::exception&) {
      fail(where, "key is not a node id");
    }
    if (!t.has_node(id)) fail(where, "unknown node id");
    bool leaf = t.node(id).is_leaf();
    const json& entries = *it;
    if (!entries.is_array()) fail(where, "expected an array of entries");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const json& ej = entries[e];
      std::string ew = where + "[" + std::to_string(e) + "]";
      if (leaf) {
        if (!ej.is_array() || ej.size() != 3) fail(ew, "expected [b,k,weight]");
        int b = as_bit(ej[0], ew + ".b");
        std::size_t k = as_size(ej[1], ew + ".k");
        if (k == 0) fail(ew, "k is 1-based");
        t.set_leaf(id, static_cast<std::size_t>(b), k - 1,
                   weight_from_json(ej[2], t.semiring, ew + ".weight"));
      } else {
        if (!ej.is_array() || ej.size() != 4) fail(ew, "expected [i,j,k,weight]");
        std::size_t i = as_size(ej[0], ew + ".i");
        std::size_t jj = as_size(ej[1], ew + ".j");
        std::size_t k = as_size(ej[2], ew + ".k");
        if (i == 0 || jj == 0 || k == 0) fail(ew, "i, j, k are 1-based");
        t.set_internal(id, i - 1, jj - 1, k - 1,
                       weight_from_json(ej[3], t.semiring, ew + ".weight"));
      }
    }
  }
  t.validate();
  return t;
}

json save_ttn_tree(const ttn& t, int id) {
  const ttn_node& nd = t.node(id);
  json j;
  j["id"] = nd.id;
  j["d"] = nd.d;
  if (nd.is_leaf()) {
    j["var"] = *nd.var;
  } else {
    j["left"] = save_ttn_tree(t, nd.left);
    j["right"] = save_ttn_tree(t, nd.right);
  }
  return j;
}

json save_ttn(const ttn& t) {
  json root;
  root["kind"] = "ttn";
  root["semiring"] = semiring_name(t.semiring);
  root["tree"] = save_ttn_tree(t, t.root);
  json tensors = json::object();
  for (const auto& [id, entries] : t.tensors) {
    if (entries.empty()) continue;
    json arr = json::array();
    bool leaf = t.node(id).is_leaf();
    for (const auto& [key, w] : entries) {
      if (leaf)
        arr.push_back(json::array({key[0], key[1] + 1, weight_to_json(w)}));
      else
        arr.push_back(
            json::array({key[0] + 1, key[1] + 1, key[2] + 1, weight_to_json(w)}));
    }
    tensors[std::to_string(id)] = std::move(arr);
  }
  root["tensors"] = std::move(tensors);
  return root;
}

// --- circuit ----------------------------------------------------------------

void load_vtree_node(const json& j, vtree& v, const std::string& where) {
  vtree_node nd;
  nd.id = static_cast<int>(as_int(field(j, "id", where), where + ".id"));
  const json* left = opt_field(j, "left");
  const json* right = opt_field(j, "right");
  if ((left == nullptr) != (right == nullptr))
    fail(where, "a node needs both \"left\" and \"right\" or neither");
  if (left) {
    nd.left = static_cast<int>(as_int(field(*left, "id", where + ".left"),
                                      where + ".left.id"));
    nd.right = static_cast<int>(as_int(field(*right, "id", where + ".right"),
                                       where + ".right.id"));
  } else {
    nd.var = as_string(field(j, "var", where), where + ".var");
  }
  if (v.nodes.count(nd.id)) fail(where, "duplicate node id " + std::to_string(nd.id));
  v.nodes[nd.id] = nd;
  if (left) {
    load_vtree_node(*left, v, where + ".left");
    load_vtree_node(*right, v, where + ".right");
  }
}

json save_vtree_node(const vtree& v, int id) {
  const vtree_node& nd = v.node(id);
  json j;
  j["id"] = nd.id;
  if (nd.is_leaf()) {
    j["var"] = *nd.var;
  } else {
    j["left"] = save_vtree_node(v, nd.left);
    j["right"] = save_vtree_node(v, nd.right);
  }
  return j;
}

circuit load_circuit(const json& root) {
  circuit c;
  c.semiring = semiring_field(root);
  if (const json* vj = opt_field(root, "vtree")) {
    vtree v;
    load_vtree_node(*vj, v, "circuit.vtree");
    v.root = static_cast<int>(as_int(field(*vj, "id", "circuit.vtree"),
                                     "circuit.vtree.id"));
    v.validate();
    c.vt = std::move(v);
  }
  const json& gates = field(root, "gates", "circuit");
  if (!gates.is_array()) fail("circuit.gates", "expected an array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const json& gj = gates[i];
    std::string where = "circuit.gates[" + std::to_string(i) + "]";
    gate g;
    g.id = static_cast<int>(as_int(field(gj, "id", where), where + ".id"));
    std::string type = as_string(field(gj, "type", where), where + ".type");
    if (type == "input") {
      g.kind = gate_kind::input;
      g.var = as_string(field(gj, "var", where), where + ".var");
      g.bit = as_bit(field(gj, "value", where), where + ".value");
    } else if (type == "times") {
      g.kind = gate_kind::times;
      const json& ch = field(gj, "children", where);
      if (!ch.is_array()) fail(where + ".children", "expected an array");
      for (std::size_t e = 0; e < ch.size(); ++e)
        g.times_in.push_back(static_cast<int>(
            as_int(ch[e], where + ".children[" + std::to_string(e) + "]")));
    } else if (type == "plus") {
      g.kind = gate_kind::plus;
      const json& ch = field(gj, "children", where);
      if (!ch.is_array()) fail(where + ".children", "expected an array");
      for (std::size_t e = 0; e < ch.size(); ++e) {
        std::string ew = where + ".children[" + std::to_string(e) + "]";
        weighted_edge we;
        we.gate = static_cast<int>(as_int(field(ch[e], "gate", ew), ew + ".gate"));
        we.weight = weight_from_json(field(ch[e], "weight", ew), c.semiring,
                                     ew + ".weight");
        // Plus gates store only nonzero-weight edges.
        if (!is_zero(we.weight, 0.0)) g.plus_in.push_back(std::move(we));
      }
      if (const json* vn = opt_field(gj, "vnode"))
        g.vnode = static_cast<int>(as_int(*vn, where + ".vnode"));
    } else {
      fail(where + ".type", "expected \"input\", \"plus\", or \"times\"");
    }
    c.gates.push_back(std::move(g));
  }
  const json& outs = field(root, "outputs", "circuit");
  if (!outs.is_array()) fail("circuit.outputs", "expected an array");
  for (std::size_t i = 0; i < outs.size(); ++i)
    c.outputs.push_back(static_cast<int>(
        as_int(outs[i], "circuit.outputs[" + std::to_string(i) + "]")));
  c.validate();
  return c;
}

json save_circuit(const circuit& c) {
  json root;
  root["kind"] = "circuit";
  root["semiring"] = semiring_name(c.semiring);
  if (c.vt) root["vtree"] = save_vtree_node(*c.vt, c.vt->root);
  json gates = json::array();
  for (const gate& g : c.gates) {
    json gj;
    gj["id"] = g.id;
    switch (g.kind) {
    case gate_kind::input:
      gj["type"] = "input";
      gj["var"] = g.var;
      gj["value"] = g.bit;
      break;
    case gate_kind::times: {
      gj["type"] = "times";
      gj["children"] = g.times_in;
      break;
    }
    case gate_kind::plus: {
      gj["type"] = "plus";
      json ch = json::array();
      for (const weighted_edge& e : g.plus_in) {
        json ej;
        ej["gate"] = e.gate;
        ej["weight"] = weight_to_json(e.weight);
        ch.push_back(std::move(ej));
      }
      gj["children"] = std::move(ch);
      if (g.vnode) gj["vnode"] = *g.vnode;
      break;
    }
    }
    gates.push_back(std::move(gj));
  }
  root["gates"] = std::move(gates);
  root["outputs"] = c.outputs;
  return root;
}

// --- dense ------------------------------------------------------------------

dense_function load_dense(const json& root) {
  dense_function f;
  f.semiring = semiring_field(root);
  f.n = as_size(field(root, "n", "dense"), "dense.n");
  const json& values = field(root, "values", "dense");
  if (!values.is_array()) fail("dense.values", "expected an array");
  if (f.n >= 8 * sizeof(std::size_t) ||
      values.size() != (std::size_t(1) << f.n))
    throw invariant_violation("dense value count must be 2^n");
  for (std::size_t i = 0; i < values.size(); ++i)
    f.values.push_back(
        weight_from_json(values[i], f.semiring, "dense.values[" + std::to_string(i) + "]"));
  return f;
}

json save_dense(const dense_function& f) {
  json root;
  root["kind"] = "dense";
  root["semiring"] = semiring_name(f.semiring);
  root["n"] = f.n;
  json values = json::array();
  for (const value& v : f.values) values.push_back(weight_to_json(v));
  root["values"] = std::move(values);
  return root;
}

} // namespace

const char* document::kind() const {
  switch (rep.index()) {
  case 0: return "tt";
  case 1: return "ttn";
  case 2: return "evdd";
  case 3: return "circuit";
  default: return "dense";
  }
}

semiring_id document::semiring() const {
  return std::visit([](const auto& r) { return r.semiring; }, rep);
}

std::size_t document::var_count() const {
  if (const auto* t = std::get_if<tensor_train>(&rep)) return t->n;
  if (const auto* t = std::get_if<ttn>(&rep)) return t->var_count();
  if (const auto* g = std::get_if<evdd>(&rep)) return g->vars.size();
  if (const auto* c = std::get_if<circuit>(&rep)) return c->var_count();
  return std::get<dense_function>(rep).n;
}

std::size_t document::output_count() const {
  if (const auto* t = std::get_if<ttn>(&rep)) return t->node(t->root).d;
  if (const auto* c = std::get_if<circuit>(&rep)) return c->outputs.size();
  return 1;
}

document load(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(e.what());
  }
  std::string kind = as_string(field(root, "kind", "document"), "document.kind");
  document d;
  if (kind == "tt")
    d.rep = load_tt(root);
  else if (kind == "ttn")
    d.rep = load_ttn(root);
  else if (kind == "evdd")
    d.rep = load_evdd(root);
  else if (kind == "circuit")
    d.rep = load_circuit(root);
  else if (kind == "dense")
    d.rep = load_dense(root);
  else
    fail("document.kind", "unknown kind \"" + kind + "\"");
  return d;
}

document load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  return load(in);
}

void save(const document& d, std::ostream& out) {
  json root = std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, tensor_train>) return save_tt(r);
        else if constexpr (std::is_same_v<T, ttn>) return save_ttn(r);
        else if constexpr (std::is_same_v<T, evdd>) return save_evdd(r);
        else if constexpr (std::is_same_v<T, circuit>) return save_circuit(r);
        else return save_dense(r);
      },
      d.rep);
  out << root.dump(1) << "\n";
}

void save_file(const document& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open " + path + " for writing");
  save(d, out);
}

value value_from_json_text(const std::string& text, semiring_id s) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(e.what());
  }
  return weight_from_json(j, s, "value");
}

} // namespace pbkc
