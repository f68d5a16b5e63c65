#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pbkc/cli.hpp"
#include "pbkc/generate.hpp"
#include "pbkc/io.hpp"

using namespace pbkc;

namespace {

std::string dump(const document& d) {
  std::ostringstream os;
  save(d, os);
  return os.str();
}

document reload(const document& d) {
  std::istringstream is(dump(d));
  return load(is);
}

std::string golden(const std::string& name) {
  return std::string(GOLDEN_DIR) + "/" + name;
}

struct cli_result {
  int code;
  std::string out;
  std::string err;
};

cli_result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return std::string("pbkc_test_") + name;
}

} // namespace

TEST_CASE("save/load round-trips every kind and semiring") {
  std::vector<gen_kind> kinds = {gen_kind::tt, gen_kind::ttn, gen_kind::evdd,
                                 gen_kind::circuit, gen_kind::dense};
  std::vector<semiring_id> rings = {semiring_id::boolean, semiring_id::integer,
                                    semiring_id::rational, semiring_id::float64,
                                    semiring_id::complex128};
  std::uint64_t seed = 0;
  for (gen_kind k : kinds)
    for (semiring_id s : rings) {
      generator_spec sp;
      sp.kind = k;
      sp.semiring = s;
      sp.n = 3;
      sp.density = 0.8;
      sp.seed = ++seed;
      document d = generate(sp);
      document d2 = reload(d);
      CAPTURE(dump(d));
      CHECK(dump(d2) == dump(d));
      CHECK(d2.kind() == d.kind());
      CHECK(d2.semiring() == d.semiring());
    }
}

TEST_CASE("golden files load, validate, and round-trip") {
  for (const char* name :
       {"fig1-ttn.json", "fig1-circuit.json", "fig2-evdd.json", "fig2-tt.json"}) {
    CAPTURE(name);
    document d = load_file(golden(name));
    CHECK(dump(reload(d)) == dump(d));
  }
}

TEST_CASE("parse diagnostics") {
  SUBCASE("malformed json") {
    std::istringstream is("{ nope");
    CHECK_THROWS_AS(load(is), pbkc::parse_error);
  }
  SUBCASE("unknown kind") {
    std::istringstream is("{\"kind\": \"zdd\", \"semiring\": \"rational\"}");
    CHECK_THROWS_AS(load(is), pbkc::parse_error);
  }
  SUBCASE("missing field") {
    std::istringstream is("{\"kind\": \"tt\", \"semiring\": \"rational\"}");
    CHECK_THROWS_AS(load(is), pbkc::parse_error);
  }
  SUBCASE("broken invariant: outer bond") {
    std::istringstream is(R"({"kind": "tt", "semiring": "rational", "n": 1,
      "bond": [2, 1], "cores": [[[1, 1, 0, "1"], [2, 1, 0, "2"]]]})");
    CHECK_THROWS_AS(load(is), invariant_violation);
  }
  SUBCASE("zero denominator") {
    std::istringstream is(R"({"kind": "dense", "semiring": "rational",
      "n": 1, "values": ["1/0", "0"]})");
    CHECK_THROWS_AS(load(is), pbkc::parse_error);
  }
  SUBCASE("boolean weights must be true or false") {
    std::istringstream is(R"({"kind": "dense", "semiring": "boolean",
      "n": 1, "values": [1, 0]})");
    CHECK_THROWS_AS(load(is), pbkc::parse_error);
  }
}

TEST_CASE("weight text forms") {
  CHECK(value_from_json_text("\"-7/3\"", semiring_id::rational) ==
        value(mpq_class(-7, 3)));
  CHECK(value_from_json_text("\"4\"", semiring_id::rational) ==
        value(mpq_class(4)));
  CHECK(value_from_json_text("5", semiring_id::rational) == value(mpq_class(5)));
  CHECK(value_from_json_text("\"12\"", semiring_id::integer) ==
        value(mpz_class(12)));
  CHECK(value_from_json_text("-3", semiring_id::integer) == value(mpz_class(-3)));
  CHECK(value_from_json_text("true", semiring_id::boolean) == value(true));
  CHECK(value_from_json_text("0.5", semiring_id::float64) == value(0.5));
  CHECK(value_from_json_text("[1.5, -2]", semiring_id::complex128) ==
        value(std::complex<double>(1.5, -2)));
  CHECK_THROWS_AS(value_from_json_text("\"x\"", semiring_id::rational),
                  pbkc::parse_error);
}

TEST_CASE("cli usage errors exit 2 and help exits 0") {
  CHECK(run_cli({}).code == cli::exit_usage);
  CHECK(run_cli({"bogus"}).code == cli::exit_usage);
  CHECK(run_cli({"eval"}).code == cli::exit_usage); // missing required args
  cli_result help = run_cli({"--help"});
  CHECK(help.code == cli::exit_ok);
  CHECK(help.out.find("convert") != std::string::npos);
  cli_result missing = run_cli({"eval", "no-such-file.json", "-a", "01"});
  CHECK(missing.code == cli::exit_usage);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("cli eval") {
  cli_result r = run_cli({"eval", golden("fig1-ttn.json"), "-a", "01",
                          "--output", "2"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out == "3\n");
  // output index is required for the two-output network
  CHECK(run_cli({"eval", golden("fig1-ttn.json"), "-a", "01"}).code ==
        cli::exit_usage);
  // wrong assignment length
  CHECK(run_cli({"eval", golden("fig1-ttn.json"), "-a", "011", "--output", "1"})
            .code == cli::exit_usage);
  // sum over the four all-zeros paths:
  // 1*5*(-12)*18 + 1*7*13*18 + (-1)*10*15*18 + (-1)*(11/4)*13*18
  cli_result tt = run_cli({"eval", golden("fig2-tt.json"), "-a", "0000"});
  CHECK(tt.code == cli::exit_ok);
  CHECK(tt.out == "-5571/2\n");
}

TEST_CASE("cli check") {
  cli_result det = run_cli({"check", golden("fig2-evdd.json"), "--property",
                            "deterministic"});
  CHECK(det.code == cli::exit_no);
  CHECK(det.out == "no\n");

  cli_result ord = run_cli({"check", golden("fig2-evdd.json"), "--property",
                            "ordered"});
  CHECK(ord.code == cli::exit_ok);
  CHECK(ord.out == "yes\n");

  cli_result decis = run_cli({"check", golden("fig1-circuit.json"),
                              "--property", "decision"});
  CHECK(decis.code == cli::exit_no);

  cli_result unk = run_cli({"check", golden("fig1-circuit.json"), "--property",
                            "deterministic", "--max-vars", "0"});
  CHECK(unk.code == cli::exit_unknown);
  CHECK(unk.out == "unknown\n");

  cli_result strct = run_cli({"check", golden("fig1-circuit.json"),
                              "--property", "structured"});
  CHECK(strct.code == cli::exit_ok);

  // property/kind mismatch is a usage error
  CHECK(run_cli({"check", golden("fig1-ttn.json"), "--property", "ordered"})
            .code == cli::exit_usage);
}

TEST_CASE("cli convert and compare") {
  std::string evdd_path = temp_path("fig2.evdd.json");
  std::string back_path = temp_path("fig2.tt.json");
  cli_result conv = run_cli({"convert", "--to", "evdd", golden("fig2-tt.json"),
                             "-o", evdd_path});
  REQUIRE(conv.code == cli::exit_ok);
  cli_result cmp = run_cli({"compare", golden("fig2-tt.json"), evdd_path});
  CHECK(cmp.code == cli::exit_ok);
  CHECK(cmp.out == "equal\n");

  cli_result back = run_cli({"convert", "--to", "tt", evdd_path, "-o", back_path});
  REQUIRE(back.code == cli::exit_ok);
  CHECK(run_cli({"compare", golden("fig2-tt.json"), back_path}).code ==
        cli::exit_ok);

  // the two worked representations agree as functions
  CHECK(run_cli({"compare", golden("fig1-ttn.json"), golden("fig1-circuit.json")})
            .code == cli::exit_ok);
  // but differ from the four-variable train
  cli_result ne = run_cli({"compare", golden("fig1-ttn.json"),
                           golden("fig2-tt.json")});
  CHECK(ne.code == cli::exit_no);
  CHECK(ne.out == "unequal\n");

  // unsupported routing is a usage error
  CHECK(run_cli({"convert", "--to", "ttn", golden("fig2-tt.json"), "-o",
                 temp_path("x.json")})
            .code == cli::exit_usage);
  CHECK(run_cli({"convert", "--to", "tt", golden("fig2-tt.json"), "-o",
                 temp_path("y.json")})
            .code == cli::exit_usage);

  std::remove(evdd_path.c_str());
  std::remove(back_path.c_str());
}

TEST_CASE("cli ttn/circuit conversions") {
  std::string circ_path = temp_path("fig1.circuit.json");
  std::string ttn_path = temp_path("fig1.ttn.json");
  REQUIRE(run_cli({"convert", "--to", "circuit", golden("fig1-ttn.json"), "-o",
                   circ_path})
              .code == cli::exit_ok);
  CHECK(run_cli({"compare", golden("fig1-ttn.json"), circ_path}).code ==
        cli::exit_ok);
  REQUIRE(run_cli({"convert", "--to", "ttn", circ_path, "-o", ttn_path}).code ==
          cli::exit_ok);
  CHECK(run_cli({"compare", golden("fig1-ttn.json"), ttn_path}).code ==
        cli::exit_ok);
  std::remove(circ_path.c_str());
  std::remove(ttn_path.c_str());
}

TEST_CASE("cli info") {
  cli_result r = run_cli({"info", golden("fig2-tt.json")});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out.find("kind: tt\n") != std::string::npos);
  CHECK(r.out.find("variables: 4\n") != std::string::npos);
  CHECK(r.out.find("bond: 1 2 3 2 1\n") != std::string::npos);
  CHECK(r.out.find("bond dimension: 3\n") != std::string::npos);
  CHECK(r.out.find("core entries: 20\n") != std::string::npos);

  cli_result e = run_cli({"info", golden("fig2-evdd.json")});
  CHECK(e.out.find("nodes: 9\n") != std::string::npos);
  CHECK(e.out.find("edges: 20\n") != std::string::npos);

  cli_result t = run_cli({"info", golden("fig1-ttn.json")});
  CHECK(t.out.find("outputs: 2\n") != std::string::npos);
}

TEST_CASE("cli random is reproducible and respects unsupported flavors") {
  std::string p1 = temp_path("rand1.json");
  std::string p2 = temp_path("rand2.json");
  std::vector<std::string> args = {"random", "--kind", "ttn", "--n", "4",
                                   "--seed", "9", "--density", "0.7", "-o", p1};
  REQUIRE(run_cli(args).code == cli::exit_ok);
  args.back() = p2;
  REQUIRE(run_cli(args).code == cli::exit_ok);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  CHECK(run_cli({"random", "--kind", "tt", "--flavor", "decision"}).code ==
        cli::exit_usage);
  CHECK(run_cli({"random", "--kind", "dense", "--flavor", "deterministic"}).code ==
        cli::exit_usage);

  cli_result to_stdout = run_cli({"random", "--kind", "evdd", "--seed", "3"});
  CHECK(to_stdout.code == cli::exit_ok);
  CHECK(to_stdout.out.find("\"kind\"") != std::string::npos);
}

TEST_CASE("PBKC_MAX_VARS overrides the cap when no flag is given") {
  setenv("PBKC_MAX_VARS", "1", 1);
  cli_result low = run_cli({"check", golden("fig1-circuit.json"), "--property",
                            "deterministic"});
  CHECK(low.code == cli::exit_unknown);
  cli_result flag = run_cli({"check", golden("fig1-circuit.json"), "--property",
                             "deterministic", "--max-vars", "4"});
  CHECK(flag.code == cli::exit_no);
  unsetenv("PBKC_MAX_VARS");
  cli_result normal = run_cli({"check", golden("fig1-circuit.json"),
                               "--property", "deterministic"});
  CHECK(normal.code == cli::exit_no);
}
