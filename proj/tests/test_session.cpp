#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "session.hpp"

using namespace deltaforge;
using namespace deltaforge::cli;

namespace {

Report run_text(const std::string& src, RunFlags flags = {}) { return run_source(src, "test", flags); }

const Json& first_verdict(const Report& r, std::size_t command, const std::string& name) {
  for (const auto& v : r.json["commands"][command]["verdicts"])
    if (v["name"] == name) return v;
  FAIL("no verdict " << name);
  return r.json;
}

const char* kNoSharpPoint = R"(ring m=2
vars [x]
section s := [ [x] ; [x + 1] ]
integrability s wrt d1, d2
)";

}  // namespace

TEST_CASE("statements split on lines and declarations") {
  Session s = parse_session("ring m=1 vars [x]  poly f := d1(x) - x\nkolchin {f}\n");
  REQUIRE(s.statements.size() == 4);
  CHECK(s.statements[0].keyword == "ring");
  CHECK(s.statements[1].echo == "vars [x]");
  CHECK(s.statements[2].echo == "poly f := d1(x) - x");
  CHECK(s.statements[3].line == 2);

  Session multi = parse_session("ring m=1\nvars [x]\nset L := {\n  d1(x) - x,\n  x^2 }\ncheck-charset L\n");
  REQUIRE(multi.statements.size() == 4);
  CHECK(multi.statements[2].echo == "set L := { d1(x) - x, x^2 }");
  CHECK(multi.statements[3].keyword == "check-charset");
}

TEST_CASE("parse diagnostics") {
  try {
    parse_session("ring m=1\nvars [x]\npoly f := d1(x\n");
    FAIL("expected a diagnostic");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 13);
    CHECK(std::string(e.what()).find("unbalanced parenthesis") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_session("ring m=1\nfrobnicate x\n"), ParseError);
  CHECK_THROWS_AS(parse_session("ring m=1\nvars [x))\n"), ParseError);

  Report r = run_text("ring m=1\nvars [x\n");
  CHECK(r.exit_code == 1);
  CHECK(r.json["diagnostics"][0]["line"] == 2);
}

TEST_CASE("no-sharp-point script fails with residue -1") {
  Report r = run_text(kNoSharpPoint);
  CHECK(r.exit_code == 2);
  const Json& v = first_verdict(r, 0, "integrability");
  CHECK(v["verdict"] == "Fails");
  CHECK(v["witness"] == "-1");
}

TEST_CASE("Rosenfeld script holds") {
  Report r = run_text(R"(ring m=2
constants { a1 : d1 = p, d2 = b ; a2 : d1 = b, d2 = q ; b ; p ; q }
vars [x]
check-charset {d1(x) - a1*x, d2(x) - a2*x}
)");
  CHECK(r.exit_code == 0);
  CHECK(first_verdict(r, 0, "charset")["verdict"] == "Holds");
}

TEST_CASE("ring declaration errors") {
  // sigma used without a declaration
  CHECK(run_text("ring m=1\ndsm-check [[[0]]], [[1]], [[1]]\n").exit_code == 1);
  // d1 d2 a != d2 d1 a
  Report bad = run_text("ring m=2\nconstants { a : d1 = b ; b : d2 = a }\nvars [x]\nkolchin {x}\n");
  CHECK(bad.exit_code == 1);
  CHECK(bad.json["commands"][0]["error"].get<std::string>().find("ring check failed") == 0);
  CHECK(run_text("kolchin {x}\n").exit_code == 1);
  CHECK(run_text("ring m=1\nvars [x]\npoly p := x\nconstants { a }\n").exit_code == 1);
  CHECK(run_text("ring m=1\nvars [x, x]\n").exit_code == 1);
  CHECK(run_text("ring m=1\nvars [x]\npoly f := x\npoly f := x\n").exit_code == 1);
  CHECK(run_text("ring m=1\nvars [x]\npoly x := 1\n").exit_code == 1);
  CHECK(run_text("ring m=1\nvars [x]\npoly p := y\n").exit_code == 1);
  CHECK(run_text("ring m=1\nconstants { a : d2 = a }\n").exit_code == 1);
}

TEST_CASE("keep-going records every error") {
  const std::string src = "ring m=1\nvars [x]\npoly p := y\nkolchin {z}\nkolchin {x}\n";
  Report stop = run_text(src);
  CHECK(stop.json["commands"].size() == 1);
  RunFlags flags;
  flags.keep_going = true;
  Report all = run_text(src, flags);
  CHECK(all.exit_code == 1);
  CHECK(all.json["commands"].size() == 3);
  CHECK(all.json["summary"]["errors"] == 2);
  CHECK(all.json["summary"]["holds"] == 1);
}

TEST_CASE("limits give Unknown") {
  RunFlags flags;
  flags.limits.max_order = 2;
  Report r = run_text("ring m=1\nvars [x]\nkolchin {d1^3(x)}\nkolchin {d1^2(x)}\n", flags);
  CHECK(r.exit_code == 3);
  CHECK(first_verdict(r, 0, "limit")["verdict"] == "Unknown");
  CHECK(first_verdict(r, 1, "charset")["verdict"] == "Holds");

  flags.limits = {};
  flags.limits.max_degree = 2;
  CHECK(run_text("ring m=1\nvars [x]\nkolchin {x^3 - 1}\n", flags).exit_code == 3);

  Limits l;
  apply_limits_spec(l, "max_order=3, max_degree=4 max_steps=10");
  CHECK(l.max_order == 3);
  CHECK(l.max_degree == 4);
  CHECK(l.max_steps == 10);
  CHECK_THROWS_AS(apply_limits_spec(l, "depth=3"), Error);
  CHECK_THROWS_AS(apply_limits_spec(l, "max_order=x"), Error);
  CHECK_THROWS_AS(apply_limits_spec(l, "max_order"), Error);
}

TEST_CASE("exit code precedence") {
  CHECK(run_text("ordinal w < w + 1\n").exit_code == 0);
  CHECK(run_text("ordinal w + 1 < w\n").exit_code == 2);
  RunFlags flags;
  flags.limits.max_order = 1;
  CHECK(run_text("ring m=1\nvars [x]\nkolchin {d1^2(x)}\nkolchin {x - 1, d1(x)}\n", flags).exit_code == 2);
}

TEST_CASE("reports are deterministic") {
  Report a = run_text(kNoSharpPoint), b = run_text(kNoSharpPoint);
  CHECK(canonical_json(a.json) == canonical_json(b.json));
  CHECK(a.json.contains("timing"));
  CHECK(canonical_json(a.json).find("timing") == std::string::npos);
  CHECK(a.json["schema_version"] == 1);
}

TEST_CASE("text rendering") {
  const std::string text = render_text(run_text(kNoSharpPoint).json);
  CHECK(text.find("[line 4] integrability s wrt d1, d2") != std::string::npos);
  CHECK(text.find("  section-valid  Holds    no generators\n") != std::string::npos);
  CHECK(text.find("  integrability  Fails    ") != std::string::npos);
  CHECK(text.find("exit 2") != std::string::npos);
}

TEST_CASE("verbs") {
  Report r = run_text(R"(ring m=2
vars [x, y]
group G := Gm x Ga
logderiv G with [ [x*y, d1(y)] ] wrt d2
reduce d1^2(x) by {d1(x) - x} tie highest
jet {y - x^2} at [1, 1] order 1
g-r [1, 2]
ordinal w # w = w*2
matrix A := [[0, 1], [0, 0]]
linear-int [A, A] wrt d1, d2
)");
  CHECK(r.exit_code == 0);
  const Json& c = r.json["commands"];
  CHECK(c[0]["output"]["l"] == Json::array({"1", "0", "d2(x)/x - y", "d2(y) - d1(y)"}));
  CHECK(c[1]["output"]["remainder"] == "x");
  CHECK(c[2]["output"]["equations"][0] == "-2*u_x + u_y = 0");
  CHECK(c[3]["output"]["delta_type"] == 1);
  CHECK(c[4]["verdicts"][0]["verdict"] == "Holds");
  CHECK(c[5]["verdicts"][0]["verdict"] == "Holds");
}

TEST_CASE("axiom report schema") {
  Report r = run_text("ring m=2\nvars [x]\naxiom-dcf {d1(x) - x}, {d1(x) - x, u2_x - x} wrt d2\n");
  REQUIRE(r.exit_code == 0);
  const Json& out = r.json["commands"][0]["output"];
  CHECK(out["kind"] == "dcf");
  CHECK(out["hypotheses"]["containment"] == "Holds");
  CHECK(out["instance"]["lambda"] == Json::array({"d1(x) - x"}));
  CHECK(out["instance"]["condition"].is_string());
}

TEST_CASE("corpus runner") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "deltaforge_corpus_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(run_corpus(dir.string(), {}).summary().rfind("0 cases", 0) == 0);

  std::ofstream(dir / "no_sharp_point.dfs") << kNoSharpPoint;
  CorpusResult missing = run_corpus(dir.string(), {});
  CHECK(missing.missing.size() == 1);
  CHECK_FALSE(missing.ok());

  run_corpus(dir.string(), {}, true);
  CHECK(run_corpus(dir.string(), {}).ok());

  std::ofstream(dir / "no_sharp_point.expected.json", std::ios::app) << " ";
  CorpusResult bad = run_corpus(dir.string(), {});
  REQUIRE(bad.mismatches.size() == 1);
  CHECK(bad.mismatches[0] == "no_sharp_point.dfs");
  fs::remove_all(dir);
  CHECK_THROWS_AS(run_corpus(dir.string(), {}), Error);
}
