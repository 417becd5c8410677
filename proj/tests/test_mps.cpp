#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "pdhglp/generator.hpp"
#include "pdhglp/mps.hpp"
#include "test_util.hpp"

using namespace pdhglp;

namespace {

const char* kSample = R"(* a small model exercising every supported section
NAME SAMPLE
ROWS
 N COST
 L CAP
 G REQ
 E BAL
 N FREEBIE
COLUMNS
 X COST 1.5 CAP 2
 X BAL 1
 Y REQ 3.25 BAL -1
 Y FREEBIE 7
 Z COST -2 CAP 1
RHS
 RHSSET CAP 10 REQ 2.5
 RHSSET BAL 4 COST 99
RANGES
 RNG CAP 6
BOUNDS
 UP BND X 8
 LO BND Y -2
 UP BND Y 5
 FR BND Z
ENDATA
)";

size_t line_of(const std::string& text, const std::string& needle) {
  size_t line = 1;
  const size_t at = text.find(needle);
  REQUIRE(at != std::string::npos);
  for (size_t i = 0; i < at; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Bitwise where the file stores the value verbatim; one side of a ranged row
// is reconstructed by range arithmetic and may differ by an ulp.
void check_bounds_close(const Vector& got, const Vector& want) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < got.size(); ++i) {
    if (!is_finite(want[i])) {
      CHECK(got[i] == want[i]);
    } else {
      const Scalar tol = 1e-12 * std::max(1.0, std::abs(want[i]));
      CHECK(std::abs(got[i] - want[i]) <= tol);
    }
  }
}

}  // namespace

TEST_CASE("a representative file parses to the expected model") {
  const MpsModel m = parse_mps(kSample);
  const LpProblem& p = m.problem;
  CHECK(m.name == "SAMPLE");
  CHECK(m.objective_name == "COST");
  CHECK_FALSE(m.maximize);
  REQUIRE(m.row_names == std::vector<std::string>{"CAP", "REQ", "BAL", "FREEBIE"});
  REQUIRE(m.col_names == std::vector<std::string>{"X", "Y", "Z"});

  CHECK(p.objective == Vector{1.5, 0.0, -2.0});
  // CAP got rhs 10 and range 6; REQ is one-sided; BAL pins both ends; the
  // second free row stays unconstrained and its rhs never applies.
  CHECK(p.con_lower == Vector{4.0, 2.5, 4.0, -kInf});
  CHECK(p.con_upper == Vector{10.0, kInf, 4.0, kInf});
  CHECK(p.var_lower == Vector{0.0, -2.0, -kInf});
  CHECK(p.var_upper == Vector{8.0, 5.0, kInf});

  const auto d = testutil::to_dense(p.a);
  CHECK(d[0] == std::vector<Scalar>{2.0, 0.0, 1.0});   // CAP
  CHECK(d[1] == std::vector<Scalar>{0.0, 3.25, 0.0});  // REQ
  CHECK(d[2] == std::vector<Scalar>{1.0, -1.0, 0.0});  // BAL
  CHECK(d[3] == std::vector<Scalar>{0.0, 7.0, 0.0});   // FREEBIE
}

TEST_CASE("duplicate matrix entries are summed") {
  const MpsModel m = parse_mps(
      "NAME D\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 2 OBJ 1\n X R 3\nRHS\n S R 1\nENDATA\n");
  const auto d = testutil::to_dense(m.problem.a);
  CHECK(d[0][0] == 5.0);
  CHECK(m.problem.objective[0] == 1.0);
}

TEST_CASE("a lone negative upper bound frees the lower side") {
  const char* text =
      "NAME Q\nROWS\n N OBJ\n G R\nCOLUMNS\n W R 1 OBJ 1\n V R 1 OBJ 1\n"
      "BOUNDS\n UP BND W -3\n LO BND V -5\n UP BND V -1\nENDATA\n";
  const MpsModel m = parse_mps(text);
  CHECK(m.problem.var_lower == Vector{-kInf, -5.0});
  CHECK(m.problem.var_upper == Vector{-3.0, -1.0});
}

TEST_CASE("a maximization file is stored in minimization form") {
  const MpsModel inline_form = parse_mps(
      "NAME M\nOBJSENSE MAX\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 1 OBJ 2\nRHS\n S R 4\nENDATA\n");
  CHECK(inline_form.maximize);
  CHECK(inline_form.problem.objective == Vector{-2.0});

  const MpsModel stacked_form = parse_mps(
      "NAME M\nOBJSENSE\n MAXIMIZE\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 1 OBJ 2\nENDATA\n");
  CHECK(stacked_form.maximize);
  CHECK(stacked_form.problem.objective == Vector{-2.0});
}

TEST_CASE("set names may be omitted in data sections") {
  const MpsModel m = parse_mps(
      "NAME S\nROWS\n N OBJ\n L R1\n G R2\nCOLUMNS\n X R1 1 R2 1\nRHS\n R1 5 R2 2\n"
      "RANGES\n R1 3\nBOUNDS\n UP X 9\nENDATA\n");
  CHECK(m.problem.con_lower == Vector{2.0, 2.0});
  CHECK(m.problem.con_upper == Vector{5.0, kInf});
  CHECK(m.problem.var_upper == Vector{9.0});
}

TEST_CASE("parse errors carry the offending line number") {
  const struct {
    std::string text;
    std::string marker;    // substring locating the bad line
    std::string expected;  // substring of the message
  } cases[] = {
      {"NAME E\nROWS\n N OBJ\nCOLUMNS\n X NOPE 1\nENDATA\n", "X NOPE", "unknown row"},
      {"NAME E\nROWS\n N OBJ\n L R\nCOLUMNS\n M1 'MARKER' 'INTORG'\n X R 1\nENDATA\n",
       "'MARKER'", "integer variables"},
      {"NAME E\nROWS\n N OBJ\nSOS\n S1 SET X 1\nENDATA\n", "SOS", "not supported"},
      {"NAME E\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 1\nBOUNDS\n BV BND X\nENDATA\n", "BV BND",
       "not supported"},
      {"NAME E\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 1.2.3\nENDATA\n", "1.2.3",
       "malformed number"},
      {"NAME E\nROWS\n N OBJ\n N F\nCOLUMNS\n X F 1\nRANGES\n S F 2\nENDATA\n", "S F 2",
       "free row"},
      {"NAME E\nROWS\n N OBJ\n L R\n L R\nCOLUMNS\n X R 1\nENDATA\n", " L R\nCOLUMNS",
       "duplicate row"},
      {" X R 1\nNAME E\nENDATA\n", "X R 1", "before any section"},
      {"NAME E\nROWS\n L R\nCOLUMNS\n X R 1\nENDATA\n", "ENDATA", "no objective"},
  };
  for (const auto& c : cases) {
    INFO(c.text);
    try {
      parse_mps(c.text);
      FAIL("expected a parse error");
    } catch (const MpsParseError& e) {
      const size_t want = line_of(c.text, c.marker);
      CHECK(e.line_number == want);
      CHECK(std::string(e.what()).find(c.expected) != std::string::npos);
      CHECK(std::string(e.what()).find("line " + std::to_string(want)) != std::string::npos);
    }
  }
}

TEST_CASE("a model that is structurally broken fails validation on read") {
  // Crossed box via bounds: [4, 2].
  const char* text =
      "NAME E\nROWS\n N OBJ\n L R\nCOLUMNS\n X R 1\nBOUNDS\n LO BND X 4\n UP BND X 2\nENDATA\n";
  CHECK_THROWS_AS(parse_mps(text), MpsParseError);
}

TEST_CASE("write then read reproduces every generated problem exactly") {
  for (InstanceKind kind : {InstanceKind::RandomFeasible, InstanceKind::RandomInfeasible,
                            InstanceKind::Transport, InstanceKind::FeasibilitySystem}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.rows = 9;
    spec.cols = 13;
    spec.density = 0.35;
    spec.seed = 5;
    const LpProblem p = generate_instance(spec).problem;
    const MpsModel back = parse_mps(write_mps(p, "ROUNDTRIP"));
    INFO(instance_kind_name(kind));
    CHECK_FALSE(back.maximize);
    CHECK(back.problem.a.by_row.start == p.a.by_row.start);
    CHECK(back.problem.a.by_row.index == p.a.by_row.index);
    CHECK(back.problem.a.by_row.value == p.a.by_row.value);
    CHECK(back.problem.objective == p.objective);
    check_bounds_close(back.problem.con_lower, p.con_lower);
    CHECK(back.problem.con_upper == p.con_upper);
    CHECK(back.problem.var_lower == p.var_lower);
    CHECK(back.problem.var_upper == p.var_upper);
  }
}

TEST_CASE("a maximization round trip restores the stored signs") {
  const LpProblem p = testutil::tiny_lp();
  const std::string text = write_mps(p, "MAXI", /*maximize=*/true);
  CHECK(text.find("OBJSENSE MAX") != std::string::npos);
  const MpsModel back = parse_mps(text);
  CHECK(back.maximize);
  CHECK(back.problem.objective == p.objective);
}

TEST_CASE("file io round trips through disk") {
  const LpProblem p = testutil::tiny_lp();
  const std::string path = "tiny_roundtrip.mps";
  write_mps_file(path, p, "TINY");
  const MpsModel back = read_mps_file(path);
  CHECK(back.problem.objective == p.objective);
  CHECK(back.problem.con_upper == p.con_upper);
  CHECK_THROWS_AS(read_mps_file("definitely-missing.mps"), MpsParseError);
  std::remove(path.c_str());
}
