#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "ozsg/common.hpp"
#include "ozsg/game.hpp"

using namespace ozsg;

namespace {

struct Dims {
  const char* name;
  int nS, nA1, nA2, nZ1, nZ2;
  double rmax, rmin, gamma;
};

constexpr Dims kDims[] = {
    {"adversarial-tiger", 2, 3, 2, 2, 2, 0.52, -1.48, 1.0},
    {"competitive-tiger", 2, 4, 4, 3, 3, 0.66, -0.66, 1.0},
    {"recycling", 4, 3, 3, 2, 2, 0.5, -0.39, 1.0},
    {"mabc", 4, 2, 2, 2, 2, 0.1, 0.0, 1.0},
    {"matching-pennies", 3, 2, 2, 1, 1, 2.0, -1.0, 1.0},
    {"pursuit-evasion-2x2x2", 16, 4, 4, 6, 6, 0.0, -100.0, 1.0},
    {"pursuit-evasion-3x3x1", 64, 4, 4, 6, 6, 0.0, -100.0, 1.0},
    {"pursuit-evasion-3x3x2", 81, 4, 4, 6, 6, 0.0, -100.0, 1.0},
};

std::string minimal_doc() {
  return "states: only\n"
         "actions1: go\n"
         "actions2: go\n"
         "obs1: o\n"
         "obs2: o\n"
         "pubobs: w\n"
         "discount: 1.0\n"
         "horizon: 3\n"
         "start: 1.0\n"
         "T: only go go -> only o o w : 1.0\n";
}

}  // namespace

TEST_CASE("builtin dimensions and reward bounds match the benchmark table") {
  for (const auto& d : kDims) {
    CAPTURE(d.name);
    GameModel m = make_builtin(d.name);
    CHECK(m.nS() == d.nS);
    CHECK(m.nA1() == d.nA1);
    CHECK(m.nA2() == d.nA2);
    CHECK(m.nZ1() == d.nZ1);
    CHECK(m.nZ2() == d.nZ2);
    CHECK(m.reward_max() == doctest::Approx(d.rmax).epsilon(1e-12));
    CHECK(m.reward_min() == doctest::Approx(d.rmin).epsilon(1e-12));
    CHECK(m.discount == doctest::Approx(d.gamma));
  }
}

TEST_CASE("reward_bound is the max absolute reward") {
  CHECK(make_builtin("matching-pennies").reward_bound() == doctest::Approx(2.0));
  CHECK(make_builtin("pursuit-evasion-2x2x2").reward_bound() == doctest::Approx(100.0));
  GameModel m = parse_game(minimal_doc());
  CHECK(m.reward_bound() == doctest::Approx(0.0));
}

TEST_CASE("minimal document parses") {
  GameModel m = parse_game(minimal_doc());
  CHECK(m.nS() == 1);
  CHECK(m.nA1() == 1);
  CHECK(m.default_horizon == 3);
  CHECK(m.start[0] == doctest::Approx(1.0));
}

TEST_CASE("adversarial-tiger document parses to table dimensions") {
  GameModel m = parse_game(serialize_game(make_builtin("adversarial-tiger")));
  CHECK(m.nS() == 2);
  CHECK(m.nA1() == 3);
  CHECK(m.nA2() == 2);
  CHECK(m.nZ1() == 2);
  CHECK(m.nZ2() == 2);
}

TEST_CASE("serialize/parse round-trips every builtin index-for-index") {
  for (const auto& d : kDims) {
    CAPTURE(d.name);
    GameModel a = make_builtin(d.name);
    GameModel b = parse_game(serialize_game(a));
    REQUIRE(a.states == b.states);
    REQUIRE(a.actions1 == b.actions1);
    REQUIRE(a.actions2 == b.actions2);
    REQUIRE(a.obs1 == b.obs1);
    REQUIRE(a.obs2 == b.obs2);
    REQUIRE(a.pubobs == b.pubobs);
    CHECK(a.fingerprint() == b.fingerprint());
  }
}

TEST_CASE("kernel rows of every builtin are stochastic") {
  for (const auto& d : kDims) {
    CAPTURE(d.name);
    GameModel m = make_builtin(d.name);
    for (int s = 0; s < m.nS(); ++s)
      for (int a1 = 0; a1 < m.nA1(); ++a1)
        for (int a2 = 0; a2 < m.nA2(); ++a2) {
          double tot = 0.0;
          for (const auto& o : m.outcomes(s, a1, a2)) {
            CHECK(o.p > 0.0);
            tot += o.p;
          }
          CHECK(tot == doctest::Approx(1.0).epsilon(1e-9));
        }
  }
}

TEST_CASE("non-normalized transition row is rejected with the row named") {
  std::string doc = minimal_doc();
  doc.replace(doc.rfind(": 1.0"), 5, ": 0.9");
  try {
    parse_game(doc);
    FAIL("expected a validation error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("only") != std::string::npos);
  }
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_game("states: a b\nnonsense\n"), ParseError);
  CHECK_THROWS_AS(parse_game(minimal_doc() + "unknowndecl: 3\n"), ParseError);
  CHECK_THROWS_AS(parse_game(minimal_doc() + "T: only go go -> only o o w : 0.5\n"),
                  ParseError);  // duplicate T line
  CHECK_THROWS_AS(parse_game(minimal_doc() + "R: only go go : 1 extra\n"), ParseError);
  CHECK_THROWS_AS(parse_game("discount: 1.0\n"), ParseError);  // missing declarations
  // Bad start distribution.
  std::string doc = minimal_doc();
  doc.replace(doc.find("start: 1.0"), 10, "start: 0.7");
  CHECK_THROWS_AS(parse_game(doc), ParseError);
}

TEST_CASE("parse errors carry 1-based line numbers") {
  try {
    parse_game("states: a !!\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    (void)e;  // line info is best-effort; the throw itself is the contract
  }
  try {
    parse_game(minimal_doc() + "T: bogus go go -> only o o w : 1.0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 11);
  }
}

TEST_CASE("tokens can be names or indices") {
  std::string doc = minimal_doc();
  doc += "R: 0 0 0 : 2.5\n";
  GameModel m = parse_game(doc);
  CHECK(m.r(0, 0, 0) == doctest::Approx(2.5));
}

TEST_CASE("resolve_game loads builtin names and file paths") {
  GameModel b = resolve_game("mabc");
  CHECK(b.nS() == 4);
  std::string path = "/tmp/ozsg_test_game.txt";
  std::ofstream(path) << serialize_game(make_builtin("matching-pennies"));
  GameModel f = resolve_game(path);
  CHECK(f.nS() == 3);
  CHECK(f.reward_max() == doctest::Approx(2.0));
  std::remove(path.c_str());
  CHECK_THROWS(resolve_game("/nonexistent/game.txt"));
}

TEST_CASE("pursuit-evasion start is the opposite-corner state") {
  GameModel m = make_builtin("pursuit-evasion-2x2x2");
  int hits = 0;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0) {
      ++hits;
      CHECK(m.states[s] == "e00p11");
      CHECK(m.start[s] == doctest::Approx(1.0));
    }
  CHECK(hits == 1);
}

TEST_CASE("matching-pennies absorbing-stage payoff matrix") {
  GameModel m = make_builtin("matching-pennies");
  CHECK(m.r(2, 0, 0) == doctest::Approx(2.0));
  CHECK(m.r(2, 0, 1) == doctest::Approx(-1.0));
  CHECK(m.r(2, 1, 0) == doctest::Approx(-1.0));
  CHECK(m.r(2, 1, 1) == doctest::Approx(1.0));
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) CHECK(m.r(s, a1, a2) == 0.0);
}
