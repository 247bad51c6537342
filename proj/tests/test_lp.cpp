#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ozsg/lp.hpp"
#include "ozsg/rng.hpp"

using namespace ozsg;
using lp::Model;
using lp::RowSense;
using lp::Status;

namespace {
constexpr double kInf = lp::kInf;
}

TEST_CASE("maximizes a small LP with known optimum and duals") {
  Model m(true);
  int x = m.add_var(0.0, kInf, 3.0);
  int y = m.add_var(0.0, kInf, 2.0);
  m.add_row(RowSense::LE, 4.0, {{x, 1.0}, {y, 1.0}});
  m.add_row(RowSense::LE, 2.0, {{x, 1.0}});
  m.add_row(RowSense::LE, 3.0, {{y, 1.0}});
  auto s = m.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(s.x[x] == doctest::Approx(2.0));
  CHECK(s.x[y] == doctest::Approx(2.0));
  REQUIRE(s.row_dual.size() == 3);
  CHECK(s.row_dual[0] == doctest::Approx(2.0));
  CHECK(s.row_dual[1] == doctest::Approx(1.0));
  CHECK(s.row_dual[2] == doctest::Approx(0.0));
}

TEST_CASE("upper-bounded variables resolve via bound flips") {
  Model m(true);
  int x = m.add_var(0.0, 3.0, 2.0);
  int y = m.add_var(0.0, 2.0, 1.0);
  m.add_row(RowSense::LE, 4.0, {{x, 1.0}, {y, 1.0}});
  auto s = m.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(7.0));
  CHECK(s.x[x] == doctest::Approx(3.0));
  CHECK(s.x[y] == doctest::Approx(1.0));
}

TEST_CASE("equality rows with free variables and minimization duals") {
  Model m(false);
  int x = m.add_var(-kInf, kInf, 1.0);
  int y = m.add_var(-kInf, kInf, 1.0);
  m.add_row(RowSense::EQ, 1.0, {{x, 1.0}, {y, -1.0}});
  m.add_row(RowSense::EQ, 3.0, {{x, 1.0}, {y, 1.0}});
  auto s = m.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[x] == doctest::Approx(2.0));
  CHECK(s.x[y] == doctest::Approx(1.0));
  CHECK(s.row_dual[0] == doctest::Approx(0.0));
  CHECK(s.row_dual[1] == doctest::Approx(1.0));
}

TEST_CASE("pinned variables are respected") {
  Model m(true);
  int x = m.add_var(2.0, 2.0, 1.0);
  int y = m.add_var(0.0, 1.0, 1.0);
  m.add_row(RowSense::LE, 2.5, {{x, 1.0}, {y, 1.0}});
  auto s = m.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[x] == doctest::Approx(2.0));
  CHECK(s.x[y] == doctest::Approx(0.5));
  CHECK(s.objective == doctest::Approx(2.5));
}

TEST_CASE("detects infeasible systems") {
  SUBCASE("bound versus row") {
    Model m(true);
    int x = m.add_var(0.0, kInf, 1.0);
    m.add_row(RowSense::LE, -1.0, {{x, 1.0}});
    CHECK(m.solve().status == Status::Infeasible);
  }
  SUBCASE("conflicting equalities") {
    Model m(false);
    int x = m.add_var(-kInf, kInf, 1.0);
    int y = m.add_var(-kInf, kInf, 1.0);
    m.add_row(RowSense::EQ, 1.0, {{x, 1.0}, {y, 1.0}});
    m.add_row(RowSense::EQ, 2.0, {{x, 1.0}, {y, 1.0}});
    CHECK(m.solve().status == Status::Infeasible);
  }
}

TEST_CASE("detects unbounded problems") {
  SUBCASE("without rows") {
    Model m(true);
    m.add_var(0.0, kInf, 1.0);
    CHECK(m.solve().status == Status::Unbounded);
  }
  SUBCASE("with rows") {
    Model m(true);
    int x = m.add_var(0.0, kInf, 1.0);
    m.add_row(RowSense::GE, 1.0, {{x, 1.0}});
    CHECK(m.solve().status == Status::Unbounded);
  }
  SUBCASE("free variable, maximization") {
    Model m(true);
    int x = m.add_var(-kInf, kInf, -1.0);
    m.add_row(RowSense::LE, 5.0, {{x, 1.0}});
    CHECK(m.solve().status == Status::Unbounded);
  }
}

TEST_CASE("classic degenerate cycling instance reaches the optimum") {
  // Beale's example: Dantzig pricing cycles here without an anti-cycling
  // safeguard.
  Model m(false);
  int x1 = m.add_var(0.0, kInf, -0.75);
  int x2 = m.add_var(0.0, kInf, 150.0);
  int x3 = m.add_var(0.0, kInf, -0.02);
  int x4 = m.add_var(0.0, kInf, 6.0);
  m.add_row(RowSense::LE, 0.0, {{x1, 0.25}, {x2, -60.0}, {x3, -1.0 / 25.0}, {x4, 9.0}});
  m.add_row(RowSense::LE, 0.0, {{x1, 0.5}, {x2, -90.0}, {x3, -1.0 / 50.0}, {x4, 3.0}});
  m.add_row(RowSense::LE, 1.0, {{x3, 1.0}});
  auto s = m.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05).epsilon(1e-9));
  CHECK(s.x[x1] == doctest::Approx(0.04));
  CHECK(s.x[x3] == doctest::Approx(1.0));
}

TEST_CASE("warm basis stays valid across added rows and variables") {
  Model m(true);
  int x = m.add_var(0.0, 10.0, 2.0);
  int y = m.add_var(0.0, 10.0, 1.0);
  m.add_row(RowSense::LE, 6.0, {{x, 1.0}, {y, 1.0}});
  lp::Basis basis;
  auto s1 = m.solve(&basis);
  REQUIRE(s1.status == Status::Optimal);
  CHECK(s1.objective == doctest::Approx(12.0));

  m.add_row(RowSense::LE, 4.0, {{x, 1.0}});
  auto s2 = m.solve(&basis);
  REQUIRE(s2.status == Status::Optimal);
  CHECK(s2.objective == doctest::Approx(10.0));
  CHECK(s2.x[x] == doctest::Approx(4.0));
  CHECK(s2.x[y] == doctest::Approx(2.0));

  int z = m.add_var(0.0, 1.0, 5.0);
  m.add_row(RowSense::LE, 2.0, {{z, 1.0}, {y, 1.0}});
  auto s3 = m.solve(&basis);
  REQUIRE(s3.status == Status::Optimal);
  CHECK(s3.objective == doctest::Approx(14.0));
  CHECK(s3.x[z] == doctest::Approx(1.0));

  // A cold solve of the final model agrees.
  auto cold = m.solve();
  REQUIRE(cold.status == Status::Optimal);
  CHECK(cold.objective == doctest::Approx(s3.objective));
}

TEST_CASE("iteration limit is reported") {
  Model m(true);
  std::vector<int> v;
  for (int j = 0; j < 6; ++j) v.push_back(m.add_var(0.0, kInf, 1.0 + j));
  for (int i = 0; i < 6; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j <= i; ++j) row.push_back({v[j], 1.0});
    m.add_row(RowSense::LE, 5.0 + i, row);
  }
  auto s = m.solve(nullptr, 1);
  CHECK(s.status == Status::IterLimit);
}

TEST_CASE("dump is readable LP text") {
  Model m(true);
  int x = m.add_var(0.0, 2.0, 3.0);
  int y = m.add_var(-kInf, kInf, -1.0);
  m.add_row(RowSense::LE, 4.0, {{x, 1.0}, {y, 2.0}});
  m.add_row(RowSense::EQ, 1.0, {{y, 1.0}});
  std::string text = m.lp_format();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("r0:") != std::string::npos);
  CHECK(text.find("free") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("random matrix games match an independent game solver") {
  RngStream rng(20260825, "lp-matrix-games");
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int nr = 1 + static_cast<int>(rng.next_below(5));
    int nc = 1 + static_cast<int>(rng.next_below(5));
    std::vector<std::vector<double>> A(nr, std::vector<double>(nc));
    for (auto& row : A)
      for (double& a : row) a = 4.0 * rng.next_unit() - 2.0;
    double v = testing::matrix_game_value(A);

    // Row player: max v subject to the column payoffs dominating v.
    Model m(true);
    std::vector<int> xs;
    for (int i = 0; i < nr; ++i) xs.push_back(m.add_var(0.0, kInf, 0.0));
    int vv = m.add_var(-kInf, kInf, 1.0);
    {
      std::vector<std::pair<int, double>> norm;
      for (int i = 0; i < nr; ++i) norm.push_back({xs[i], 1.0});
      m.add_row(RowSense::EQ, 1.0, norm);
    }
    for (int j = 0; j < nc; ++j) {
      std::vector<std::pair<int, double>> row{{vv, 1.0}};
      for (int i = 0; i < nr; ++i) row.push_back({xs[i], -A[i][j]});
      m.add_row(RowSense::LE, 0.0, row);
    }
    auto s = m.solve();
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(v).epsilon(1e-7));

    // The primal solution is an optimal row strategy.
    double total = 0.0, worst = kInf;
    for (int j = 0; j < nc; ++j) {
      double col = 0.0;
      for (int i = 0; i < nr; ++i) col += A[i][j] * s.x[xs[i]];
      worst = std::min(worst, col);
    }
    for (int i = 0; i < nr; ++i) {
      CHECK(s.x[xs[i]] >= -1e-9);
      total += s.x[xs[i]];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(worst >= v - 1e-6);

    // Duals of the column rows form an optimal column strategy.
    double mu_total = 0.0, best_row = -kInf;
    for (int j = 0; j < nc; ++j) {
      double mu = s.row_dual[1 + j];
      CHECK(mu >= -1e-8);
      mu_total += mu;
    }
    CHECK(mu_total == doctest::Approx(1.0).epsilon(1e-7));
    for (int i = 0; i < nr; ++i) {
      double payoff = 0.0;
      for (int j = 0; j < nc; ++j) payoff += A[i][j] * s.row_dual[1 + j];
      best_row = std::max(best_row, payoff);
    }
    CHECK(best_row <= v + 1e-6);

    // Every third game: the column player's minimization gives the same value,
    // with the duals of its >= rows recovering a row strategy.
    if (trial % 3 == 0) {
      Model d(false);
      std::vector<int> ys;
      for (int j = 0; j < nc; ++j) ys.push_back(d.add_var(0.0, kInf, 0.0));
      int uu = d.add_var(-kInf, kInf, 1.0);
      std::vector<std::pair<int, double>> norm;
      for (int j = 0; j < nc; ++j) norm.push_back({ys[j], 1.0});
      d.add_row(RowSense::EQ, 1.0, norm);
      for (int i = 0; i < nr; ++i) {
        std::vector<std::pair<int, double>> row{{uu, 1.0}};
        for (int j = 0; j < nc; ++j) row.push_back({ys[j], -A[i][j]});
        d.add_row(RowSense::GE, 0.0, row);
      }
      auto sd = d.solve();
      REQUIRE(sd.status == Status::Optimal);
      CHECK(sd.objective == doctest::Approx(v).epsilon(1e-7));
      double xr_total = 0.0;
      for (int i = 0; i < nr; ++i) {
        CHECK(sd.row_dual[1 + i] >= -1e-8);
        xr_total += sd.row_dual[1 + i];
      }
      CHECK(xr_total == doctest::Approx(1.0).epsilon(1e-7));
    }
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("random boxed LPs satisfy the optimality conditions") {
  RngStream rng(20260825, "lp-random-kkt");
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    bool maximize = trial % 2 == 0;
    int n = 1 + static_cast<int>(rng.next_below(8));
    int mm = static_cast<int>(rng.next_below(9));
    Model m(maximize);
    std::vector<double> lo(n), hi(n), cost(n);
    std::vector<double> mid(n);
    for (int j = 0; j < n; ++j) {
      bool lo_inf = rng.next_unit() < 0.1;
      bool hi_inf = rng.next_unit() < 0.1;
      lo[j] = lo_inf ? -kInf : -2.0 + 2.0 * rng.next_unit();
      hi[j] = hi_inf ? kInf : (lo_inf ? 0.0 : lo[j]) + 3.0 * rng.next_unit();
      cost[j] = 2.0 * rng.next_unit() - 1.0;
      m.add_var(lo[j], hi[j], cost[j]);
      mid[j] = std::isfinite(lo[j]) && std::isfinite(hi[j]) ? 0.5 * (lo[j] + hi[j])
               : std::isfinite(lo[j])                       ? lo[j] + 0.5
               : std::isfinite(hi[j])                       ? hi[j] - 0.5
                                                            : 0.0;
    }
    std::vector<std::vector<double>> A(mm, std::vector<double>(n, 0.0));
    std::vector<RowSense> senses(mm);
    std::vector<double> rhs(mm);
    for (int i = 0; i < mm; ++i) {
      double a_mid = 0.0;
      for (int j = 0; j < n; ++j) {
        if (rng.next_unit() < 0.3) continue;
        A[i][j] = 2.0 * rng.next_unit() - 1.0;
        a_mid += A[i][j] * mid[j];
      }
      double pick = rng.next_unit();
      senses[i] = pick < 0.4 ? RowSense::LE : pick < 0.8 ? RowSense::GE : RowSense::EQ;
      double pad = rng.next_unit();
      rhs[i] = senses[i] == RowSense::LE   ? a_mid + pad
               : senses[i] == RowSense::GE ? a_mid - pad
                                           : a_mid;
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j)
        if (A[i][j] != 0.0) row.push_back({j, A[i][j]});
      m.add_row(senses[i], rhs[i], row);
    }
    auto s = m.solve();
    if (s.status != Status::Optimal) {
      // The midpoint construction keeps every instance feasible, so the only
      // alternative outcome is an unbounded ray through an infinite bound.
      CHECK(s.status == Status::Unbounded);
      continue;
    }
    ++optimal;
    // Primal feasibility.
    for (int j = 0; j < n; ++j) {
      CHECK(s.x[j] >= lo[j] - 1e-6);
      CHECK(s.x[j] <= hi[j] + 1e-6);
    }
    std::vector<double> act(mm, 0.0);
    for (int i = 0; i < mm; ++i) {
      for (int j = 0; j < n; ++j) act[i] += A[i][j] * s.x[j];
      if (senses[i] == RowSense::LE) CHECK(act[i] <= rhs[i] + 1e-6);
      if (senses[i] == RowSense::GE) CHECK(act[i] >= rhs[i] - 1e-6);
      if (senses[i] == RowSense::EQ) CHECK(act[i] == doctest::Approx(rhs[i]).epsilon(1e-6));
    }
    // Dual sign conventions and complementary slackness.
    for (int i = 0; i < mm; ++i) {
      double y = s.row_dual[i];
      if (senses[i] == RowSense::LE) CHECK((maximize ? y : -y) >= -1e-7);
      if (senses[i] == RowSense::GE) CHECK((maximize ? -y : y) >= -1e-7);
      if (std::abs(y) > 1e-6) CHECK(std::abs(act[i] - rhs[i]) <= 1e-5);
    }
    // Reduced-cost optimality at the returned point.
    for (int j = 0; j < n; ++j) {
      double d = cost[j];
      for (int i = 0; i < mm; ++i) d -= s.row_dual[i] * A[i][j];
      double up_gain = maximize ? d : -d;  // objective gain per unit increase
      bool at_lo = std::isfinite(lo[j]) && s.x[j] <= lo[j] + 1e-6;
      bool at_hi = std::isfinite(hi[j]) && s.x[j] >= hi[j] - 1e-6;
      if (at_lo && at_hi) continue;  // pinned or numerically both
      if (at_lo) {
        CHECK(up_gain <= 1e-6);
      } else if (at_hi) {
        CHECK(up_gain >= -1e-6);
      } else {
        CHECK(std::abs(d) <= 1e-6);
      }
    }
  }
  // The construction should produce mostly solvable instances.
  CHECK(optimal >= 120);
}
