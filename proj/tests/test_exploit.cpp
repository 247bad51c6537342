#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ozsg/backup.hpp"
#include "ozsg/common.hpp"
#include "ozsg/exploitability.hpp"
#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/occupancy.hpp"
#include "ozsg/pbvi.hpp"
#include "ozsg/policy.hpp"
#include "ozsg/rng.hpp"
#include "ozsg/value_function.hpp"

using namespace ozsg;

namespace {

SolveConfig quick_config(int horizon, int iters) {
  SolveConfig cfg;
  cfg.horizon = horizon;
  cfg.max_iterations = iters;
  cfg.eval_every = 0;
  cfg.expansion_cap = 8;
  cfg.seed = 7;
  return cfg;
}

// All (h, hp) information pairs of `player` reachable at each stage when both
// sides may play anything the kernel supports. Player 1 pairs can further be
// restricted to the support of a fixed player-1 policy.
std::vector<std::set<std::pair<int, int>>> reachable_pairs(
    const GameModel& m, HistoryContext& ctx, int horizon, int player,
    const FocalPolicy* p1 = nullptr) {
  using Key = std::array<int, 4>;  // hp, h1, h2, s
  std::map<Key, double> cur;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0) cur[{0, 0, 0, s}] = m.start[s];
  std::vector<std::set<std::pair<int, int>>> out(
      static_cast<std::size_t>(horizon) + 1);
  for (int t = 0; t <= horizon; ++t) {
    std::map<Key, double> nxt;
    for (const auto& [key, mass] : cur) {
      const auto [hp, h1, h2, s] = key;
      out[t].insert(player == 1 ? std::make_pair(h1, hp)
                                : std::make_pair(h2, hp));
      if (t == horizon) continue;
      std::vector<double> row1(m.nA1(), 1.0);
      if (p1) row1 = p1->row(t, h1, hp);
      for (int a1 = 0; a1 < m.nA1(); ++a1) {
        if (row1[a1] <= 1e-12) continue;
        for (int a2 = 0; a2 < m.nA2(); ++a2)
          for (const Outcome& o : m.outcomes(s, a1, a2))
            nxt[{ctx.pub.child(hp, o.w), ctx.h1.child(h1, a1, o.z1),
                 ctx.h2.child(h2, a2, o.z2), o.s2}] += mass * o.p;
      }
    }
    cur.swap(nxt);
  }
  return out;
}

// Every deterministic behavioral policy of `player` over the reachable pairs.
std::vector<FocalPolicy> pure_policies(const GameModel& m, HistoryContext& ctx,
                                       int horizon, int player) {
  const auto pairs = reachable_pairs(m, ctx, horizon, player);
  const int A = player == 1 ? m.nA1() : m.nA2();
  std::vector<std::pair<int, std::pair<int, int>>> slots;  // (stage, pair)
  for (int t = 0; t <= horizon; ++t)
    for (const auto& pr : pairs[t]) slots.push_back({t, pr});

  std::size_t total = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    total *= static_cast<std::size_t>(A);
    REQUIRE(total <= 100000);
  }
  std::vector<FocalPolicy> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    FocalPolicy p;
    p.player = player;
    p.horizon = horizon;
    p.num_actions = A;
    p.rows.assign(static_cast<std::size_t>(horizon) + 1, {});
    std::size_t rest = idx;
    for (const auto& [t, pr] : slots) {
      std::vector<double> row(A, 0.0);
      row[rest % A] = 1.0;
      rest /= A;
      p.rows[t][pr] = row;
    }
    out.push_back(std::move(p));
  }
  return out;
}

FocalPolicy uniform_policy(const GameModel& m, int horizon, int player) {
  FocalPolicy p;
  p.player = player;
  p.horizon = horizon;
  p.num_actions = player == 1 ? m.nA1() : m.nA2();
  p.rows.assign(static_cast<std::size_t>(horizon) + 1, {});
  return p;  // no rows: every lookup takes the uniform fallback
}

FocalPolicy policy_from_rules(const GameModel& m, int player,
                              const std::vector<DecisionRule>& rules) {
  FocalPolicy p;
  p.player = player;
  p.horizon = static_cast<int>(rules.size()) - 1;
  p.num_actions = player == 1 ? m.nA1() : m.nA2();
  p.rows.assign(rules.size(), {});
  for (std::size_t t = 0; t < rules.size(); ++t)
    for (const auto& [key, row] : rules[t].rows) p.rows[t][key] = row;
  return p;
}

// Two states, two actions for each player; action 0 pays 1 at every state
// and action 1 pays nothing, so always playing 0 is the unique optimum.
GameModel dominant_action_game() {
  GameModel m;
  m.name = "dominant";
  m.states = {"a", "b"};
  m.actions1 = {"good", "bad"};
  m.actions2 = {"l", "r"};
  m.obs1 = {"x", "y"};
  m.obs2 = {"o"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {0.6, 0.4};
  m.allocate();
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) {
        m.reward[m.joint_index(s, a1, a2)] = a1 == 0 ? 1.0 : 0.0;
        auto& out = m.kernel[m.joint_index(s, a1, a2)];
        // State drifts; player 1's observation is a noisy state reading.
        const double flip = s == 0 ? 0.3 : 0.7;
        for (int s2 = 0; s2 < 2; ++s2) {
          const double ps = s2 == 1 ? flip : 1.0 - flip;
          const double acc = 0.8;
          out.push_back({s2, s2, 0, 0, ps * acc});
          out.push_back({s2, 1 - s2, 0, 0, ps * (1.0 - acc)});
        }
      }
  m.validate();
  return m;
}

GameModel zero_reward_game(std::uint64_t seed) {
  RngStream rng(seed, "zero-reward");
  GameModel m = testing::random_tiny_game(rng);
  std::fill(m.reward.begin(), m.reward.end(), 0.0);
  return m;
}

}  // namespace

TEST_CASE("extraction at horizon zero is the root greedy mixture") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;
  SolveResult res = solve(m, ctx, quick_config(0, 1));
  FocalPolicy pol = extract_policy(m, ctx, res.vf, 0);

  CHECK(pol.player == 1);
  CHECK(pol.horizon == 0);
  CHECK(pol.num_actions == m.nA1());
  REQUIRE(pol.rows.size() == 1);
  REQUIRE(pol.has_row(0, HistoryTable::kRoot, PubHistoryTable::kRoot));

  const InformedOccupancy root =
      informed_decomposition(initial_occupancy(m))[0].second;
  GreedySolution sol = greedy_gamma_lp(m, ctx, root, zero_stage_sets(0));
  DecisionRule want =
      rule_from_solution(m, sol, own_histories(root, 1), root.hp, 0);
  const std::vector<double> got =
      pol.row(0, HistoryTable::kRoot, PubHistoryTable::kRoot);
  const std::vector<double>& ref =
      want.at(HistoryTable::kRoot, PubHistoryTable::kRoot);
  REQUIRE(got.size() == ref.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(std::abs(got[i] - ref[i]) <= 1e-12);
}

TEST_CASE("extracted rows are normalized and cover the policy's support") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;
  SolveResult res = solve(m, ctx, quick_config(2, 2));
  FocalPolicy pol = extract_policy(m, ctx, res.vf, 2);

  int checked = 0;
  for (int t = 0; t <= 2; ++t)
    for (const auto& [key, row] : pol.rows[t]) {
      (void)key;
      REQUIRE(row.size() == static_cast<std::size_t>(m.nA1()));
      double sum = 0.0;
      for (double v : row) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      ++checked;
    }
  CHECK(checked > 3);

  // Every pair the policy itself can reach (against any opponent) has a row.
  const auto pairs = reachable_pairs(m, ctx, 2, 1, &pol);
  for (int t = 0; t <= 2; ++t)
    for (const auto& [h1, hp] : pairs[t]) CHECK(pol.has_row(t, h1, hp));
}

TEST_CASE("dominant-action game extracts the dominant rule") {
  GameModel m = dominant_action_game();
  HistoryContext ctx;
  SolveConfig cfg = quick_config(2, 3);
  SolveResult res = solve(m, ctx, cfg);
  FocalPolicy pol = extract_policy(m, ctx, res.vf, 2);

  const auto pairs = reachable_pairs(m, ctx, 2, 1, &pol);
  for (int t = 0; t <= 2; ++t)
    for (const auto& [h1, hp] : pairs[t]) {
      const std::vector<double> row = pol.row(t, h1, hp);
      CHECK(row[0] >= 1.0 - 1e-9);
    }
  CHECK(std::abs(best_response(m, ctx, pol) - 3.0) <= 1e-9);
  CHECK(std::abs(exact_value(m, ctx, 2) - 3.0) <= 1e-7);
}

TEST_CASE("best response of any policy in a zero-reward game is zero") {
  GameModel m = zero_reward_game(11);
  HistoryContext ctx;
  const FocalPolicy uni = uniform_policy(m, 2, 1);
  CHECK(best_response(m, ctx, uni) == 0.0);

  RngStream rng(12, "rules");
  std::vector<DecisionRule> d1s, d2s;
  testing::random_rule_sequence(m, ctx, 3, rng, d1s, d2s);
  CHECK(best_response(m, ctx, policy_from_rules(m, 1, d1s)) == 0.0);
  CHECK(best_response(m, ctx, policy_from_rules(m, 2, d2s)) == 0.0);
}

TEST_CASE("best response agrees with deterministic enumeration") {
  // Uniform play on the matching-pennies chain first, then random games and
  // random focal policies, checked for both focal sides.
  {
    GameModel m = make_builtin("matching-pennies");
    HistoryContext ctx;
    const FocalPolicy uni = uniform_policy(m, 1, 1);
    double best = 1e99;
    for (const FocalPolicy& p2 : pure_policies(m, ctx, 1, 2))
      best = std::min(best, policy_pair_value(m, ctx, uni, p2));
    CHECK(std::abs(best_response(m, ctx, uni) - best) <= 1e-9);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    RngStream rng(seed, "br-oracle");
    GameModel m = testing::random_tiny_game(rng, 3, 2, 2, 2);
    HistoryContext ctx;
    std::vector<DecisionRule> d1s, d2s;
    testing::random_rule_sequence(m, ctx, 2, rng, d1s, d2s);
    const FocalPolicy p1 = policy_from_rules(m, 1, d1s);
    const FocalPolicy p2 = policy_from_rules(m, 2, d2s);

    double lo = 1e99;
    for (const FocalPolicy& resp : pure_policies(m, ctx, 1, 2))
      lo = std::min(lo, policy_pair_value(m, ctx, p1, resp));
    CHECK(std::abs(best_response(m, ctx, p1) - lo) <= 1e-9);

    double hi = -1e99;
    for (const FocalPolicy& resp : pure_policies(m, ctx, 1, 1))
      hi = std::max(hi, policy_pair_value(m, ctx, resp, p2));
    CHECK(std::abs(best_response(m, ctx, p2) - hi) <= 1e-9);
  }
}

TEST_CASE("rows at unreachable pairs cannot change the best response") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;

  FocalPolicy pol = uniform_policy(m, 1, 1);
  std::vector<double> listen(m.nA1(), 0.0);
  listen[0] = 1.0;
  pol.rows[0][{HistoryTable::kRoot, PubHistoryTable::kRoot}] = listen;
  const double base = best_response(m, ctx, pol);

  // Pairs extending the never-played open actions are unreachable under pol.
  FocalPolicy junk = pol;
  for (int a1 = 1; a1 < m.nA1(); ++a1)
    for (int z1 = 0; z1 < m.nZ1(); ++z1) {
      std::vector<double> skew(m.nA1(), 0.0);
      skew[m.nA1() - 1] = 1.0;
      junk.rows[1][{ctx.h1.child(HistoryTable::kRoot, a1, z1),
                    ctx.pub.child(PubHistoryTable::kRoot, 0)}] = skew;
    }
  CHECK(best_response(m, ctx, junk) == base);
}

TEST_CASE("single-chain game has the discounted-sum exact value") {
  GameModel m;
  m.name = "chain";
  m.states = {"s"};
  m.actions1 = {"a"};
  m.actions2 = {"b"};
  m.obs1 = {"z"};
  m.obs2 = {"z"};
  m.pubobs = {"w"};
  m.discount = 0.9;
  m.start = {1.0};
  m.allocate();
  m.kernel[0].push_back({0, 0, 0, 0, 1.0});
  m.reward[0] = 0.7;
  m.validate();

  HistoryContext ctx;
  const double want = 0.7 * (1.0 + 0.9 + 0.81 + 0.729);
  CHECK(std::abs(exact_value(m, ctx, 3) - want) <= 1e-9);
  CHECK(std::abs(best_response(m, ctx, uniform_policy(m, 3, 1)) - want) <=
        1e-12);
}

TEST_CASE("exact value matches the one-shot matrix game at horizon zero") {
  for (const char* name : {"matching-pennies", "adversarial-tiger",
                           "competitive-tiger", "recycling", "mabc"}) {
    CAPTURE(name);
    GameModel m = make_builtin(name);
    HistoryContext ctx;
    std::vector<std::vector<double>> payoff(
        m.nA1(), std::vector<double>(m.nA2(), 0.0));
    for (int a1 = 0; a1 < m.nA1(); ++a1)
      for (int a2 = 0; a2 < m.nA2(); ++a2)
        for (int s = 0; s < m.nS(); ++s)
          payoff[a1][a2] += m.start[s] * m.r(s, a1, a2);
    const double want = testing::matrix_game_value(payoff);
    CHECK(std::abs(exact_value(m, ctx, 0) - want) <= 1e-6);
  }
}

TEST_CASE("exact value matches the pure-strategy matrix oracle on tiny games") {
  for (std::uint64_t seed = 21; seed <= 24; ++seed) {
    CAPTURE(seed);
    RngStream rng(seed, "exact-oracle");
    GameModel m = testing::random_tiny_game(rng, 3, 2, 1, 1);
    HistoryContext ctx;
    const int horizon = 1;
    const auto pures1 = pure_policies(m, ctx, horizon, 1);
    const auto pures2 = pure_policies(m, ctx, horizon, 2);
    std::vector<std::vector<double>> payoff(
        pures1.size(), std::vector<double>(pures2.size(), 0.0));
    for (std::size_t i = 0; i < pures1.size(); ++i)
      for (std::size_t j = 0; j < pures2.size(); ++j)
        payoff[i][j] = policy_pair_value(m, ctx, pures1[i], pures2[j]);
    const double want = testing::matrix_game_value(payoff);
    CHECK(std::abs(exact_value(m, ctx, horizon) - want) <= 1e-6);
  }
}

TEST_CASE("exact value respects the sequence cap") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;
  CHECK_THROWS_AS(exact_value(m, ctx, 2, 1), OutOfMemory);
}

TEST_CASE("report on a zero-reward game is all zeros") {
  GameModel m = zero_reward_game(31);
  HistoryContext ctx;
  SolveResult res = solve(m, ctx, quick_config(1, 1));
  ExploitabilityReport rep = exploitability_report(
      m, ctx, m.name, "pbvi1", 1, res.value, res.vf);
  CHECK(rep.value == 0.0);
  CHECK(rep.br_value == 0.0);
  CHECK(rep.gap == 0.0);
  REQUIRE(rep.has_exact);
  CHECK(rep.exact_value == 0.0);
  CHECK(rep.epsilon == 0.0);
  CHECK(rep.seconds >= 0.0);
}

TEST_CASE("report CSV layout") {
  ExploitabilityReport rep;
  rep.game = "toy";
  rep.horizon = 2;
  rep.variant = "pbvi3";
  rep.value = 0.25;
  rep.br_value = 0.125;
  rep.gap = 0.125;
  rep.has_exact = true;
  rep.exact_value = 0.1875;
  rep.epsilon = 0.0625;
  rep.seconds = 1.5;
  std::ostringstream os;
  report_csv(rep, os);
  CHECK(os.str() ==
        "game,horizon,variant,value,br_value,gap,exact_value,epsilon,"
        "seconds\ntoy,2,pbvi3,0.25,0.125,0.125,0.1875,0.0625,1.5\n");

  rep.has_exact = false;
  std::ostringstream os2;
  report_csv(rep, os2, /*with_header=*/false);
  CHECK(os2.str() == "toy,2,pbvi3,0.25,0.125,0.125,,,1.5\n");
}

TEST_CASE("report falls back to the gap when the exact solve cannot fit") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;
  SolveResult res = solve(m, ctx, quick_config(1, 2));
  ExploitabilityReport rep = exploitability_report(
      m, ctx, m.name, "pbvi1", 1, res.value, res.vf, /*cap=*/1);
  CHECK_FALSE(rep.has_exact);
  CHECK(rep.epsilon == 0.0);
  CHECK(rep.gap == rep.value - rep.br_value);
  std::ostringstream os;
  report_csv(rep, os, /*with_header=*/false);
  CHECK(os.str().find(",,,") != std::string::npos);
}

TEST_CASE("builtin benchmark values at short horizons") {
  struct Row {
    const char* name;
    int horizon;
    double value;
    double tol;
  };
  const Row rows[] = {
      {"matching-pennies", 2, 0.20, 1e-6},
      {"matching-pennies", 3, 0.40, 1e-6},
      {"recycling", 2, 0.26, 1e-4},
      {"recycling", 3, 0.32, 1e-4},
      {"mabc", 2, 0.077, 1e-3},
      {"mabc", 3, 0.096, 1e-3},
      {"adversarial-tiger", 2, -0.40, 1e-3},
      {"adversarial-tiger", 3, -0.56, 5e-3},
      {"competitive-tiger", 2, -0.02, 1e-3},
  };
  for (const Row& row : rows) {
    CAPTURE(row.name);
    CAPTURE(row.horizon);
    GameModel m = make_builtin(row.name);
    HistoryContext ctx;
    const double v = exact_value(m, ctx, row.horizon);
    CHECK(std::abs(v - row.value) <= row.tol);
  }
}

TEST_CASE("solved policies stay inside the minimax sandwich") {
  for (const char* name : {"adversarial-tiger", "mabc"}) {
    CAPTURE(name);
    GameModel m = make_builtin(name);
    HistoryContext ctx;
    SolveConfig cfg = quick_config(2, 4);
    SolveResult res = solve(m, ctx, cfg);
    FocalPolicy pol;
    ExploitabilityReport rep = exploitability_report(
        m, ctx, name, "pbvi1", 2, res.value, res.vf, kDefaultSequenceCap,
        &pol);
    REQUIRE(rep.has_exact);
    CHECK(rep.br_value <= rep.exact_value + 1e-6);
    CHECK(rep.epsilon >= -1e-6);

    // An unsolved policy is at least as exploitable as the solved one.
    const double br_uniform =
        best_response(m, ctx, uniform_policy(m, 2, 1));
    CHECK(br_uniform <= rep.br_value + 1e-9);

    // The policy the report measured really is the extracted one.
    CHECK(std::abs(best_response(m, ctx, pol) - rep.br_value) <= 1e-12);
  }
}

TEST_CASE("policies survive the text round-trip with the same best response") {
  GameModel m = make_builtin("adversarial-tiger");
  HistoryContext ctx;
  SolveResult res = solve(m, ctx, quick_config(2, 2));
  FocalPolicy pol = extract_policy(m, ctx, res.vf, 2);
  const double br = best_response(m, ctx, pol);

  std::ostringstream os;
  save_policy(pol, ctx, os);
  std::istringstream is(os.str());
  HistoryContext fresh;
  FocalPolicy loaded = load_policy(is, fresh);
  CHECK(std::abs(best_response(m, fresh, loaded) - br) <= 1e-12);
}
