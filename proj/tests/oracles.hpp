#pragma once

// Independent reference implementations used only by tests. Everything here
// works by brute-force enumeration on tiny games so it can cross-check the
// library's sparse/LP-based code paths without sharing their logic.

#include <array>
#include <map>
#include <tuple>
#include <vector>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/occupancy.hpp"
#include "ozsg/rng.hpp"

namespace ozsg::testing {

// Random small game: dimensions drawn in [1, max_*], random sparse kernel
// rows, rewards in [-1, 1], random start belief.
GameModel random_tiny_game(RngStream& rng, int max_s = 3, int max_a = 2, int max_z = 2,
                           int max_w = 2, double discount = 1.0);

struct EnumResult {
  double value = 0.0;  // E[sum_t gamma^t r] over the played stages
  // stage_dist[t]: joint distribution over (s, h1, h2, hp) at stage t,
  // t = 0 .. #rules (inclusive: the post-final-transition distribution).
  std::vector<std::map<std::tuple<int, int, int, int>, double>> stage_dist;
};

// Plays the rule sequences by enumerating every trajectory explicitly.
EnumResult enumerate_play(const GameModel& m, HistoryContext& ctx,
                          const std::vector<DecisionRule>& d1s,
                          const std::vector<DecisionRule>& d2s);

// Builds rules stage by stage for every reachable (history, public history)
// key, random full-support rows (or random deterministic rows when pure).
void random_rule_sequence(const GameModel& m, HistoryContext& ctx, int stages,
                          RngStream& rng, std::vector<DecisionRule>& d1s,
                          std::vector<DecisionRule>& d2s, bool pure = false);

// Exact value of the zero-sum matrix game A (row player maximizes) by
// square-kernel support enumeration. Intended for matrices up to ~10x10.
double matrix_game_value(const std::vector<std::vector<double>>& A);

// Optimal row strategy of the same game (first kernel found).
std::vector<double> matrix_game_row_strategy(const std::vector<std::vector<double>>& A);

}  // namespace ozsg::testing
