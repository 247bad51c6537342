#pragma once

// Occupancy-state machinery for the reduced game. An occupancy state is the
// exact joint distribution over (hidden state, private history of player 1,
// private history of player 2, public history) induced by the start belief
// and a prefix of decision rules. The solver never needs raw trajectories:
// the transition operator, the stage payoff and the two conditioning
// decompositions below are sufficient statistics for planning.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"

namespace ozsg {

// Entries below this mass are dropped after every transition to keep supports
// sparse. Dropping is the only tolerated mass leak: if the total dropped mass
// of one transition exceeds kRenormThreshold the state is renormalized.
inline constexpr double kSupportEpsilon = 1e-12;
inline constexpr double kRenormThreshold = 1e-10;

struct OccEntry {
  int s, h1, h2, hp;
  double p;
};

struct OccupancyState {
  int stage = 0;
  double g = 0.0;  // accumulated discounted expected payoff of the rule prefix
  std::vector<OccEntry> entries;  // sorted by (hp, h2, h1, s)

  double mass() const;
  void canonicalize();  // sort, merge duplicates, drop tiny entries
};

struct InformedEntry {
  int s, h1, h2;
  double p;
};

// Occupancy conditioned on one public history.
struct InformedOccupancy {
  int stage = 0;
  int hp = PubHistoryTable::kRoot;
  std::vector<InformedEntry> entries;  // sorted by (h2, h1, s)

  double mass() const;
};

struct MarginalEntry {
  int s, h;  // h is the non-conditioned player's private history
  double p;
};

// Occupancy conditioned on one public history and one private history of the
// conditioning player (`player`). For player == 2 the entries range over
// (s, h1); for player == 1 over (s, h2).
struct MarginalOccupancy {
  int stage = 0;
  int hp = PubHistoryTable::kRoot;
  int player = 2;    // whose private history is conditioned on
  int own_h = HistoryTable::kRoot;  // that player's history
  std::vector<MarginalEntry> entries;  // sorted by (h, s)

  double mass() const;
};

// One player's stage decision rule: a distribution over actions for every
// (private history, public history) pair the player can face at this stage.
struct DecisionRule {
  int stage = 0;
  int player = 1;
  std::map<std::pair<int, int>, std::vector<double>> rows;  // (h, hp) -> dist

  const std::vector<double>& at(int h, int hp) const;
  bool covers(int h, int hp) const { return rows.count({h, hp}) != 0; }
};

// Uniform rule over every (h, hp) key appearing in x for the given player.
DecisionRule uniform_rule(const GameModel& m, const OccupancyState& x, int player);

OccupancyState initial_occupancy(const GameModel& m);

// One application of the reduced game's transition: joint push-forward of x
// through (d1, d2) and the model kernel. Updates g by the discounted stage
// payoff. History ids for the successor are interned into ctx.
OccupancyState next_occupancy(const GameModel& m, HistoryContext& ctx,
                              const OccupancyState& x, const DecisionRule& d1,
                              const DecisionRule& d2);

// Expected immediate payoff of (d1, d2) at x.
double stage_reward(const GameModel& m, const OccupancyState& x,
                    const DecisionRule& d1, const DecisionRule& d2);

// x = sum over public histories of Pr(hp | x) * informed state. Weights are
// positive and sum to 1; pairs are ordered by public-history id.
std::vector<std::pair<double, InformedOccupancy>> informed_decomposition(
    const OccupancyState& x);

// o = sum over the conditioning player's histories of Pr(h | o) * marginal.
std::vector<std::pair<double, MarginalOccupancy>> marginal_decomposition(
    const InformedOccupancy& o, int player = 2);

// Bayes step on a marginal: player 1 plays d1, the conditioning player plays
// a2 and observes z2 while the public signal is w. Returns the probability
// Pr(z2, w | c2, d1, a2) and the normalized successor marginal (empty when
// the probability is 0). Only player == 2 marginals advance this way.
std::pair<double, MarginalOccupancy> next_marginal(const GameModel& m,
                                                   HistoryContext& ctx,
                                                   const MarginalOccupancy& c2,
                                                   const DecisionRule& d1, int a2,
                                                   int z2, int w);

// L1 distance over the union of supports; in [0, 2] for normalized inputs.
double l1_distance(const MarginalOccupancy& a, const MarginalOccupancy& b);

// Debug text dump (one entry per line); not a stable format.
std::string debug_dump(const OccupancyState& x);
std::string debug_dump(const MarginalOccupancy& c);

}  // namespace ozsg
