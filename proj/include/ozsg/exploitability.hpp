#pragma once

// Policy extraction and exact evaluation. extract_policy replays the solved
// value function down a trajectory of occupancy states, turning each stage's
// greedy LP mixture into executable rows. best_response computes the exact
// worst-case value of a fixed policy by backward induction over the opposing
// player's information states. exact_value solves the whole horizon-limited
// game as one sequence-form zero-sum LP, the reference the measured numbers
// are compared against whenever the game is small enough to admit it.

#include <cstddef>
#include <iosfwd>
#include <string>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/policy.hpp"
#include "ozsg/value_function.hpp"

namespace ozsg {

// Walks the public tree from the root occupancy, solving one greedy backup
// per informed state per stage against vf. The LP's xi1 mixture becomes the
// policy rows for every private history in the informed support; the
// occupancy then advances under the extracted rule against a half-dual
// half-uniform opponent mixture, so every branch any opponent could force
// stays represented. Pairs never visited keep the uniform fallback, which
// only triggers where the extracted policy itself makes the pair
// unreachable.
FocalPolicy extract_policy(const GameModel& m, HistoryContext& ctx,
                           const ValueFunction& vf, int horizon);

// Exact value of the fixed policy against a best-responding opponent:
// backward induction over the non-focal player's information states (their
// private history plus the public one) carrying unnormalized conditional
// beliefs over (state, focal private history). Returns the minimum over
// opponent policies when policy.player == 1 and the maximum when
// policy.player == 2; either way the value is in player-1 terms.
double best_response(const GameModel& m, HistoryContext& ctx,
                     const FocalPolicy& policy);

// Exact expected discounted value of a fixed policy pair under the model, by
// joint forward enumeration. p1 must be a player-1 policy and p2 a player-2
// policy of the same horizon.
double policy_pair_value(const GameModel& m, HistoryContext& ctx,
                         const FocalPolicy& p1, const FocalPolicy& p2);

inline constexpr std::size_t kDefaultSequenceCap = 1'000'000;

// Exact minimax value of the horizon-limited game via the sequence-form LP
// over both players' realization plans. Throws OutOfMemory when the sequence
// count of either player, or the joint chance-reach support driving the
// payoff coefficients, would exceed cap.
double exact_value(const GameModel& m, HistoryContext& ctx, int horizon,
                   std::size_t cap = kDefaultSequenceCap);

struct ExploitabilityReport {
  std::string game;
  int horizon = 0;
  std::string variant;       // solver label for the CSV row
  double value = 0.0;        // claimed root value
  double br_value = 0.0;     // worst-case value of the extracted policy
  double gap = 0.0;          // value - br_value
  bool has_exact = false;    // the exact solve fit under the sequence cap
  double exact_value = 0.0;  // minimax value, when available
  double epsilon = 0.0;      // exact_value - br_value, when available
  double seconds = 0.0;      // wall time spent on this measurement
};

// Extracts the policy, measures its best response, and fills in the exact
// value when the sequence-form solve fits under the cap (the gap alone is
// reported otherwise). When policy_out is non-null it receives the extracted
// policy.
ExploitabilityReport exploitability_report(
    const GameModel& m, HistoryContext& ctx, const std::string& game,
    const std::string& variant, int horizon, double claimed_value,
    const ValueFunction& vf, std::size_t cap = kDefaultSequenceCap,
    FocalPolicy* policy_out = nullptr);

// Header "game,horizon,variant,value,br_value,gap,exact_value,epsilon,
// seconds" plus one row; the exact fields stay empty when unavailable.
void report_csv(const ExploitabilityReport& rep, std::ostream& os,
                bool with_header = true);

}  // namespace ozsg
