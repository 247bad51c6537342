#pragma once

// CFR+ baseline on the extensive-form expansion of a game. The simultaneous
// stage game is serialized as player 1, then player 2 (hidden from each
// other through information sets), then a chance node over the transition
// kernel. Terminal utilities carry the discounted cumulative reward of the
// trajectory, so regret updates work on total payoffs.

#include <cstdint>
#include <string>
#include <vector>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/pbvi.hpp"
#include "ozsg/policy.hpp"

namespace ozsg {

enum class EfgNodeKind : std::uint8_t { Decision1, Decision2, Chance, Terminal };

// Flattened game tree. Children of a node are contiguous: node n's k-th
// child is node first_child[n] + k. into_prob[n] is the chance probability
// of the edge entering n (1.0 under decision nodes). Decision nodes carry an
// information-set id in meta; terminals index the utility table with it.
struct ExtensiveForm {
  std::vector<EfgNodeKind> kind;
  std::vector<std::int32_t> first_child;
  std::vector<std::int32_t> num_children;
  std::vector<std::int32_t> meta;
  std::vector<double> into_prob;
  std::vector<double> utility;

  // Information-set metadata, per player (index 0 -> player 1).
  struct Infoset {
    int stage = 0;
    int h = 0;   // owner's private history id
    int hp = 0;  // public history id
    int num_actions = 0;
  };
  std::vector<Infoset> infosets[2];

  int horizon = 0;
  std::int64_t node_count() const { return static_cast<std::int64_t>(kind.size()); }
};

struct EfgStats {
  double nodes = 0.0;  // exact until ~2^53; saturates far beyond any cap
  double terminals = 0.0;
  double bytes = 0.0;
};

// Exact node/terminal counts and a size estimate, from a memoized recursion
// over (state, stage). Cheap even when the tree itself would be enormous.
EfgStats measure_extensive_form(const GameModel& m, int horizon);

// Unrolls the tree. Throws OutOfMemory when the measured size estimate
// exceeds cap_bytes (default 16 GiB).
inline constexpr double kDefaultEfgCapBytes = 16.0 * 1024 * 1024 * 1024;
ExtensiveForm build_extensive_form(const GameModel& m, HistoryContext& ctx,
                                   int horizon,
                                   double cap_bytes = kDefaultEfgCapBytes);

struct CfrConfig {
  int max_iterations = 100000;
  double budget_seconds = 7200.0;
  double cap_bytes = kDefaultEfgCapBytes;
  // Exploitability cadence in iterations; 0 measures only the final profile.
  int eval_every = 1;
  // Stop once the duality gap of the average profile drops this low
  // (checked at measurement points); 0 disables early exit.
  double target_epsilon = 0.0;
};

struct CfrTraceRow {
  int iter = 0;
  double seconds = 0.0;
  double exploitability = 0.0;
};

struct CfrResult {
  SolveStatus status = SolveStatus::Ok;
  int iterations = 0;
  double wall_seconds = 0.0;
  // Average-profile diagnostics: expected payoff, the two one-sided best
  // responses, and their gap (all in player-1 terms).
  double value = 0.0;
  double br_against_p1 = 0.0;
  double br_against_p2 = 0.0;
  double epsilon = 0.0;
  FocalPolicy avg1, avg2;
  std::vector<CfrTraceRow> trace;
};

// Regret-matching+ with alternating updates and linearly weighted averaging.
CfrResult run_cfr_plus(const GameModel& m, HistoryContext& ctx, int horizon,
                       const CfrConfig& cfg);

// Writes `time,exploitability` rows.
void trace_csv(const std::vector<CfrTraceRow>& trace, std::ostream& os,
               bool with_header = true);

}  // namespace ozsg
