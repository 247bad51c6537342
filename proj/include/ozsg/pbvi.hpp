#pragma once

// Point-based solver over the occupancy reduction. A sample bank holds, per
// stage, the informed occupancy states visited so far and the opponent
// marginals sampled beneath them (with full provenance, so every banked state
// can be re-derived from the root). Each outer iteration improves the value
// function bottom-up at the banked states, optionally prunes dominated sets
// and redundant states, and then deepens the bank by farthest-point
// expansion.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ozsg/backup.hpp"
#include "ozsg/common.hpp"
#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/occupancy.hpp"
#include "ozsg/policy.hpp"
#include "ozsg/value_function.hpp"

namespace ozsg {

enum class Variant { Pbvi1 = 1, Pbvi2 = 2, Pbvi3 = 3 };

// "pbvi1" | "pbvi2" | "pbvi3"; throws ParseError otherwise.
Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

struct InformedRecord {
  InformedOccupancy o;
  int parent = -1;     // informed index at the previous stage (-1 at stage 0)
  DecisionRule d1;     // rule that reached o from the parent
  int w = -1;          // public observation on the reaching branch
  bool active = true;  // false when masked as redundant (pbvi3)
};

struct MarginalRecord {
  MarginalOccupancy c2;
  int informed = -1;  // same-stage informed record this marginal conditions
  int parent = -1;    // marginal index at the previous stage (-1 at stage 0)
  DecisionRule d1;    // Bayes-step rule (only when parent >= 0)
  int a2 = -1, z2 = -1, w = -1;  // Bayes-step branch (only when parent >= 0)
  int generation = 0;            // insertion order within the stage
};

struct SampleBank {
  std::vector<std::vector<InformedRecord>> informed;   // stages 0..horizon
  std::vector<std::vector<MarginalRecord>> marginals;  // stages 0..horizon
};

// Stage 0 seeded with the root informed state and its marginal components;
// later stages start empty and are filled by expansion.
SampleBank init_bank(const GameModel& m, int horizon);

struct SolveConfig {
  Variant variant = Variant::Pbvi1;
  int horizon = -1;  // <0: use the model's default
  double budget_seconds = 7200.0;
  double memory_cap_mib = 16384.0;
  int max_iterations = 0;  // 0: no cap
  int expansion_cap = 16;  // new marginals per stage per iteration
  double prune_epsilon = 0.0;  // redundancy threshold (pbvi3)
  std::uint64_t seed = 0;
  int eval_every = 1;       // exploitability cadence in iterations; 0: never
  bool frozen_bank = false;  // skip expansion; improve on a fixed bank
};

enum class SolveStatus { Ok, OutOfTime, OutOfMemory };
const char* status_name(SolveStatus s);

struct ProgressRow {
  int iter = 0;
  double cumul_time = 0.0;  // deterministic work-meter seconds
  double value = 0.0;       // root value after the improvement sweep
  std::optional<double> exp_value;  // exploitability when measured
};

struct SolveResult {
  SolveStatus status = SolveStatus::Ok;
  double value = 0.0;
  // Farthest uncovered candidate distance seen at the last expansion; an
  // empirical stand-in for the sampling density delta.
  double delta_estimate = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::uint64_t work_units = 0;
  std::vector<ProgressRow> progress;
  ValueFunction vf;
  SampleBank bank;
  FocalPolicy policy;  // filled by extract_policy, not by solve
};

// Measures exploitability of the current (vf, bank) mid-solve.
using EvalHook = std::function<double(const ValueFunction&, const SampleBank&)>;

// One greedy backup per active informed record at the stage; every banked
// marginal of the stage serves as a freeze sample. Returns the grown
// function. When sols is non-null it is resized to the record count and
// receives each solved record's greedy solution (reused by expansion).
ValueFunction improve(const GameModel& m, HistoryContext& ctx,
                      const ValueFunction& vf, const SampleBank& bank, int stage,
                      std::vector<std::optional<GreedySolution>>* sols = nullptr,
                      WorkMeter* meter = nullptr);

struct ExpandStats {
  int added = 0;
  double max_added_distance = 0.0;  // farthest candidate actually added
  double max_left_distance = 0.0;   // farthest candidate left uncovered
};

// Candidate successors of every banked marginal at `stage` under the greedy
// rule and (capped, seed-subsampled) deterministic rules, one per opponent
// branch. Candidates join stage+1 farthest-first while the growth budget
// lasts; each addition also reconstructs (or reuses) the compatible informed
// record. sols, when given, supplies cached greedy solutions per informed
// record index.
ExpandStats expand_stage(const GameModel& m, HistoryContext& ctx,
                         SampleBank& bank, const ValueFunction& vf, int stage,
                         const SolveConfig& cfg, int iter,
                         const std::vector<std::optional<GreedySolution>>* sols = nullptr,
                         WorkMeter* meter = nullptr);

// Drops every stage-t set that is the argmax winner at none of the banked
// informed states (ties to the lowest set index). Returns the number of sets
// removed; refcounts of the kept sets hold their winner counts. No-op when
// the stage has no banked states.
int bounded_pruning(ValueFunction& vf, const SampleBank& bank, int stage);

// Recomputes the stage's active mask: walking the records in order, a record
// is masked when some earlier kept record's winning set matches the record's
// own winning value at it within epsilon. Returns the number masked.
int prune_states(const ValueFunction& vf, SampleBank& bank, int stage,
                 double epsilon);

// Outer loop: improve sweep (deep stage first), variant-specific pruning,
// expansion, until convergence, the iteration cap, the time budget, or the
// memory cap. Budget and cap exhaustion are reported as statuses, never
// thrown. initial_bank / initial_vf, when given, replace the fresh seeds
// (checkpoint resume and forced-bank comparisons).
SolveResult solve(const GameModel& m, HistoryContext& ctx, const SolveConfig& cfg,
                  const EvalHook& hook = nullptr,
                  const SampleBank* initial_bank = nullptr,
                  const ValueFunction* initial_vf = nullptr);

// Header "iter,cumul_time,value,exp_value"; exp_value empty when unmeasured.
void progress_csv(const std::vector<ProgressRow>& rows, std::ostream& os);

// Versioned binary checkpoint: history tables + value function + bank.
// Loading requires fresh (root-only) history tables.
void save_checkpoint(const HistoryContext& ctx, const ValueFunction& vf,
                     const SampleBank& bank, std::ostream& os);
void load_checkpoint(std::istream& is, HistoryContext& ctx, ValueFunction& vf,
                     SampleBank& bank);

}  // namespace ozsg
