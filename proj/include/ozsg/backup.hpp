#pragma once

// LP-driven greedy backup at one informed occupancy state. The scalable
// default works directly on the stage-(t+1) alpha-vector sets ("gamma form");
// the explicit conditional-plan formulation ("phi form") and its dual exist
// for small instances and cross-checks. All three surface the same
// GreedySolution record.

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/occupancy.hpp"
#include "ozsg/value_function.hpp"

namespace ozsg {

enum class GreedyForm { PhiForm, GammaForm };

struct GreedySolution {
  GreedyForm form = GreedyForm::GammaForm;
  int stage = 0;
  int hp = PubHistoryTable::kRoot;
  double objective = 0.0;
  // (h1, set index, a1) -> probability of jointly picking the set and action.
  std::map<std::tuple<int, int, int>, double> xi1;
  // (h2, set index) -> per-set value bound. The gamma form has a single bound
  // per h2 (the f variable), recorded under set index -1.
  std::map<std::pair<int, int>, double> upsilon;
  // (set, member, h2, a2) -> probability, normalized per (h2, set).
  std::map<std::tuple<int, int, int, int>, double> dual_lambda;
  // (h2, a2) -> opponent branch weight (duals of the per-(h2,a2) bound rows);
  // sums to 1 over a2 for each h2.
  std::map<std::pair<int, int>, double> branch;
  // Deterministic cost of producing this solution (simplex iterations times
  // tableau size, summed over solves); feeds the solver's work meter.
  long long work = 0;

  // Total xi1 mass recorded for h1 (0 when the LP had no such row).
  double row_mass(int h1) const;
};

// Distinct private histories of `player` appearing in o, ascending.
std::vector<int> own_histories(const InformedOccupancy& o, int player);

// The implicit zero value function past stage t (single set, single zero
// alpha at stage t+1).
std::vector<GammaSet> zero_stage_sets(int stage);

// Greedy one-stage backup at o against the stage-(t+1) sets, solved as a
// maximization over per-history set/action mixtures theta with per-(h2,a2)
// value bounds and per-(z2,w) adversarial continuation rows. Continuation
// rows are generated lazily. If lp_dump is non-null the final LP text is
// stored there.
GreedySolution greedy_gamma_lp(const GameModel& m, HistoryContext& ctx,
                               const InformedOccupancy& o,
                               const std::vector<GammaSet>& vf_next,
                               std::string* lp_dump = nullptr);

// All conditional plans phi induced by a stage-(t+1) set collection: one phi
// per (set, selector nu over (z2,w)). Exponential; small instances only.
std::vector<std::vector<PhiVector>> enumerate_phi_sets(
    const GameModel& m, HistoryTable& h1_table,
    const std::vector<GammaSet>& next_sets, const std::vector<int>& h1_list,
    int stage);

// Explicit-plan formulation: per-(h2, set) value variables bounded by every
// (phi, a2) response, additive across sets.
GreedySolution greedy_phi_lp(const GameModel& m, const InformedOccupancy& o,
                             const std::vector<std::vector<PhiVector>>& phi_sets,
                             std::string* lp_dump = nullptr);

// Linear-programming dual of greedy_phi_lp: opponent response weights lambda
// per (h2, set) with per-history value covers mu. xi1 is recovered from the
// cover-row duals; upsilon from the normalization-row duals.
GreedySolution dual_greedy_lp(const GameModel& m, const InformedOccupancy& o,
                              const std::vector<std::vector<PhiVector>>& phi_sets,
                              std::string* lp_dump = nullptr);

// One new alpha-vector per sampled marginal: for each stage-(t+1) set the
// opponent action and per-(z2,w) continuation are chosen to minimize the
// sample's value under the solution's mixture, then frozen into a linear
// functional. Missing xi1 rows fall back to uniform-over-actions on set 0.
GammaSet gamma_update_set(const GameModel& m, HistoryContext& ctx,
                          const ValueFunction& vf, int stage,
                          const GreedySolution& sol,
                          const std::vector<MarginalOccupancy>& samples);

// Appends gamma_update_set to a copy of vf.
ValueFunction value_update(const GameModel& m, HistoryContext& ctx,
                           const ValueFunction& vf, int stage,
                           const GreedySolution& sol,
                           const std::vector<MarginalOccupancy>& samples);

// Same construction over explicit phi collections (small-instance oracle).
GammaSet phi_update_set(const GameModel& m,
                        const std::vector<std::vector<PhiVector>>& phi_sets,
                        int stage, double default_value,
                        const GreedySolution& sol,
                        const std::vector<MarginalOccupancy>& samples);

// xi1 marginalized over sets into a stage decision rule at public node hp.
// Histories without xi1 mass get uniform rows.
DecisionRule rule_from_solution(const GameModel& m, const GreedySolution& sol,
                                const std::vector<int>& h1_list, int hp,
                                int stage);

}  // namespace ozsg
