#pragma once

// Piecewise-linear value representation over occupancy states. A stage holds
// a collection of sets of alpha-vectors; each alpha-vector is linear over
// player-2 marginal occupancy states, the inner minimum over a set captures
// the opponent's choice, and the outer maximum over sets captures ours.

#include <array>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "ozsg/game.hpp"
#include "ozsg/history.hpp"
#include "ozsg/occupancy.hpp"

namespace ozsg {

// Linear functional over marginal occupancy states, stored sparsely over
// (h1, s) keys with a pessimistic default for keys never touched by a backup.
struct AlphaVector {
  int stage = 0;
  double default_value = 0.0;
  std::map<std::pair<int, int>, double> values;  // (h1, s) -> real

  double at(int h1, int s) const {
    auto it = values.find({h1, s});
    return it == values.end() ? default_value : it->second;
  }
  // Inner product with a normalized player-2 marginal.
  double dot(const MarginalOccupancy& c2) const;
};

struct GammaSet {
  int stage = 0;
  std::vector<AlphaVector> alphas;  // non-empty
  int refcount = 0;                 // winner bookkeeping for pruning
};

// Stages 0..horizon; stage horizon+1 is implicitly the zero function.
class ValueFunction {
 public:
  ValueFunction() = default;
  explicit ValueFunction(int horizon) : stages_(horizon + 1) {}
  int horizon() const { return static_cast<int>(stages_.size()) - 1; }
  std::vector<GammaSet>& at(int t) { return stages_.at(t); }
  const std::vector<GammaSet>& at(int t) const { return stages_.at(t); }

 private:
  std::vector<std::vector<GammaSet>> stages_;
};

// Sound lower bound on any stage-t tail value:
// sum_{t'=t}^{horizon} discount^{t'-t} * min reward.
double stage_lower_bound(const GameModel& m, int horizon, int t);

// One constant pessimistic alpha-vector per stage.
ValueFunction init_value_function(const GameModel& m, int horizon);

struct AlphaEval {
  double value = 0.0;
  int alpha = -1;  // lowest minimizing index
};
AlphaEval min_alpha(const GammaSet& set, const MarginalOccupancy& c2);

struct InformedEval {
  double value = 0.0;
  int best_set = -1;  // lowest maximizing index; -1 past the horizon
};

// max over sets of the Pr(h2|o)-weighted min-alpha values at the marginals.
InformedEval evaluate_informed_detail(const ValueFunction& vf,
                                      const InformedOccupancy& o);
double evaluate_informed(const ValueFunction& vf, const InformedOccupancy& o);

// Public-weighted sum of evaluate_informed over the decomposition of x.
double evaluate(const ValueFunction& vf, const OccupancyState& x);

// Action-value functional built from one stage-(t+1) set and a selector nu
// that commits to one alpha-vector per (z2, w) branch.
struct PhiVector {
  int stage = 0;
  int source_set = -1;
  std::map<std::pair<int, int>, int> nu;            // (z2, w) -> alpha index
  std::map<std::array<int, 4>, double> values;      // (h1, s, a1, a2) -> real
  double at(int h1, int s, int a1, int a2) const {
    auto it = values.find({h1, s, a1, a2});
    return it == values.end() ? 0.0 : it->second;
  }
};

// phi(s,h1,a1,a2) = r(s,a1,a2)
//     + discount * sum_outcomes p * alpha_{nu(z2,w)}(child(h1,a1,z1), s').
// Entries are produced for every (h1 in h1_list, s, a1, a2); successor
// history ids are interned into the table.
PhiVector make_phi(const GameModel& m, HistoryTable& h1_table, const GammaSet& gamma,
                   const std::map<std::pair<int, int>, int>& nu,
                   const std::vector<int>& h1_list, int stage);

// Versioned binary checkpoint round-trip.
void save_value_function(const ValueFunction& vf, std::ostream& os);
ValueFunction load_value_function(std::istream& is);

}  // namespace ozsg
