#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <vector>

#include "ozsg/cfr.hpp"
#include "ozsg/common.hpp"
#include "ozsg/exploitability.hpp"

namespace ozsg {

namespace {

// Regret-matching+ state for one player: cumulative clamped regrets and
// linearly weighted strategy mass, both flat over (infoset, action).
struct RegretTable {
  int actions = 0;
  std::vector<double> regret;
  std::vector<double> cum;

  RegretTable(std::size_t infosets, int actions_)
      : actions(actions_),
        regret(infosets * actions_, 0.0),
        cum(infosets * actions_, 0.0) {}

  // sigma(iset) from the positive regrets; uniform when all are zero.
  void strategy(int iset, std::vector<double>& out) const {
    const double* r = &regret[static_cast<std::size_t>(iset) * actions];
    double total = 0.0;
    for (int a = 0; a < actions; ++a) total += r[a];
    out.resize(actions);
    if (total <= 0.0) {
      std::fill(out.begin(), out.end(), 1.0 / actions);
      return;
    }
    for (int a = 0; a < actions; ++a) out[a] = r[a] / total;
  }
};

class CfrPlus {
 public:
  CfrPlus(const ExtensiveForm& ef)
      : ef_(ef),
        tables_{RegretTable(ef.infosets[0].size(), infoset_actions(ef, 0)),
                RegretTable(ef.infosets[1].size(), infoset_actions(ef, 1))} {
    // One sigma/value scratch pair per tree level avoids per-visit
    // allocations in the walk.
    const std::size_t depth = 3 * (static_cast<std::size_t>(ef.horizon) + 1) + 2;
    const int maxA = std::max(tables_[0].actions, tables_[1].actions);
    scratch_sigma_.assign(depth, std::vector<double>(maxA, 0.0));
    scratch_va_.assign(depth, std::vector<double>(maxA, 0.0));
  }

  // One alternating CFR+ iteration (player 1's pass, then player 2's).
  void iterate(int t) {
    walk(0, /*updating=*/0, 1.0, 1.0, t, 0);
    walk(0, /*updating=*/1, 1.0, 1.0, t, 0);
  }

  FocalPolicy average(int player) const {
    const RegretTable& tab = tables_[player];
    FocalPolicy pol;
    pol.player = player + 1;
    pol.horizon = ef_.horizon;
    pol.num_actions = tab.actions;
    pol.rows.assign(ef_.horizon + 1, {});
    for (std::size_t i = 0; i < ef_.infosets[player].size(); ++i) {
      const ExtensiveForm::Infoset& is = ef_.infosets[player][i];
      const double* c = &tab.cum[i * tab.actions];
      double total = 0.0;
      for (int a = 0; a < tab.actions; ++a) total += c[a];
      std::vector<double> row(tab.actions, 1.0 / tab.actions);
      if (total > 0.0)
        for (int a = 0; a < tab.actions; ++a) row[a] = c[a] / total;
      pol.rows[is.stage][{is.h, is.hp}] = std::move(row);
    }
    return pol;
  }

 private:
  static int infoset_actions(const ExtensiveForm& ef, int player) {
    return ef.infosets[player].empty() ? 1 : ef.infosets[player][0].num_actions;
  }

  // Counterfactual value (player-1 terms) of `node` while `updating`'s
  // regrets and averages accumulate. reach_me: the updating player's own
  // probability of playing to this node; reach_opp: everyone else's.
  double walk(std::int32_t node, int updating, double reach_me,
              double reach_opp, int t, int depth) {
    switch (ef_.kind[node]) {
      case EfgNodeKind::Terminal:
        return ef_.utility[ef_.meta[node]];
      case EfgNodeKind::Chance: {
        double v = 0.0;
        const std::int32_t first = ef_.first_child[node];
        for (std::int32_t k = 0; k < ef_.num_children[node]; ++k) {
          const std::int32_t child = first + k;
          v += ef_.into_prob[child] * walk(child, updating, reach_me,
                                           reach_opp * ef_.into_prob[child], t,
                                           depth + 1);
        }
        return v;
      }
      case EfgNodeKind::Decision1:
      case EfgNodeKind::Decision2: {
        const int player = ef_.kind[node] == EfgNodeKind::Decision1 ? 0 : 1;
        const int iset = ef_.meta[node];
        RegretTable& tab = tables_[player];
        const int A = tab.actions;
        std::vector<double>& sigma = scratch_sigma_[depth];
        tab.strategy(iset, sigma);
        const std::int32_t first = ef_.first_child[node];
        if (player != updating) {
          double v = 0.0;
          for (int a = 0; a < A; ++a)
            if (sigma[a] > 0.0)
              v += sigma[a] * walk(first + a, updating, reach_me,
                                   reach_opp * sigma[a], t, depth + 1);
          return v;
        }
        std::vector<double>& va = scratch_va_[depth];
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          va[a] = walk(first + a, updating, reach_me * sigma[a], reach_opp, t,
                       depth + 1);
          v += sigma[a] * va[a];
        }
        // Player 1 maximizes and player 2 minimizes the same utility, so
        // player 2's regret of action a is the drop it causes, negated.
        const double sign = player == 0 ? 1.0 : -1.0;
        double* r = &tab.regret[static_cast<std::size_t>(iset) * A];
        double* c = &tab.cum[static_cast<std::size_t>(iset) * A];
        for (int a = 0; a < A; ++a) {
          r[a] = std::max(r[a] + sign * reach_opp * (va[a] - v), 0.0);
          c[a] += static_cast<double>(t) * reach_me * sigma[a];
        }
        return v;
      }
    }
    return 0.0;  // unreachable
  }

  const ExtensiveForm& ef_;
  RegretTable tables_[2];
  std::vector<std::vector<double>> scratch_sigma_;
  std::vector<std::vector<double>> scratch_va_;
};

}  // namespace

CfrResult run_cfr_plus(const GameModel& m, HistoryContext& ctx, int horizon,
                       const CfrConfig& cfg) {
  CfrResult res;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  ExtensiveForm ef;
  try {
    ef = build_extensive_form(m, ctx, horizon, cfg.cap_bytes);
  } catch (const OutOfMemory&) {
    res.status = SolveStatus::OutOfMemory;
    res.wall_seconds = elapsed();
    return res;
  }

  CfrPlus cfr(ef);
  auto measure = [&](int iter) {
    res.avg1 = cfr.average(0);
    res.avg2 = cfr.average(1);
    res.br_against_p1 = best_response(m, ctx, res.avg1);
    res.br_against_p2 = best_response(m, ctx, res.avg2);
    res.epsilon = res.br_against_p2 - res.br_against_p1;
    res.value = policy_pair_value(m, ctx, res.avg1, res.avg2);
    res.trace.push_back({iter, elapsed(), res.epsilon});
  };

  int t = 0;
  bool out_of_time = false;
  while (t < cfg.max_iterations) {
    if (elapsed() > cfg.budget_seconds) {
      out_of_time = true;
      break;
    }
    ++t;
    cfr.iterate(t);
    res.iterations = t;
    if (cfg.eval_every > 0 && t % cfg.eval_every == 0) {
      measure(t);
      if (cfg.target_epsilon > 0.0 && res.epsilon <= cfg.target_epsilon) break;
    }
  }
  if (res.trace.empty() || res.trace.back().iter != res.iterations)
    measure(res.iterations);
  res.status = out_of_time ? SolveStatus::OutOfTime : SolveStatus::Ok;
  res.wall_seconds = elapsed();
  return res;
}

void trace_csv(const std::vector<CfrTraceRow>& trace, std::ostream& os,
               bool with_header) {
  if (with_header) os << "time,exploitability\n";
  char buf[64];
  for (const CfrTraceRow& row : trace) {
    std::snprintf(buf, sizeof buf, "%.6f,%.9g", row.seconds, row.exploitability);
    os << buf << '\n';
  }
}

}  // namespace ozsg
