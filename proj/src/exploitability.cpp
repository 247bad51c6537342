#include "ozsg/exploitability.hpp"

#include <array>
#include <chrono>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ozsg/backup.hpp"
#include "ozsg/common.hpp"
#include "ozsg/occupancy.hpp"

namespace ozsg {

FocalPolicy extract_policy(const GameModel& m, HistoryContext& ctx,
                           const ValueFunction& vf, int horizon) {
  if (horizon < 0) throw InternalError("extract_policy: negative horizon");
  if (vf.horizon() != horizon)
    throw InternalError("extract_policy: value function covers horizon " +
                        std::to_string(vf.horizon()) + ", not " +
                        std::to_string(horizon));
  const int A2 = m.nA2();

  FocalPolicy pol;
  pol.player = 1;
  pol.horizon = horizon;
  pol.num_actions = m.nA1();
  pol.rows.assign(static_cast<std::size_t>(horizon) + 1, {});

  OccupancyState x = initial_occupancy(m);
  for (int t = 0; t <= horizon; ++t) {
    std::vector<GammaSet> zero;
    const std::vector<GammaSet>* next = nullptr;
    if (t == horizon) {
      zero = zero_stage_sets(t);
      next = &zero;
    } else {
      next = &vf.at(t + 1);
    }

    DecisionRule d1;
    d1.stage = t;
    d1.player = 1;
    DecisionRule d2;
    d2.stage = t;
    d2.player = 2;
    for (const auto& [weight, o] : informed_decomposition(x)) {
      (void)weight;
      GreedySolution sol = greedy_gamma_lp(m, ctx, o, *next);
      DecisionRule r1 =
          rule_from_solution(m, sol, own_histories(o, 1), o.hp, t);
      for (const auto& [key, row] : r1.rows) {
        d1.rows[key] = row;
        pol.rows[t][key] = row;
      }
      // Advance against the LP's certifying opponent mixed half-and-half
      // with uniform: the dual alone may starve branches it finds harmless,
      // and rows must exist wherever a live opponent could steer play.
      for (int h2 : own_histories(o, 2)) {
        std::vector<double> row(A2, 0.0);
        double total = 0.0;
        for (int a2 = 0; a2 < A2; ++a2) {
          auto it = sol.branch.find({h2, a2});
          if (it != sol.branch.end()) row[a2] = it->second;
          total += row[a2];
        }
        for (int a2 = 0; a2 < A2; ++a2) {
          const double dual = total > 1e-12 ? row[a2] / total : 1.0 / A2;
          row[a2] = 0.5 * dual + 0.5 / A2;
        }
        d2.rows[{h2, o.hp}] = std::move(row);
      }
    }
    if (t < horizon) x = next_occupancy(m, ctx, x, d1, d2);
  }
  return pol;
}

namespace {

// Backward induction over the responder's information states for a fixed
// focal policy. Beliefs are unnormalized joint masses over (state, focal
// private history); values scale linearly with the mass, so branch
// probabilities never need to be normalized out and empty branches simply
// contribute zero. Every (responder history, public history) pair is reached
// by exactly one recursion path, so the traversal is a tree walk.
class BestResponder {
 public:
  BestResponder(const GameModel& m, HistoryContext& ctx,
                const FocalPolicy& pol)
      : m_(m), ctx_(ctx), pol_(pol), focal1_(pol.player == 1) {}

  double run() {
    Belief b0;
    for (int s = 0; s < m_.nS(); ++s)
      if (m_.start[s] > 0.0) b0[{s, HistoryTable::kRoot}] = m_.start[s];
    return node(HistoryTable::kRoot, PubHistoryTable::kRoot, b0, 0);
  }

 private:
  using Belief = std::map<std::pair<int, int>, double>;  // (s, h_focal)

  double node(int hr, int hp, const Belief& b, int t) {
    const int num_responses = focal1_ ? m_.nA2() : m_.nA1();
    std::map<int, std::vector<double>> rows;
    for (const auto& [key, mass] : b) {
      (void)mass;
      if (!rows.count(key.second))
        rows.emplace(key.second, pol_.row(t, key.second, hp));
    }

    double best = 0.0;
    bool first = true;
    for (int ar = 0; ar < num_responses; ++ar) {
      double stage = 0.0;
      std::map<std::pair<int, int>, Belief> child;  // (z_resp, w) -> belief
      for (const auto& [key, mass] : b) {
        const int s = key.first;
        const int hf = key.second;
        const std::vector<double>& row = rows.at(hf);
        for (int af = 0; af < static_cast<int>(row.size()); ++af) {
          if (row[af] <= 0.0) continue;
          const double wgt = mass * row[af];
          const int a1 = focal1_ ? af : ar;
          const int a2 = focal1_ ? ar : af;
          stage += wgt * m_.r(s, a1, a2);
          if (t >= pol_.horizon) continue;
          for (const Outcome& out : m_.outcomes(s, a1, a2)) {
            const int zf = focal1_ ? out.z1 : out.z2;
            const int zr = focal1_ ? out.z2 : out.z1;
            const int hfc = (focal1_ ? ctx_.h1 : ctx_.h2).child(hf, af, zf);
            child[{zr, out.w}][{out.s2, hfc}] += wgt * out.p;
          }
        }
      }
      double cont = 0.0;
      for (const auto& [branch, cb] : child) {
        const int hrc =
            (focal1_ ? ctx_.h2 : ctx_.h1).child(hr, ar, branch.first);
        const int hpc = ctx_.pub.child(hp, branch.second);
        cont += node(hrc, hpc, cb, t + 1);
      }
      const double total = stage + m_.discount * cont;
      if (first || (focal1_ ? total < best : total > best)) best = total;
      first = false;
    }
    return best;
  }

  const GameModel& m_;
  HistoryContext& ctx_;
  const FocalPolicy& pol_;
  const bool focal1_;
};

void check_policy(const GameModel& m, const FocalPolicy& pol,
                  const char* where) {
  if (pol.player != 1 && pol.player != 2)
    throw InternalError(std::string(where) + ": policy player must be 1 or 2");
  if (pol.horizon < 0)
    throw InternalError(std::string(where) + ": negative policy horizon");
  const int want = pol.player == 1 ? m.nA1() : m.nA2();
  if (pol.num_actions != want)
    throw InternalError(std::string(where) + ": policy has " +
                        std::to_string(pol.num_actions) +
                        " actions, model wants " + std::to_string(want));
}

}  // namespace

double best_response(const GameModel& m, HistoryContext& ctx,
                     const FocalPolicy& policy) {
  check_policy(m, policy, "best_response");
  return BestResponder(m, ctx, policy).run();
}

double policy_pair_value(const GameModel& m, HistoryContext& ctx,
                         const FocalPolicy& p1, const FocalPolicy& p2) {
  if (p1.player != 1 || p2.player != 2)
    throw InternalError("policy_pair_value: expected a (player 1, player 2) pair");
  check_policy(m, p1, "policy_pair_value");
  check_policy(m, p2, "policy_pair_value");
  if (p1.horizon != p2.horizon)
    throw InternalError("policy_pair_value: horizon mismatch");

  using Key = std::array<int, 4>;  // (hp, h1, h2, s)
  std::map<Key, double> cur;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0)
      cur[{PubHistoryTable::kRoot, HistoryTable::kRoot, HistoryTable::kRoot,
           s}] = m.start[s];

  double total = 0.0;
  double disc = 1.0;
  for (int t = 0; t <= p1.horizon; ++t) {
    std::map<Key, double> nxt;
    for (const auto& [key, mass] : cur) {
      const auto [hp, h1, h2, s] = key;
      const std::vector<double> r1 = p1.row(t, h1, hp);
      const std::vector<double> r2 = p2.row(t, h2, hp);
      for (int a1 = 0; a1 < m.nA1(); ++a1) {
        if (r1[a1] <= 0.0) continue;
        for (int a2 = 0; a2 < m.nA2(); ++a2) {
          if (r2[a2] <= 0.0) continue;
          const double wgt = mass * r1[a1] * r2[a2];
          total += disc * wgt * m.r(s, a1, a2);
          if (t == p1.horizon) continue;
          for (const Outcome& out : m.outcomes(s, a1, a2))
            nxt[{ctx.pub.child(hp, out.w), ctx.h1.child(h1, a1, out.z1),
                 ctx.h2.child(h2, a2, out.z2), out.s2}] += wgt * out.p;
        }
      }
    }
    cur.swap(nxt);
    disc *= m.discount;
  }
  return total;
}

ExploitabilityReport exploitability_report(
    const GameModel& m, HistoryContext& ctx, const std::string& game,
    const std::string& variant, int horizon, double claimed_value,
    const ValueFunction& vf, std::size_t cap, FocalPolicy* policy_out) {
  const auto t0 = std::chrono::steady_clock::now();
  ExploitabilityReport rep;
  rep.game = game;
  rep.horizon = horizon;
  rep.variant = variant;
  rep.value = claimed_value;

  FocalPolicy pol = extract_policy(m, ctx, vf, horizon);
  rep.br_value = best_response(m, ctx, pol);
  rep.gap = rep.value - rep.br_value;
  try {
    rep.exact_value = exact_value(m, ctx, horizon, cap);
    rep.has_exact = true;
    rep.epsilon = rep.exact_value - rep.br_value;
  } catch (const OutOfMemory&) {
    rep.has_exact = false;
  }
  if (policy_out) *policy_out = std::move(pol);
  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

void report_csv(const ExploitabilityReport& rep, std::ostream& os,
                bool with_header) {
  if (with_header)
    os << "game,horizon,variant,value,br_value,gap,exact_value,epsilon,"
          "seconds\n";
  os << rep.game << ',' << rep.horizon << ',' << rep.variant << ','
     << csv_double(rep.value) << ',' << csv_double(rep.br_value) << ','
     << csv_double(rep.gap) << ',';
  if (rep.has_exact)
    os << csv_double(rep.exact_value) << ',' << csv_double(rep.epsilon);
  else
    os << ',';
  os << ',' << csv_double(rep.seconds) << '\n';
}

}  // namespace ozsg
