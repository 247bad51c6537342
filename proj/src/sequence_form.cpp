// Exact minimax value of the horizon-limited game, solved as the standard
// sequence-form zero-sum LP: maximize the root value variable of the
// minimizing player's constraint duals subject to the maximizer's realization
// plan being a flow. Payoff coefficients pair same-stage sequences of the two
// players that share a public history, weighted by the chance reach of the
// joint tuples and the stage discount.

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ozsg/common.hpp"
#include "ozsg/exploitability.hpp"
#include "ozsg/lp.hpp"

namespace ozsg {

namespace {

// (hp, h1, h2, s) with the chance-reach mass: start belief times kernel
// probabilities along the unique path the histories encode. Strategy weights
// stay symbolic in the LP.
using JointKey = std::tuple<int, int, int, int>;

struct InfosetIndex {
  std::map<std::pair<int, int>, int> index;  // (h, hp) -> infoset id
  std::vector<std::pair<int, int>> keys;

  int intern(int h, int hp) {
    auto [it, fresh] = index.try_emplace({h, hp}, static_cast<int>(keys.size()));
    if (fresh) keys.push_back({h, hp});
    return it->second;
  }
};

}  // namespace

double exact_value(const GameModel& m, HistoryContext& ctx, int horizon,
                   std::size_t cap) {
  if (horizon < 0) throw InternalError("exact_value: negative horizon");
  const int A1 = m.nA1(), A2 = m.nA2();

  std::vector<std::map<JointKey, double>> level(
      static_cast<std::size_t>(horizon) + 1);
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0)
      level[0][{PubHistoryTable::kRoot, HistoryTable::kRoot,
                HistoryTable::kRoot, s}] = m.start[s];

  std::size_t joint_total = level[0].size();
  for (int t = 0; t < horizon; ++t) {
    for (const auto& [key, mass] : level[t]) {
      const auto [hp, h1, h2, s] = key;
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2)
          for (const Outcome& out : m.outcomes(s, a1, a2))
            level[t + 1][{ctx.pub.child(hp, out.w),
                          ctx.h1.child(h1, a1, out.z1),
                          ctx.h2.child(h2, a2, out.z2), out.s2}] +=
                mass * out.p;
      // Fail before an oversized level is materialized, not after.
      if (joint_total + level[t + 1].size() > cap) throw OutOfMemory();
    }
    joint_total += level[t + 1].size();
  }

  // Infosets per player; ids ascend stage by stage so every parent is
  // interned before its children. Sequence id of (infoset i, action a) is
  // 1 + i * A + a; id 0 is the empty sequence.
  InfosetIndex is1, is2;
  for (int t = 0; t <= horizon; ++t)
    for (const auto& [key, mass] : level[t]) {
      (void)mass;
      const auto [hp, h1, h2, s] = key;
      (void)s;
      is1.intern(h1, hp);
      is2.intern(h2, hp);
    }
  const std::size_t nseq1 = 1 + is1.keys.size() * static_cast<std::size_t>(A1);
  const std::size_t nseq2 = 1 + is2.keys.size() * static_cast<std::size_t>(A2);
  if (nseq1 + nseq2 > cap) throw OutOfMemory();

  // Payoff coefficient of (sequence1, sequence2), accumulated over states.
  std::unordered_map<std::uint64_t, double> payoff;
  payoff.reserve(joint_total);
  double disc = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    for (const auto& [key, mass] : level[t]) {
      const auto [hp, h1, h2, s] = key;
      const int i1 = is1.index.at({h1, hp});
      const int i2 = is2.index.at({h2, hp});
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          const double r = m.r(s, a1, a2);
          if (r == 0.0) continue;
          const std::uint64_t s1 = 1 + static_cast<std::uint64_t>(i1) * A1 + a1;
          const std::uint64_t s2 = 1 + static_cast<std::uint64_t>(i2) * A2 + a2;
          payoff[(s1 << 32) | s2] += disc * mass * r;
        }
    }
    disc *= m.discount;
  }

  // Variables: x per player-1 sequence (the realization plan; the empty
  // sequence is pinned to 1), then one free value variable per player-2
  // infoset plus one for their empty sequence. Maximize the root value.
  lp::Model model(/*maximize=*/true);
  const int x0 = model.add_var(1.0, 1.0, 0.0);
  (void)x0;
  for (std::size_t i = 1; i < nseq1; ++i) model.add_var(0.0, 1.0, 0.0);
  const int qroot = model.add_var(-lp::kInf, lp::kInf, 1.0);
  std::vector<int> qvar(is2.keys.size());
  for (std::size_t i = 0; i < is2.keys.size(); ++i)
    qvar[i] = model.add_var(-lp::kInf, lp::kInf, 0.0);

  // Flow conservation of the realization plan at every player-1 infoset.
  for (std::size_t i = 0; i < is1.keys.size(); ++i) {
    const auto [h1, hp] = is1.keys[i];
    int parent_seq = 0;
    if (ctx.h1.stage(h1) > 0) {
      const int pidx =
          is1.index.at({ctx.h1.parent(h1), ctx.pub.parent(hp)});
      parent_seq = 1 + pidx * A1 + ctx.h1.action(h1);
    }
    std::vector<std::pair<int, double>> coefs;
    coefs.reserve(static_cast<std::size_t>(A1) + 1);
    for (int a1 = 0; a1 < A1; ++a1)
      coefs.push_back({1 + static_cast<int>(i) * A1 + a1, 1.0});
    coefs.push_back({parent_seq, -1.0});
    model.add_row(lp::RowSense::EQ, 0.0, coefs);
  }

  // Player-2 infosets grouped under the sequence that leads to them.
  std::vector<std::vector<int>> children(nseq2);
  for (std::size_t i = 0; i < is2.keys.size(); ++i) {
    const auto [h2, hp] = is2.keys[i];
    int parent_seq = 0;
    if (ctx.h2.stage(h2) > 0) {
      const int pidx =
          is2.index.at({ctx.h2.parent(h2), ctx.pub.parent(hp)});
      parent_seq = 1 + pidx * A2 + ctx.h2.action(h2);
    }
    children[parent_seq].push_back(static_cast<int>(i));
  }

  // Payoff coefficients bucketed per player-2 sequence.
  std::vector<std::vector<std::pair<int, double>>> byseq2(nseq2);
  for (const auto& [key, coef] : payoff)
    byseq2[key & 0xffffffffu].push_back(
        {static_cast<int>(key >> 32), coef});

  // One constraint per player-2 sequence: the value claimed at its infoset
  // may not exceed what the sequence earns plus what its successor infosets
  // can still claim.
  for (std::size_t sq = 0; sq < nseq2; ++sq) {
    std::vector<std::pair<int, double>> coefs;
    if (sq == 0) {
      coefs.push_back({qroot, 1.0});
    } else {
      const int iset = static_cast<int>((sq - 1) / A2);
      coefs.push_back({qvar[iset], 1.0});
    }
    for (int child : children[sq]) coefs.push_back({qvar[child], -1.0});
    for (const auto& [xvar, coef] : byseq2[sq])
      coefs.push_back({xvar, -coef});
    model.add_row(lp::RowSense::LE, 0.0, coefs);
  }

  const lp::Solution sol = model.solve();
  if (sol.status != lp::Status::Optimal)
    throw InternalError(std::string("exact_value: sequence LP ended ") +
                        lp::status_name(sol.status));
  return sol.objective;
}

}  // namespace ozsg
