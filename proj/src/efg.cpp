#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "ozsg/cfr.hpp"
#include "ozsg/common.hpp"

namespace ozsg {

namespace {

// Counts saturate here instead of overflowing; any cap worth enforcing is
// crossed long before.
constexpr double kCountCeiling = 1e18;

double saturating_add(double a, double b) {
  return std::min(a + b, kCountCeiling);
}

// Per-node costs of the flat representation (kind byte, two int32 child
// fields, meta, into_prob) plus the utility table entry per terminal.
constexpr double kBytesPerNode = 24.0;
constexpr double kBytesPerTerminal = 16.0;

}  // namespace

EfgStats measure_extensive_form(const GameModel& m, int horizon) {
  if (horizon < 0) throw InternalError("measure_extensive_form: negative horizon");
  const int S = m.nS(), A1 = m.nA1(), A2 = m.nA2();
  // nodes[s][t] / terms[s][t]: subtree rooted at player 1's decision for
  // underlying state s at stage t. Size depends only on (s, t).
  std::vector<std::vector<double>> nodes(S, std::vector<double>(horizon + 1, 0.0));
  std::vector<std::vector<double>> terms(S, std::vector<double>(horizon + 1, 0.0));
  for (int t = horizon; t >= 0; --t)
    for (int s = 0; s < S; ++s) {
      if (t == horizon) {
        // Last stage: rewards are settled before any observation branch, so
        // each (a1, a2) leads straight to one terminal.
        nodes[s][t] = 1.0 + A1 * (1.0 + static_cast<double>(A2));
        terms[s][t] = static_cast<double>(A1) * A2;
        continue;
      }
      double n = 1.0 + static_cast<double>(A1);  // this node + player-2 nodes
      double tm = 0.0;
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          n = saturating_add(n, 1.0);  // the chance node
          for (const Outcome& o : m.outcomes(s, a1, a2)) {
            n = saturating_add(n, nodes[o.s2][t + 1]);
            tm = saturating_add(tm, terms[o.s2][t + 1]);
          }
        }
      nodes[s][t] = n;
      terms[s][t] = tm;
    }
  EfgStats st;
  st.nodes = 1.0;  // chance root
  for (int s = 0; s < S; ++s)
    if (m.start[s] > 0.0) {
      st.nodes = saturating_add(st.nodes, nodes[s][0]);
      st.terminals = saturating_add(st.terminals, terms[s][0]);
    }
  st.bytes = std::min(st.nodes * kBytesPerNode + st.terminals * kBytesPerTerminal,
                      kCountCeiling);
  return st;
}

ExtensiveForm build_extensive_form(const GameModel& m, HistoryContext& ctx,
                                   int horizon, double cap_bytes) {
  const EfgStats st = measure_extensive_form(m, horizon);
  if (st.bytes > cap_bytes || st.nodes > 2e9)
    throw OutOfMemory();
  const auto n_nodes = static_cast<std::size_t>(st.nodes);
  const int A1 = m.nA1(), A2 = m.nA2();

  ExtensiveForm ef;
  ef.horizon = horizon;
  ef.kind.reserve(n_nodes);
  ef.first_child.reserve(n_nodes);
  ef.num_children.reserve(n_nodes);
  ef.meta.reserve(n_nodes);
  ef.into_prob.reserve(n_nodes);
  ef.utility.reserve(static_cast<std::size_t>(st.terminals));

  auto push_node = [&](EfgNodeKind k, double p) {
    ef.kind.push_back(k);
    ef.first_child.push_back(-1);
    ef.num_children.push_back(0);
    ef.meta.push_back(-1);
    ef.into_prob.push_back(p);
    return static_cast<std::int32_t>(ef.kind.size() - 1);
  };

  std::unordered_map<std::uint64_t, int> iset_index[2];
  auto intern_iset = [&](int player, int stage, int h, int hp, int actions) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(h)) << 32) |
        static_cast<std::uint32_t>(hp);
    auto [it, fresh] = iset_index[player].emplace(
        key, static_cast<int>(ef.infosets[player].size()));
    if (fresh)
      ef.infosets[player].push_back({stage, h, hp, actions});
    return it->second;
  };

  // Breadth-first unroll keeps every node's children contiguous. Work items
  // describe the trajectory prefix a node stands for; a1/a2 are the pending
  // stage actions (-1 until chosen).
  struct Item {
    std::int32_t id;
    int s, t, h1, h2, hp, a1, a2;
    double acc;
  };
  std::deque<Item> queue;

  const std::int32_t root = push_node(EfgNodeKind::Chance, 1.0);
  ef.first_child[root] = 1;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0) {
      const std::int32_t id = push_node(EfgNodeKind::Decision1, m.start[s]);
      ++ef.num_children[root];
      queue.push_back({id, s, 0, HistoryTable::kRoot, HistoryTable::kRoot,
                       PubHistoryTable::kRoot, -1, -1, 0.0});
    }

  while (!queue.empty()) {
    const Item it = queue.front();
    queue.pop_front();
    const std::int32_t first = static_cast<std::int32_t>(ef.kind.size());
    ef.first_child[it.id] = first;
    switch (ef.kind[it.id]) {
      case EfgNodeKind::Decision1: {
        ef.meta[it.id] = intern_iset(0, it.t, it.h1, it.hp, A1);
        ef.num_children[it.id] = A1;
        for (int a1 = 0; a1 < A1; ++a1) {
          const std::int32_t id = push_node(EfgNodeKind::Decision2, 1.0);
          Item child = it;
          child.id = id;
          child.a1 = a1;
          queue.push_back(child);
        }
        break;
      }
      case EfgNodeKind::Decision2: {
        ef.meta[it.id] = intern_iset(1, it.t, it.h2, it.hp, A2);
        ef.num_children[it.id] = A2;
        const double disc = std::pow(m.discount, it.t);
        for (int a2 = 0; a2 < A2; ++a2) {
          const double acc = it.acc + disc * m.r(it.s, it.a1, a2);
          if (it.t == horizon) {
            // No information left to branch on: settle the trajectory.
            const std::int32_t id = push_node(EfgNodeKind::Terminal, 1.0);
            ef.meta[id] = static_cast<std::int32_t>(ef.utility.size());
            ef.utility.push_back(acc);
          } else {
            const std::int32_t id = push_node(EfgNodeKind::Chance, 1.0);
            Item child = it;
            child.id = id;
            child.a2 = a2;
            child.acc = acc;
            queue.push_back(child);
          }
        }
        break;
      }
      case EfgNodeKind::Chance: {
        const auto& outs = m.outcomes(it.s, it.a1, it.a2);
        ef.num_children[it.id] = static_cast<std::int32_t>(outs.size());
        for (const Outcome& o : outs) {
          const std::int32_t id = push_node(EfgNodeKind::Decision1, o.p);
          Item child;
          child.id = id;
          child.s = o.s2;
          child.t = it.t + 1;
          child.h1 = ctx.h1.child(it.h1, it.a1, o.z1);
          child.h2 = ctx.h2.child(it.h2, it.a2, o.z2);
          child.hp = ctx.pub.child(it.hp, o.w);
          child.a1 = child.a2 = -1;
          child.acc = it.acc;
          queue.push_back(child);
        }
        break;
      }
      case EfgNodeKind::Terminal:
        break;  // unreachable: terminals are never queued
    }
  }
  return ef;
}

}  // namespace ozsg
