#include "ozsg/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "ozsg/common.hpp"

namespace ozsg {
namespace {

struct Key4 {
  int hp, h2, h1, s;
  bool operator<(const Key4& o) const {
    return std::tie(hp, h2, h1, s) < std::tie(o.hp, o.h2, o.h1, o.s);
  }
};

// Drop sub-epsilon entries; renormalize only if the leak is non-negligible.
template <typename Entry>
void cleanup(std::vector<Entry>& entries) {
  double dropped = 0.0, kept = 0.0;
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.p < kSupportEpsilon)
      dropped += e.p;
    else {
      kept += e.p;
      out.push_back(e);
    }
  }
  if (dropped > kRenormThreshold && kept > 0.0) {
    double scale = (kept + dropped) / kept;
    for (auto& e : out) e.p *= scale;
  }
  entries = std::move(out);
}

}  // namespace

double OccupancyState::mass() const {
  double m = 0.0;
  for (const auto& e : entries) m += e.p;
  return m;
}

double InformedOccupancy::mass() const {
  double m = 0.0;
  for (const auto& e : entries) m += e.p;
  return m;
}

double MarginalOccupancy::mass() const {
  double m = 0.0;
  for (const auto& e : entries) m += e.p;
  return m;
}

void OccupancyState::canonicalize() {
  std::sort(entries.begin(), entries.end(), [](const OccEntry& a, const OccEntry& b) {
    return std::tie(a.hp, a.h2, a.h1, a.s) < std::tie(b.hp, b.h2, b.h1, b.s);
  });
  std::vector<OccEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().hp == e.hp && merged.back().h2 == e.h2 &&
        merged.back().h1 == e.h1 && merged.back().s == e.s)
      merged.back().p += e.p;
    else
      merged.push_back(e);
  }
  entries = std::move(merged);
  cleanup(entries);
}

const std::vector<double>& DecisionRule::at(int h, int hp) const {
  auto it = rows.find({h, hp});
  if (it == rows.end())
    throw InternalError("decision rule missing a row for a supported history");
  return it->second;
}

DecisionRule uniform_rule(const GameModel& m, const OccupancyState& x, int player) {
  DecisionRule d;
  d.stage = x.stage;
  d.player = player;
  int nA = player == 1 ? m.nA1() : m.nA2();
  std::vector<double> u(nA, 1.0 / nA);
  for (const auto& e : x.entries) d.rows[{player == 1 ? e.h1 : e.h2, e.hp}] = u;
  return d;
}

OccupancyState initial_occupancy(const GameModel& m) {
  OccupancyState x;
  x.stage = 0;
  x.g = 0.0;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0)
      x.entries.push_back(OccEntry{s, HistoryTable::kRoot, HistoryTable::kRoot,
                                   PubHistoryTable::kRoot, m.start[s]});
  x.canonicalize();
  return x;
}

double stage_reward(const GameModel& m, const OccupancyState& x, const DecisionRule& d1,
                    const DecisionRule& d2) {
  if (x.stage != d1.stage || x.stage != d2.stage)
    throw InternalError("stage mismatch in stage_reward");
  double total = 0.0;
  for (const auto& e : x.entries) {
    const auto& p1 = d1.at(e.h1, e.hp);
    const auto& p2 = d2.at(e.h2, e.hp);
    double acc = 0.0;
    for (int a1 = 0; a1 < m.nA1(); ++a1) {
      if (p1[a1] == 0.0) continue;
      for (int a2 = 0; a2 < m.nA2(); ++a2) {
        if (p2[a2] == 0.0) continue;
        acc += p1[a1] * p2[a2] * m.r(e.s, a1, a2);
      }
    }
    total += e.p * acc;
  }
  return total;
}

OccupancyState next_occupancy(const GameModel& m, HistoryContext& ctx,
                              const OccupancyState& x, const DecisionRule& d1,
                              const DecisionRule& d2) {
  if (x.stage != d1.stage || x.stage != d2.stage)
    throw InternalError("stage mismatch in next_occupancy");
  std::map<Key4, double> acc;
  for (const auto& e : x.entries) {
    const auto& p1 = d1.at(e.h1, e.hp);
    const auto& p2 = d2.at(e.h2, e.hp);
    for (int a1 = 0; a1 < m.nA1(); ++a1) {
      if (p1[a1] == 0.0) continue;
      for (int a2 = 0; a2 < m.nA2(); ++a2) {
        if (p2[a2] == 0.0) continue;
        double w12 = e.p * p1[a1] * p2[a2];
        for (const Outcome& o : m.outcomes(e.s, a1, a2)) {
          int h1n = ctx.h1.child(e.h1, a1, o.z1);
          int h2n = ctx.h2.child(e.h2, a2, o.z2);
          int hpn = ctx.pub.child(e.hp, o.w);
          acc[Key4{hpn, h2n, h1n, o.s2}] += w12 * o.p;
        }
      }
    }
  }
  OccupancyState nx;
  nx.stage = x.stage + 1;
  nx.g = x.g + std::pow(m.discount, x.stage) * stage_reward(m, x, d1, d2);
  nx.entries.reserve(acc.size());
  for (const auto& [k, p] : acc) nx.entries.push_back(OccEntry{k.s, k.h1, k.h2, k.hp, p});
  cleanup(nx.entries);
  return nx;
}

std::vector<std::pair<double, InformedOccupancy>> informed_decomposition(
    const OccupancyState& x) {
  std::vector<std::pair<double, InformedOccupancy>> out;
  // Entries are sorted with hp as the primary key, so groups are contiguous.
  std::size_t i = 0;
  while (i < x.entries.size()) {
    std::size_t j = i;
    double w = 0.0;
    while (j < x.entries.size() && x.entries[j].hp == x.entries[i].hp) w += x.entries[j++].p;
    InformedOccupancy o;
    o.stage = x.stage;
    o.hp = x.entries[i].hp;
    o.entries.reserve(j - i);
    for (std::size_t k = i; k < j; ++k)
      o.entries.push_back(
          InformedEntry{x.entries[k].s, x.entries[k].h1, x.entries[k].h2, x.entries[k].p / w});
    out.emplace_back(w, std::move(o));
    i = j;
  }
  return out;
}

std::vector<std::pair<double, MarginalOccupancy>> marginal_decomposition(
    const InformedOccupancy& o, int player) {
  std::vector<std::pair<double, MarginalOccupancy>> out;
  if (player == 2) {
    // Entries are sorted with h2 primary, so h2 groups are contiguous.
    std::size_t i = 0;
    while (i < o.entries.size()) {
      std::size_t j = i;
      double w = 0.0;
      while (j < o.entries.size() && o.entries[j].h2 == o.entries[i].h2) w += o.entries[j++].p;
      MarginalOccupancy c;
      c.stage = o.stage;
      c.hp = o.hp;
      c.player = 2;
      c.own_h = o.entries[i].h2;
      c.entries.reserve(j - i);
      for (std::size_t k = i; k < j; ++k)
        c.entries.push_back(MarginalEntry{o.entries[k].s, o.entries[k].h1, o.entries[k].p / w});
      std::sort(c.entries.begin(), c.entries.end(), [](const MarginalEntry& a,
                                                       const MarginalEntry& b) {
        return std::tie(a.h, a.s) < std::tie(b.h, b.s);
      });
      out.emplace_back(w, std::move(c));
      i = j;
    }
    return out;
  }
  // player == 1: group by h1 (non-contiguous in the (h2,h1,s) order).
  std::map<int, double> weights;
  for (const auto& e : o.entries) weights[e.h1] += e.p;
  std::map<int, MarginalOccupancy> groups;
  for (const auto& [h1, w] : weights) {
    MarginalOccupancy c;
    c.stage = o.stage;
    c.hp = o.hp;
    c.player = 1;
    c.own_h = h1;
    groups[h1] = std::move(c);
    (void)w;
  }
  for (const auto& e : o.entries)
    groups[e.h1].entries.push_back(MarginalEntry{e.s, e.h2, e.p / weights[e.h1]});
  for (auto& [h1, c] : groups) {
    std::sort(c.entries.begin(), c.entries.end(), [](const MarginalEntry& a,
                                                     const MarginalEntry& b) {
      return std::tie(a.h, a.s) < std::tie(b.h, b.s);
    });
    out.emplace_back(weights[h1], std::move(c));
  }
  return out;
}

std::pair<double, MarginalOccupancy> next_marginal(const GameModel& m, HistoryContext& ctx,
                                                   const MarginalOccupancy& c2,
                                                   const DecisionRule& d1, int a2, int z2,
                                                   int w) {
  if (c2.player != 2) throw InternalError("next_marginal expects a player-2 marginal");
  if (c2.stage != d1.stage) throw InternalError("stage mismatch in next_marginal");
  std::map<std::pair<int, int>, double> acc;  // (h1', s') -> mass
  double total = 0.0;
  for (const auto& e : c2.entries) {
    const auto& p1 = d1.at(e.h, c2.hp);
    for (int a1 = 0; a1 < m.nA1(); ++a1) {
      if (p1[a1] == 0.0) continue;
      double w1 = e.p * p1[a1];
      for (const Outcome& o : m.outcomes(e.s, a1, a2)) {
        if (o.z2 != z2 || o.w != w) continue;
        int h1n = ctx.h1.child(e.h, a1, o.z1);
        acc[{h1n, o.s2}] += w1 * o.p;
        total += w1 * o.p;
      }
    }
  }
  MarginalOccupancy out;
  out.stage = c2.stage + 1;
  out.hp = ctx.pub.child(c2.hp, w);
  out.player = 2;
  out.own_h = ctx.h2.child(c2.own_h, a2, z2);
  if (total <= 0.0) return {0.0, out};
  out.entries.reserve(acc.size());
  for (const auto& [k, p] : acc) out.entries.push_back(MarginalEntry{k.second, k.first, p / total});
  cleanup(out.entries);
  return {total, out};
}

double l1_distance(const MarginalOccupancy& a, const MarginalOccupancy& b) {
  double d = 0.0;
  std::size_t i = 0, j = 0;
  auto less = [](const MarginalEntry& x, const MarginalEntry& y) {
    return std::tie(x.h, x.s) < std::tie(y.h, y.s);
  };
  while (i < a.entries.size() && j < b.entries.size()) {
    if (less(a.entries[i], b.entries[j]))
      d += a.entries[i++].p;
    else if (less(b.entries[j], a.entries[i]))
      d += b.entries[j++].p;
    else {
      d += std::abs(a.entries[i].p - b.entries[j].p);
      ++i, ++j;
    }
  }
  while (i < a.entries.size()) d += a.entries[i++].p;
  while (j < b.entries.size()) d += b.entries[j++].p;
  return d;
}

std::string debug_dump(const OccupancyState& x) {
  std::ostringstream os;
  os << "stage " << x.stage << " g " << format_double(x.g, 17) << "\n";
  for (const auto& e : x.entries)
    os << e.s << " " << e.h1 << " " << e.h2 << " " << e.hp << " : " << format_double(e.p, 17)
       << "\n";
  return os.str();
}

std::string debug_dump(const MarginalOccupancy& c) {
  std::ostringstream os;
  os << "stage " << c.stage << " hp " << c.hp << " player " << c.player << " own_h " << c.own_h
     << "\n";
  for (const auto& e : c.entries)
    os << e.s << " " << e.h << " : " << format_double(e.p, 17) << "\n";
  return os.str();
}

}  // namespace ozsg
