#include "ozsg/value_function.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "ozsg/common.hpp"

namespace ozsg {

double AlphaVector::dot(const MarginalOccupancy& c2) const {
  double acc = 0.0;
  for (const auto& e : c2.entries) acc += e.p * at(e.h, e.s);
  return acc;
}

double stage_lower_bound(const GameModel& m, int horizon, int t) {
  double acc = 0.0;
  double disc = 1.0;
  for (int u = t; u <= horizon; ++u) {
    acc += disc * m.reward_min();
    disc *= m.discount;
  }
  return acc;
}

ValueFunction init_value_function(const GameModel& m, int horizon) {
  if (horizon < 0) throw InternalError("init_value_function: negative horizon");
  ValueFunction vf(horizon);
  for (int t = 0; t <= horizon; ++t) {
    AlphaVector alpha;
    alpha.stage = t;
    alpha.default_value = stage_lower_bound(m, horizon, t);
    GammaSet set;
    set.stage = t;
    set.alphas.push_back(std::move(alpha));
    vf.at(t).push_back(std::move(set));
  }
  return vf;
}

AlphaEval min_alpha(const GammaSet& set, const MarginalOccupancy& c2) {
  AlphaEval best;
  for (int i = 0; i < static_cast<int>(set.alphas.size()); ++i) {
    double v = set.alphas[i].dot(c2);
    if (best.alpha < 0 || v < best.value) {
      best.value = v;
      best.alpha = i;
    }
  }
  if (best.alpha < 0) throw InternalError("min_alpha: empty alpha set");
  return best;
}

InformedEval evaluate_informed_detail(const ValueFunction& vf,
                                      const InformedOccupancy& o) {
  InformedEval out;
  if (o.stage > vf.horizon()) {
    out.value = 0.0;
    out.best_set = -1;
    return out;
  }
  const auto& sets = vf.at(o.stage);
  if (sets.empty()) throw InternalError("evaluate_informed: stage has no sets");
  auto margs = marginal_decomposition(o, 2);
  for (int k = 0; k < static_cast<int>(sets.size()); ++k) {
    double v = 0.0;
    for (const auto& [w, c2] : margs) v += w * min_alpha(sets[k], c2).value;
    if (out.best_set < 0 || v > out.value) {
      out.value = v;
      out.best_set = k;
    }
  }
  return out;
}

double evaluate_informed(const ValueFunction& vf, const InformedOccupancy& o) {
  return evaluate_informed_detail(vf, o).value;
}

double evaluate(const ValueFunction& vf, const OccupancyState& x) {
  if (x.stage > vf.horizon()) return 0.0;
  double acc = 0.0;
  for (const auto& [w, o] : informed_decomposition(x))
    acc += w * evaluate_informed(vf, o);
  return acc;
}

PhiVector make_phi(const GameModel& m, HistoryTable& h1_table, const GammaSet& gamma,
                   const std::map<std::pair<int, int>, int>& nu,
                   const std::vector<int>& h1_list, int stage) {
  for (int z2 = 0; z2 < m.nZ2(); ++z2)
    for (int w = 0; w < m.nW(); ++w) {
      auto it = nu.find({z2, w});
      if (it == nu.end()) throw InternalError("make_phi: selector is not total");
      if (it->second < 0 || it->second >= static_cast<int>(gamma.alphas.size()))
        throw InternalError("make_phi: selector references an unknown alpha");
    }
  PhiVector phi;
  phi.stage = stage;
  phi.nu = nu;
  for (int h1 : h1_list)
    for (int a1 = 0; a1 < m.nA1(); ++a1) {
      std::vector<int> child(m.nZ1());
      for (int z1 = 0; z1 < m.nZ1(); ++z1) child[z1] = h1_table.child(h1, a1, z1);
      for (int s = 0; s < m.nS(); ++s)
        for (int a2 = 0; a2 < m.nA2(); ++a2) {
          double acc = m.r(s, a1, a2);
          for (const Outcome& out : m.outcomes(s, a1, a2)) {
            const AlphaVector& alpha = gamma.alphas[nu.at({out.z2, out.w})];
            acc += m.discount * out.p * alpha.at(child[out.z1], out.s2);
          }
          phi.values[{h1, s, a1, a2}] = acc;
        }
    }
  return phi;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("value-function checkpoint: truncated stream");
  return v;
}

constexpr std::uint32_t kMagic = 0x465A5A4Fu;  // "OZZF"
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_value_function(const ValueFunction& vf, std::ostream& os) {
  put<std::uint32_t>(os, kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, vf.horizon());
  for (int t = 0; t <= vf.horizon(); ++t) {
    const auto& sets = vf.at(t);
    put<std::uint64_t>(os, sets.size());
    for (const auto& set : sets) {
      put<std::int32_t>(os, set.stage);
      put<std::int32_t>(os, set.refcount);
      put<std::uint64_t>(os, set.alphas.size());
      for (const auto& a : set.alphas) {
        put<std::int32_t>(os, a.stage);
        put<double>(os, a.default_value);
        put<std::uint64_t>(os, a.values.size());
        for (const auto& [key, v] : a.values) {
          put<std::int32_t>(os, key.first);
          put<std::int32_t>(os, key.second);
          put<double>(os, v);
        }
      }
    }
  }
}

ValueFunction load_value_function(std::istream& is) {
  if (get<std::uint32_t>(is) != kMagic)
    throw ParseError("value-function checkpoint: bad magic");
  if (get<std::uint32_t>(is) != kVersion)
    throw ParseError("value-function checkpoint: unsupported version");
  int horizon = get<std::int32_t>(is);
  if (horizon < 0 || horizon > 1000000)
    throw ParseError("value-function checkpoint: implausible horizon");
  ValueFunction vf(horizon);
  for (int t = 0; t <= horizon; ++t) {
    std::uint64_t nsets = get<std::uint64_t>(is);
    for (std::uint64_t k = 0; k < nsets; ++k) {
      GammaSet set;
      set.stage = get<std::int32_t>(is);
      set.refcount = get<std::int32_t>(is);
      std::uint64_t nalpha = get<std::uint64_t>(is);
      for (std::uint64_t i = 0; i < nalpha; ++i) {
        AlphaVector a;
        a.stage = get<std::int32_t>(is);
        a.default_value = get<double>(is);
        std::uint64_t nkeys = get<std::uint64_t>(is);
        for (std::uint64_t j = 0; j < nkeys; ++j) {
          int h1 = get<std::int32_t>(is);
          int s = get<std::int32_t>(is);
          a.values[{h1, s}] = get<double>(is);
        }
        set.alphas.push_back(std::move(a));
      }
      vf.at(t).push_back(std::move(set));
    }
  }
  return vf;
}

}  // namespace ozsg
