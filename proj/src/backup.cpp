#include "ozsg/backup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "ozsg/common.hpp"
#include "ozsg/lp.hpp"

namespace ozsg {

namespace {

constexpr double kMixtureCut = 1e-12;  // drop mixture entries below this
constexpr double kViolation = 1e-7;    // continuation-row violation threshold

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Maximal runs of constant (h2, h1) in o.entries, grouped by h2 position.
struct Slice {
  int h1i, lo, hi;
};

std::vector<std::vector<Slice>> slice_by_h2(const InformedOccupancy& o,
                                            const std::map<int, int>& h1pos,
                                            const std::map<int, int>& h2pos) {
  std::vector<std::vector<Slice>> out(h2pos.size());
  const int n = static_cast<int>(o.entries.size());
  for (int lo = 0; lo < n;) {
    int hi = lo;
    while (hi < n && o.entries[hi].h2 == o.entries[lo].h2 &&
           o.entries[hi].h1 == o.entries[lo].h1)
      ++hi;
    out[h2pos.at(o.entries[lo].h2)].push_back(
        {h1pos.at(o.entries[lo].h1), lo, hi});
    lo = hi;
  }
  return out;
}

void check_informed(const InformedOccupancy& o, const char* what) {
  if (o.entries.empty())
    throw InternalError(std::string(what) + ": empty informed state");
}

// Histories that carry xi1 rows; everything else falls back to uniform over
// actions on the first set.
std::set<int> covered_histories(const GreedySolution& sol, int num_sets,
                                const char* what) {
  std::set<int> covered;
  for (const auto& kv : sol.xi1) {
    const int k = std::get<1>(kv.first);
    if (k < 0 || k >= num_sets)
      throw InternalError(std::string(what) +
                          ": solution references an unknown set");
    covered.insert(std::get<0>(kv.first));
  }
  return covered;
}

}  // namespace

double GreedySolution::row_mass(int h1) const {
  double acc = 0.0;
  auto it = xi1.lower_bound({h1, std::numeric_limits<int>::min(),
                             std::numeric_limits<int>::min()});
  for (; it != xi1.end() && std::get<0>(it->first) == h1; ++it)
    acc += it->second;
  return acc;
}

std::vector<int> own_histories(const InformedOccupancy& o, int player) {
  std::vector<int> out;
  if (player == 2) {
    for (const InformedEntry& e : o.entries)
      if (out.empty() || out.back() != e.h2) out.push_back(e.h2);
  } else if (player == 1) {
    std::set<int> seen;
    for (const InformedEntry& e : o.entries) seen.insert(e.h1);
    out.assign(seen.begin(), seen.end());
  } else {
    throw InternalError("own_histories: player must be 1 or 2");
  }
  return out;
}

std::vector<GammaSet> zero_stage_sets(int stage) {
  GammaSet set;
  set.stage = stage + 1;
  AlphaVector zero;
  zero.stage = stage + 1;
  set.alphas.push_back(std::move(zero));
  return {std::move(set)};
}

GreedySolution greedy_gamma_lp(const GameModel& m, HistoryContext& ctx,
                               const InformedOccupancy& o,
                               const std::vector<GammaSet>& vf_next,
                               std::string* lp_dump) {
  check_informed(o, "greedy backup");
  if (vf_next.empty()) throw InternalError("greedy backup: no stage sets");
  for (const GammaSet& set : vf_next)
    if (set.alphas.empty())
      throw InternalError("greedy backup: empty alpha-vector set");

  const int A1 = m.nA1(), A2 = m.nA2(), Z1 = m.nZ1(), Z2 = m.nZ2(), W = m.nW();
  const int K = static_cast<int>(vf_next.size());
  const double rshare = 1.0 / (static_cast<double>(Z2) * W);

  const std::vector<int> h1s = own_histories(o, 1);
  const std::vector<int> h2s = own_histories(o, 2);
  const int H1 = static_cast<int>(h1s.size());
  const int H2 = static_cast<int>(h2s.size());
  std::map<int, int> h1pos, h2pos;
  for (int i = 0; i < H1; ++i) h1pos[h1s[i]] = i;
  for (int j = 0; j < H2; ++j) h2pos[h2s[j]] = j;
  const std::vector<std::vector<Slice>> slices = slice_by_h2(o, h1pos, h2pos);

  // Successor private histories, interned once up front.
  std::vector<int> succ(static_cast<size_t>(H1) * A1 * Z1);
  for (int i = 0; i < H1; ++i)
    for (int a1 = 0; a1 < A1; ++a1)
      for (int z1 = 0; z1 < Z1; ++z1)
        succ[(static_cast<size_t>(i) * A1 + a1) * Z1 + z1] =
            ctx.h1.child(h1s[i], a1, z1);

  lp::Model model(true);

  // The per-history normalization rows already cap the mixtures at 1; leaving
  // the declared upper bound open keeps every bound dual at zero, so the row
  // duals alone certify optimality.
  std::vector<int> theta(static_cast<size_t>(H1) * K * A1);
  for (auto& id : theta) id = model.add_var(0.0, lp::kInf, 0.0);
  auto tid = [&](int h1i, int k, int a1) {
    return theta[(static_cast<size_t>(h1i) * K + k) * A1 + a1];
  };

  std::vector<int> fvar(H2);
  for (auto& id : fvar) id = model.add_var(-lp::kInf, lp::kInf, 1.0);

  std::vector<int> beta(static_cast<size_t>(K) * H2 * A2 * Z2 * W);
  for (auto& id : beta) id = model.add_var(-lp::kInf, lp::kInf, 0.0);
  auto bid = [&](int k, int h2i, int a2, int z2, int w) {
    return beta[(((static_cast<size_t>(k) * H2 + h2i) * A2 + a2) * Z2 + z2) * W +
                w];
  };

  {
    std::vector<std::pair<int, double>> coefs;
    for (int i = 0; i < H1; ++i) {
      coefs.clear();
      for (int k = 0; k < K; ++k)
        for (int a1 = 0; a1 < A1; ++a1) coefs.push_back({tid(i, k, a1), 1.0});
      model.add_row(lp::RowSense::EQ, 1.0, coefs);
    }
  }

  // f(h2) <= sum over sets and observation branches of the beta bound, one
  // row per opponent action; their duals are the branch weights.
  std::vector<int> frow(static_cast<size_t>(H2) * A2);
  for (int j = 0; j < H2; ++j)
    for (int a2 = 0; a2 < A2; ++a2) {
      std::vector<std::pair<int, double>> coefs{{fvar[j], 1.0}};
      for (int k = 0; k < K; ++k)
        for (int z2 = 0; z2 < Z2; ++z2)
          for (int w = 0; w < W; ++w)
            coefs.push_back({bid(k, j, a2, z2, w), -1.0});
      frow[static_cast<size_t>(j) * A2 + a2] =
          model.add_row(lp::RowSense::LE, 0.0, coefs);
    }

  // Coefficient of theta(h1, k, a1) in the continuation bound for alpha at
  // branch (h2, a2, z2, w); weighted by the unnormalized slice mass so the
  // objective carries Pr(h2 | o) implicitly.
  auto g_coef = [&](const AlphaVector& alpha, const Slice& sl, int a1, int a2,
                    int z2, int w) {
    double acc = 0.0;
    for (int e = sl.lo; e < sl.hi; ++e) {
      const InformedEntry& ent = o.entries[e];
      double fut = 0.0;
      for (const Outcome& out : m.outcomes(ent.s, a1, a2))
        if (out.z2 == z2 && out.w == w)
          fut += out.p *
                 alpha.at(succ[(static_cast<size_t>(sl.h1i) * A1 + a1) * Z1 +
                               out.z1],
                          out.s2);
      acc += ent.p * (m.r(ent.s, a1, a2) * rshare + m.discount * fut);
    }
    return acc;
  };

  auto add_alpha_row = [&](int k, int ai, int h2i, int a2, int z2, int w) {
    const AlphaVector& alpha = vf_next[k].alphas[ai];
    std::vector<std::pair<int, double>> coefs{{bid(k, h2i, a2, z2, w), 1.0}};
    for (const Slice& sl : slices[h2i])
      for (int a1 = 0; a1 < A1; ++a1) {
        const double g = g_coef(alpha, sl, a1, a2, z2, w);
        if (g != 0.0) coefs.push_back({tid(sl.h1i, k, a1), -g});
      }
    model.add_row(lp::RowSense::LE, 0.0, coefs);
  };

  // Seed every branch with its first alpha row (keeps the LP bounded), then
  // add the most violated row per branch until none violates.
  std::set<std::array<int, 6>> present;
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < H2; ++j)
      for (int a2 = 0; a2 < A2; ++a2)
        for (int z2 = 0; z2 < Z2; ++z2)
          for (int w = 0; w < W; ++w) {
            add_alpha_row(k, 0, j, a2, z2, w);
            present.insert({k, 0, j, a2, z2, w});
          }

  lp::Basis basis;
  lp::Solution sol;
  long long work = 0;
  while (true) {
    sol = model.solve(&basis);
    work += static_cast<long long>(sol.iterations) *
            (model.num_vars() + model.num_rows());
    if (sol.status != lp::Status::Optimal)
      throw InternalError(std::string("greedy backup LP ended ") +
                          lp::status_name(sol.status));
    int added = 0;
    for (int k = 0; k < K; ++k) {
      const auto& alphas = vf_next[k].alphas;
      const int nalpha = static_cast<int>(alphas.size());
      if (nalpha == 1) continue;
      for (int j = 0; j < H2; ++j)
        for (int a2 = 0; a2 < A2; ++a2)
          for (int z2 = 0; z2 < Z2; ++z2)
            for (int w = 0; w < W; ++w) {
              double best = kInfinity;
              int best_ai = 0;
              for (int ai = 0; ai < nalpha; ++ai) {
                double v = 0.0;
                for (const Slice& sl : slices[j])
                  for (int a1 = 0; a1 < A1; ++a1) {
                    const double th = sol.x[tid(sl.h1i, k, a1)];
                    if (th <= kMixtureCut) continue;
                    v += th * g_coef(alphas[ai], sl, a1, a2, z2, w);
                  }
                if (v < best) {
                  best = v;
                  best_ai = ai;
                }
              }
              if (sol.x[bid(k, j, a2, z2, w)] > best + kViolation &&
                  present.insert({k, best_ai, j, a2, z2, w}).second) {
                add_alpha_row(k, best_ai, j, a2, z2, w);
                ++added;
              }
            }
    }
    if (added == 0) break;
  }

  GreedySolution out;
  out.form = GreedyForm::GammaForm;
  out.stage = o.stage;
  out.hp = o.hp;
  out.objective = sol.objective;
  out.work = work;
  for (int i = 0; i < H1; ++i)
    for (int k = 0; k < K; ++k)
      for (int a1 = 0; a1 < A1; ++a1) {
        const double v = sol.x[tid(i, k, a1)];
        if (v > kMixtureCut) out.xi1[{h1s[i], k, a1}] = clamp01(v);
      }
  for (int j = 0; j < H2; ++j) out.upsilon[{h2s[j], -1}] = sol.x[fvar[j]];
  for (int j = 0; j < H2; ++j) {
    std::vector<double> d(A2);
    double total = 0.0;
    for (int a2 = 0; a2 < A2; ++a2) {
      d[a2] =
          std::max(0.0, sol.row_dual[frow[static_cast<size_t>(j) * A2 + a2]]);
      total += d[a2];
    }
    for (int a2 = 0; a2 < A2; ++a2)
      out.branch[{h2s[j], a2}] = total > kMixtureCut ? d[a2] / total : 1.0 / A2;
  }
  if (lp_dump) *lp_dump = model.lp_format();
  return out;
}

std::vector<std::vector<PhiVector>> enumerate_phi_sets(
    const GameModel& m, HistoryTable& h1_table,
    const std::vector<GammaSet>& next_sets, const std::vector<int>& h1_list,
    int stage) {
  const int Z2 = m.nZ2(), W = m.nW();
  const int branches = Z2 * W;
  std::vector<std::vector<PhiVector>> out;
  out.reserve(next_sets.size());
  for (int k = 0; k < static_cast<int>(next_sets.size()); ++k) {
    const GammaSet& set = next_sets[k];
    const int n = static_cast<int>(set.alphas.size());
    if (n == 0) throw InternalError("phi enumeration: empty alpha-vector set");
    if (std::pow(static_cast<double>(n), branches) > 20000.0)
      throw InternalError("phi enumeration: selector space too large");
    std::vector<PhiVector> phis;
    std::vector<int> digits(branches, 0);
    while (true) {
      std::map<std::pair<int, int>, int> nu;
      for (int z2 = 0; z2 < Z2; ++z2)
        for (int w = 0; w < W; ++w) nu[{z2, w}] = digits[z2 * W + w];
      PhiVector phi = make_phi(m, h1_table, set, nu, h1_list, stage);
      phi.source_set = k;
      phis.push_back(std::move(phi));
      int d = branches - 1;
      while (d >= 0 && digits[d] == n - 1) digits[d--] = 0;
      if (d < 0) break;
      ++digits[d];
    }
    out.push_back(std::move(phis));
  }
  return out;
}

namespace {

void check_phi_sets(const std::vector<std::vector<PhiVector>>& phi_sets,
                    const char* what) {
  if (phi_sets.empty())
    throw InternalError(std::string(what) + ": no plan sets");
  for (const auto& set : phi_sets)
    if (set.empty()) throw InternalError(std::string(what) + ": empty plan set");
}

// K_coef(phi; h2, a2)(h1i, a1) = sum_s phi(h1, s, a1, a2) * c2(s, h1) with the
// normalized marginal for h2. Dense H1 x A1 result in h1-major order.
std::vector<double> plan_payoff(const GameModel& m, const PhiVector& phi,
                                const MarginalOccupancy& c2,
                                const std::map<int, int>& h1pos, int a2) {
  const int A1 = m.nA1();
  std::vector<double> out(h1pos.size() * static_cast<size_t>(A1), 0.0);
  for (const MarginalEntry& e : c2.entries) {
    const size_t base = static_cast<size_t>(h1pos.at(e.h)) * A1;
    for (int a1 = 0; a1 < A1; ++a1)
      out[base + a1] += e.p * phi.at(e.h, e.s, a1, a2);
  }
  return out;
}

}  // namespace

GreedySolution greedy_phi_lp(const GameModel& m, const InformedOccupancy& o,
                             const std::vector<std::vector<PhiVector>>& phi_sets,
                             std::string* lp_dump) {
  check_informed(o, "plan backup");
  check_phi_sets(phi_sets, "plan backup");

  const int A1 = m.nA1(), A2 = m.nA2();
  const int K = static_cast<int>(phi_sets.size());
  const std::vector<int> h1s = own_histories(o, 1);
  const int H1 = static_cast<int>(h1s.size());
  std::map<int, int> h1pos;
  for (int i = 0; i < H1; ++i) h1pos[h1s[i]] = i;

  const auto margs = marginal_decomposition(o, 2);
  const int H2 = static_cast<int>(margs.size());

  lp::Model model(true);
  std::vector<int> xi(static_cast<size_t>(H1) * K * A1);
  for (auto& id : xi) id = model.add_var(0.0, lp::kInf, 0.0);
  auto xid = [&](int h1i, int k, int a1) {
    return xi[(static_cast<size_t>(h1i) * K + k) * A1 + a1];
  };
  std::vector<int> ups(static_cast<size_t>(H2) * K);
  for (int j = 0; j < H2; ++j)
    for (int k = 0; k < K; ++k)
      ups[static_cast<size_t>(j) * K + k] =
          model.add_var(-lp::kInf, lp::kInf, margs[j].first);

  {
    std::vector<std::pair<int, double>> coefs;
    for (int i = 0; i < H1; ++i) {
      coefs.clear();
      for (int k = 0; k < K; ++k)
        for (int a1 = 0; a1 < A1; ++a1) coefs.push_back({xid(i, k, a1), 1.0});
      model.add_row(lp::RowSense::EQ, 1.0, coefs);
    }
  }

  struct RowKey {
    int k, i, j, a2;
  };
  std::vector<RowKey> row_keys;
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < static_cast<int>(phi_sets[k].size()); ++i)
      for (int j = 0; j < H2; ++j)
        for (int a2 = 0; a2 < A2; ++a2) {
          const std::vector<double> pay =
              plan_payoff(m, phi_sets[k][i], margs[j].second, h1pos, a2);
          std::vector<std::pair<int, double>> coefs{
              {ups[static_cast<size_t>(j) * K + k], 1.0}};
          for (int h1i = 0; h1i < H1; ++h1i)
            for (int a1 = 0; a1 < A1; ++a1) {
              const double c = pay[static_cast<size_t>(h1i) * A1 + a1];
              if (c != 0.0) coefs.push_back({xid(h1i, k, a1), -c});
            }
          model.add_row(lp::RowSense::LE, 0.0, coefs);
          row_keys.push_back({k, i, j, a2});
        }

  const lp::Solution sol = model.solve();
  if (sol.status != lp::Status::Optimal)
    throw InternalError(std::string("plan backup LP ended ") +
                        lp::status_name(sol.status));

  GreedySolution out;
  out.form = GreedyForm::PhiForm;
  out.stage = o.stage;
  out.hp = o.hp;
  out.objective = sol.objective;
  out.work = static_cast<long long>(sol.iterations) *
             (model.num_vars() + model.num_rows());
  for (int i = 0; i < H1; ++i)
    for (int k = 0; k < K; ++k)
      for (int a1 = 0; a1 < A1; ++a1) {
        const double v = sol.x[xid(i, k, a1)];
        if (v > kMixtureCut) out.xi1[{h1s[i], k, a1}] = clamp01(v);
      }
  for (int j = 0; j < H2; ++j)
    for (int k = 0; k < K; ++k)
      out.upsilon[{margs[j].second.own_h, k}] =
          sol.x[ups[static_cast<size_t>(j) * K + k]];
  const int bound_rows_begin = H1;  // rows before these are the xi rows
  for (int r = 0; r < static_cast<int>(row_keys.size()); ++r) {
    const RowKey& key = row_keys[r];
    const double w = margs[key.j].first;
    const double lam =
        clamp01(std::max(0.0, sol.row_dual[bound_rows_begin + r]) / w);
    out.dual_lambda[{key.k, key.i, margs[key.j].second.own_h, key.a2}] = lam;
    out.branch[{margs[key.j].second.own_h, key.a2}] += lam / K;
  }
  if (lp_dump) *lp_dump = model.lp_format();
  return out;
}

GreedySolution dual_greedy_lp(const GameModel& m, const InformedOccupancy& o,
                              const std::vector<std::vector<PhiVector>>& phi_sets,
                              std::string* lp_dump) {
  check_informed(o, "dual backup");
  check_phi_sets(phi_sets, "dual backup");

  const int A1 = m.nA1(), A2 = m.nA2();
  const int K = static_cast<int>(phi_sets.size());
  const std::vector<int> h1s = own_histories(o, 1);
  const int H1 = static_cast<int>(h1s.size());
  std::map<int, int> h1pos;
  for (int i = 0; i < H1; ++i) h1pos[h1s[i]] = i;

  const auto margs = marginal_decomposition(o, 2);
  const int H2 = static_cast<int>(margs.size());

  lp::Model model(false);

  // Response weights per (h2, set, member, a2); grouped so each (h2, set)
  // block is normalized to the h2 mass.
  struct LamKey {
    int j, k, i, a2;
  };
  std::vector<LamKey> lam_keys;
  std::vector<int> lam_ids;
  std::vector<std::vector<int>> block(static_cast<size_t>(H2) * K);
  for (int j = 0; j < H2; ++j)
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < static_cast<int>(phi_sets[k].size()); ++i)
        for (int a2 = 0; a2 < A2; ++a2) {
          const int id = model.add_var(0.0, lp::kInf, 0.0);
          block[static_cast<size_t>(j) * K + k].push_back(
              static_cast<int>(lam_ids.size()));
          lam_ids.push_back(id);
          lam_keys.push_back({j, k, i, a2});
        }
  std::vector<int> mu(H1);
  for (auto& id : mu) id = model.add_var(-lp::kInf, lp::kInf, 1.0);

  std::vector<std::vector<double>> pays(lam_keys.size());
  for (size_t pos = 0; pos < lam_keys.size(); ++pos) {
    const LamKey& key = lam_keys[pos];
    pays[pos] = plan_payoff(m, phi_sets[key.k][key.i], margs[key.j].second,
                            h1pos, key.a2);
  }

  std::vector<int> norm_row(static_cast<size_t>(H2) * K);
  for (int j = 0; j < H2; ++j)
    for (int k = 0; k < K; ++k) {
      std::vector<std::pair<int, double>> coefs;
      for (int pos : block[static_cast<size_t>(j) * K + k])
        coefs.push_back({lam_ids[pos], 1.0});
      norm_row[static_cast<size_t>(j) * K + k] =
          model.add_row(lp::RowSense::EQ, margs[j].first, coefs);
    }

  // mu(h1) covers every pure (set, action) payoff against lambda.
  std::vector<std::array<int, 3>> cover_keys;  // (h1i, k, a1)
  std::vector<int> cover_row;
  for (int h1i = 0; h1i < H1; ++h1i)
    for (int k = 0; k < K; ++k)
      for (int a1 = 0; a1 < A1; ++a1) {
        std::vector<std::pair<int, double>> coefs{{mu[h1i], 1.0}};
        for (int j = 0; j < H2; ++j)
          for (int pos : block[static_cast<size_t>(j) * K + k]) {
            const double c = pays[pos][static_cast<size_t>(h1i) * A1 + a1];
            if (c != 0.0) coefs.push_back({lam_ids[pos], -c});
          }
        cover_row.push_back(model.add_row(lp::RowSense::GE, 0.0, coefs));
        cover_keys.push_back({h1i, k, a1});
      }

  const lp::Solution sol = model.solve();
  if (sol.status != lp::Status::Optimal)
    throw InternalError(std::string("dual backup LP ended ") +
                        lp::status_name(sol.status));

  GreedySolution out;
  out.form = GreedyForm::PhiForm;
  out.stage = o.stage;
  out.hp = o.hp;
  out.objective = sol.objective;
  out.work = static_cast<long long>(sol.iterations) *
             (model.num_vars() + model.num_rows());
  for (size_t pos = 0; pos < lam_ids.size(); ++pos) {
    const LamKey& key = lam_keys[pos];
    const double w = margs[key.j].first;
    const double lam = clamp01(sol.x[lam_ids[pos]] / w);
    out.dual_lambda[{key.k, key.i, margs[key.j].second.own_h, key.a2}] = lam;
    out.branch[{margs[key.j].second.own_h, key.a2}] += lam / K;
  }
  for (size_t r = 0; r < cover_keys.size(); ++r) {
    const double v = std::max(0.0, sol.row_dual[cover_row[r]]);
    if (v > kMixtureCut)
      out.xi1[{h1s[cover_keys[r][0]], cover_keys[r][1], cover_keys[r][2]}] =
          clamp01(v);
  }
  for (int j = 0; j < H2; ++j)
    for (int k = 0; k < K; ++k)
      out.upsilon[{margs[j].second.own_h, k}] =
          sol.row_dual[norm_row[static_cast<size_t>(j) * K + k]];
  if (lp_dump) *lp_dump = model.lp_format();
  return out;
}

GammaSet gamma_update_set(const GameModel& m, HistoryContext& ctx,
                          const ValueFunction& vf, int stage,
                          const GreedySolution& sol,
                          const std::vector<MarginalOccupancy>& samples) {
  if (samples.empty()) throw InternalError("value update: no samples");
  if (stage != sol.stage)
    throw InternalError("value update: solution stage mismatch");
  if (stage < 0 || stage > vf.horizon())
    throw InternalError("value update: stage out of range");
  const std::vector<GammaSet> last = zero_stage_sets(stage);
  const std::vector<GammaSet>& nxt =
      stage == vf.horizon() ? last : vf.at(stage + 1);
  const int K = static_cast<int>(nxt.size());
  const int A1 = m.nA1(), A2 = m.nA2(), W = m.nW(), Z2 = m.nZ2();
  const double dv = stage_lower_bound(m, vf.horizon(), stage);

  const std::set<int> covered = covered_histories(sol, K, "value update");
  auto theta = [&](int h1, int k, int a1) -> double {
    if (!covered.count(h1)) return k == 0 ? 1.0 / A1 : 0.0;
    auto it = sol.xi1.find({h1, k, a1});
    return it == sol.xi1.end() ? 0.0 : it->second;
  };

  // Freeze domain: every private history touched by any sample (plus those
  // the solution mixes over). Each frozen alpha must be a total functional on
  // this domain; restricting it to its own sample's support would poison the
  // set's inner minimum with default values at every other sample.
  std::set<int> domain = covered;
  for (const MarginalOccupancy& c2 : samples)
    for (const MarginalEntry& e : c2.entries) domain.insert(e.h);

  GammaSet out;
  out.stage = stage;
  for (const MarginalOccupancy& c2 : samples) {
    if (c2.stage != stage)
      throw InternalError("value update: sample stage mismatch");
    if (c2.player != 2)
      throw InternalError("value update: sample must condition on player 2");
    AlphaVector a;
    a.stage = stage;
    a.default_value = dv;
    for (int k = 0; k < K; ++k) {
      const auto& alphas = nxt[k].alphas;
      const int nalpha = static_cast<int>(alphas.size());
      // The opponent response for this set at this sample: the action and the
      // per-(z2, w) continuation alphas minimizing the mixture value.
      double best_val = kInfinity;
      int best_a2 = 0;
      std::vector<int> best_nu;
      std::vector<double> acc(static_cast<size_t>(Z2) * W * nalpha);
      std::vector<int> nu(static_cast<size_t>(Z2) * W);
      for (int a2 = 0; a2 < A2; ++a2) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double immediate = 0.0;
        for (const MarginalEntry& e : c2.entries)
          for (int a1 = 0; a1 < A1; ++a1) {
            const double th = theta(e.h, k, a1);
            if (th == 0.0) continue;
            const double w1 = e.p * th;
            immediate += w1 * m.r(e.s, a1, a2);
            for (const Outcome& out2 : m.outcomes(e.s, a1, a2)) {
              const int child = ctx.h1.child(e.h, a1, out2.z1);
              const size_t base =
                  (static_cast<size_t>(out2.z2) * W + out2.w) * nalpha;
              for (int ai = 0; ai < nalpha; ++ai)
                acc[base + ai] += w1 * out2.p * alphas[ai].at(child, out2.s2);
            }
          }
        double tot = immediate;
        for (int b = 0; b < Z2 * W; ++b) {
          double bmin = kInfinity;
          int bidx = 0;
          for (int ai = 0; ai < nalpha; ++ai)
            if (acc[static_cast<size_t>(b) * nalpha + ai] < bmin) {
              bmin = acc[static_cast<size_t>(b) * nalpha + ai];
              bidx = ai;
            }
          nu[b] = bidx;
          tot += m.discount * bmin;
        }
        if (tot < best_val) {
          best_val = tot;
          best_a2 = a2;
          best_nu = nu;
        }
      }
      // Freeze the response into linear coefficients over the whole domain.
      for (int h1 : domain)
        for (int s = 0; s < m.nS(); ++s) {
          double val = 0.0;
          for (int a1 = 0; a1 < A1; ++a1) {
            const double th = theta(h1, k, a1);
            if (th == 0.0) continue;
            double contrib = m.r(s, a1, best_a2);
            for (const Outcome& out2 : m.outcomes(s, a1, best_a2)) {
              const AlphaVector& alpha =
                  alphas[best_nu[static_cast<size_t>(out2.z2) * W + out2.w]];
              contrib += m.discount * out2.p *
                         alpha.at(ctx.h1.child(h1, a1, out2.z1), out2.s2);
            }
            val += th * contrib;
          }
          a.values[{h1, s}] += val;
        }
    }
    out.alphas.push_back(std::move(a));
  }
  return out;
}

ValueFunction value_update(const GameModel& m, HistoryContext& ctx,
                           const ValueFunction& vf, int stage,
                           const GreedySolution& sol,
                           const std::vector<MarginalOccupancy>& samples) {
  ValueFunction out = vf;
  out.at(stage).push_back(gamma_update_set(m, ctx, vf, stage, sol, samples));
  return out;
}

GammaSet phi_update_set(const GameModel& m,
                        const std::vector<std::vector<PhiVector>>& phi_sets,
                        int stage, double default_value,
                        const GreedySolution& sol,
                        const std::vector<MarginalOccupancy>& samples) {
  if (samples.empty()) throw InternalError("value update: no samples");
  check_phi_sets(phi_sets, "value update");
  const int K = static_cast<int>(phi_sets.size());
  const int A1 = m.nA1(), A2 = m.nA2();

  const std::set<int> covered = covered_histories(sol, K, "value update");
  auto theta = [&](int h1, int k, int a1) -> double {
    if (!covered.count(h1)) return k == 0 ? 1.0 / A1 : 0.0;
    auto it = sol.xi1.find({h1, k, a1});
    return it == sol.xi1.end() ? 0.0 : it->second;
  };

  // Same total-functional freeze domain as the set-form update.
  std::set<int> domain = covered;
  for (const MarginalOccupancy& c2 : samples)
    for (const MarginalEntry& e : c2.entries) domain.insert(e.h);

  GammaSet out;
  out.stage = stage;
  for (const MarginalOccupancy& c2 : samples) {
    if (c2.stage != stage)
      throw InternalError("value update: sample stage mismatch");
    AlphaVector a;
    a.stage = stage;
    a.default_value = default_value;
    for (int k = 0; k < K; ++k) {
      double best = kInfinity;
      int best_i = 0, best_a2 = 0;
      for (int i = 0; i < static_cast<int>(phi_sets[k].size()); ++i)
        for (int a2 = 0; a2 < A2; ++a2) {
          double v = 0.0;
          for (const MarginalEntry& e : c2.entries)
            for (int a1 = 0; a1 < A1; ++a1) {
              const double th = theta(e.h, k, a1);
              if (th != 0.0) v += e.p * th * phi_sets[k][i].at(e.h, e.s, a1, a2);
            }
          if (v < best) {
            best = v;
            best_i = i;
            best_a2 = a2;
          }
        }
      const PhiVector& phi = phi_sets[k][best_i];
      for (int h1 : domain)
        for (int s = 0; s < m.nS(); ++s) {
          double val = 0.0;
          for (int a1 = 0; a1 < A1; ++a1) {
            const double th = theta(h1, k, a1);
            if (th != 0.0) val += th * phi.at(h1, s, a1, best_a2);
          }
          a.values[{h1, s}] += val;
        }
    }
    out.alphas.push_back(std::move(a));
  }
  return out;
}

DecisionRule rule_from_solution(const GameModel& m, const GreedySolution& sol,
                                const std::vector<int>& h1_list, int hp,
                                int stage) {
  DecisionRule d;
  d.stage = stage;
  d.player = 1;
  for (int h1 : h1_list) {
    std::vector<double> dist(m.nA1(), 0.0);
    double total = 0.0;
    auto it = sol.xi1.lower_bound({h1, std::numeric_limits<int>::min(),
                                   std::numeric_limits<int>::min()});
    for (; it != sol.xi1.end() && std::get<0>(it->first) == h1; ++it) {
      dist[std::get<2>(it->first)] += it->second;
      total += it->second;
    }
    if (total < 1e-9) {
      std::fill(dist.begin(), dist.end(), 1.0 / m.nA1());
    } else {
      for (double& v : dist) v /= total;
    }
    d.rows[{h1, hp}] = std::move(dist);
  }
  return d;
}

}  // namespace ozsg
