#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ozsg::testing {

GameModel random_tiny_game(RngStream& rng, int max_s, int max_a, int max_z, int max_w,
                           double discount) {
  GameModel m;
  m.name = "random-tiny";
  int nS = 1 + static_cast<int>(rng.next_below(max_s));
  int nA1 = 1 + static_cast<int>(rng.next_below(max_a));
  int nA2 = 1 + static_cast<int>(rng.next_below(max_a));
  int nZ1 = 1 + static_cast<int>(rng.next_below(max_z));
  int nZ2 = 1 + static_cast<int>(rng.next_below(max_z));
  int nW = 1 + static_cast<int>(rng.next_below(max_w));
  auto names = [](const char* p, int n) {
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) v.push_back(std::string(p) + std::to_string(i));
    return v;
  };
  m.states = names("s", nS);
  m.actions1 = names("a", nA1);
  m.actions2 = names("b", nA2);
  m.obs1 = names("y", nZ1);
  m.obs2 = names("z", nZ2);
  m.pubobs = names("w", nW);
  m.discount = discount;
  m.start.assign(nS, 0.0);
  double tot = 0.0;
  for (int s = 0; s < nS; ++s) {
    m.start[s] = 0.05 + rng.next_unit();
    tot += m.start[s];
  }
  for (int s = 0; s < nS; ++s) m.start[s] /= tot;
  m.allocate();
  for (int s = 0; s < nS; ++s)
    for (int a1 = 0; a1 < nA1; ++a1)
      for (int a2 = 0; a2 < nA2; ++a2) {
        auto& row = m.kernel[m.joint_index(s, a1, a2)];
        double rowTot = 0.0;
        for (int s2 = 0; s2 < nS; ++s2)
          for (int z1 = 0; z1 < nZ1; ++z1)
            for (int z2 = 0; z2 < nZ2; ++z2)
              for (int w = 0; w < nW; ++w) {
                if (rng.next_unit() < 0.45) continue;  // sparse rows
                double p = 0.05 + rng.next_unit();
                row.push_back(Outcome{s2, z1, z2, w, p});
                rowTot += p;
              }
        if (row.empty()) {
          row.push_back(Outcome{static_cast<int>(rng.next_below(nS)),
                                static_cast<int>(rng.next_below(nZ1)),
                                static_cast<int>(rng.next_below(nZ2)),
                                static_cast<int>(rng.next_below(nW)), 1.0});
          rowTot = 1.0;
        }
        for (auto& o : row) o.p /= rowTot;
        m.reward[m.joint_index(s, a1, a2)] =
            rng.next_unit() < 0.2 ? 0.0 : (2.0 * rng.next_unit() - 1.0);
      }
  m.validate();
  return m;
}

EnumResult enumerate_play(const GameModel& m, HistoryContext& ctx,
                          const std::vector<DecisionRule>& d1s,
                          const std::vector<DecisionRule>& d2s) {
  if (d1s.size() != d2s.size()) throw std::runtime_error("rule sequence length mismatch");
  int horizon = static_cast<int>(d1s.size());
  EnumResult res;
  res.stage_dist.resize(horizon + 1);
  // Breadth-first over (s, h1, h2, hp) weighted nodes; tiny games only.
  std::map<std::tuple<int, int, int, int>, double> cur;
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0) cur[{s, HistoryTable::kRoot, HistoryTable::kRoot,
                               PubHistoryTable::kRoot}] = m.start[s];
  double gammaT = 1.0;
  for (int t = 0; t < horizon; ++t) {
    res.stage_dist[t] = cur;
    std::map<std::tuple<int, int, int, int>, double> next;
    for (const auto& [key, pr] : cur) {
      auto [s, h1, h2, hp] = key;
      const auto& p1 = d1s[t].at(h1, hp);
      const auto& p2 = d2s[t].at(h2, hp);
      for (int a1 = 0; a1 < m.nA1(); ++a1) {
        if (p1[a1] == 0.0) continue;
        for (int a2 = 0; a2 < m.nA2(); ++a2) {
          if (p2[a2] == 0.0) continue;
          double w12 = pr * p1[a1] * p2[a2];
          res.value += gammaT * w12 * m.r(s, a1, a2);
          for (const Outcome& o : m.outcomes(s, a1, a2)) {
            int h1n = ctx.h1.child(h1, a1, o.z1);
            int h2n = ctx.h2.child(h2, a2, o.z2);
            int hpn = ctx.pub.child(hp, o.w);
            next[{o.s2, h1n, h2n, hpn}] += w12 * o.p;
          }
        }
      }
    }
    cur = std::move(next);
    gammaT *= m.discount;
  }
  res.stage_dist[horizon] = cur;
  return res;
}

void random_rule_sequence(const GameModel& m, HistoryContext& ctx, int stages,
                          RngStream& rng, std::vector<DecisionRule>& d1s,
                          std::vector<DecisionRule>& d2s, bool pure) {
  d1s.clear();
  d2s.clear();
  std::set<std::tuple<int, int, int, int>> cur;  // (s, h1, h2, hp)
  for (int s = 0; s < m.nS(); ++s)
    if (m.start[s] > 0.0)
      cur.insert({s, HistoryTable::kRoot, HistoryTable::kRoot, PubHistoryTable::kRoot});
  for (int t = 0; t < stages; ++t) {
    DecisionRule d1, d2;
    d1.stage = d2.stage = t;
    d1.player = 1;
    d2.player = 2;
    std::set<std::pair<int, int>> keys1, keys2;
    for (const auto& [s, h1, h2, hp] : cur) {
      keys1.insert({h1, hp});
      keys2.insert({h2, hp});
    }
    auto fill = [&](DecisionRule& d, const std::set<std::pair<int, int>>& keys, int nA) {
      for (const auto& [h, hp] : keys) {
        std::vector<double> row(nA, 0.0);
        if (pure) {
          row[rng.next_below(nA)] = 1.0;
        } else {
          double tot = 0.0;
          for (int a = 0; a < nA; ++a) {
            row[a] = 0.05 + rng.next_unit();
            tot += row[a];
          }
          for (int a = 0; a < nA; ++a) row[a] /= tot;
        }
        d.rows[{h, hp}] = row;
      }
    };
    fill(d1, keys1, m.nA1());
    fill(d2, keys2, m.nA2());
    std::set<std::tuple<int, int, int, int>> next;
    for (const auto& [s, h1, h2, hp] : cur)
      for (int a1 = 0; a1 < m.nA1(); ++a1) {
        if (d1.rows[{h1, hp}][a1] == 0.0) continue;
        for (int a2 = 0; a2 < m.nA2(); ++a2) {
          if (d2.rows[{h2, hp}][a2] == 0.0) continue;
          for (const Outcome& o : m.outcomes(s, a1, a2))
            next.insert({o.s2, ctx.h1.child(h1, a1, o.z1), ctx.h2.child(h2, a2, o.z2),
                         ctx.pub.child(hp, o.w)});
        }
      }
    cur = std::move(next);
    d1s.push_back(std::move(d1));
    d2s.push_back(std::move(d2));
  }
}

namespace {

// Enumerate square kernels (I, J): mixed strategies supported on I and J that
// make the opponent indifferent; return the first pair passing the
// equilibrium inequalities.
bool try_kernel(const std::vector<std::vector<double>>& A, const std::vector<int>& I,
                const std::vector<int>& J, double tol, double& value,
                std::vector<double>& rowStrategy) {
  int k = static_cast<int>(I.size());
  int nR = static_cast<int>(A.size());
  int nC = static_cast<int>(A[0].size());
  // Solve for x on I with A_IJ^T x = v 1, sum x = 1.
  Eigen::MatrixXd M(k + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) M(j, i) = A[I[i]][J[j]];
    M(j, k) = -1.0;
  }
  for (int i = 0; i < k; ++i) M(k, i) = 1.0;
  M(k, k) = 0.0;
  rhs(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd xv = lu.solve(rhs);
  // Solve for y on J with A_IJ y = v 1, sum y = 1.
  Eigen::MatrixXd N(k + 1, k + 1);
  Eigen::VectorXd rhs2 = Eigen::VectorXd::Zero(k + 1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) N(i, j) = A[I[i]][J[j]];
    N(i, k) = -1.0;
  }
  for (int j = 0; j < k; ++j) N(k, j) = 1.0;
  N(k, k) = 0.0;
  rhs2(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu2(N);
  if (!lu2.isInvertible()) return false;
  Eigen::VectorXd yv = lu2.solve(rhs2);
  double v = xv(k);
  if (std::abs(yv(k) - v) > 1e-6) return false;
  for (int i = 0; i < k; ++i)
    if (xv(i) < -tol || yv(i) < -tol) return false;
  std::vector<double> x(nR, 0.0), y(nC, 0.0);
  for (int i = 0; i < k; ++i) x[I[i]] = std::max(0.0, xv(i));
  for (int j = 0; j < k; ++j) y[J[j]] = std::max(0.0, yv(j));
  // Equilibrium checks over all pure deviations.
  for (int j = 0; j < nC; ++j) {
    double c = 0.0;
    for (int i = 0; i < nR; ++i) c += x[i] * A[i][j];
    if (c < v - tol) return false;
  }
  for (int i = 0; i < nR; ++i) {
    double c = 0.0;
    for (int j = 0; j < nC; ++j) c += A[i][j] * y[j];
    if (c > v + tol) return false;
  }
  value = v;
  rowStrategy = x;
  return true;
}

void subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool solve_matrix_game(const std::vector<std::vector<double>>& A, double& value,
                       std::vector<double>& rowStrategy) {
  int nR = static_cast<int>(A.size());
  int nC = static_cast<int>(A[0].size());
  for (double tol : {1e-9, 1e-7}) {
    for (int k = 1; k <= std::min(nR, nC); ++k) {
      std::vector<std::vector<int>> Is, Js;
      subsets(nR, k, Is);
      subsets(nC, k, Js);
      for (const auto& I : Is)
        for (const auto& J : Js)
          if (try_kernel(A, I, J, tol, value, rowStrategy)) return true;
    }
  }
  return false;
}

}  // namespace

double matrix_game_value(const std::vector<std::vector<double>>& A) {
  double v;
  std::vector<double> x;
  if (!solve_matrix_game(A, v, x)) throw std::runtime_error("matrix game solver failed");
  return v;
}

std::vector<double> matrix_game_row_strategy(const std::vector<std::vector<double>>& A) {
  double v;
  std::vector<double> x;
  if (!solve_matrix_game(A, v, x)) throw std::runtime_error("matrix game solver failed");
  return x;
}

}  // namespace ozsg::testing
