#include "ozsg/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ozsg/common.hpp"

namespace ozsg::lp {

namespace {
constexpr double kFeasTol = 1e-7;   // bound/row feasibility
constexpr double kDualTol = 1e-9;   // reduced-cost optimality
constexpr double kPivotTol = 1e-9;  // smallest usable ratio-test pivot
constexpr double kStableTol = 1e-7; // preferred pivot magnitude
constexpr int kRefactorEvery = 100;
constexpr int kDegenerateLimit = 300;  // consecutive zero steps before Bland
}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterLimit: return "iteration-limit";
  }
  return "unknown";
}

int Model::add_var(double lb, double ub, double obj) {
  if (std::isnan(lb) || std::isnan(ub) || std::isnan(obj) || lb > ub)
    throw InternalError("lp: invalid variable bounds");
  lb_.push_back(lb);
  ub_.push_back(ub);
  obj_.push_back(obj);
  return num_vars() - 1;
}

int Model::add_row(RowSense sense, double rhs,
                   const std::vector<std::pair<int, double>>& coefs) {
  if (std::isnan(rhs)) throw InternalError("lp: row rhs is nan");
  for (const auto& [j, v] : coefs) {
    if (j < 0 || j >= num_vars())
      throw InternalError("lp: row references unknown variable");
    if (std::isnan(v)) throw InternalError("lp: row coefficient is nan");
    if (v == 0.0) continue;
    col_index_.push_back(j);
    coef_.push_back(v);
  }
  row_begin_.push_back(static_cast<int>(col_index_.size()));
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  return num_rows() - 1;
}

// Bounded-variable revised simplex with an explicit dense basis inverse,
// product-form updates, Dantzig pricing with a Bland fallback, and a
// composite (infeasibility-sum) phase 1.
class Simplex {
 public:
  explicit Simplex(const Model& model)
      : M(model), n(model.num_vars()), m(model.num_rows()), N(n + m) {
    build();
  }

  Solution run(Basis* warm, int iter_limit);

 private:
  const Model& M;
  int n, m, N;

  // Internal problem: minimize c over lb <= x <= ub with A x + slack = rhs.
  std::vector<double> lb, ub, c;  // size N (structural then one slack per row)
  // Structural columns in CSC form.
  std::vector<int> cbeg, crow;
  std::vector<double> cval;

  Eigen::MatrixXd Binv;
  std::vector<int> basic;          // basis position -> variable
  std::vector<int> bpos;           // variable -> basis position or -1
  std::vector<VarState> st;        // size N
  std::vector<double> x;           // size N
  int pivots_since_refactor = 0;

  bool is_slack(int j) const { return j >= n; }

  void build() {
    lb.resize(N);
    ub.resize(N);
    c.assign(N, 0.0);
    for (int j = 0; j < n; ++j) {
      lb[j] = M.lb_[j];
      ub[j] = M.ub_[j];
      c[j] = M.maximize_ ? -M.obj_[j] : M.obj_[j];
    }
    for (int i = 0; i < m; ++i) {
      switch (M.sense_[i]) {
        case RowSense::LE: lb[n + i] = 0.0; ub[n + i] = kInf; break;
        case RowSense::GE: lb[n + i] = -kInf; ub[n + i] = 0.0; break;
        case RowSense::EQ: lb[n + i] = 0.0; ub[n + i] = 0.0; break;
      }
    }
    // Transpose the row-major coefficients into columns.
    std::vector<int> count(n + 1, 0);
    for (int j : M.col_index_) ++count[j + 1];
    cbeg.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) cbeg[j + 1] = cbeg[j] + count[j + 1];
    std::vector<int> cursor(cbeg.begin(), cbeg.end() - 1);
    crow.resize(M.col_index_.size());
    cval.resize(M.col_index_.size());
    for (int i = 0; i < m; ++i)
      for (int k = M.row_begin_[i]; k < M.row_begin_[i + 1]; ++k) {
        int j = M.col_index_[k];
        crow[cursor[j]] = i;
        cval[cursor[j]] = M.coef_[k];
        ++cursor[j];
      }
  }

  VarState default_state(int j) const {
    if (std::isfinite(lb[j])) return VarState::AtLower;
    if (std::isfinite(ub[j])) return VarState::AtUpper;
    return VarState::FreeNonbasic;
  }

  void cold_basis() {
    for (int j = 0; j < n; ++j) st[j] = default_state(j);
    for (int i = 0; i < m; ++i) st[n + i] = VarState::Basic;
    collect_basis();
  }

  void collect_basis() {
    basic.clear();
    for (int j = 0; j < N; ++j)
      if (st[j] == VarState::Basic) basic.push_back(j);
    bpos.assign(N, -1);
    for (int i = 0; i < static_cast<int>(basic.size()); ++i) bpos[basic[i]] = i;
  }

  bool init_basis(const Basis* warm) {
    st.assign(N, VarState::AtLower);
    if (warm != nullptr && !warm->empty() &&
        static_cast<int>(warm->var_state.size()) <= n &&
        static_cast<int>(warm->row_state.size()) <= m) {
      for (int j = 0; j < n; ++j)
        st[j] = j < static_cast<int>(warm->var_state.size()) ? warm->var_state[j]
                                                             : default_state(j);
      for (int i = 0; i < m; ++i)
        st[n + i] = i < static_cast<int>(warm->row_state.size())
                        ? warm->row_state[i]
                        : VarState::Basic;
      // Repair inconsistent nonbasic states against bounds.
      for (int j = 0; j < N; ++j) {
        if (st[j] == VarState::Basic) continue;
        if (st[j] == VarState::AtLower && !std::isfinite(lb[j])) st[j] = default_state(j);
        if (st[j] == VarState::AtUpper && !std::isfinite(ub[j])) st[j] = default_state(j);
        if (st[j] == VarState::FreeNonbasic && (std::isfinite(lb[j]) || std::isfinite(ub[j])))
          st[j] = default_state(j);
      }
      collect_basis();
      if (static_cast<int>(basic.size()) == m) return true;
    }
    cold_basis();
    return false;
  }

  // Recomputes Binv from scratch; falls back to the all-slack basis if the
  // warm basis is singular.
  void refactorize() {
    if (m == 0) return;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      int j = basic[i];
      if (is_slack(j)) {
        B(j - n, i) = 1.0;
      } else {
        for (int k = cbeg[j]; k < cbeg[j + 1]; ++k) B(crow[k], i) += cval[k];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> fac(B);
    fac.setThreshold(1e-10);
    if (!fac.isInvertible()) {
      cold_basis();
      Binv = Eigen::MatrixXd::Identity(m, m);
    } else {
      Binv = fac.inverse();
    }
    pivots_since_refactor = 0;
    recompute_x();
  }

  void recompute_x() {
    x.assign(N, 0.0);
    Eigen::VectorXd beff(m);
    for (int i = 0; i < m; ++i) beff[i] = M.rhs_[i];
    for (int j = 0; j < N; ++j) {
      switch (st[j]) {
        case VarState::Basic: continue;
        case VarState::AtLower: x[j] = lb[j]; break;
        case VarState::AtUpper: x[j] = ub[j]; break;
        case VarState::FreeNonbasic: x[j] = 0.0; break;
      }
      if (x[j] == 0.0) continue;
      if (is_slack(j)) {
        beff[j - n] -= x[j];
      } else {
        for (int k = cbeg[j]; k < cbeg[j + 1]; ++k) beff[crow[k]] -= cval[k] * x[j];
      }
    }
    Eigen::VectorXd xB = Binv * beff;
    for (int i = 0; i < m; ++i) x[basic[i]] = xB[i];
  }

  // Column of the constraint matrix for variable j, applied to Binv.
  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    if (is_slack(j)) {
      w = Binv.col(j - n);
    } else {
      for (int k = cbeg[j]; k < cbeg[j + 1]; ++k) w.noalias() += cval[k] * Binv.col(crow[k]);
    }
    return w;
  }

  double col_dot(const Eigen::VectorXd& y, int j) const {
    if (is_slack(j)) return y[j - n];
    double acc = 0.0;
    for (int k = cbeg[j]; k < cbeg[j + 1]; ++k) acc += y[crow[k]] * cval[k];
    return acc;
  }

  // Infeasibility signature of the basic solution.
  double infeasibility(std::vector<int>& sigma) const {
    sigma.assign(m, 0);
    double h = 0.0;
    for (int i = 0; i < m; ++i) {
      int j = basic[i];
      if (x[j] > ub[j] + kFeasTol) {
        sigma[i] = 1;
        h += x[j] - ub[j];
      } else if (x[j] < lb[j] - kFeasTol) {
        sigma[i] = -1;
        h += lb[j] - x[j];
      }
    }
    return h;
  }

  void eta_update(const Eigen::VectorXd& w, int r) {
    Eigen::RowVectorXd newrow = Binv.row(r) / w[r];
    Binv.noalias() -= w * newrow;
    Binv.row(r) = newrow;
  }

  Solution finish(Status status, int iters) {
    Solution sol;
    sol.status = status;
    sol.iterations = iters;
    sol.x.assign(M.obj_.size(), 0.0);
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
      sol.x[j] = x[j];
      obj += M.obj_[j] * x[j];
    }
    sol.objective = obj;
    if (status == Status::Optimal && m > 0) {
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = is_slack(basic[i]) ? 0.0 : M.obj_[basic[i]];
      Eigen::VectorXd y = Binv.transpose() * cb;
      sol.row_dual.assign(y.data(), y.data() + m);
    } else {
      sol.row_dual.assign(m, 0.0);
    }
    return sol;
  }

  void save_basis(Basis* warm) const {
    if (warm == nullptr) return;
    warm->var_state.assign(st.begin(), st.begin() + n);
    warm->row_state.assign(st.begin() + n, st.end());
  }
};

Solution Simplex::run(Basis* warm, int iter_limit) {
  // Degenerate case: no rows means every variable goes to its favoured bound.
  if (m == 0) {
    x.assign(N, 0.0);
    st.assign(N, VarState::AtLower);
    for (int j = 0; j < n; ++j) {
      if (c[j] > 0.0) {
        if (!std::isfinite(lb[j])) return finish(Status::Unbounded, 0);
        x[j] = lb[j];
        st[j] = VarState::AtLower;
      } else if (c[j] < 0.0) {
        if (!std::isfinite(ub[j])) return finish(Status::Unbounded, 0);
        x[j] = ub[j];
        st[j] = VarState::AtUpper;
      } else {
        x[j] = std::isfinite(lb[j]) ? lb[j] : (std::isfinite(ub[j]) ? ub[j] : 0.0);
      }
    }
    save_basis(warm);
    return finish(Status::Optimal, 0);
  }

  if (iter_limit <= 0) iter_limit = std::max(50000, 200 * (n + m));
  init_basis(warm);
  refactorize();

  std::vector<int> sigma;
  bool bland = false;
  int degenerate_run = 0;
  int iters = 0;

  while (true) {
    if (iters >= iter_limit) {
      save_basis(warm);
      return finish(Status::IterLimit, iters);
    }

    double h = infeasibility(sigma);
    bool phase1 = h > kFeasTol;

    // Pricing vector for the active phase.
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i)
      cb[i] = phase1 ? static_cast<double>(sigma[i]) : c[basic[i]];
    Eigen::VectorXd y = Binv.transpose() * cb;

    int enter = -1;
    int enter_t = 0;
    double best_score = kDualTol;
    for (int j = 0; j < N; ++j) {
      if (st[j] == VarState::Basic) continue;
      if (lb[j] == ub[j]) continue;  // pinned
      double d = (phase1 ? 0.0 : c[j]) - col_dot(y, j);
      int t = 0;
      if (st[j] == VarState::AtLower) {
        if (d < -kDualTol) t = 1;
      } else if (st[j] == VarState::AtUpper) {
        if (d > kDualTol) t = -1;
      } else {  // free at zero
        if (d < -kDualTol) t = 1;
        else if (d > kDualTol) t = -1;
      }
      if (t == 0) continue;
      if (bland) {
        enter = j;
        enter_t = t;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        enter = j;
        enter_t = t;
      }
    }

    if (enter < 0) {
      // Verify against a freshly factorized basis before declaring.
      if (pivots_since_refactor > 0) {
        refactorize();
        continue;
      }
      save_basis(warm);
      return finish(phase1 ? Status::Infeasible : Status::Optimal, iters);
    }

    Eigen::VectorXd w = ftran(enter);
    double t = enter_t;

    // Ratio test: how far can the entering variable move?
    double range = ub[enter] - lb[enter];
    double best_step = std::isfinite(range) ? range : kInf;
    int leave_pos = -1;
    bool leave_to_upper = false;
    double leave_pivot = 0.0;
    for (int i = 0; i < m; ++i) {
      double rate = t * w[i];
      if (std::abs(rate) <= kPivotTol) continue;
      int j = basic[i];
      double step = kInf;
      bool to_upper = false;
      if (sigma[i] == 0) {
        if (rate > 0.0) {
          if (!std::isfinite(lb[j])) continue;
          step = (x[j] - lb[j]) / rate;
          to_upper = false;
        } else {
          if (!std::isfinite(ub[j])) continue;
          step = (x[j] - ub[j]) / rate;
          to_upper = true;
        }
      } else if (sigma[i] > 0) {  // above upper bound
        if (rate <= 0.0) continue;
        step = (x[j] - ub[j]) / rate;
        to_upper = true;
      } else {  // below lower bound
        if (rate >= 0.0) continue;
        step = (x[j] - lb[j]) / rate;
        to_upper = false;
      }
      if (step < 0.0) step = 0.0;
      bool take;
      if (step < best_step - 1e-9) {
        take = true;
      } else if (step > best_step + 1e-9 || leave_pos < 0) {
        take = false;  // worse, or a tie against the cheaper bound flip
      } else {
        take = bland ? basic[i] < basic[leave_pos]
                     : std::abs(w[i]) > std::abs(leave_pivot);
      }
      if (take) {
        best_step = std::min(best_step, step);
        leave_pos = i;
        leave_to_upper = to_upper;
        leave_pivot = w[i];
      }
    }

    if (!std::isfinite(best_step) && leave_pos < 0) {
      if (phase1) {
        // Should not happen: a decreasing infeasibility always blocks.
        if (pivots_since_refactor > 0) {
          refactorize();
          continue;
        }
        save_basis(warm);
        return finish(Status::Infeasible, iters);
      }
      save_basis(warm);
      return finish(Status::Unbounded, iters);
    }

    // Prefer a stable pivot: with a nearly-zero pivot element, refactorize
    // once and retry the iteration.
    if (leave_pos >= 0 && std::abs(leave_pivot) < kStableTol &&
        pivots_since_refactor > 0) {
      refactorize();
      continue;
    }

    ++iters;
    if (best_step < 1e-10) {
      if (++degenerate_run > kDegenerateLimit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    double step = best_step;
    if (leave_pos < 0) {
      // Bound flip: the entering variable crosses to its other bound.
      for (int i = 0; i < m; ++i) x[basic[i]] -= step * t * w[i];
      if (st[enter] == VarState::AtLower) {
        x[enter] = ub[enter];
        st[enter] = VarState::AtUpper;
      } else {
        x[enter] = lb[enter];
        st[enter] = VarState::AtLower;
      }
      continue;
    }

    double enter_from = x[enter];
    for (int i = 0; i < m; ++i) x[basic[i]] -= step * t * w[i];
    x[enter] = enter_from + t * step;

    int leave = basic[leave_pos];
    x[leave] = leave_to_upper ? ub[leave] : lb[leave];
    st[leave] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
    st[enter] = VarState::Basic;
    basic[leave_pos] = enter;
    bpos[enter] = leave_pos;
    bpos[leave] = -1;
    eta_update(w, leave_pos);
    if (++pivots_since_refactor >= kRefactorEvery) refactorize();
  }
}

Solution Model::solve(Basis* warm, int iter_limit) const {
  Simplex s(*this);
  return s.run(warm, iter_limit);
}

std::string Model::lp_format() const {
  std::ostringstream os;
  os << (maximize_ ? "Maximize" : "Minimize") << "\n obj:";
  bool first = true;
  for (int j = 0; j < num_vars(); ++j) {
    if (obj_[j] == 0.0) continue;
    os << (first ? " " : " + ") << csv_double(obj_[j]) << " x" << j;
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (int i = 0; i < num_rows(); ++i) {
    os << " r" << i << ":";
    bool any = false;
    for (int k = row_begin_[i]; k < row_begin_[i + 1]; ++k) {
      os << (any ? " + " : " ") << csv_double(coef_[k]) << " x" << col_index_[k];
      any = true;
    }
    if (!any) os << " 0 x0";
    const char* rel = sense_[i] == RowSense::LE ? "<=" : sense_[i] == RowSense::GE ? ">=" : "=";
    os << " " << rel << " " << csv_double(rhs_[i]) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < num_vars(); ++j) {
    if (!std::isfinite(lb_[j]) && !std::isfinite(ub_[j])) {
      os << " x" << j << " free\n";
    } else if (lb_[j] == ub_[j]) {
      os << " x" << j << " = " << csv_double(lb_[j]) << "\n";
    } else {
      os << " " << (std::isfinite(lb_[j]) ? csv_double(lb_[j]) : std::string("-inf"))
         << " <= x" << j << " <= "
         << (std::isfinite(ub_[j]) ? csv_double(ub_[j]) : std::string("+inf")) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

}  // namespace ozsg::lp
