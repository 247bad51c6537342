#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ozsg::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LE, EQ, GE };

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

const char* status_name(Status s);

// Where a variable (or a row's slack) sits relative to the current basis.
// Exposed so callers can carry a basis across incremental re-solves.
enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeNonbasic };

// Snapshot of a basis keyed by structural-variable and row identity, so it
// stays valid when the caller appends variables or rows between solves.
struct Basis {
  std::vector<VarState> var_state;  // one per structural variable
  std::vector<VarState> row_state;  // one per row (state of the row's slack)
  bool empty() const { return var_state.empty() && row_state.empty(); }
};

struct Solution {
  Status status = Status::IterLimit;
  double objective = 0.0;       // in the model's own sense (max or min)
  std::vector<double> x;        // one per structural variable
  std::vector<double> row_dual; // one per row; see Model::solve for the sign
  int iterations = 0;
};

// A linear program over bounded variables.  Rows and variables can be added
// incrementally; solve() never mutates the model, so callers may interleave
// solves with further add_var/add_row calls (cutting-plane style).
class Model {
 public:
  explicit Model(bool maximize) : maximize_(maximize) {}

  // lb may be -inf, ub may be +inf, lb == ub pins the variable.
  int add_var(double lb, double ub, double obj);
  int add_row(RowSense sense, double rhs,
              const std::vector<std::pair<int, double>>& coefs);

  int num_vars() const { return static_cast<int>(obj_.size()); }
  int num_rows() const { return static_cast<int>(sense_.size()); }
  bool maximize() const { return maximize_; }

  // Solves the LP.  On Optimal, row_dual is signed so that for a
  // maximization the dual of a binding <= row is >= 0, and for a
  // minimization the dual of a binding >= row is >= 0 (the usual
  // textbook conventions for each sense).
  //
  // If `warm` is non-null it is used as the starting basis when its shape is
  // compatible (variables and rows may have been appended since it was
  // captured; deletions are not supported) and is overwritten with the final
  // basis on return.
  Solution solve(Basis* warm = nullptr, int iter_limit = 0) const;

  // CPLEX-LP-format dump for debugging.
  std::string lp_format() const;

 private:
  friend class Simplex;
  bool maximize_ = true;
  std::vector<double> lb_, ub_, obj_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  // Row-major sparse coefficients.
  std::vector<int> row_begin_{0};
  std::vector<int> col_index_;
  std::vector<double> coef_;
};

}  // namespace ozsg::lp
