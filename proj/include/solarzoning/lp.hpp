#pragma once

// Sparse linear programs: construction, solution, MPS interchange.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace solarzoning::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int var;
  double coef;
};

/// Minimization LP: min c·x + offset s.t. row_lo ≤ A x ≤ row_hi,
/// col_lo ≤ x ≤ col_hi. Names must be unique and free of whitespace.
class LinearProgram {
 public:
  int add_variable(std::string name, double lo, double hi, double cost);
  // Duplicate variables within `terms` are merged; zero coefficients dropped.
  int add_constraint(std::string name, std::vector<Term> terms, double lo, double hi);
  int add_le(std::string name, std::vector<Term> terms, double rhs) { return add_constraint(std::move(name), std::move(terms), -kInf, rhs); }
  int add_ge(std::string name, std::vector<Term> terms, double rhs) { return add_constraint(std::move(name), std::move(terms), rhs, kInf); }
  int add_eq(std::string name, std::vector<Term> terms, double rhs) { return add_constraint(std::move(name), std::move(terms), rhs, rhs); }

  void add_cost(int var, double delta) { col_cost_.at(var) += delta; }
  void set_bounds(int var, double lo, double hi);
  double objective_offset = 0.0;

  std::size_t num_vars() const { return col_cost_.size(); }
  std::size_t num_rows() const { return row_lo_.size(); }
  std::size_t num_nonzeros() const { return index_.size(); }

  const std::string& var_name(int j) const { return col_name_[j]; }
  double var_lo(int j) const { return col_lo_[j]; }
  double var_hi(int j) const { return col_hi_[j]; }
  double cost(int j) const { return col_cost_[j]; }
  const std::string& row_name(int i) const { return row_name_[i]; }
  double row_lo(int i) const { return row_lo_[i]; }
  double row_hi(int i) const { return row_hi_[i]; }

  // Row-wise storage: row i has entries [row_start(i), row_start(i+1)).
  std::size_t row_start(int i) const { return start_[i]; }
  int entry_var(std::size_t k) const { return index_[k]; }
  double entry_coef(std::size_t k) const { return value_[k]; }

  double row_activity(int i, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;

 private:
  std::vector<std::string> col_name_;
  std::vector<double> col_lo_, col_hi_, col_cost_;
  std::vector<std::string> row_name_;
  std::vector<double> row_lo_, row_hi_;
  std::vector<std::size_t> start_{0};
  std::vector<int> index_;
  std::vector<double> value_;
};

enum class Status { Optimal, Infeasible, Unbounded, Error };
std::string_view to_string(Status status);

struct Solution {
  Status status = Status::Error;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_activity;
  double max_primal_residual = 0.0;  // worst bound or row violation
  std::string diagnostic;
};

struct SolveOptions {
  double residual_tolerance = 1e-6;
  bool verbose = false;
};

/// Solves with HiGHS (dual simplex, single thread), then recomputes every
/// row activity and bound violation from the returned point. An optimal
/// point whose residual exceeds the tolerance after a tightened retry is
/// reported as Error with a diagnostic.
Solution solve(const LinearProgram& lp, const SolveOptions& options = {});

// Backing solver name and version, e.g. "HiGHS 1.7.2".
std::string solver_version();

/// Free-format MPS. A nonzero objective offset is written as a column
/// fixed at 1 so that every reader sees the same objective.
void write_mps(std::ostream& out, const LinearProgram& lp, std::string_view name = "SOLARZONING");
void write_mps_file(const std::string& path, const LinearProgram& lp, std::string_view name = "SOLARZONING");

/// Reads the free-format MPS subset produced by write_mps (ROWS, COLUMNS,
/// RHS, RANGES, BOUNDS). Throws ParseError on malformed input.
LinearProgram read_mps(std::istream& in);

}  // namespace solarzoning::lp
