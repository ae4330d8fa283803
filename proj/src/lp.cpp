#include "solarzoning/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "Highs.h"
#include "lp_data/HighsModelUtils.h"
#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"

namespace solarzoning::lp {
namespace {

void check_name(const std::string& name) {
  if (name.empty() || std::any_of(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw ContractViolation("LP names must be nonempty and free of whitespace: '" + name + "'");
  }
}

constexpr std::string_view kOffsetColumn = "OBJ_OFFSET";

double max_residual(const LinearProgram& lp, const std::vector<double>& x, std::vector<double>& activity,
                    std::string& worst) {
  double worst_value = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const int jj = static_cast<int>(j);
    const double v = std::max(lp.var_lo(jj) - x[j], x[j] - lp.var_hi(jj));
    if (v > worst_value) {
      worst_value = v;
      worst = lp.var_name(jj);
    }
  }
  activity.assign(lp.num_rows(), 0.0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    activity[i] = lp.row_activity(ii, x);
    const double v = std::max(lp.row_lo(ii) - activity[i], activity[i] - lp.row_hi(ii));
    if (v > worst_value) {
      worst_value = v;
      worst = lp.row_name(ii);
    }
  }
  return worst_value;
}

HighsLp to_highs(const LinearProgram& lp) {
  HighsLp h;
  h.num_col_ = static_cast<HighsInt>(lp.num_vars());
  h.num_row_ = static_cast<HighsInt>(lp.num_rows());
  h.sense_ = ObjSense::kMinimize;
  h.offset_ = lp.objective_offset;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const int jj = static_cast<int>(j);
    h.col_cost_.push_back(lp.cost(jj));
    h.col_lower_.push_back(lp.var_lo(jj));
    h.col_upper_.push_back(lp.var_hi(jj));
  }
  h.a_matrix_.format_ = MatrixFormat::kRowwise;
  h.a_matrix_.num_col_ = h.num_col_;
  h.a_matrix_.num_row_ = h.num_row_;
  h.a_matrix_.start_.clear();
  h.a_matrix_.start_.reserve(lp.num_rows() + 1);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    h.row_lower_.push_back(lp.row_lo(ii));
    h.row_upper_.push_back(lp.row_hi(ii));
    h.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.row_start(ii)));
  }
  h.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.num_nonzeros()));
  for (std::size_t k = 0; k < lp.num_nonzeros(); ++k) {
    h.a_matrix_.index_.push_back(lp.entry_var(k));
    h.a_matrix_.value_.push_back(lp.entry_coef(k));
  }
  return h;
}

struct RawResult {
  HighsModelStatus status;
  std::vector<double> x;
};

RawResult run_highs(const HighsLp& model, bool presolve, double tolerance, bool zero_cost, bool verbose) {
  Highs highs;
  highs.setOptionValue("output_flag", verbose);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("random_seed", 0);
  highs.setOptionValue("solver", "simplex");
  highs.setOptionValue("presolve", presolve ? "on" : "off");
  highs.setOptionValue("primal_feasibility_tolerance", tolerance);
  highs.setOptionValue("dual_feasibility_tolerance", tolerance);
  HighsLp copy = model;
  if (zero_cost) std::fill(copy.col_cost_.begin(), copy.col_cost_.end(), 0.0);
  if (highs.passModel(std::move(copy)) == HighsStatus::kError) {
    throw ContractViolation("HiGHS rejected the model");
  }
  highs.run();
  RawResult r{highs.getModelStatus(), {}};
  if (r.status == HighsModelStatus::kOptimal) r.x = highs.getSolution().col_value;
  return r;
}

Status classify(HighsModelStatus s) {
  switch (s) {
    case HighsModelStatus::kOptimal: return Status::Optimal;
    case HighsModelStatus::kInfeasible: return Status::Infeasible;
    case HighsModelStatus::kUnbounded: return Status::Unbounded;
    default: return Status::Error;
  }
}

}  // namespace

int LinearProgram::add_variable(std::string name, double lo, double hi, double cost) {
  check_name(name);
  if (std::isnan(lo) || std::isnan(hi) || !std::isfinite(cost)) throw ContractViolation("bad bounds or cost for " + name);
  col_name_.push_back(std::move(name));
  col_lo_.push_back(lo);
  col_hi_.push_back(hi);
  col_cost_.push_back(cost);
  return static_cast<int>(col_cost_.size()) - 1;
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
  col_lo_.at(var) = lo;
  col_hi_.at(var) = hi;
}

int LinearProgram::add_constraint(std::string name, std::vector<Term> terms, double lo, double hi) {
  check_name(name);
  if (std::isnan(lo) || std::isnan(hi) || (lo == -kInf && hi == kInf)) {
    throw ContractViolation("constraint " + name + " needs at least one finite side");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (t.var < 0 || static_cast<std::size_t>(t.var) >= col_cost_.size()) {
      throw ContractViolation("constraint " + name + " references an unknown variable");
    }
    if (!std::isfinite(t.coef)) throw ContractViolation("non-finite coefficient in " + name);
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  for (const auto& t : merged) {
    if (t.coef == 0.0) continue;
    index_.push_back(t.var);
    value_.push_back(t.coef);
  }
  start_.push_back(index_.size());
  row_name_.push_back(std::move(name));
  row_lo_.push_back(lo);
  row_hi_.push_back(hi);
  return static_cast<int>(row_lo_.size()) - 1;
}

double LinearProgram::row_activity(int i, const std::vector<double>& x) const {
  double s = 0.0;
  for (std::size_t k = start_[i]; k < start_[i + 1]; ++k) s += value_[k] * x[index_[k]];
  return s;
}

double LinearProgram::objective_value(const std::vector<double>& x) const {
  double s = objective_offset;
  for (std::size_t j = 0; j < col_cost_.size(); ++j) s += col_cost_[j] * x[j];
  return s;
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::Error: return "error";
  }
  return "unknown";
}

Solution solve(const LinearProgram& lp, const SolveOptions& options) {
  const HighsLp model = to_highs(lp);
  Solution sol;

  RawResult raw = run_highs(model, true, 1e-7, false, options.verbose);
  if (raw.status == HighsModelStatus::kUnboundedOrInfeasible) {
    raw = run_highs(model, false, 1e-7, false, options.verbose);
  }
  if (raw.status == HighsModelStatus::kUnboundedOrInfeasible) {
    // Feasibility alone decides which one it is.
    const RawResult feas = run_highs(model, false, 1e-7, true, options.verbose);
    raw.status = feas.status == HighsModelStatus::kOptimal ? HighsModelStatus::kUnbounded
                                                           : HighsModelStatus::kInfeasible;
  }
  sol.status = classify(raw.status);
  if (sol.status != Status::Optimal) {
    sol.diagnostic = "solver status: " + utilModelStatusToString(raw.status);
    return sol;
  }

  std::string worst;
  sol.max_primal_residual = max_residual(lp, raw.x, sol.row_activity, worst);
  if (sol.max_primal_residual > options.residual_tolerance) {
    raw = run_highs(model, false, 1e-10, false, options.verbose);
    if (raw.status != HighsModelStatus::kOptimal) {
      sol.status = Status::Error;
      sol.diagnostic = "tightened re-solve failed: " + utilModelStatusToString(raw.status);
      return sol;
    }
    sol.max_primal_residual = max_residual(lp, raw.x, sol.row_activity, worst);
    if (sol.max_primal_residual > options.residual_tolerance) {
      std::ostringstream msg;
      msg << "primal residual " << sol.max_primal_residual << " at " << worst << " exceeds tolerance";
      sol.status = Status::Error;
      sol.diagnostic = msg.str();
      return sol;
    }
  }
  sol.x = std::move(raw.x);
  sol.objective = lp.objective_value(sol.x);
  return sol;
}

void write_mps(std::ostream& out, const LinearProgram& lp, std::string_view name) {
  const auto num = [](double v) { return csv::format_double(v); };
  out << "NAME " << name << "\nROWS\n N COST\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    const char type = lp.row_lo(ii) == lp.row_hi(ii) ? 'E' : lp.row_lo(ii) == -kInf ? 'L' : 'G';
    out << ' ' << type << ' ' << lp.row_name(ii) << '\n';
  }

  // Column-major view of the row-wise matrix.
  std::vector<std::vector<std::pair<int, double>>> columns(lp.num_vars());
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    for (std::size_t k = lp.row_start(ii); k < lp.row_start(ii + 1); ++k) {
      columns[lp.entry_var(k)].emplace_back(ii, lp.entry_coef(k));
    }
  }
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const int jj = static_cast<int>(j);
    if (lp.cost(jj) != 0.0) out << "    " << lp.var_name(jj) << " COST " << num(lp.cost(jj)) << '\n';
    for (const auto& [row, coef] : columns[j]) {
      out << "    " << lp.var_name(jj) << ' ' << lp.row_name(row) << ' ' << num(coef) << '\n';
    }
    if (lp.cost(jj) == 0.0 && columns[j].empty()) out << "    " << lp.var_name(jj) << " COST 0\n";
  }
  if (lp.objective_offset != 0.0) out << "    " << kOffsetColumn << " COST " << num(lp.objective_offset) << '\n';

  out << "RHS\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    const double rhs = lp.row_lo(ii) == -kInf ? lp.row_hi(ii) : lp.row_lo(ii);
    if (rhs != 0.0) out << "    RHS " << lp.row_name(ii) << ' ' << num(rhs) << '\n';
  }
  bool ranges_header = false;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const int ii = static_cast<int>(i);
    if (lp.row_lo(ii) != -kInf && lp.row_hi(ii) != kInf && lp.row_lo(ii) != lp.row_hi(ii)) {
      if (!ranges_header) out << "RANGES\n";
      ranges_header = true;
      out << "    RNG " << lp.row_name(ii) << ' ' << num(lp.row_hi(ii) - lp.row_lo(ii)) << '\n';
    }
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const int jj = static_cast<int>(j);
    const double lo = lp.var_lo(jj), hi = lp.var_hi(jj);
    const std::string& n = lp.var_name(jj);
    if (lo == hi) {
      out << " FX BND " << n << ' ' << num(lo) << '\n';
    } else if (lo == -kInf && hi == kInf) {
      out << " FR BND " << n << '\n';
    } else {
      if (lo == -kInf) {
        out << " MI BND " << n << '\n';
      } else if (lo != 0.0) {
        out << " LO BND " << n << ' ' << num(lo) << '\n';
      }
      if (hi != kInf) out << " UP BND " << n << ' ' << num(hi) << '\n';
    }
  }
  if (lp.objective_offset != 0.0) out << " FX BND " << kOffsetColumn << " 1\n";
  out << "ENDATA\n";
}

void write_mps_file(const std::string& path, const LinearProgram& lp, std::string_view name) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_mps(out, lp, name);
  if (!out) throw ParseError("failed writing '" + path + "'");
}

LinearProgram read_mps(std::istream& in) {
  struct RowSpec {
    char type;
    std::vector<Term> terms;
    double rhs = 0.0;
    std::optional<double> range;
  };
  std::string objective_row;
  std::vector<std::string> row_order;
  std::unordered_map<std::string, RowSpec> rows;
  std::vector<std::string> col_order;
  std::unordered_map<std::string, int> col_index;
  std::vector<double> cost, lo, hi;
  double offset_cost = 0.0;

  const auto fail = [](const std::string& what, std::size_t line) {
    throw ParseError("MPS line " + std::to_string(line) + ": " + what);
  };
  const auto number = [&](const std::string& s, std::size_t line) {
    try {
      return csv::parse_double(s, "MPS value");
    } catch (const ParseError&) {
      fail("bad number '" + s + "'", line);
    }
    return 0.0;
  };

  std::string section, text;
  std::size_t line_no = 0;
  bool ended = false;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text[0] == '*') continue;
    std::istringstream ls(text);
    std::vector<std::string> f;
    for (std::string tok; ls >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(text[0]))) {
      section = f[0];
      if (section == "ENDATA") {
        ended = true;
        break;
      }
      if (section != "NAME" && section != "ROWS" && section != "COLUMNS" && section != "RHS" && section != "RANGES" &&
          section != "BOUNDS") {
        fail("unsupported section " + section, line_no);
      }
      continue;
    }
    if (section == "ROWS") {
      if (f.size() != 2) fail("expected row type and name", line_no);
      if (f[0] == "N") {
        if (objective_row.empty()) objective_row = f[1];
        continue;
      }
      if (f[0] != "E" && f[0] != "L" && f[0] != "G") fail("bad row type " + f[0], line_no);
      if (!rows.emplace(f[1], RowSpec{f[0][0], {}, 0.0, {}}).second) fail("duplicate row " + f[1], line_no);
      row_order.push_back(f[1]);
    } else if (section == "COLUMNS") {
      if (f.size() != 3 && f.size() != 5) fail("expected column, row, value", line_no);
      const std::string& col = f[0];
      if (col == kOffsetColumn) {
        if (f[1] == objective_row) offset_cost = number(f[2], line_no);
        continue;
      }
      auto [it, inserted] = col_index.emplace(col, static_cast<int>(col_order.size()));
      if (inserted) {
        col_order.push_back(col);
        cost.push_back(0.0);
        lo.push_back(0.0);
        hi.push_back(kInf);
      }
      for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
        const double v = number(f[k + 1], line_no);
        if (f[k] == objective_row) {
          cost[it->second] = v;
        } else {
          auto r = rows.find(f[k]);
          if (r == rows.end()) fail("unknown row " + f[k], line_no);
          r->second.terms.push_back({it->second, v});
        }
      }
    } else if (section == "RHS" || section == "RANGES") {
      if (f.size() != 3 && f.size() != 5) fail("expected set, row, value", line_no);
      for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
        const double v = number(f[k + 1], line_no);
        if (f[k] == objective_row) {
          if (section == "RHS") offset_cost -= v;
          continue;
        }
        auto r = rows.find(f[k]);
        if (r == rows.end()) fail("unknown row " + f[k], line_no);
        (section == "RHS" ? r->second.rhs : r->second.range.emplace()) = v;
      }
    } else if (section == "BOUNDS") {
      if (f.size() < 3) fail("expected bound type, set, column", line_no);
      const std::string& type = f[0];
      if (f[2] == kOffsetColumn) continue;
      auto c = col_index.find(f[2]);
      if (c == col_index.end()) fail("unknown column " + f[2], line_no);
      const int j = c->second;
      const bool needs_value = type == "UP" || type == "LO" || type == "FX";
      if (needs_value && f.size() != 4) fail("bound needs a value", line_no);
      if (type == "UP") {
        hi[j] = number(f[3], line_no);
      } else if (type == "LO") {
        lo[j] = number(f[3], line_no);
      } else if (type == "FX") {
        lo[j] = hi[j] = number(f[3], line_no);
      } else if (type == "FR") {
        lo[j] = -kInf;
        hi[j] = kInf;
      } else if (type == "MI") {
        lo[j] = -kInf;
      } else if (type == "PL") {
        hi[j] = kInf;
      } else {
        fail("unsupported bound type " + type, line_no);
      }
    } else {
      fail("data outside a section", line_no);
    }
  }
  if (!ended) throw ParseError("MPS input lacks ENDATA");

  LinearProgram lp;
  for (std::size_t j = 0; j < col_order.size(); ++j) lp.add_variable(col_order[j], lo[j], hi[j], cost[j]);
  for (const auto& name : row_order) {
    RowSpec& r = rows.at(name);
    double rlo = r.rhs, rhi = r.rhs;
    if (r.type == 'L') rlo = -kInf;
    if (r.type == 'G') rhi = kInf;
    if (r.range) {
      const double R = std::abs(*r.range);
      if (r.type == 'G') rhi = r.rhs + R;
      if (r.type == 'L') rlo = r.rhs - R;
      if (r.type == 'E') (*r.range >= 0 ? rhi : rlo) = r.rhs + *r.range;
    }
    lp.add_constraint(name, std::move(r.terms), rlo, rhi);
  }
  lp.objective_offset = offset_cost;
  return lp;
}

std::string solver_version() {
  return "HiGHS " + std::to_string(highsVersionMajor()) + "." + std::to_string(highsVersionMinor()) + "." +
         std::to_string(highsVersionPatch());
}

}  // namespace solarzoning::lp
