#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace regmkt::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

/**
 * Dense-ish linear program builder: minimize c'x over lo <= x <= hi subject
 * to row constraints.  Rows keep sparse coefficient lists; the solver
 * densifies.  Column and row names are for diagnostics and text export only.
 */
class LinearProgram {
public:
  int add_variable(std::string name, double lo, double hi, double cost);
  int add_constraint(std::string name, Sense sense, double rhs);
  // Accumulates: repeated calls on the same entry add up.
  void add_coefficient(int row, int col, double value);

  std::size_t num_variables() const { return cost_.size(); }
  std::size_t num_constraints() const { return rhs_.size(); }

  const std::string& variable_name(int j) const { return var_names_[static_cast<std::size_t>(j)]; }
  const std::string& constraint_name(int i) const {
    return row_names_[static_cast<std::size_t>(i)];
  }
  double lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return hi_[static_cast<std::size_t>(j)]; }
  void set_bounds(int j, double lo, double hi);
  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  Sense sense(int i) const { return sense_[static_cast<std::size_t>(i)]; }
  double rhs(int i) const { return rhs_[static_cast<std::size_t>(i)]; }
  const std::vector<std::pair<int, double>>& row(int i) const {
    return rows_[static_cast<std::size_t>(i)];
  }

  // Throws std::invalid_argument on malformed bounds or dangling indices.
  void validate() const;

private:
  std::vector<std::string> var_names_, row_names_;
  std::vector<double> cost_, lo_, hi_, rhs_;
  std::vector<Sense> sense_;
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit };

const char* to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;              // per variable
  std::vector<double> duals;          // per row; shadow price of the rhs
  std::vector<double> reduced_costs;  // per variable
  bool primal_degenerate = false;     // a basic variable sits on a bound
  bool dual_degenerate = false;       // a nonbasic variable has zero reduced cost
  long iterations = 0;

  // Honest post-solve residuals, computed from x and duals alone.
  double primal_residual = 0.0;   // worst row/bound violation
  double duality_gap = 0.0;       // |c'x - (b'y + bound terms)|
  double complementarity = 0.0;   // worst |dual * slack| / |reduced cost * bound gap|

  // Branch-and-bound extras.
  long nodes = 0;
  double gap = 0.0; // relative bound gap at exit
};

struct SimplexOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  long iteration_limit = 200000;
  int stall_limit = 80; // consecutive degenerate pivots before Bland's rule

  // Honors REGMKT_LP_FEAS_TOL / REGMKT_LP_ITERS when set.
  static SimplexOptions from_env();
};

Solution solve(const LinearProgram& lp, const SimplexOptions& opt = SimplexOptions::from_env());

struct MipOptions {
  SimplexOptions lp;
  double gap_tol = 1e-6;      // relative incumbent/bound gap
  double integrality_tol = 1e-6;
  long node_limit = 200000;

  // Honors REGMKT_MIP_GAP / REGMKT_MIP_NODES when set.
  static MipOptions from_env();
};

// Best-bound branch and bound over the given binary variables (bounds must be
// within [0, 1]).  Returns the incumbent with duals taken from its node LP,
// i.e. prices of the restriction with the branched binaries fixed.  With a
// node limit hit, status is NodeLimit and `gap` reports the remaining bound
// gap; with no incumbent found the status is Infeasible.
Solution solve_mip(const LinearProgram& lp, const std::vector<int>& binaries,
                   const MipOptions& opt = MipOptions::from_env());

// CPLEX-style LP text for debugging, with an optional Binaries section.
void write_lp_text(const LinearProgram& lp, std::ostream& os,
                   const std::vector<int>& binaries = {});

} // namespace regmkt::lp
