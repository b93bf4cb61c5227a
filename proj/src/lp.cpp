#include "regmkt/lp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace regmkt::lp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NodeLimit: return "node-limit";
  }
  return "unknown";
}

int LinearProgram::add_variable(std::string name, double lo, double hi, double cost) {
  var_names_.push_back(std::move(name));
  lo_.push_back(lo);
  hi_.push_back(hi);
  cost_.push_back(cost);
  return static_cast<int>(cost_.size()) - 1;
}

int LinearProgram::add_constraint(std::string name, Sense sense, double rhs) {
  row_names_.push_back(std::move(name));
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  rows_.emplace_back();
  return static_cast<int>(rhs_.size()) - 1;
}

void LinearProgram::add_coefficient(int row, int col, double value) {
  if (row < 0 || static_cast<std::size_t>(row) >= rhs_.size())
    throw std::invalid_argument("add_coefficient: bad row index");
  if (col < 0 || static_cast<std::size_t>(col) >= cost_.size())
    throw std::invalid_argument("add_coefficient: bad column index");
  if (value == 0.0) return;
  rows_[static_cast<std::size_t>(row)].emplace_back(col, value);
}

void LinearProgram::set_bounds(int j, double lo, double hi) {
  lo_[static_cast<std::size_t>(j)] = lo;
  hi_[static_cast<std::size_t>(j)] = hi;
}

void LinearProgram::validate() const {
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    if (std::isnan(lo_[j]) || std::isnan(hi_[j]) || lo_[j] > hi_[j])
      throw std::invalid_argument("lp: bad bounds on variable " + var_names_[j]);
    if (!std::isfinite(cost_[j]))
      throw std::invalid_argument("lp: non-finite cost on variable " + var_names_[j]);
  }
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    if (!std::isfinite(rhs_[i]))
      throw std::invalid_argument("lp: non-finite rhs on constraint " + row_names_[i]);
    for (const auto& [col, v] : rows_[i]) {
      if (col < 0 || static_cast<std::size_t>(col) >= cost_.size() || !std::isfinite(v))
        throw std::invalid_argument("lp: bad coefficient in constraint " + row_names_[i]);
    }
  }
}

namespace {

double env_double(const char* name, double fallback) {
  const char* s = std::getenv(name);
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  return (end && *end == '\0' && std::isfinite(v)) ? v : fallback;
}

long env_long(const char* name, long fallback) {
  const char* s = std::getenv(name);
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  return (end && *end == '\0' && v > 0) ? v : fallback;
}

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

// Bounded-variable two-phase primal simplex on a dense tableau.  Column
// layout: [structural | slacks | artificials].  The basis always holds one
// column per row; nonbasic columns rest on a bound (or at zero when free).
class Simplex {
public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    n_ = lp.num_variables();
    m_ = lp.num_constraints();
  }

  Solution run() {
    setup();
    Solution out;
    if (!phase_one(out)) {
      finish(out);
      return out;
    }
    phase_ = 2;
    stall_ = 0;
    bland_ = false;
    const SolveStatus st = iterate(d2_);
    out.status = st;
    finish(out);
    return out;
  }

private:
  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t n_ = 0, m_ = 0, na_ = 0, width_ = 0;
  int phase_ = 1;
  std::vector<double> tab_;       // m x width, row major
  std::vector<double> lo_, hi_;   // per column
  std::vector<double> val_;       // nonbasic resting value per column
  std::vector<VarState> state_;
  std::vector<int> basis_;        // column basic in each row
  std::vector<double> xb_;        // value of that column
  std::vector<double> d1_, d2_;   // reduced-cost rows for both phases
  std::vector<int> art_row_;      // row index per artificial column
  long iters_ = 0;
  int stall_ = 0;
  bool bland_ = false;

  double* row(std::size_t i) { return tab_.data() + i * width_; }

  static double resting(double lo, double hi) {
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }

  void setup() {
    lo_.assign(n_ + m_, 0.0);
    hi_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp_.lower(static_cast<int>(j));
      hi_[j] = lp_.upper(static_cast<int>(j));
    }
    for (std::size_t i = 0; i < m_; ++i) {
      switch (lp_.sense(static_cast<int>(i))) {
        case Sense::LessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
        case Sense::Equal: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
        case Sense::GreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
      }
    }

    val_.assign(n_ + m_, 0.0);
    state_.assign(n_ + m_, VarState::AtLower);
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      val_[j] = resting(lo_[j], hi_[j]);
      if (std::isfinite(lo_[j]))
        state_[j] = VarState::AtLower;
      else if (std::isfinite(hi_[j]))
        state_[j] = VarState::AtUpper;
      else
        state_[j] = VarState::Free;
    }

    // Row residuals at the resting point decide which rows need an
    // artificial basic column.
    std::vector<double> resid(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double ax = 0.0;
      for (const auto& [col, v] : lp_.row(static_cast<int>(i)))
        ax += v * val_[static_cast<std::size_t>(col)];
      resid[i] = lp_.rhs(static_cast<int>(i)) - ax;
    }
    std::vector<int> art_of(m_, -1);
    std::vector<double> scale(m_, 1.0);
    na_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double s = resid[i];
      if (s >= lo_[n_ + i] - 1e-12 && s <= hi_[n_ + i] + 1e-12) continue;
      art_of[i] = static_cast<int>(n_ + m_ + na_++);
      scale[i] = (s >= 0.0) ? 1.0 : -1.0;
    }
    width_ = n_ + m_ + na_;
    lo_.resize(width_, 0.0);
    hi_.resize(width_, kInf);
    val_.resize(width_, 0.0);
    state_.resize(width_, VarState::AtLower);
    art_row_.assign(na_, -1);

    tab_.assign(m_ * width_, 0.0);
    basis_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double* r = row(i);
      for (const auto& [col, v] : lp_.row(static_cast<int>(i)))
        r[static_cast<std::size_t>(col)] += scale[i] * v;
      r[n_ + i] = scale[i];
      if (art_of[i] < 0) {
        basis_[i] = static_cast<int>(n_ + i);
        xb_[i] = resid[i];
      } else {
        const int a = art_of[i];
        r[static_cast<std::size_t>(a)] = 1.0;
        basis_[i] = a;
        xb_[i] = std::fabs(resid[i]);
        art_row_[static_cast<std::size_t>(a) - n_ - m_] = static_cast<int>(i);
      }
      state_[static_cast<std::size_t>(basis_[i])] = VarState::Basic;
    }

    // Phase-1 reduced costs: unit cost on artificials, so d1 = c1 minus the
    // sum of artificial-basic tableau rows.
    d1_.assign(width_, 0.0);
    for (std::size_t a = 0; a < na_; ++a) d1_[n_ + m_ + a] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < static_cast<int>(n_ + m_)) continue;
      const double* r = row(i);
      for (std::size_t k = 0; k < width_; ++k) d1_[k] -= r[k];
    }
    // Phase-2 reduced costs: the initial basis carries zero cost.
    d2_.assign(width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) d2_[j] = lp_.cost(static_cast<int>(j));
  }

  bool fixed(std::size_t j) const { return lo_[j] == hi_[j] && std::isfinite(lo_[j]); }

  // Entering column by Dantzig rule (largest reduced-cost magnitude) or
  // Bland's rule (lowest index) once stalling triggered.  Returns -1 at
  // optimality.  dir is +1 when the column will increase.
  int choose_entering(const std::vector<double>& d, int& dir) const {
    int best = -1, best_dir = 0;
    double best_score = opt_.opt_tol;
    for (std::size_t j = 0; j < width_; ++j) {
      if (state_[j] == VarState::Basic || fixed(j)) continue;
      double score = 0.0;
      int dj = 0;
      if (state_[j] == VarState::AtLower) {
        if (d[j] < -opt_.opt_tol) { score = -d[j]; dj = +1; }
      } else if (state_[j] == VarState::AtUpper) {
        if (d[j] > opt_.opt_tol) { score = d[j]; dj = -1; }
      } else { // free
        if (std::fabs(d[j]) > opt_.opt_tol) { score = std::fabs(d[j]); dj = d[j] < 0 ? +1 : -1; }
      }
      if (dj == 0) continue;
      if (bland_) { dir = dj; return static_cast<int>(j); }
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(j);
        best_dir = dj;
      }
    }
    dir = best_dir;
    return best;
  }

  SolveStatus iterate(std::vector<double>& d) {
    std::vector<double> alpha(m_);
    while (true) {
      if (iters_++ > opt_.iteration_limit) return SolveStatus::IterationLimit;
      int dir = 0;
      const int q = choose_entering(d, dir);
      if (q < 0) return SolveStatus::Optimal;
      const std::size_t qs = static_cast<std::size_t>(q);
      for (std::size_t i = 0; i < m_; ++i) alpha[i] = row(i)[qs];

      // Ratio test: the entering column moves by delta in direction dir;
      // basic variable i moves at rate -dir * alpha_i.
      double limit = kInf;
      if (std::isfinite(lo_[qs]) && std::isfinite(hi_[qs])) limit = hi_[qs] - lo_[qs];
      double best_delta = limit;
      int leave_row = -1;
      VarState leave_state = VarState::AtLower;
      for (std::size_t i = 0; i < m_; ++i) {
        if (std::fabs(alpha[i]) <= opt_.pivot_tol) continue;
        const double rate = -dir * alpha[i];
        const std::size_t b = static_cast<std::size_t>(basis_[i]);
        double delta;
        VarState hit;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          delta = std::max(0.0, xb_[i] - lo_[b]) / -rate;
          hit = VarState::AtLower;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          delta = std::max(0.0, hi_[b] - xb_[i]) / rate;
          hit = VarState::AtUpper;
        }
        const bool better =
            delta < best_delta - 1e-10 ||
            (delta < best_delta + 1e-10 && leave_row >= 0 && basis_[i] < basis_[leave_row]);
        if (better || leave_row < 0) {
          if (delta < best_delta) best_delta = delta;
          if (delta <= best_delta + 1e-10) {
            leave_row = static_cast<int>(i);
            leave_state = hit;
          }
        }
      }

      if (!std::isfinite(best_delta)) return SolveStatus::Unbounded;
      stall_ = (best_delta <= 1e-11) ? stall_ + 1 : 0;
      if (stall_ > opt_.stall_limit) bland_ = true;
      if (best_delta > 1e-11) bland_ = false;

      if (leave_row < 0 || (std::isfinite(limit) && limit <= best_delta)) {
        // Bound flip: the entering column crosses to its other bound.
        for (std::size_t i = 0; i < m_; ++i)
          if (alpha[i] != 0.0) xb_[i] -= dir * alpha[i] * limit;
        state_[qs] = (state_[qs] == VarState::AtLower) ? VarState::AtUpper : VarState::AtLower;
        val_[qs] = (state_[qs] == VarState::AtLower) ? lo_[qs] : hi_[qs];
        continue;
      }

      pivot(static_cast<std::size_t>(leave_row), qs, dir, best_delta, leave_state);
    }
  }

  void pivot(std::size_t r, std::size_t q, int dir, double delta, VarState leave_state) {
    const double enter_val = val_[q] + dir * delta;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double a = row(i)[q];
      if (a != 0.0) xb_[i] -= dir * a * delta;
    }
    const std::size_t l = static_cast<std::size_t>(basis_[r]);
    state_[l] = leave_state;
    val_[l] = (leave_state == VarState::AtLower) ? lo_[l] : hi_[l];
    if (l >= n_ + m_) { lo_[l] = hi_[l] = 0.0; val_[l] = 0.0; } // retire artificial

    double* pr = row(r);
    const double piv = pr[q];
    const double inv = 1.0 / piv;
    for (std::size_t k = 0; k < width_; ++k) pr[k] *= inv;
    pr[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ri = row(i);
      const double f = ri[q];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < width_; ++k) ri[k] -= f * pr[k];
      ri[q] = 0.0;
    }
    if (phase_ == 1) {
      const double f1 = d1_[q];
      if (f1 != 0.0) {
        for (std::size_t k = 0; k < width_; ++k) d1_[k] -= f1 * pr[k];
        d1_[q] = 0.0;
      }
    }
    const double f2 = d2_[q];
    if (f2 != 0.0) {
      for (std::size_t k = 0; k < width_; ++k) d2_[k] -= f2 * pr[k];
      d2_[q] = 0.0;
    }
    basis_[r] = static_cast<int>(q);
    state_[q] = VarState::Basic;
    xb_[r] = enter_val;
  }

  // Phase 1: drive the artificial mass to zero, then pivot leftover
  // artificials out of the basis (rows with no eligible pivot are redundant).
  bool phase_one(Solution& out) {
    if (na_ > 0) {
      const SolveStatus st = iterate(d1_);
      if (st != SolveStatus::Optimal) {
        out.status = st;
        return false;
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= static_cast<int>(n_ + m_)) infeas += std::fabs(xb_[i]);
      if (infeas > opt_.feas_tol) {
        out.status = SolveStatus::Infeasible;
        return false;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] < static_cast<int>(n_ + m_)) continue;
        double* ri = row(i);
        int target = -1;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
          if (state_[j] == VarState::Basic) continue;
          if (std::fabs(ri[j]) > opt_.pivot_tol * 10) { target = static_cast<int>(j); break; }
        }
        if (target >= 0)
          pivot(i, static_cast<std::size_t>(target), +1, 0.0, VarState::AtLower);
        // else: redundant row, its artificial stays basic pinned at zero
      }
      for (std::size_t a = 0; a < na_; ++a) {
        const std::size_t col = n_ + m_ + a;
        if (state_[col] != VarState::Basic) { lo_[col] = hi_[col] = 0.0; val_[col] = 0.0; }
      }
    }
    return true;
  }

  void finish(Solution& out) {
    out.iterations = iters_;
    out.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) out.x[j] = val_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = static_cast<std::size_t>(basis_[i]);
      if (b < n_) out.x[b] = xb_[i];
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective += lp_.cost(static_cast<int>(j)) * out.x[j];

    out.duals.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) out.duals[i] = -d2_[n_ + i];
    out.reduced_costs.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) out.reduced_costs[j] = lp_.cost(static_cast<int>(j));
    for (std::size_t i = 0; i < m_; ++i) {
      if (out.duals[i] == 0.0) continue;
      for (const auto& [col, v] : lp_.row(static_cast<int>(i)))
        out.reduced_costs[static_cast<std::size_t>(col)] -= out.duals[i] * v;
    }

    if (out.status != SolveStatus::Optimal) return;

    // Honest diagnostics, recomputed from x and duals only.
    double pres = 0.0;
    double comp = 0.0;
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double ax = 0.0;
      for (const auto& [col, v] : lp_.row(static_cast<int>(i)))
        ax += v * out.x[static_cast<std::size_t>(col)];
      const double b = lp_.rhs(static_cast<int>(i));
      switch (lp_.sense(static_cast<int>(i))) {
        case Sense::LessEqual: pres = std::max(pres, ax - b); break;
        case Sense::GreaterEqual: pres = std::max(pres, b - ax); break;
        case Sense::Equal: pres = std::max(pres, std::fabs(ax - b)); break;
      }
      comp = std::max(comp, std::fabs(out.duals[i] * (ax - b)));
      dual_obj += out.duals[i] * b;
    }
    double scale = 1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double lo = lp_.lower(static_cast<int>(j)), hi = lp_.upper(static_cast<int>(j));
      pres = std::max(pres, lo - out.x[j]);
      pres = std::max(pres, out.x[j] - hi);
      const double dj = out.reduced_costs[j];
      if (dj > opt_.opt_tol) {
        if (std::isfinite(lo)) { dual_obj += dj * lo; comp = std::max(comp, dj * (out.x[j] - lo)); }
      } else if (dj < -opt_.opt_tol) {
        if (std::isfinite(hi)) { dual_obj += dj * hi; comp = std::max(comp, -dj * (hi - out.x[j])); }
      }
      scale = std::max(scale, std::fabs(out.x[j]));
    }
    out.primal_residual = pres;
    out.complementarity = comp;
    out.duality_gap = std::fabs(out.objective - dual_obj) / std::max(1.0, std::fabs(out.objective));

    const double deg_tol = 1e-9 * scale;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = static_cast<std::size_t>(basis_[i]);
      const double margin = std::min(std::isfinite(lo_[b]) ? xb_[i] - lo_[b] : kInf,
                                     std::isfinite(hi_[b]) ? hi_[b] - xb_[i] : kInf);
      if (margin < deg_tol) out.primal_degenerate = true;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::Basic || fixed(j)) continue;
      if (std::fabs(out.reduced_costs[j]) < 1e-9) out.dual_degenerate = true;
    }
  }
};

} // namespace

SimplexOptions SimplexOptions::from_env() {
  SimplexOptions o;
  o.feas_tol = env_double("REGMKT_LP_FEAS_TOL", o.feas_tol);
  o.iteration_limit = env_long("REGMKT_LP_ITERS", o.iteration_limit);
  return o;
}

MipOptions MipOptions::from_env() {
  MipOptions o;
  o.gap_tol = env_double("REGMKT_MIP_GAP", o.gap_tol);
  o.node_limit = env_long("REGMKT_MIP_NODES", o.node_limit);
  return o;
}

Solution solve(const LinearProgram& lp, const SimplexOptions& opt) {
  lp.validate();
  Simplex s(lp, opt);
  return s.run();
}

namespace {

struct Node {
  double bound;
  int depth;
  long id;
  std::vector<std::pair<int, int>> fixes; // (column, 0/1)
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

} // namespace

Solution solve_mip(const LinearProgram& lp_in, const std::vector<int>& binaries,
                   const MipOptions& opt) {
  lp_in.validate();
  for (int j : binaries) {
    if (j < 0 || static_cast<std::size_t>(j) >= lp_in.num_variables())
      throw std::invalid_argument("solve_mip: bad binary column index");
    if (lp_in.lower(j) < -1e-12 || lp_in.upper(j) > 1.0 + 1e-12)
      throw std::invalid_argument("solve_mip: binary column " + lp_in.variable_name(j) +
                                  " must have bounds within [0, 1]");
  }

  LinearProgram lp = lp_in; // scratch copy, bounds patched per node
  std::vector<std::pair<double, double>> saved;
  saved.reserve(binaries.size());
  for (int j : binaries) saved.emplace_back(lp.lower(j), lp.upper(j));

  std::priority_queue<Node, std::vector<Node>, NodeWorse> open;
  open.push(Node{-kInf, 0, 0, {}});
  long next_id = 1, nodes = 0;
  Solution incumbent;
  bool have_incumbent = false;
  bool out_of_nodes = false;
  double best_open_bound = -kInf;

  const auto rel_gap = [&](double lo) {
    if (!have_incumbent) return kInf;
    return std::max(0.0, incumbent.objective - lo) / std::max(1.0, std::fabs(incumbent.objective));
  };

  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    best_open_bound = node.bound;
    if (have_incumbent && rel_gap(node.bound) <= opt.gap_tol) break;
    if (nodes >= opt.node_limit) { out_of_nodes = true; break; }
    ++nodes;

    for (std::size_t k = 0; k < binaries.size(); ++k)
      lp.set_bounds(binaries[k], saved[k].first, saved[k].second);
    for (const auto& [col, v] : node.fixes)
      lp.set_bounds(col, static_cast<double>(v), static_cast<double>(v));

    Solution rel = solve(lp, opt.lp);
    if (rel.status == SolveStatus::Infeasible) continue;
    if (rel.status == SolveStatus::Unbounded) {
      rel.nodes = nodes;
      return rel;
    }
    if (rel.status != SolveStatus::Optimal) continue; // iteration limit: drop node
    if (have_incumbent && rel.objective >= incumbent.objective - 1e-12 &&
        rel_gap(rel.objective) <= opt.gap_tol)
      continue;

    int frac_col = -1;
    double frac_score = opt.integrality_tol;
    for (int j : binaries) {
      const double v = rel.x[static_cast<std::size_t>(j)];
      const double f = std::min(v - std::floor(v), std::ceil(v) - v);
      if (f > frac_score) { frac_score = f; frac_col = j; }
    }
    if (frac_col < 0) {
      if (!have_incumbent || rel.objective < incumbent.objective - 1e-12) {
        incumbent = rel;
        have_incumbent = true;
      }
      continue;
    }
    for (int v = 0; v <= 1; ++v) {
      Node child{rel.objective, node.depth + 1, next_id++, node.fixes};
      child.fixes.emplace_back(frac_col, v);
      if (have_incumbent && rel_gap(child.bound) <= opt.gap_tol) continue;
      open.push(child);
    }
  }

  if (!have_incumbent) {
    Solution out;
    out.status = out_of_nodes ? SolveStatus::NodeLimit : SolveStatus::Infeasible;
    out.nodes = nodes;
    return out;
  }
  incumbent.nodes = nodes;
  const double lo = open.empty() && !out_of_nodes ? incumbent.objective
                                                  : std::min(best_open_bound, incumbent.objective);
  incumbent.gap = std::max(0.0, incumbent.objective - lo) /
                  std::max(1.0, std::fabs(incumbent.objective));
  incumbent.status = (out_of_nodes && incumbent.gap > opt.gap_tol) ? SolveStatus::NodeLimit
                                                                   : SolveStatus::Optimal;
  return incumbent;
}

namespace {

std::string sanitize(const std::string& s, const char* fallback, std::size_t index) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())))
    out = fallback + std::to_string(index) + "_" + out;
  return out;
}

void write_term(std::ostream& os, double v, const std::string& name, bool first) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", std::fabs(v));
  os << (v < 0 ? (first ? "- " : " - ") : (first ? "" : " + ")) << buf << " " << name;
}

} // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& os, const std::vector<int>& binaries) {
  char buf[64];
  std::vector<std::string> vn(lp.num_variables()), rn(lp.num_constraints());
  for (std::size_t j = 0; j < vn.size(); ++j)
    vn[j] = sanitize(lp.variable_name(static_cast<int>(j)), "x", j);
  for (std::size_t i = 0; i < rn.size(); ++i)
    rn[i] = sanitize(lp.constraint_name(static_cast<int>(i)), "c", i);

  os << "Minimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < vn.size(); ++j) {
    const double c = lp.cost(static_cast<int>(j));
    if (c == 0.0) continue;
    os << " ";
    write_term(os, c, vn[j], first);
    first = false;
  }
  if (first) os << " 0 " << (vn.empty() ? "x0" : vn[0]);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < rn.size(); ++i) {
    os << " " << rn[i] << ":";
    // Merge duplicate columns for readability.
    std::vector<std::pair<int, double>> terms(lp.row(static_cast<int>(i)));
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [col, v] : terms) {
      if (!merged.empty() && merged.back().first == col)
        merged.back().second += v;
      else
        merged.emplace_back(col, v);
    }
    first = true;
    for (const auto& [col, v] : merged) {
      if (v == 0.0) continue;
      os << " ";
      write_term(os, v, vn[static_cast<std::size_t>(col)], first);
      first = false;
    }
    if (first) os << " 0 " << (vn.empty() ? "x0" : vn[0]);
    const char* rel = "=";
    if (lp.sense(static_cast<int>(i)) == Sense::LessEqual) rel = "<=";
    if (lp.sense(static_cast<int>(i)) == Sense::GreaterEqual) rel = ">=";
    std::snprintf(buf, sizeof(buf), "%.12g", lp.rhs(static_cast<int>(i)));
    os << " " << rel << " " << buf << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < vn.size(); ++j) {
    const double lo = lp.lower(static_cast<int>(j)), hi = lp.upper(static_cast<int>(j));
    if (lo == -kInf && hi == kInf) {
      os << " " << vn[j] << " free\n";
    } else if (lo == hi) {
      std::snprintf(buf, sizeof(buf), "%.12g", lo);
      os << " " << vn[j] << " = " << buf << "\n";
    } else {
      if (lo == -kInf)
        os << " -inf";
      else {
        std::snprintf(buf, sizeof(buf), "%.12g", lo);
        os << " " << buf;
      }
      os << " <= " << vn[j] << " <= ";
      if (hi == kInf)
        os << "+inf\n";
      else {
        std::snprintf(buf, sizeof(buf), "%.12g", hi);
        os << buf << "\n";
      }
    }
  }
  if (!binaries.empty()) {
    os << "Binaries\n";
    for (int j : binaries) os << " " << vn[static_cast<std::size_t>(j)] << "\n";
  }
  os << "End\n";
}

} // namespace regmkt::lp
