#include "tinlinq/lp.hpp"

#include "tinlinq/error.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace tinlinq {
namespace {

// Tableau layout: rows 0..m-1 constraints, row m the phase-2 objective,
// row m+1 the phase-1 objective. Column n is the phase-1 artificial
// variable, column n+1 the right-hand side.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
          const LpOptions& options)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        opt_(options),
        basis_(m_),
        nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) d_[i][j] = a(i, j);
      basis_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_[m_][j] = -c(j);
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult out;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && d_[r][n_ + 1] < -opt_.eps) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -opt_.eps) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = 0;
        for (int j = 1; j <= n_; ++j) {
          if (better(d_[i], j, s)) s = j;
        }
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    out.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) out.x(basis_[i]) = d_[i][n_ + 1];
    }
    if (!bounded) {
      out.status = LpStatus::Unbounded;
      out.objective = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = LpStatus::Optimal;
    out.objective = d_[m_][n_ + 1];
    return out;
  }

 private:
  bool better(const std::vector<double>& row, int j, int s) const {
    return std::make_pair(row[j], nonbasis_[j]) < std::make_pair(row[s], nonbasis_[s]);
  }

  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_[i][s]) <= opt_.eps) continue;
      const double factor = d_[i][s] * inv;
      auto& row = d_[i];
      const auto& prow = d_[r];
      for (int j = 0; j < n_ + 2; ++j) row[j] -= prow[j] * factor;
      row[s] = prow[s] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) d_[r][j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) d_[i][s] *= -inv;
    }
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Dantzig pricing, falling back to Bland's rule after a run of degenerate
  // pivots so that cycling cannot occur.
  bool run(int phase) {
    const int obj = m_ + phase - 1;
    int degenerate_run = 0;
    for (long pivots = 0; pivots < opt_.max_pivots; ++pivots) {
      const bool bland = degenerate_run > 50;
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        if (bland) {
          if (d_[obj][j] < -opt_.eps && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
        } else if (s == -1 || better(d_[obj], j, s)) {
          s = j;
        }
      }
      if (s == -1 || d_[obj][s] >= -opt_.eps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] <= opt_.eps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s];
        const double rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs - opt_.eps || (lhs <= rhs + opt_.eps && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      degenerate_run = d_[r][n_ + 1] / d_[r][s] <= opt_.eps ? degenerate_run + 1 : 0;
      pivot(r, s);
    }
    throw Error(ErrorCode::ConvergenceFailure, "simplex pivot limit reached");
  }

  int m_;
  int n_;
  LpOptions opt_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const LpOptions& options) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw Error(ErrorCode::ShapeError, "LP dimensions are inconsistent");
  }
  return Tableau(a, b, c, options).solve();
}

}  // namespace tinlinq
