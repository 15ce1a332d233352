#include "mdat/box_least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mdat/error.hpp"

namespace mdat {
namespace {

enum class VarState { kFree, kLower, kUpper, kFixed };

Eigen::VectorXd gradient(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& x) {
  return m.transpose() * (m * x - d);
}

}  // namespace

double box_projected_gradient(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = gradient(m, d, x);
  const Eigen::VectorXd stepped = (x - g).cwiseMax(lower).cwiseMin(upper);
  return (x - stepped).norm();
}

BoxLeastSquaresResult solve_box_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper,
                                              const BoxLeastSquaresOptions& options) {
  const Eigen::Index n = m.cols();
  if (d.size() != m.rows() || lower.size() != n || upper.size() != n) {
    throw Error(ErrorKind::kArgument, "box least squares: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw Error(ErrorKind::kArgument, "box least squares: empty box");
  }

  const double bound = n > 0 ? std::max(lower.cwiseAbs().maxCoeff(), upper.cwiseAbs().maxCoeff()) : 0.0;
  const double scale = std::max(1.0, m.norm() * (d.norm() + m.norm() * bound));
  const double kkt_tolerance = 1e-13 * scale;

  std::vector<VarState> state(static_cast<std::size_t>(n), VarState::kFree);
  Eigen::VectorXd x(n);
  {
    const Eigen::VectorXd unconstrained = m.completeOrthogonalDecomposition().solve(d);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& s = state[static_cast<std::size_t>(i)];
      if (lower[i] == upper[i]) {
        s = VarState::kFixed;
        x[i] = lower[i];
      } else if (!(unconstrained[i] > lower[i])) {
        s = VarState::kLower;
        x[i] = lower[i];
      } else if (!(unconstrained[i] < upper[i])) {
        s = VarState::kUpper;
        x[i] = upper[i];
      } else {
        x[i] = unconstrained[i];
      }
    }
  }

  BoxLeastSquaresResult result;
  int iterations = 0;
  bool kkt_ok = false;

  while (iterations < options.max_iterations) {
    // Minimize over the free set, stepping back to the box whenever the subspace
    // solution leaves it.
    while (iterations < options.max_iterations) {
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (state[static_cast<std::size_t>(i)] == VarState::kFree) free.push_back(i);
      }
      if (free.empty()) break;
      ++iterations;

      Eigen::VectorXd rhs = d;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (state[static_cast<std::size_t>(i)] != VarState::kFree) rhs -= m.col(i) * x[i];
      }
      Eigen::MatrixXd sub(m.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t f = 0; f < free.size(); ++f) sub.col(static_cast<Eigen::Index>(f)) = m.col(free[f]);
      const Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(rhs);

      double alpha = 1.0;
      for (std::size_t f = 0; f < free.size(); ++f) {
        const Eigen::Index i = free[f];
        const double zi = z[static_cast<Eigen::Index>(f)];
        if (zi < lower[i]) {
          alpha = std::min(alpha, (lower[i] - x[i]) / (zi - x[i]));
        } else if (zi > upper[i]) {
          alpha = std::min(alpha, (upper[i] - x[i]) / (zi - x[i]));
        }
      }
      alpha = std::clamp(alpha, 0.0, 1.0);

      bool bound_any = false;
      for (std::size_t f = 0; f < free.size(); ++f) {
        const Eigen::Index i = free[f];
        const double zi = z[static_cast<Eigen::Index>(f)];
        const double xi = alpha == 1.0 ? zi : x[i] + alpha * (zi - x[i]);
        const double slack = 1e-14 * (1.0 + std::abs(upper[i] - lower[i]));
        auto& s = state[static_cast<std::size_t>(i)];
        if (xi <= lower[i] + (alpha < 1.0 ? slack : 0.0)) {
          x[i] = lower[i];
          if (alpha < 1.0 || xi < lower[i]) {
            s = VarState::kLower;
            bound_any = true;
          }
        } else if (xi >= upper[i] - (alpha < 1.0 ? slack : 0.0)) {
          x[i] = upper[i];
          if (alpha < 1.0 || xi > upper[i]) {
            s = VarState::kUpper;
            bound_any = true;
          }
        } else {
          x[i] = xi;
        }
      }
      if (!bound_any) break;
    }

    // Release the bound variable whose multiplier most strongly points inward.
    const Eigen::VectorXd g = gradient(m, d, x);
    double worst = kkt_tolerance;
    Eigen::Index release = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const VarState s = state[static_cast<std::size_t>(i)];
      const double violation = s == VarState::kLower ? -g[i] : s == VarState::kUpper ? g[i] : 0.0;
      if (violation > worst) {
        worst = violation;
        release = i;
      }
    }
    if (release < 0) {
      kkt_ok = true;
      break;
    }
    state[static_cast<std::size_t>(release)] = VarState::kFree;
    ++iterations;
  }

  result.x = x;
  result.residual = (m * x - d).norm();
  result.projected_gradient = box_projected_gradient(m, d, lower, upper, x);
  result.iterations = iterations;
  result.converged = kkt_ok && result.projected_gradient < options.gradient_tolerance;
  return result;
}

}  // namespace mdat
