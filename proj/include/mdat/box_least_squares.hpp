#pragma once

#include <Eigen/Dense>

namespace mdat {

struct BoxLeastSquaresOptions {
  int max_iterations = 10000;
  /// Convergence threshold on the projected-gradient norm.
  double gradient_tolerance = 1e-8;
};

struct BoxLeastSquaresResult {
  Eigen::VectorXd x;
  double residual = 0.0;           // ||M x - d||_2
  double projected_gradient = 0.0;  // ||x - clamp(x - grad)||_2
  int iterations = 0;
  bool converged = false;
};

/// Minimizes ||M x - d||_2 subject to lower <= x <= upper.
///
/// Primal active-set method: free variables are solved exactly by a rank-revealing
/// least-squares factorization, bounded variables are released when their
/// multiplier has the wrong sign. Variables with lower == upper stay fixed. Never
/// throws on non-convergence; check `converged`.
BoxLeastSquaresResult solve_box_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper,
                                              const BoxLeastSquaresOptions& options = {});

/// Projected-gradient norm of x for the problem above.
double box_projected_gradient(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              const Eigen::VectorXd& x);

}  // namespace mdat
