#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mdat/band_tables.hpp"
#include "mdat/forward_transform.hpp"

namespace mdat {

/// Flow time used when the caller does not pick one; the flow is close to its
/// steady state by then.
inline constexpr double kDefaultFlowTime = 2.0;

/// One band of the smoothing region, located at `offset` within u.
struct SmoothingBand {
  int band = 0;
  std::size_t offset = 0;
  std::size_t width = 0;
  std::vector<double> psi;  // c(k) over the band
  double theta = 0.0;
  /// When false only the unit-sum constraint is imposed (silent band).
  bool constrain_theta = true;
};

/// Squared weights u over a contiguous run of bands of width >= 3, to be smoothed
/// by the flow du/dtau = (I - R) A u.
struct SmoothingProblem {
  Eigen::VectorXd u0;
  std::vector<SmoothingBand> bands;
  double tau = kDefaultFlowTime;
};

/// 1 - c_k N_b / sum_j c_j over the band; sums to zero. Returns all zeros when
/// sum c is zero or c is constant on the band (the theta constraint is then implied
/// by the unit sum).
std::vector<double> tilde_c(std::span<const double> psi);

struct FlowOperators {
  Eigen::MatrixXd a;  // tridiagonal, diag (-1, -2, ..., -2, -1), off-diagonals 1
  Eigen::MatrixXd r;  // block-diagonal orthogonal projector onto span{1, tilde c} per band

  /// (I - R) A
  Eigen::MatrixXd generator() const;
};

FlowOperators build_operators(const SmoothingProblem& problem);

/// u(tau) = exp((I - R) A tau) u0.
Eigen::VectorXd flow(const SmoothingProblem& problem, const FlowOperators& ops, double tau);
inline Eigen::VectorXd flow(const SmoothingProblem& problem, const FlowOperators& ops) {
  return flow(problem, ops, problem.tau);
}

/// f(u) = 1/2 sum (u_{k+1} - u_k)^2.
double smoothness(const Eigen::VectorXd& u);

struct ConstraintResiduals {
  double sum = 0.0;          // max_b |g_b(u)|, g_b = sum rho - 1
  double theta = 0.0;        // max_b |h_b(u)|, h_b = sum c rho - theta
  double tilde_theta = 0.0;  // max_b |h~_b(u)|
};

ConstraintResiduals constraint_residuals(const SmoothingProblem& problem, const Eigen::VectorXd& u);

/// Builds the problem for the wide-band region of `table` from per-bin squared
/// weights (bins 0..127), per-bin c, and per-band theta. Bands where `active` is
/// false only keep the unit-sum constraint.
SmoothingProblem make_smoothing_problem(std::span<const double> rho, std::span<const double> c,
                                        std::span<const double> theta,
                                        const std::vector<bool>& active, const BandTable& table,
                                        double tau);

/// Returns rho with the wide-band region replaced by its flowed values. Bins of
/// bands narrower than 3 are untouched. No clamping is applied.
BinArray smooth_weights(std::span<const double> rho, std::span<const double> c,
                        std::span<const double> theta, const std::vector<bool>& active,
                        const BandTable& table, double tau);

}  // namespace mdat
