#include "mdat/spectral_smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdat/error.hpp"
#include "mdat/matrix_exponential.hpp"

namespace mdat {

std::vector<double> tilde_c(std::span<const double> psi) {
  const double n = static_cast<double>(psi.size());
  const double sum = std::accumulate(psi.begin(), psi.end(), 0.0);
  std::vector<double> out(psi.size(), 0.0);
  if (sum <= 0.0) return out;
  double largest = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    out[k] = 1.0 - psi[k] * n / sum;
    largest = std::max(largest, std::abs(out[k]));
  }
  if (largest <= 1e-12) std::fill(out.begin(), out.end(), 0.0);
  return out;
}

Eigen::MatrixXd FlowOperators::generator() const {
  return (Eigen::MatrixXd::Identity(r.rows(), r.cols()) - r) * a;
}

FlowOperators build_operators(const SmoothingProblem& problem) {
  const Eigen::Index n = problem.u0.size();
  FlowOperators ops;
  ops.a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ops.a(i, i) = (i == 0 || i == n - 1) ? -1.0 : -2.0;
    if (i + 1 < n) {
      ops.a(i, i + 1) = 1.0;
      ops.a(i + 1, i) = 1.0;
    }
  }
  if (n == 1) ops.a(0, 0) = 0.0;

  ops.r = Eigen::MatrixXd::Zero(n, n);
  for (const SmoothingBand& band : problem.bands) {
    if (band.offset + band.width > static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::kArgument, "smoothing band exceeds the problem size");
    }
    const auto off = static_cast<Eigen::Index>(band.offset);
    const auto width = static_cast<Eigen::Index>(band.width);
    ops.r.block(off, off, width, width).setConstant(1.0 / static_cast<double>(band.width));
    if (!band.constrain_theta) continue;
    const std::vector<double> ct = tilde_c(band.psi);
    const double norm2 = std::inner_product(ct.begin(), ct.end(), ct.begin(), 0.0);
    if (norm2 == 0.0) continue;
    for (Eigen::Index i = 0; i < width; ++i) {
      for (Eigen::Index j = 0; j < width; ++j) {
        ops.r(off + i, off + j) += ct[static_cast<std::size_t>(i)] * ct[static_cast<std::size_t>(j)] / norm2;
      }
    }
  }
  return ops;
}

Eigen::VectorXd flow(const SmoothingProblem& problem, const FlowOperators& ops, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::kArgument, "flow time must be >= 0");
  if (tau == 0.0) return problem.u0;
  return matrix_exponential(ops.generator() * tau) * problem.u0;
}

double smoothness(const Eigen::VectorXd& u) {
  double f = 0.0;
  for (Eigen::Index k = 0; k + 1 < u.size(); ++k) {
    const double d = u[k + 1] - u[k];
    f += d * d;
  }
  return 0.5 * f;
}

ConstraintResiduals constraint_residuals(const SmoothingProblem& problem, const Eigen::VectorXd& u) {
  ConstraintResiduals out;
  for (const SmoothingBand& band : problem.bands) {
    const auto off = static_cast<Eigen::Index>(band.offset);
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t k = 0; k < band.width; ++k) {
      const double rho = u[off + static_cast<Eigen::Index>(k)];
      sum += rho;
      weighted += band.psi[k] * rho;
    }
    out.sum = std::max(out.sum, std::abs(sum - 1.0));
    if (!band.constrain_theta) continue;
    out.theta = std::max(out.theta, std::abs(weighted - band.theta));

    const double psi_sum = std::accumulate(band.psi.begin(), band.psi.end(), 0.0);
    const std::vector<double> ct = tilde_c(band.psi);
    if (psi_sum <= 0.0) continue;
    double tilde = 0.0;
    for (std::size_t k = 0; k < band.width; ++k) tilde += ct[k] * u[off + static_cast<Eigen::Index>(k)];
    tilde += -1.0 + static_cast<double>(band.width) * band.theta / psi_sum;
    out.tilde_theta = std::max(out.tilde_theta, std::abs(tilde));
  }
  return out;
}

SmoothingProblem make_smoothing_problem(std::span<const double> rho, std::span<const double> c,
                                        std::span<const double> theta,
                                        const std::vector<bool>& active, const BandTable& table,
                                        double tau) {
  if (rho.size() != kTableBins || c.size() != kTableBins) {
    throw Error(ErrorKind::kArgument, "per-bin vectors must have 128 entries");
  }
  const std::size_t num_bands = table.bands().size();
  if (theta.size() != num_bands || active.size() != num_bands) {
    throw Error(ErrorKind::kArgument, "per-band vectors must have J+1 entries");
  }
  const Band& first = table.first_wide_band();
  const auto k0 = static_cast<std::size_t>(first.low_bin);

  SmoothingProblem problem;
  problem.tau = tau;
  problem.u0.resize(static_cast<Eigen::Index>(kTableBins - k0));
  for (std::size_t k = k0; k < kTableBins; ++k) problem.u0[static_cast<Eigen::Index>(k - k0)] = rho[k];

  for (int b = first.index; b <= table.num_ac_bands(); ++b) {
    const Band& band = table.band(b);
    SmoothingBand sb;
    sb.band = b;
    sb.offset = static_cast<std::size_t>(band.low_bin) - k0;
    sb.width = static_cast<std::size_t>(band.width);
    sb.psi.assign(c.begin() + band.low_bin, c.begin() + band.high_bin + 1);
    sb.theta = theta[static_cast<std::size_t>(b)];
    sb.constrain_theta = active[static_cast<std::size_t>(b)];
    problem.bands.push_back(std::move(sb));
  }
  return problem;
}

BinArray smooth_weights(std::span<const double> rho, std::span<const double> c,
                        std::span<const double> theta, const std::vector<bool>& active,
                        const BandTable& table, double tau) {
  if (rho.size() != kTableBins) throw Error(ErrorKind::kArgument, "rho must have 128 entries");
  BinArray out{};
  std::copy(rho.begin(), rho.end(), out.begin());
  if (tau == 0.0) return out;
  const SmoothingProblem problem = make_smoothing_problem(rho, c, theta, active, table, tau);
  const Eigen::VectorXd u = flow(problem, build_operators(problem));
  const auto k0 = static_cast<std::size_t>(table.first_wide_band().low_bin);
  for (std::size_t k = k0; k < kTableBins; ++k) out[k] = u[static_cast<Eigen::Index>(k - k0)];
  return out;
}

}  // namespace mdat
