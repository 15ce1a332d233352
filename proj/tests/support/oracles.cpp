#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mdat::testing {

std::array<std::complex<double>, kFrameSize> direct_dft(const std::array<double, kFrameSize>& x) {
  std::array<std::complex<double>, kFrameSize> out;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t k = 0; k < kFrameSize; ++k) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t n = 0; n < kFrameSize; ++n) {
      // Reduce n*k mod N first so the angle stays small and exact.
      const long double angle = two_pi * static_cast<long double>((n * k) % kFrameSize) / kFrameSize;
      re += x[n] * std::cos(angle);
      im -= x[n] * std::sin(angle);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

std::array<std::complex<double>, kFrameSize> direct_idft(const std::array<std::complex<double>, kFrameSize>& x) {
  std::array<std::complex<double>, kFrameSize> out;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t n = 0; n < kFrameSize; ++n) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t k = 0; k < kFrameSize; ++k) {
      const long double angle = two_pi * static_cast<long double>((n * k) % kFrameSize) / kFrameSize;
      const long double c = std::cos(angle);
      const long double s = std::sin(angle);
      re += x[k].real() * c - x[k].imag() * s;
      im += x[k].real() * s + x[k].imag() * c;
    }
    out[n] = {static_cast<double>(re / kFrameSize), static_cast<double>(im / kFrameSize)};
  }
  return out;
}

Eigen::VectorXd rk4_linear(const Eigen::MatrixXd& g, const Eigen::VectorXd& u0, double t, double step) {
  const int steps = static_cast<int>(std::ceil(t / step - 1e-9));
  const double h = t / steps;
  Eigen::VectorXd u = u0;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = g * u;
    const Eigen::VectorXd k2 = g * (u + 0.5 * h * k1);
    const Eigen::VectorXd k3 = g * (u + 0.5 * h * k2);
    const Eigen::VectorXd k4 = g * (u + h * k3);
    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

Eigen::MatrixXd taylor_exponential(const Eigen::MatrixXd& m, int terms) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd term = sum;
  for (int i = 1; i <= terms; ++i) {
    term = term * m / static_cast<double>(i);
    sum += term;
  }
  return sum;
}

Eigen::VectorXd enumerate_box_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(m.cols());
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;

  Eigen::VectorXd best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (int code = 0; code < combos; ++code) {
    Eigen::VectorXd x(n);
    std::vector<int> free;
    int c = code;
    bool redundant = false;
    for (int i = 0; i < n; ++i) {
      const int choice = c % 3;
      c /= 3;
      if (lower[i] == upper[i] && choice != 0) redundant = true;
      if (choice == 0) x[i] = lower[i];
      else if (choice == 1) x[i] = upper[i];
      else free.push_back(i);
    }
    if (redundant) continue;
    if (!free.empty()) {
      Eigen::VectorXd rhs = d;
      for (int i = 0; i < n; ++i) {
        if (std::find(free.begin(), free.end(), i) == free.end()) rhs -= m.col(i) * x[i];
      }
      Eigen::MatrixXd sub(m.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t f = 0; f < free.size(); ++f) sub.col(static_cast<Eigen::Index>(f)) = m.col(free[f]);
      const Eigen::VectorXd z = sub.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
      bool feasible = true;
      for (std::size_t f = 0; f < free.size(); ++f) {
        const int i = free[f];
        const double zi = z[static_cast<Eigen::Index>(f)];
        if (zi < lower[i] - 1e-12 || zi > upper[i] + 1e-12) feasible = false;
        x[i] = std::clamp(zi, lower[i], upper[i]);
      }
      if (!feasible) continue;
    }
    const double objective = (m * x - d).squaredNorm();
    if (objective < best_objective) {
      best_objective = objective;
      best = x;
    }
  }
  return best;
}

Eigen::VectorXd projected_gradient_descent(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           int iterations) {
  const double spectral = m.jacobiSvd().singularValues()[0];
  const double step = 1.0 / (spectral * spectral);
  Eigen::VectorXd x = (0.5 * (lower + upper)).eval();
  for (int it = 0; it < iterations; ++it) {
    x = (x - step * m.transpose() * (m * x - d)).cwiseMax(lower).cwiseMin(upper);
  }
  return x;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> exp_dist(1.0);
  std::vector<double> out(n);
  double sum = 0.0;
  for (double& x : out) {
    x = exp_dist(rng) + 1e-3;
    sum += x;
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace mdat::testing
