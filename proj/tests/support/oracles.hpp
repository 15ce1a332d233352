#pragma once

// Independent reference computations for tests. None of these call into the
// implementation paths they are used to check.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mdat/spectral_frontend.hpp"

namespace mdat::testing {

/// X_k = sum_n x_n exp(-2 pi i n k / N), evaluated term by term in long double.
std::array<std::complex<double>, kFrameSize> direct_dft(const std::array<double, kFrameSize>& x);

/// x_n = (1/N) sum_k X_k exp(2 pi i n k / N), long double accumulation.
std::array<std::complex<double>, kFrameSize> direct_idft(const std::array<std::complex<double>, kFrameSize>& x);

/// Classic fourth-order Runge-Kutta for du/dt = G u.
Eigen::VectorXd rk4_linear(const Eigen::MatrixXd& g, const Eigen::VectorXd& u0, double t, double step);

/// Taylor series for exp(M), with enough terms for ||M|| <= ~4.
Eigen::MatrixXd taylor_exponential(const Eigen::MatrixXd& m, int terms = 60);

/// Box-constrained least squares by enumerating every lower/upper/free assignment.
/// Exponential in the dimension; intended for n <= 7.
Eigen::VectorXd enumerate_box_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Plain projected gradient with step 1/||M||_2^2.
Eigen::VectorXd projected_gradient_descent(const Eigen::MatrixXd& m, const Eigen::VectorXd& d,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           int iterations);

/// Random positive vector summing to one.
std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n);

}  // namespace mdat::testing
