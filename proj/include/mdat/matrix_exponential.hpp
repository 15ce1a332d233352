#pragma once

#include <Eigen/Dense>

namespace mdat {

/// exp(M) by scaling and squaring with a degree-13 Pade approximant.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

}  // namespace mdat
