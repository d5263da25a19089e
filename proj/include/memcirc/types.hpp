#pragma once

#include <Eigen/Dense>

namespace memcirc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::MatrixXi;

}  // namespace memcirc
