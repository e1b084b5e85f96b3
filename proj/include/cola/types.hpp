#pragma once

#include <Eigen/Dense>

namespace cola {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace cola
