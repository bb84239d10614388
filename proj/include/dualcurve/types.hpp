#pragma once

#include <Eigen/Dense>

namespace dualcurve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace dualcurve
