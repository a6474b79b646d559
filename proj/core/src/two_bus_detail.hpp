#pragma once

#include "mudae/model.hpp"

namespace mudae::detail {

// Closed-form DAE right-hand sides of the built-in 2-bus model, expanded
// real form (the complex-arithmetic route lives in the tests as an oracle).
Residuals two_bus_residuals(const TwoBusParams& p, const Eigen::VectorXd& physical);

} // namespace mudae::detail
