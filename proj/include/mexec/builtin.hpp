#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mexec/model.hpp"

namespace mexec {

/// Constant impact gamma (frame from its eigendecomposition) and constant resilience.
MarketSpec constant_market(const Matrix& gamma, const Matrix& rho, double horizon, const Vector& x0,
                           int grid_steps = 1000);

/// Named scenarios behind the built-in examples:
/// crossing (two-asset OW, rho3 = -1), risk (cross risk weight), impact (rotating impact),
/// impact_noise (rotating stochastic impact), blowup (indefinite kappa), ow (commuting OW pair).
MarketSpec builtin_spec(std::string_view id);
std::vector<std::string> builtin_spec_ids();

}  // namespace mexec
