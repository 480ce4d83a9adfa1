#pragma once

#include <utility>
#include <vector>

namespace percond {

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_01(int n);

} // namespace percond
