#pragma once

#include <vector>

namespace torelli::quad {

// Nodes and weights on [0, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Golub-Welsch rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
Rule gauss_jacobi(int n, double alpha, double beta);

// Cached rules on [0, 1]: weight 1, and weight t^{-mu}.
const Rule& legendre01(int n);
const Rule& jacobi_left01(int n, double mu);

}  // namespace torelli::quad
