#include "torelli/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <Eigen/Dense>

#include "torelli/errors.hpp"

namespace torelli::quad {

Rule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw InputError("quadrature order must be positive");
  if (alpha <= -1.0 || beta <= -1.0) throw InputError("Jacobi exponents must exceed -1");
  const double ab = alpha + beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      J(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      J(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double bk;
    if (k == 1) {
      bk = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    J(k, k - 1) = J(k - 1, k) = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(ab + 2.0));
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

namespace {

std::mutex cache_mutex;

const Rule& cached(std::map<std::pair<int, long long>, std::unique_ptr<Rule>>& cache, int n, double mu, bool jacobi) {
  const std::pair<int, long long> key{n, std::llround(mu * 1e12)};
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  Rule base = gauss_jacobi(n, 0.0, jacobi ? -mu : 0.0);
  auto r = std::make_unique<Rule>();
  r->x.resize(n);
  r->w.resize(n);
  const double scale = jacobi ? std::pow(2.0, mu - 1.0) : 0.5;
  for (int i = 0; i < n; ++i) {
    r->x[i] = 0.5 * (base.x[i] + 1.0);
    r->w[i] = base.w[i] * scale;
  }
  auto& slot = cache[key];
  slot = std::move(r);
  return *slot;
}

}  // namespace

const Rule& legendre01(int n) {
  static std::map<std::pair<int, long long>, std::unique_ptr<Rule>> cache;
  return cached(cache, n, 0.0, false);
}

const Rule& jacobi_left01(int n, double mu) {
  static std::map<std::pair<int, long long>, std::unique_ptr<Rule>> cache;
  return cached(cache, n, mu, true);
}

}  // namespace torelli::quad
