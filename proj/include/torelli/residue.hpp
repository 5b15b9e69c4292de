#pragma once

// V = Lambda / theta Lambda over F3, q(v) = h(v,v) mod 3, and its orthogonal group.

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "torelli/eisenstein.hpp"
#include "torelli/errors.hpp"

namespace torelli::residue {

inline std::uint8_t f3(long long v) { return static_cast<std::uint8_t>(((v % 3) + 3) % 3); }
inline std::uint8_t f3_inv(std::uint8_t v) { return v == 1 ? 1 : 2; }

template <std::size_t N>
using F3Vec = std::array<std::uint8_t, N>;

template <std::size_t N>
struct F3Mat {
  std::array<std::array<std::uint8_t, N>, N> m{};

  static F3Mat identity() {
    F3Mat r;
    for (std::size_t i = 0; i < N; ++i) r.m[i][i] = 1;
    return r;
  }
  static F3Mat from_columns(const std::array<F3Vec<N>, N>& cols) {
    F3Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r.m[i][j] = cols[j][i];
    return r;
  }
  F3Vec<N> column(std::size_t j) const {
    F3Vec<N> c;
    for (std::size_t i = 0; i < N; ++i) c[i] = m[i][j];
    return c;
  }
  // base-3 code of the row-major entries
  std::uint64_t code() const {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) c = c * 3 + m[i][j];
    return c;
  }
  bool is_identity() const { return *this == identity(); }

  friend F3Mat operator*(const F3Mat& x, const F3Mat& y) {
    F3Mat r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        unsigned s = 0;
        for (std::size_t k = 0; k < N; ++k) s += x.m[i][k] * y.m[k][j];
        r.m[i][j] = static_cast<std::uint8_t>(s % 3);
      }
    return r;
  }
  friend F3Vec<N> operator*(const F3Mat& x, const F3Vec<N>& v) {
    F3Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      unsigned s = 0;
      for (std::size_t k = 0; k < N; ++k) s += x.m[i][k] * v[k];
      r[i] = static_cast<std::uint8_t>(s % 3);
    }
    return r;
  }
  friend bool operator==(const F3Mat&, const F3Mat&) = default;
  friend auto operator<=>(const F3Mat& x, const F3Mat& y) { return x.m <=> y.m; }
};

template <std::size_t N>
F3Vec<N> add(const F3Vec<N>& x, const F3Vec<N>& y) {
  F3Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = static_cast<std::uint8_t>((x[i] + y[i]) % 3);
  return r;
}

template <std::size_t N>
F3Vec<N> axpy(std::uint8_t a, const F3Vec<N>& x, const F3Vec<N>& y) {
  F3Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = static_cast<std::uint8_t>((a * x[i] + y[i]) % 3);
  return r;
}

template <std::size_t N>
bool is_zero(const F3Vec<N>& v) {
  return std::all_of(v.begin(), v.end(), [](std::uint8_t x) { return x == 0; });
}

// All 3^N vectors in lexicographic order.
template <std::size_t N>
std::vector<F3Vec<N>> all_vectors() {
  std::vector<F3Vec<N>> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < N; ++i) total *= 3;
  out.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    F3Vec<N> v;
    std::size_t x = c;
    for (std::size_t i = N; i-- > 0;) {
      v[i] = static_cast<std::uint8_t>(x % 3);
      x /= 3;
    }
    out.push_back(v);
  }
  return out;
}

// q(v) = v^T G v with G symmetric.
template <std::size_t N>
class QuadraticForm {
 public:
  explicit QuadraticForm(const F3Mat<N>& gram) : g_(gram) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (g_.m[i][j] != g_.m[j][i]) throw InputError("residue Gram matrix is not symmetric");
  }

  const F3Mat<N>& gram() const { return g_; }

  std::uint8_t q(const F3Vec<N>& v) const {
    unsigned s = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) s += v[i] * g_.m[i][j] * v[j];
    return static_cast<std::uint8_t>(s % 3);
  }

  // b(u,v) = q(u+v) - q(u) - q(v)
  std::uint8_t b(const F3Vec<N>& u, const F3Vec<N>& v) const {
    unsigned s = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) s += u[i] * g_.m[i][j] * v[j];
    return static_cast<std::uint8_t>((2 * s) % 3);
  }

  bool nondegenerate() const {
    for (const auto& v : all_vectors<N>()) {
      if (is_zero(v)) continue;
      bool radical = true;
      for (std::size_t i = 0; i < N && radical; ++i) {
        F3Vec<N> e{};
        e[i] = 1;
        radical = b(v, e) == 0;
      }
      if (radical) return false;
    }
    return true;
  }

  bool preserves(const F3Mat<N>& m) const {
    for (const auto& v : all_vectors<N>())
      if (q(m * v) != q(v)) return false;
    return true;
  }

  // s_w(x) = x - b(x,w)/q(w) w, requires q(w) != 0
  F3Mat<N> reflection(const F3Vec<N>& w) const {
    const std::uint8_t qw = q(w);
    if (qw == 0) throw InputError("reflection vector is isotropic");
    std::array<F3Vec<N>, N> cols;
    for (std::size_t j = 0; j < N; ++j) {
      F3Vec<N> e{};
      e[j] = 1;
      const std::uint8_t c = static_cast<std::uint8_t>((3 - (b(e, w) * f3_inv(qw)) % 3) % 3);
      cols[j] = axpy(c, w, e);
    }
    return F3Mat<N>::from_columns(cols);
  }

 private:
  F3Mat<N> g_;
};

// Column-by-column extension of partial isometries; parallel over the first column.
template <std::size_t N>
std::vector<F3Mat<N>> enumerate_orthogonal_group(const QuadraticForm<N>& form) {
  if (!form.nondegenerate()) throw InputError("quadratic form is degenerate");
  const auto vectors = all_vectors<N>();
  std::array<F3Vec<N>, N> basis;
  for (std::size_t j = 0; j < N; ++j) {
    basis[j] = F3Vec<N>{};
    basis[j][j] = 1;
  }

  auto extend_from = [&](const F3Vec<N>& first) {
    std::vector<F3Mat<N>> found;
    std::array<F3Vec<N>, N> cols;
    cols[0] = first;
    auto rec = [&](auto&& self, std::size_t j) -> void {
      if (j == N) {
        found.push_back(F3Mat<N>::from_columns(cols));
        return;
      }
      const std::uint8_t target_q = form.q(basis[j]);
      for (const auto& v : vectors) {
        if (form.q(v) != target_q) continue;
        bool ok = true;
        for (std::size_t i = 0; i < j && ok; ++i) ok = form.b(cols[i], v) == form.b(basis[i], basis[j]);
        if (!ok) continue;
        cols[j] = v;
        self(self, j + 1);
      }
    };
    rec(rec, 1);
    return found;
  };

  std::vector<std::future<std::vector<F3Mat<N>>>> jobs;
  for (const auto& v : vectors)
    if (form.q(v) == form.q(basis[0])) jobs.push_back(std::async(std::launch::async, extend_from, v));

  std::vector<F3Mat<N>> group;
  for (auto& job : jobs) {
    auto part = job.get();
    group.insert(group.end(), part.begin(), part.end());
  }
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());
  return group;
}

struct Factorization {
  std::vector<std::uint8_t> reflection_values;  // q(w) of each reflection used
  int spinor = 0;
};

// Cartan-Dieudonne: fix an orthogonal anisotropic frame one vector at a time.
template <std::size_t N>
Factorization factor_into_reflections(const QuadraticForm<N>& form, const F3Mat<N>& g) {
  if (!form.preserves(g)) throw InputError("element does not preserve q");
  const auto vectors = all_vectors<N>();
  Factorization f;
  F3Mat<N> h = g;
  std::vector<F3Vec<N>> fixed;
  auto record = [&](const F3Vec<N>& w) {
    h = form.reflection(w) * h;
    const std::uint8_t qw = form.q(w);
    f.reflection_values.push_back(qw);
    f.spinor ^= (qw == 2 ? 1 : 0);
  };
  for (std::size_t step = 0; step < N; ++step) {
    const F3Vec<N>* pick = nullptr;
    for (const auto& v : vectors) {
      if (form.q(v) == 0) continue;
      bool orth = true;
      for (const auto& u : fixed) orth = orth && form.b(u, v) == 0;
      if (orth) {
        pick = &v;
        break;
      }
    }
    if (!pick) throw VerificationError("Cartan-Dieudonne factorization failed: no anisotropic vector");
    const F3Vec<N> v = *pick;
    const F3Vec<N> hv = h * v;
    if (hv != v) {
      const F3Vec<N> diff = axpy<N>(2, v, hv);
      if (form.q(diff) != 0) {
        record(diff);
      } else {
        // fallback: s_v s_{hv+v} sends hv to v
        record(add(hv, v));
        record(v);
      }
    }
    if (h * v != v) throw VerificationError("Cartan-Dieudonne step did not fix the chosen vector");
    fixed.push_back(v);
  }
  if (!h.is_identity()) throw VerificationError("Cartan-Dieudonne factorization did not terminate at identity");
  return f;
}

template <std::size_t N>
int spinor_norm(const QuadraticForm<N>& form, const F3Mat<N>& g) {
  return factor_into_reflections(form, g).spinor;
}

// Closure of a generating set under multiplication.
template <std::size_t N>
std::vector<F3Mat<N>> generated_group(const std::vector<F3Mat<N>>& gens, std::size_t limit = 100000) {
  std::set<F3Mat<N>> seen{F3Mat<N>::identity()};
  std::vector<F3Mat<N>> frontier{F3Mat<N>::identity()};
  while (!frontier.empty()) {
    std::vector<F3Mat<N>> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        F3Mat<N> y = x * g;
        if (seen.insert(y).second) next.push_back(y);
      }
    if (seen.size() > limit) throw VerificationError("generated group exceeds enumeration limit");
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

using ResidueVector = F3Vec<4>;
using OrthogonalElement = F3Mat<4>;
using ResidueForm = QuadraticForm<4>;

std::uint8_t reduce(const EisensteinInt& z);
ResidueVector reduce_vector(const EisVec& v);
OrthogonalElement reduce_matrix(const EisensteinMatrix& m);
ResidueForm residue_form(const HermitianForm& h);
OrthogonalElement reduce_isometry(const HermitianForm& h, const EisensteinMatrix& m);
bool in_gamma_theta(const HermitianForm& h, const EisensteinMatrix& m);

struct RelationCheck {
  std::string name;
  bool holds = false;
};

struct S6Report {
  std::vector<RelationCheck> relations;
  std::vector<int> spinor_norms;
  std::size_t generated_order = 0;
  bool abelian = false;
  std::vector<std::string> counterexamples;
  bool passed() const { return counterexamples.empty(); }
};

S6Report verify_s6(const ResidueForm& form, const std::vector<OrthogonalElement>& generators);

std::string to_string(const OrthogonalElement& m);

}  // namespace torelli::residue
