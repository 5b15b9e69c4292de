#pragma once

// Exact arithmetic over Z[w], w^2 = -1 - w, and rank 4 Hermitian lattices.
//
// Form convention: h(x, y) = sum_ij conj(y_i) H_ij x_j = y^* H x.
// h is linear in the first slot and conjugate-linear in the second, and M is
// an isometry iff M^* H M = H.

#include <array>
#include <compare>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace torelli {

using i128 = __int128;

class EisensteinInt {
 public:
  constexpr EisensteinInt() = default;
  constexpr EisensteinInt(i128 a, i128 b = 0) : a_(a), b_(b) {}

  static constexpr EisensteinInt omega() { return {0, 1}; }
  static constexpr EisensteinInt omega2() { return {-1, -1}; }

  constexpr i128 a() const { return a_; }
  constexpr i128 b() const { return b_; }

  EisensteinInt conj() const;
  i128 norm() const;
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_unit() const { return norm() == 1; }
  bool is_rational() const { return b_ == 0; }

  std::complex<double> to_complex() const;
  std::string str() const;

  // Nearest lattice point using b = round(2 im / sqrt3), a = round(re + im / sqrt3).
  static EisensteinInt round(std::complex<double> c, double* residual = nullptr);

  friend EisensteinInt operator+(const EisensteinInt& x, const EisensteinInt& y);
  friend EisensteinInt operator-(const EisensteinInt& x, const EisensteinInt& y);
  friend EisensteinInt operator*(const EisensteinInt& x, const EisensteinInt& y);
  EisensteinInt operator-() const;
  EisensteinInt& operator+=(const EisensteinInt& y) { return *this = *this + y; }
  EisensteinInt& operator-=(const EisensteinInt& y) { return *this = *this - y; }
  EisensteinInt& operator*=(const EisensteinInt& y) { return *this = *this * y; }

  friend bool operator==(const EisensteinInt&, const EisensteinInt&) = default;
  friend std::strong_ordering operator<=>(const EisensteinInt& x, const EisensteinInt& y) {
    if (auto c = x.a_ <=> y.a_; c != 0) return c;
    return x.b_ <=> y.b_;
  }

 private:
  i128 a_ = 0;
  i128 b_ = 0;
};

EisensteinInt theta();

// Exact quotient x / y when y divides x, otherwise nullopt. y must be nonzero.
std::optional<EisensteinInt> exact_div(const EisensteinInt& x, const EisensteinInt& y);
EisensteinInt gcd(EisensteinInt x, EisensteinInt y);

// {1, -1, w, -w, w^2, -w^2} and {1, w, w^2}.
const std::array<EisensteinInt, 6>& units();
const std::array<EisensteinInt, 3>& cube_roots_of_unity();

// Checked conversions to machine integers.
long long to_int64(i128 v);
std::string to_string(i128 v);

using EisVec = std::array<EisensteinInt, 4>;

EisVec operator+(const EisVec& x, const EisVec& y);
EisVec operator-(const EisVec& x, const EisVec& y);
EisVec operator*(const EisensteinInt& s, const EisVec& x);
EisVec unit_vector(int i);
Eigen::Vector4cd to_complex(const EisVec& v);
std::string to_string(const EisVec& v);

class EisensteinMatrix {
 public:
  using Rows = std::array<EisVec, 4>;

  EisensteinMatrix() = default;
  explicit EisensteinMatrix(const Rows& rows) : m_(rows) {}

  static EisensteinMatrix identity();
  static EisensteinMatrix scalar(const EisensteinInt& s);
  static EisensteinMatrix diagonal(const EisVec& d);
  static EisensteinMatrix from_columns(const std::array<EisVec, 4>& cols);

  const EisensteinInt& operator()(int i, int j) const { return m_[i][j]; }
  EisensteinInt& operator()(int i, int j) { return m_[i][j]; }
  const Rows& rows() const { return m_; }
  EisVec column(int j) const;

  EisensteinMatrix conj_transpose() const;
  EisensteinInt det() const;
  bool is_identity() const { return *this == identity(); }
  // Exact inverse; requires a unit determinant.
  EisensteinMatrix inverse() const;
  EisensteinMatrix pow(long long e) const;

  Eigen::Matrix4cd to_complex() const;
  std::string str() const;

  friend EisensteinMatrix operator*(const EisensteinMatrix& x, const EisensteinMatrix& y);
  friend EisensteinMatrix operator+(const EisensteinMatrix& x, const EisensteinMatrix& y);
  friend EisensteinMatrix operator-(const EisensteinMatrix& x, const EisensteinMatrix& y);
  friend EisensteinMatrix operator*(const EisensteinInt& s, const EisensteinMatrix& x);
  friend EisVec operator*(const EisensteinMatrix& m, const EisVec& v);
  friend bool operator==(const EisensteinMatrix&, const EisensteinMatrix&) = default;
  friend auto operator<=>(const EisensteinMatrix& x, const EisensteinMatrix& y) { return x.m_ <=> y.m_; }

 private:
  Rows m_{};
};

// Rounds every entry; residual receives the max entrywise distance.
EisensteinMatrix round_matrix(const Eigen::Matrix4cd& m, double* residual = nullptr);

class HermitianForm {
 public:
  explicit HermitianForm(const EisensteinMatrix& gram);
  static HermitianForm standard();

  const EisensteinMatrix& gram() const { return gram_; }
  EisensteinInt eval(const EisVec& x, const EisVec& y) const;
  long long norm(const EisVec& x) const;

  std::complex<double> eval(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y) const;
  double norm(const Eigen::Vector4cd& x) const;
  const Eigen::Matrix4cd& complex_gram() const { return cgram_; }

 private:
  EisensteinMatrix gram_;
  Eigen::Matrix4cd cgram_;
};

struct ShortRoot {
  EisVec r;
};

ShortRoot make_short_root(const HermitianForm& h, const EisVec& r);

bool is_isometry(const HermitianForm& h, const EisensteinMatrix& m);

// x - (1 - mu) h(x, r) r
EisVec reflect(const HermitianForm& h, const ShortRoot& r, const EisensteinInt& mu, const EisVec& x);
EisensteinMatrix reflection_matrix(const HermitianForm& h, const ShortRoot& r, const EisensteinInt& mu);

// All r with h(r,r) = 1 and max |a|,|b| <= bound, lexicographic in (a1,b1,...,a4,b4).
std::vector<ShortRoot> enumerate_short_roots(const HermitianForm& h, int height_bound);

std::pair<int, int> signature(const HermitianForm& h, double tol = 1e-9);
bool is_unimodular(const HermitianForm& h);

}  // namespace torelli
