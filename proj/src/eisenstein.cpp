#include "torelli/eisenstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torelli/errors.hpp"

namespace torelli {

namespace {

const double kSqrt3 = std::sqrt(3.0);

i128 add(i128 x, i128 y) {
  i128 r;
  if (__builtin_add_overflow(x, y, &r)) throw OverflowError("Eisenstein integer overflow in addition");
  return r;
}

i128 sub(i128 x, i128 y) {
  i128 r;
  if (__builtin_sub_overflow(x, y, &r)) throw OverflowError("Eisenstein integer overflow in subtraction");
  return r;
}

i128 mul(i128 x, i128 y) {
  i128 r;
  if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("Eisenstein integer overflow in multiplication");
  return r;
}

i128 neg(i128 x) { return sub(0, x); }

i128 round_div(i128 num, i128 den) {
  // nearest integer to num / den, den > 0
  i128 q = num / den;
  i128 r = num % den;
  if (r < 0) {
    r += den;
    q -= 1;
  }
  if (2 * r >= den) q += 1;
  return q;
}

}  // namespace

EisensteinInt EisensteinInt::conj() const { return {sub(a_, b_), neg(b_)}; }

i128 EisensteinInt::norm() const { return add(sub(mul(a_, a_), mul(a_, b_)), mul(b_, b_)); }

std::complex<double> EisensteinInt::to_complex() const {
  const double a = static_cast<double>(a_);
  const double b = static_cast<double>(b_);
  return {a - 0.5 * b, 0.5 * kSqrt3 * b};
}

std::string EisensteinInt::str() const {
  std::ostringstream os;
  os << to_string(a_);
  if (b_ >= 0) os << "+";
  os << to_string(b_) << "w";
  return os.str();
}

EisensteinInt EisensteinInt::round(std::complex<double> c, double* residual) {
  const double bf = std::round(2.0 * c.imag() / kSqrt3);
  const double af = std::round(c.real() + c.imag() / kSqrt3);
  if (!std::isfinite(af) || !std::isfinite(bf) || std::abs(af) > 9e15 || std::abs(bf) > 9e15)
    throw OverflowError("cannot round non-finite or huge value to Z[w]");
  EisensteinInt z(static_cast<i128>(af), static_cast<i128>(bf));
  if (residual) *residual = std::abs(c - z.to_complex());
  return z;
}

EisensteinInt operator+(const EisensteinInt& x, const EisensteinInt& y) {
  return {add(x.a_, y.a_), add(x.b_, y.b_)};
}

EisensteinInt operator-(const EisensteinInt& x, const EisensteinInt& y) {
  return {sub(x.a_, y.a_), sub(x.b_, y.b_)};
}

EisensteinInt operator*(const EisensteinInt& x, const EisensteinInt& y) {
  const i128 ac = mul(x.a_, y.a_);
  const i128 bd = mul(x.b_, y.b_);
  const i128 cross = add(mul(x.a_, y.b_), mul(x.b_, y.a_));
  return {sub(ac, bd), sub(cross, bd)};
}

EisensteinInt EisensteinInt::operator-() const { return {neg(a_), neg(b_)}; }

EisensteinInt theta() { return {1, 2}; }

std::optional<EisensteinInt> exact_div(const EisensteinInt& x, const EisensteinInt& y) {
  const i128 n = y.norm();
  if (n == 0) throw InputError("division by zero in Z[w]");
  const EisensteinInt p = x * y.conj();
  if (p.a() % n != 0 || p.b() % n != 0) return std::nullopt;
  return EisensteinInt(p.a() / n, p.b() / n);
}

EisensteinInt gcd(EisensteinInt x, EisensteinInt y) {
  while (!y.is_zero()) {
    const i128 n = y.norm();
    const EisensteinInt p = x * y.conj();
    const i128 qa = round_div(p.a(), n);
    const i128 qb = round_div(p.b(), n);
    EisensteinInt best = x - EisensteinInt(qa, qb) * y;
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        EisensteinInt r = x - EisensteinInt(qa + da, qb + db) * y;
        if (r.norm() < best.norm()) best = r;
      }
    }
    x = y;
    y = best;
  }
  return x;
}

const std::array<EisensteinInt, 6>& units() {
  static const std::array<EisensteinInt, 6> u = {EisensteinInt(1, 0),  EisensteinInt(-1, 0),
                                                 EisensteinInt(0, 1),  EisensteinInt(0, -1),
                                                 EisensteinInt(-1, -1), EisensteinInt(1, 1)};
  return u;
}

const std::array<EisensteinInt, 3>& cube_roots_of_unity() {
  static const std::array<EisensteinInt, 3> u = {EisensteinInt(1, 0), EisensteinInt(0, 1),
                                                 EisensteinInt(-1, -1)};
  return u;
}

long long to_int64(i128 v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw OverflowError("integer does not fit in 64 bits: " + to_string(v));
  return static_cast<long long>(v);
}

std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  std::string s;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    if (d < 0) d = -d;
    s.push_back(static_cast<char>('0' + d));
    v /= 10;
  }
  if (negative) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

EisVec operator+(const EisVec& x, const EisVec& y) {
  EisVec r;
  for (int i = 0; i < 4; ++i) r[i] = x[i] + y[i];
  return r;
}

EisVec operator-(const EisVec& x, const EisVec& y) {
  EisVec r;
  for (int i = 0; i < 4; ++i) r[i] = x[i] - y[i];
  return r;
}

EisVec operator*(const EisensteinInt& s, const EisVec& x) {
  EisVec r;
  for (int i = 0; i < 4; ++i) r[i] = s * x[i];
  return r;
}

EisVec unit_vector(int i) {
  EisVec e{};
  e[i] = EisensteinInt(1);
  return e;
}

Eigen::Vector4cd to_complex(const EisVec& v) {
  Eigen::Vector4cd r;
  for (int i = 0; i < 4; ++i) r[i] = v[i].to_complex();
  return r;
}

std::string to_string(const EisVec& v) {
  std::string s = "(";
  for (int i = 0; i < 4; ++i) {
    if (i) s += ", ";
    s += v[i].str();
  }
  return s + ")";
}

EisensteinMatrix EisensteinMatrix::identity() { return diagonal({1, 1, 1, 1}); }

EisensteinMatrix EisensteinMatrix::scalar(const EisensteinInt& s) { return diagonal({s, s, s, s}); }

EisensteinMatrix EisensteinMatrix::diagonal(const EisVec& d) {
  EisensteinMatrix m;
  for (int i = 0; i < 4; ++i) m.m_[i][i] = d[i];
  return m;
}

EisensteinMatrix EisensteinMatrix::from_columns(const std::array<EisVec, 4>& cols) {
  EisensteinMatrix m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.m_[i][j] = cols[j][i];
  return m;
}

EisVec EisensteinMatrix::column(int j) const {
  EisVec c;
  for (int i = 0; i < 4; ++i) c[i] = m_[i][j];
  return c;
}

EisensteinMatrix EisensteinMatrix::conj_transpose() const {
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m_[i][j] = m_[j][i].conj();
  return r;
}

namespace {

EisensteinInt det3(const EisensteinMatrix::Rows& m, int skip_row, int skip_col) {
  int r[3], c[3];
  for (int i = 0, k = 0; i < 4; ++i)
    if (i != skip_row) r[k++] = i;
  for (int j = 0, k = 0; j < 4; ++j)
    if (j != skip_col) c[k++] = j;
  auto e = [&](int i, int j) { return m[r[i]][c[j]]; };
  return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
         e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
         e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
}

}  // namespace

EisensteinInt EisensteinMatrix::det() const {
  EisensteinInt d;
  for (int j = 0; j < 4; ++j) {
    EisensteinInt term = m_[0][j] * det3(m_, 0, j);
    d = (j % 2 == 0) ? d + term : d - term;
  }
  return d;
}

EisensteinMatrix EisensteinMatrix::inverse() const {
  const EisensteinInt d = det();
  if (!d.is_unit()) throw InputError("matrix is not invertible over Z[w]");
  const EisensteinInt dinv = d.conj();
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EisensteinInt cof = det3(m_, j, i);
      if ((i + j) % 2) cof = -cof;
      r.m_[i][j] = cof * dinv;
    }
  }
  return r;
}

EisensteinMatrix EisensteinMatrix::pow(long long e) const {
  EisensteinMatrix base = e < 0 ? inverse() : *this;
  unsigned long long n = e < 0 ? static_cast<unsigned long long>(-(e + 1)) + 1 : static_cast<unsigned long long>(e);
  EisensteinMatrix r = identity();
  while (n) {
    if (n & 1ULL) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

Eigen::Matrix4cd EisensteinMatrix::to_complex() const {
  Eigen::Matrix4cd r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = m_[i][j].to_complex();
  return r;
}

std::string EisensteinMatrix::str() const {
  std::string s = "[";
  for (int i = 0; i < 4; ++i) {
    if (i) s += "; ";
    for (int j = 0; j < 4; ++j) {
      if (j) s += ", ";
      s += m_[i][j].str();
    }
  }
  return s + "]";
}

EisensteinMatrix operator*(const EisensteinMatrix& x, const EisensteinMatrix& y) {
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EisensteinInt s;
      for (int k = 0; k < 4; ++k) s += x.m_[i][k] * y.m_[k][j];
      r.m_[i][j] = s;
    }
  return r;
}

EisensteinMatrix operator+(const EisensteinMatrix& x, const EisensteinMatrix& y) {
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m_[i][j] = x.m_[i][j] + y.m_[i][j];
  return r;
}

EisensteinMatrix operator-(const EisensteinMatrix& x, const EisensteinMatrix& y) {
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m_[i][j] = x.m_[i][j] - y.m_[i][j];
  return r;
}

EisensteinMatrix operator*(const EisensteinInt& s, const EisensteinMatrix& x) {
  EisensteinMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m_[i][j] = s * x.m_[i][j];
  return r;
}

EisVec operator*(const EisensteinMatrix& m, const EisVec& v) {
  EisVec r;
  for (int i = 0; i < 4; ++i) {
    EisensteinInt s;
    for (int k = 0; k < 4; ++k) s += m.m_[i][k] * v[k];
    r[i] = s;
  }
  return r;
}

EisensteinMatrix round_matrix(const Eigen::Matrix4cd& m, double* residual) {
  EisensteinMatrix r;
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double res = 0.0;
      r(i, j) = EisensteinInt::round(m(i, j), &res);
      worst = std::max(worst, res);
    }
  if (residual) *residual = worst;
  return r;
}

HermitianForm::HermitianForm(const EisensteinMatrix& gram) : gram_(gram), cgram_(gram.to_complex()) {
  if (!(gram == gram.conj_transpose())) throw InputError("Gram matrix is not Hermitian: " + gram.str());
}

HermitianForm HermitianForm::standard() { return HermitianForm(EisensteinMatrix::diagonal({1, 1, 1, -1})); }

EisensteinInt HermitianForm::eval(const EisVec& x, const EisVec& y) const {
  EisensteinInt s;
  for (int i = 0; i < 4; ++i) {
    if (y[i].is_zero()) continue;
    EisensteinInt row;
    for (int j = 0; j < 4; ++j) row += gram_(i, j) * x[j];
    s += y[i].conj() * row;
  }
  return s;
}

long long HermitianForm::norm(const EisVec& x) const {
  const EisensteinInt v = eval(x, x);
  if (!v.is_rational()) throw VerificationError("h(x,x) is not rational");
  return to_int64(v.a());
}

std::complex<double> HermitianForm::eval(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y) const {
  return y.dot(cgram_ * x);
}

double HermitianForm::norm(const Eigen::Vector4cd& x) const { return eval(x, x).real(); }

ShortRoot make_short_root(const HermitianForm& h, const EisVec& r) {
  if (h.norm(r) != 1) throw InputError("not a short root (h(r,r) != 1): " + to_string(r));
  return ShortRoot{r};
}

bool is_isometry(const HermitianForm& h, const EisensteinMatrix& m) {
  return m.conj_transpose() * h.gram() * m == h.gram();
}

namespace {

void check_reflection_args(const HermitianForm& h, const ShortRoot& r, const EisensteinInt& mu) {
  if (h.norm(r.r) != 1) throw InputError("reflection root must satisfy h(r,r) = 1");
  if (!mu.is_unit()) throw InputError("reflection multiplier must be a unit");
}

}  // namespace

EisVec reflect(const HermitianForm& h, const ShortRoot& r, const EisensteinInt& mu, const EisVec& x) {
  check_reflection_args(h, r, mu);
  return x - ((EisensteinInt(1) - mu) * h.eval(x, r.r)) * r.r;
}

EisensteinMatrix reflection_matrix(const HermitianForm& h, const ShortRoot& r, const EisensteinInt& mu) {
  check_reflection_args(h, r, mu);
  std::array<EisVec, 4> cols;
  for (int j = 0; j < 4; ++j) cols[j] = reflect(h, r, mu, unit_vector(j));
  return EisensteinMatrix::from_columns(cols);
}

std::vector<ShortRoot> enumerate_short_roots(const HermitianForm& h, int height_bound) {
  if (height_bound < 1) throw InputError("height bound must be at least 1");
  if (height_bound > 64) throw InputError("height bound too large for enumeration");
  struct E {
    long long a, b;
  };
  E g[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = {to_int64(h.gram()(i, j).a()), to_int64(h.gram()(i, j).b())};
  auto mul = [](E x, E y) -> E { return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b}; };
  auto conj = [](E x) -> E { return {x.a - x.b, -x.b}; };

  const int B = height_bound;
  const int side = 2 * B + 1;
  std::vector<E> values;
  values.reserve(static_cast<std::size_t>(side) * side);
  for (int a = -B; a <= B; ++a)
    for (int b = -B; b <= B; ++b) values.push_back({a, b});

  std::vector<ShortRoot> out;
  E x[4];
  for (const E& x0 : values) {
    x[0] = x0;
    for (const E& x1 : values) {
      x[1] = x1;
      for (const E& x2 : values) {
        x[2] = x2;
        for (const E& x3 : values) {
          x[3] = x3;
          long long total_a = 0, total_b = 0;
          for (int i = 0; i < 4; ++i) {
            E row{0, 0};
            for (int j = 0; j < 4; ++j) {
              E t = mul(g[i][j], x[j]);
              row.a += t.a;
              row.b += t.b;
            }
            E t = mul(conj(x[i]), row);
            total_a += t.a;
            total_b += t.b;
          }
          if (total_b == 0 && total_a == 1) {
            EisVec r;
            for (int i = 0; i < 4; ++i) r[i] = EisensteinInt(x[i].a, x[i].b);
            out.push_back(ShortRoot{r});
          }
        }
      }
    }
  }
  return out;
}

std::pair<int, int> signature(const HermitianForm& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h.complex_gram(), Eigen::EigenvaluesOnly);
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    const double ev = es.eigenvalues()[i];
    if (std::abs(ev) < tol) throw DegenerateFormError("Hermitian form has a near-zero eigenvalue");
    (ev > 0 ? pos : neg) += 1;
  }
  return {pos, neg};
}

bool is_unimodular(const HermitianForm& h) { return h.gram().det().is_unit(); }

}  // namespace torelli
