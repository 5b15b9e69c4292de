#include "torelli/moduli.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "torelli/errors.hpp"

namespace torelli {

namespace {

bool is_zero(const Rational& x, double) { return x == 0; }
bool is_zero(const cd& x, double scale) { return std::abs(x) <= kModuliTolerance * scale; }
double mag(const Rational& x) { return x == 0 ? 0.0 : std::abs(x.convert_to<double>()) + 1e-300; }
double mag(const cd& x) { return std::abs(x); }
cd to_cd(const Rational& x) { return cd(x.convert_to<double>(), 0.0); }
cd to_cd(const cd& x) { return x; }

template <class F>
using Proj = std::array<F, 2>;
template <class F>
using Mat2 = std::array<F, 4>;

template <class F>
F cross(const Proj<F>& x, const Proj<F>& y) {
  return x[0] * y[1] - x[1] * y[0];
}

template <class F>
bool proj_equal(const Proj<F>& a, const Proj<F>& b) {
  const double scale = (mag(a[0]) + mag(a[1])) * (mag(b[0]) + mag(b[1]));
  return is_zero(F(cross(a, b)), scale);
}

template <class F>
Proj<F> apply2(const Mat2<F>& m, const Proj<F>& x) {
  return {F(m[0] * x[0] + m[1] * x[1]), F(m[2] * x[0] + m[3] * x[1])};
}

template <class F>
Mat2<F> mul2(const Mat2<F>& a, const Mat2<F>& b) {
  return {F(a[0] * b[0] + a[1] * b[2]), F(a[0] * b[1] + a[1] * b[3]), F(a[2] * b[0] + a[3] * b[2]),
          F(a[2] * b[1] + a[3] * b[3])};
}

template <class F>
Mat2<F> adj2(const Mat2<F>& m) {
  return {m[3], F(-m[1]), F(-m[2]), m[0]};
}

// Mobius map sending p, q, r to 0, 1, infinity.
template <class F>
Mat2<F> frame(const Proj<F>& p, const Proj<F>& q, const Proj<F>& r) {
  const F qr = cross(q, r), qp = cross(q, p);
  return {F(qr * p[1]), F(-qr * p[0]), F(qp * r[1]), F(-qp * r[0])};
}

Proj<Rational> to_proj_q(const PointValue& v) {
  if (v.is_infinity()) return {Rational(1), Rational(0)};
  return {v.q(), Rational(1)};
}

Proj<cd> to_proj_c(const PointValue& v) {
  if (v.is_infinity()) return {cd(1.0), cd(0.0)};
  return {v.z(), cd(1.0)};
}

PointValue from_proj(const Proj<Rational>& p) {
  if (p[1] == 0) return PointValue::infinity();
  return PointValue::rational(p[0] / p[1]);
}

PointValue from_proj(const Proj<cd>& p) {
  if (is_zero(p[1], std::abs(p[0]) + std::abs(p[1]))) return PointValue::infinity();
  return PointValue::complex(p[0] / p[1]);
}

template <class F>
std::array<Proj<F>, 6> proj_config(const PointConfig& c);

template <>
std::array<Proj<Rational>, 6> proj_config<Rational>(const PointConfig& c) {
  std::array<Proj<Rational>, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = to_proj_q(c.points[i]);
  return out;
}

template <>
std::array<Proj<cd>, 6> proj_config<cd>(const PointConfig& c) {
  std::array<Proj<cd>, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = to_proj_c(c.points[i]);
  return out;
}

template <class F>
Mobius make_mobius(const Mat2<F>& m);

template <>
Mobius make_mobius<Rational>(const Mat2<Rational>& m) {
  return Mobius::exact(m);
}

template <>
Mobius make_mobius<cd>(const Mat2<cd>& m) {
  return Mobius::numeric(m);
}

template <class F>
std::array<int, 3> anchors_of(const std::array<Proj<F>, 6>& p) {
  std::array<int, 3> idx{0, -1, -1};
  for (int i = 1; i < 6 && idx[1] < 0; ++i)
    if (!proj_equal(p[i], p[0])) idx[1] = i;
  if (idx[1] < 0) throw InputError("unstable configuration: fewer than three distinct values");
  for (int i = idx[1] + 1; i < 6 && idx[2] < 0; ++i)
    if (!proj_equal(p[i], p[0]) && !proj_equal(p[i], p[idx[1]])) idx[2] = i;
  if (idx[2] < 0) throw InputError("unstable configuration: fewer than three distinct values");
  return idx;
}

template <class F>
Normalized normalize_impl(const PointConfig& c) {
  const auto p = proj_config<F>(c);
  Normalized out;
  out.anchors = anchors_of(p);
  const Mat2<F> m = frame(p[out.anchors[0]], p[out.anchors[1]], p[out.anchors[2]]);
  out.map = make_mobius(m);
  int r = 0;
  for (int i = 0; i < 6; ++i) {
    out.image[i] = from_proj(apply2(m, p[i]));
    if (i != out.anchors[0] && i != out.anchors[1] && i != out.anchors[2]) out.rest[r++] = out.image[i];
  }
  return out;
}

template <class F>
std::optional<EquivalenceWitness> equivalent_impl(const PointConfig& a, const PointConfig& b) {
  const auto pa = proj_config<F>(a);
  const auto pb = proj_config<F>(b);
  std::array<int, 3> ib;
  try {
    ib = anchors_of(pb);
    anchors_of(pa);
  } catch (const InputError&) {
    return std::nullopt;
  }
  const Mat2<F> mb = frame(pb[ib[0]], pb[ib[1]], pb[ib[2]]);
  const Mat2<F> mb_inv = adj2(mb);
  std::array<int, 6> perm;
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const auto& x = pa[perm[ib[0]]];
    const auto& y = pa[perm[ib[1]]];
    const auto& z = pa[perm[ib[2]]];
    if (proj_equal(x, y) || proj_equal(x, z) || proj_equal(y, z)) continue;
    const Mat2<F> g = mul2(mb_inv, frame(x, y, z));
    bool ok = true;
    for (int i = 0; i < 6 && ok; ++i) ok = proj_equal(apply2(g, pa[perm[i]]), pb[i]);
    if (ok) return EquivalenceWitness{perm, make_mobius(g)};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

template <class F>
StabilityClass stability_impl(const PointConfig& c) {
  const auto p = proj_config<F>(c);
  StabilityClass s;
  std::array<bool, 6> seen{};
  s.max_multiplicity = 0;
  for (int i = 0; i < 6; ++i) {
    if (seen[i]) continue;
    int m = 0;
    for (int j = i; j < 6; ++j)
      if (!seen[j] && proj_equal(p[i], p[j])) {
        seen[j] = true;
        ++m;
      }
    s.max_multiplicity = std::max(s.max_multiplicity, m);
    if (m == 2) ++s.k;
  }
  s.stable = s.max_multiplicity <= 2;
  return s;
}

// Row reduction; returns pivot columns and leaves rows in reduced echelon form.
template <class F, std::size_t N>
std::vector<int> rref(std::vector<std::array<F, N>>& rows) {
  double scale = 0.0;
  for (const auto& r : rows)
    for (const auto& x : r) scale = std::max(scale, mag(x));
  std::vector<int> pivots;
  std::size_t top = 0;
  for (std::size_t col = 0; col < N && top < rows.size(); ++col) {
    std::size_t best = top;
    for (std::size_t r = top; r < rows.size(); ++r)
      if (mag(rows[r][col]) > mag(rows[best][col])) best = r;
    if (is_zero(rows[best][col], scale)) continue;
    std::swap(rows[top], rows[best]);
    const F piv = rows[top][col];
    for (auto& x : rows[top]) x = F(x / piv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == top) continue;
      const F f = rows[r][col];
      if (f == F(0)) continue;
      for (std::size_t k = 0; k < N; ++k) rows[r][k] = F(rows[r][k] - f * rows[top][k]);
    }
    pivots.push_back(static_cast<int>(col));
    ++top;
  }
  return pivots;
}

template <class F, std::size_t N>
std::vector<std::array<F, N>> kernel(std::vector<std::array<F, N>> rows) {
  const auto pivots = rref(rows);
  std::vector<std::array<F, N>> basis;
  for (int f = 0; f < static_cast<int>(N); ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    std::array<F, N> v;
    v.fill(F(0));
    v[f] = F(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F(-rows[r][f]);
    basis.push_back(v);
  }
  return basis;
}

template <class F, std::size_t N>
int rank(std::vector<std::array<F, N>> rows) {
  return static_cast<int>(rref(rows).size());
}

template <class F>
std::array<std::array<F, 4>, 6> gale_rows(const std::array<Proj<F>, 6>& p) {
  std::vector<std::array<F, 6>> gt(2);
  for (int i = 0; i < 6; ++i) {
    gt[0][i] = p[i][0];
    gt[1][i] = p[i][1];
  }
  const auto ker = kernel(gt);
  if (ker.size() != 4) throw InputError("associate: configuration has a single distinct value");
  std::array<std::array<F, 4>, 6> d;
  for (int i = 0; i < 6; ++i)
    for (int m = 0; m < 4; ++m) d[i][m] = ker[m][i];
  return d;
}

template <class F>
std::array<Proj<F>, 6> gale_points(const std::array<std::array<F, 4>, 6>& d) {
  std::vector<std::array<F, 6>> dt(4);
  for (int i = 0; i < 6; ++i)
    for (int m = 0; m < 4; ++m) dt[m][i] = d[i][m];
  const auto ker = kernel(dt);
  if (ker.size() != 2) throw InputError("arrangement matrix does not have rank four");
  std::array<Proj<F>, 6> p;
  for (int i = 0; i < 6; ++i) p[i] = {ker[0][i], ker[1][i]};
  return p;
}

template <class F>
bool proportional4(const std::array<F, 4>& a, const std::array<F, 4>& b) {
  std::vector<std::array<F, 4>> rows{a, b};
  return rank(rows) < 2;
}

template <class F>
F dot4(const std::array<F, 4>& a, const std::array<F, 4>& b) {
  F s(0);
  for (int i = 0; i < 4; ++i) s = F(s + a[i] * b[i]);
  return s;
}

template <class F>
double norm4(const std::array<F, 4>& a) {
  double s = 0.0;
  for (const auto& x : a) s += mag(x);
  return s;
}

template <class F>
ArrangementStability arrangement_stability_impl(const std::array<std::array<F, 4>, 6>& d) {
  for (int i = 0; i < 6; ++i) {
    if (norm4(d[i]) == 0.0) throw InputError("degenerate arrangement: zero linear form");
    for (int j = i + 1; j < 6; ++j)
      if (proportional4(d[i], d[j]))
        throw InputError("degenerate arrangement: hyperplanes " + std::to_string(i) + " and " + std::to_string(j) +
                         " coincide");
  }
  std::vector<std::array<F, 4>> pts;
  ArrangementStability out;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) {
        std::vector<std::array<F, 4>> rows{d[i], d[j], d[k]};
        const auto ker = kernel(rows);
        if (ker.size() == 2) out.common_lines.push_back({i, j, k});
        if (ker.size() != 1) continue;
        const auto& p = ker[0];
        bool dup = false;
        for (const auto& q : pts) dup = dup || proportional4(p, q);
        if (dup) continue;
        pts.push_back(p);
        IntersectionPoint ip;
        for (int m = 0; m < 4; ++m) ip.point[m] = to_cd(p[m]);
        for (int h = 0; h < 6; ++h)
          if (is_zero(dot4(d[h], p), norm4(d[h]) * norm4(p))) ip.hyperplanes.push_back(h);
        out.points.push_back(ip);
      }
  out.cls.max_multiplicity = 0;
  for (const auto& ip : out.points) {
    const int n = static_cast<int>(ip.hyperplanes.size());
    out.cls.max_multiplicity = std::max(out.cls.max_multiplicity, n);
    if (n == 4) ++out.cls.k;
  }
  out.cls.stable = out.cls.max_multiplicity <= 4 && out.common_lines.empty();
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_coeff(cd z) {
  if (std::abs(z.imag()) <= 1e-15 * std::max(1.0, std::abs(z.real()))) return fmt_double(z.real());
  return "(" + fmt_double(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt_double(std::abs(z.imag())) + "i)";
}

std::string fmt_exact_or(const ArrangementConfig& a, int i, int m) {
  if (a.exact) return to_string(a.q[i][m]);
  return fmt_coeff(a.c[i][m]);
}

std::string affine_factor(const ArrangementConfig& a, int i) {
  const char* names[] = {"", "x1", "x2", "x3"};
  std::vector<std::string> terms;
  int nonzero = 0;
  for (int m = 0; m < 4; ++m) {
    if (std::abs(a.c[i][m]) == 0.0) continue;
    ++nonzero;
    const std::string coef = fmt_exact_or(a, i, m);
    if (m == 0) terms.push_back(coef);
    else if (coef == "1") terms.push_back(names[m]);
    else terms.push_back(coef + "*" + names[m]);
  }
  if (nonzero == 1 && std::abs(a.c[i][0]) != 0.0) return "";
  std::string s;
  for (std::size_t t = 0; t < terms.size(); ++t) s += (t ? " + " : "") + terms[t];
  if (terms.size() > 1) s = "(" + s + ")";
  return s;
}

std::string cubic_rhs(const std::array<cd, 4>& l) {
  std::string s;
  for (int m = 0; m < 4; ++m) {
    if (std::abs(l[m]) < 1e-14) continue;
    const std::string var = "Y" + std::to_string(m) + "^3";
    const std::string coef = fmt_coeff(l[m]);
    if (!s.empty()) s += " + ";
    s += (coef == "1") ? var : coef + "*" + var;
  }
  return s;
}

}  // namespace

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

Rational parse_rational(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      const auto dot = s.find('.');
      if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      boost::multiprecision::cpp_int den = 1;
      for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      return Rational(boost::multiprecision::cpp_int(digits), den);
    }
    const boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in rational " + s);
    return Rational(num, den);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw InputError("malformed rational: " + s);
  }
}

PointValue PointValue::rational(const Rational& q) {
  PointValue v;
  v.kind_ = Kind::rational;
  v.q_ = q;
  v.z_ = to_cd(q);
  return v;
}

PointValue PointValue::complex(cd z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError("non-finite point value");
  PointValue v;
  v.kind_ = Kind::complex;
  v.z_ = z;
  return v;
}

PointValue PointValue::infinity() {
  PointValue v;
  v.kind_ = Kind::infinity;
  return v;
}

const Rational& PointValue::q() const {
  if (kind_ != Kind::rational) throw InputError("point value is not an exact rational");
  return q_;
}

cd PointValue::z() const {
  if (kind_ == Kind::infinity) throw InputError("point value is infinite");
  return z_;
}

std::string PointValue::str() const {
  switch (kind_) {
    case Kind::infinity:
      return "inf";
    case Kind::rational:
      return to_string(q_);
    case Kind::complex:
      return fmt_coeff(z_);
  }
  return "";
}

bool PointConfig::is_exact() const {
  return std::all_of(points.begin(), points.end(), [](const PointValue& v) { return v.is_exact(); });
}

int PointConfig::infinity_index() const {
  for (int i = 0; i < 6; ++i)
    if (points[i].is_infinity()) return i;
  return -1;
}

PointConfig PointConfig::from_complex(const std::array<cd, 6>& z) {
  PointConfig c;
  for (int i = 0; i < 6; ++i) c.points[i] = PointValue::complex(z[i]);
  return c;
}

Mobius Mobius::identity() { return Mobius{}; }

Mobius Mobius::exact(const std::array<Rational, 4>& m) {
  if (m[0] * m[3] - m[1] * m[2] == 0) throw InputError("singular Mobius matrix");
  Mobius r;
  r.exact_ = true;
  r.q_ = m;
  for (int i = 0; i < 4; ++i) r.c_[i] = to_cd(m[i]);
  return r;
}

Mobius Mobius::numeric(const std::array<cd, 4>& m) {
  const double s = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
  if (std::abs(m[0] * m[3] - m[1] * m[2]) <= 1e-14 * s * s) throw InputError("singular Mobius matrix");
  Mobius r;
  r.exact_ = false;
  r.c_ = m;
  return r;
}

std::array<cd, 4> Mobius::matrix() const {
  const cd det = c_[0] * c_[3] - c_[1] * c_[2];
  const cd s = std::sqrt(det);
  return {c_[0] / s, c_[1] / s, c_[2] / s, c_[3] / s};
}

PointValue Mobius::apply(const PointValue& x) const {
  if (exact_ && x.is_exact()) return from_proj(apply2<Rational>(q_, to_proj_q(x)));
  return from_proj(apply2<cd>(c_, to_proj_c(x)));
}

PointConfig Mobius::apply(const PointConfig& c) const {
  PointConfig out;
  for (int i = 0; i < 6; ++i) out.points[i] = apply(c.points[i]);
  return out;
}

Mobius Mobius::compose(const Mobius& inner) const {
  if (exact_ && inner.exact_) return exact(mul2<Rational>(q_, inner.q_));
  return numeric(mul2<cd>(c_, inner.c_));
}

Mobius Mobius::inverse() const {
  if (exact_) return exact(adj2<Rational>(q_));
  return numeric(adj2<cd>(c_));
}

Normalized normalize(const PointConfig& c) {
  if (c.is_exact()) return normalize_impl<Rational>(c);
  return normalize_impl<cd>(c);
}

std::optional<EquivalenceWitness> is_equivalent(const PointConfig& a, const PointConfig& b) {
  if (a.is_exact() && b.is_exact()) return equivalent_impl<Rational>(a, b);
  return equivalent_impl<cd>(a, b);
}

bool check_witness(const PointConfig& a, const PointConfig& b, const EquivalenceWitness& w) {
  const bool exact = a.is_exact() && b.is_exact() && w.map.is_exact();
  for (int i = 0; i < 6; ++i) {
    const PointValue img = w.map.apply(a.points[w.permutation[i]]);
    if (exact) {
      if (!proj_equal(to_proj_q(img), to_proj_q(b.points[i]))) return false;
    } else if (!proj_equal(to_proj_c(img), to_proj_c(b.points[i]))) {
      return false;
    }
  }
  return true;
}

StabilityClass stability(const PointConfig& c) {
  if (c.is_exact()) return stability_impl<Rational>(c);
  return stability_impl<cd>(c);
}

ArrangementConfig ArrangementConfig::from_rational(const std::array<std::array<Rational, 4>, 6>& h) {
  ArrangementConfig a;
  a.exact = true;
  a.q = h;
  for (int i = 0; i < 6; ++i)
    for (int m = 0; m < 4; ++m) a.c[i][m] = to_cd(h[i][m]);
  return a;
}

ArrangementConfig ArrangementConfig::from_complex(const std::array<std::array<cd, 4>, 6>& h) {
  ArrangementConfig a;
  a.exact = false;
  a.c = h;
  return a;
}

Eigen::Matrix<cd, 6, 4> ArrangementConfig::matrix() const {
  Eigen::Matrix<cd, 6, 4> m;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 4; ++k) m(i, k) = c[i][k];
  return m;
}

ArrangementConfig associate(const PointConfig& c) {
  if (c.is_exact()) return ArrangementConfig::from_rational(gale_rows(proj_config<Rational>(c)));
  return ArrangementConfig::from_complex(gale_rows(proj_config<cd>(c)));
}

ArrangementConfig sym3_arrangement(const PointConfig& c) {
  if (c.is_exact()) {
    std::array<std::array<Rational, 4>, 6> h;
    const auto p = proj_config<Rational>(c);
    for (int i = 0; i < 6; ++i) {
      const Rational &s = p[i][0], &t = p[i][1];
      h[i] = {t * t * t, s * t * t, s * s * t, s * s * s};
    }
    return ArrangementConfig::from_rational(h);
  }
  std::array<std::array<cd, 4>, 6> h;
  const auto p = proj_config<cd>(c);
  for (int i = 0; i < 6; ++i) {
    const cd s = p[i][0], t = p[i][1];
    h[i] = {t * t * t, s * t * t, s * s * t, s * s * s};
  }
  return ArrangementConfig::from_complex(h);
}

PointConfig points_from_arrangement(const ArrangementConfig& a) {
  PointConfig out;
  if (a.exact) {
    const auto p = gale_points(a.q);
    for (int i = 0; i < 6; ++i) out.points[i] = from_proj(p[i]);
  } else {
    const auto p = gale_points(a.c);
    for (int i = 0; i < 6; ++i) out.points[i] = from_proj(p[i]);
  }
  return out;
}

std::optional<Eigen::Matrix4cd> arrangement_equivalence(const ArrangementConfig& a, const ArrangementConfig& b) {
  const Eigen::Matrix<cd, 6, 4> A = a.matrix(), B = b.matrix();
  const Eigen::Matrix4cd A4 = A.topRows<4>(), B4 = B.topRows<4>();
  auto frame_ok = [](const Eigen::Matrix4cd& m) {
    return std::abs(m.determinant()) > 1e-12 * std::pow(m.norm(), 4);
  };
  if (!frame_ok(A4) || !frame_ok(B4)) return std::nullopt;
  const Eigen::Matrix4cd A4i = A4.inverse(), B4i = B4.inverse();
  const Eigen::RowVector4cd alpha = A.row(4) * A4i, beta = B.row(4) * B4i;
  Eigen::Matrix4cd L = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) {
    if (std::abs(alpha[i]) < 1e-12 * alpha.norm()) return std::nullopt;
    L(i, i) = beta[i] / alpha[i];
  }
  Eigen::Matrix4cd T = A4i * L * B4;
  T /= T.norm();
  for (int i = 0; i < 6; ++i) {
    const Eigen::RowVector4cd x = A.row(i) * T;
    const Eigen::RowVector4cd y = B.row(i);
    const cd lambda = x.dot(y) / y.squaredNorm();
    if ((x.transpose() - (lambda * y).transpose()).norm() > 1e-8 * x.norm()) return std::nullopt;
  }
  return T;
}

ArrangementStability arrangement_stability(const ArrangementConfig& a) {
  if (a.exact) return arrangement_stability_impl(a.q);
  return arrangement_stability_impl(a.c);
}

cd evaluate_form(const std::array<cd, 4>& l, const std::array<cd, 4>& x) {
  return l[0] * x[0] + l[1] * x[1] + l[2] * x[2] + l[3] * x[3];
}

std::array<cd, 4> quotient_map(const std::array<cd, 6>& y) {
  return {y[0] * y[0] * y[0], y[1] * y[1] * y[1], y[2] * y[2] * y[2], y[3] * y[3] * y[3]};
}

std::array<double, 2> y_model_residuals(const NormalForm& nf, const std::array<cd, 6>& y) {
  const auto x = quotient_map(y);
  std::array<double, 2> r{};
  for (int e = 0; e < 2; ++e) {
    const cd lhs = y[4 + e] * y[4 + e] * y[4 + e];
    const cd rhs = evaluate_form(nf.forms[4 + e], x);
    double scale = std::abs(lhs);
    for (int m = 0; m < 4; ++m) scale = std::max(scale, std::abs(nf.forms[4 + e][m] * x[m]));
    r[e] = scale > 0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  return r;
}

CoverEquation cover_equation(const ArrangementConfig& a) {
  CoverEquation out;
  out.forms = a.c;
  std::string rhs;
  for (int i = 0; i < 6; ++i) {
    const std::string f = affine_factor(a, i);
    if (f.empty()) continue;
    rhs += (rhs.empty() ? "" : "*") + f;
  }
  out.affine = "y^3 = " + (rhs.empty() ? std::string("1") : rhs);

  const ArrangementStability st = arrangement_stability(a);
  if (!st.cls.stable) {
    out.obstruction = st.common_lines.empty()
                          ? "unstable arrangement: a point lies on " + std::to_string(st.cls.max_multiplicity) + " hyperplanes"
                          : "unstable arrangement: three hyperplanes share a line";
    return out;
  }
  const Eigen::Matrix<cd, 6, 4> D = a.matrix();
  NormalForm nf;
  std::array<int, 6> order;
  if (st.cls.k == 0) {
    nf.kind = NormalForm::Kind::general;
    order = {0, 1, 2, 3, 4, 5};
  } else {
    nf.kind = NormalForm::Kind::fourfold;
    const IntersectionPoint* four = nullptr;
    for (const auto& ip : st.points)
      if (ip.hyperplanes.size() == 4) {
        four = &ip;
        break;
      }
    std::vector<int> rest;
    for (int h = 0; h < 6; ++h)
      if (std::find(four->hyperplanes.begin(), four->hyperplanes.end(), h) == four->hyperplanes.end())
        rest.push_back(h);
    const auto& q = four->hyperplanes;
    order = {rest[0], q[0], q[1], q[2], q[3], rest[1]};
  }
  nf.order = order;
  Eigen::Matrix4cd B;
  for (int i = 0; i < 4; ++i) B.row(i) = D.row(order[i]);
  if (std::abs(B.determinant()) <= 1e-12 * std::pow(B.norm(), 4)) {
    out.obstruction = "the first four normal-form hyperplanes are dependent";
    return out;
  }
  const Eigen::Matrix4cd Bi = B.inverse();
  const Eigen::RowVector4cd r = D.row(order[4]) * Bi;
  Eigen::Vector4cd scale;
  if (nf.kind == NormalForm::Kind::general) {
    for (int i = 0; i < 4; ++i) scale[i] = r[i];
  } else {
    if (std::abs(r[0]) > 1e-9 * r.norm()) {
      out.obstruction = "fourth hyperplane does not pass through the fourfold point";
      return out;
    }
    scale[0] = 1.0;
    for (int i = 1; i < 4; ++i) scale[i] = r[i];
  }
  for (int i = 0; i < 4; ++i)
    if (std::abs(scale[i]) < 1e-9 * r.norm()) {
      out.obstruction = "three of the hyperplanes through a common point share a line";
      return out;
    }
  nf.transform = scale.asDiagonal() * B;
  const Eigen::Matrix4cd Ti = nf.transform.inverse();
  Eigen::RowVector4cd s = D.row(order[5]) * Ti;
  if (std::abs(s[0]) < 1e-9 * s.norm()) {
    out.obstruction = "last hyperplane passes through the coordinate point [1:0:0:0]";
    return out;
  }
  s /= s[0];
  for (int i = 0; i < 3; ++i) nf.coeffs[i] = s[i + 1];
  for (int i = 0; i < 4; ++i) {
    nf.forms[i] = {0.0, 0.0, 0.0, 0.0};
    nf.forms[i][i] = 1.0;
  }
  if (nf.kind == NormalForm::Kind::general) nf.forms[4] = {1.0, 1.0, 1.0, 1.0};
  else nf.forms[4] = {0.0, 1.0, 1.0, 1.0};
  nf.forms[5] = {1.0, s[1], s[2], s[3]};
  nf.equations = {"Y4^3 = " + cubic_rhs(nf.forms[4]), "Y5^3 = " + cubic_rhs(nf.forms[5])};
  nf.quotient = "[Y0:Y1:Y2:Y3:Y4:Y5] -> [Y0^3:Y1^3:Y2^3:Y3^3]";
  out.normal_form = nf;
  return out;
}

HodgeTable hodge_numbers(int k) {
  if (k < 0 || k > 3) throw InputError("k must lie in 0..3");
  HodgeTable t;
  t.k = k;
  t.rank_eisenstein = 4 - k;
  t.dim_q = 8 - 2 * k;
  t.signature = {3 - k, 1};

  // Exponents mu = (multiplicity)/3 of the limit curve y^3 = prod (x - z)^m.
  std::vector<int> mult(6 - 2 * k, 1);
  mult.insert(mult.end(), k, 2);
  int sum_mu3 = 0, sum_co3 = 0;
  for (int m : mult) {
    sum_mu3 += m;
    sum_co3 += 3 - m;
  }
  t.curve_omegabar = {sum_mu3 / 3 - 1, sum_co3 / 3 - 1};
  t.curve_omega = {t.curve_omegabar.second, t.curve_omegabar.first};

  if (k == 0) {
    // y^3 = f(x), deg f = 6. Order of x^a dx / y^b at a branch point is 2 - b,
    // at each of the three points over infinity 2b - a - 2.
    int h_omega = 0, h_omegabar = 0;
    for (int b = 1; b <= 2; ++b)
      for (int a = 0; a <= 6; ++a)
        if (2 - b >= 0 && 2 * b - a - 2 >= 0) {
          const bool om = (b == 2);  // y -> omega y scales dx/y^b by omega^{-b}
          t.holomorphic.push_back({a, b, om});
          (om ? h_omega : h_omegabar)++;
        }
    const int genus = static_cast<int>(t.holomorphic.size());
    t.curve_omega = {h_omega, genus - h_omega};
    t.curve_omegabar = {h_omegabar, genus - h_omegabar};
    // Wedge cube of the omega-eigenspace graded by (1,0) / (0,1).
    std::vector<int> p(t.curve_omega.first, 1);
    p.insert(p.end(), t.curve_omega.second, 0);
    const int n = static_cast<int>(p.size());
    int h30 = 0, h21 = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int l = j + 1; l < n; ++l) {
          const int s = p[i] + p[j] + p[l];
          if (s == 3) ++h30;
          if (s == 2) ++h21;
        }
    t.threefold = {h30, h21};
  } else {
    t.threefold = t.curve_omegabar;
  }
  return t;
}

}  // namespace torelli
