#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the quadrature, continuation or enumeration code under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "torelli/eisenstein.hpp"
#include "torelli/moduli.hpp"

namespace oracle {

using cd = std::complex<double>;
const double pi = 3.14159265358979323846;

// Half-twist homeomorphism: rotation by -pi on |x - c| <= r1, interpolated to
// the identity at r2.
struct Twist {
  bool active = false;
  cd c;
  double r1 = 0, r2 = 0;
  double angle = pi;  // clockwise

  double phi(double rho) const {
    if (!active || rho >= r2) return 0.0;
    if (rho <= r1) return 1.0;
    return (r2 - rho) / (r2 - r1);
  }
  cd operator()(cd x) const {
    if (!active) return x;
    return c + (x - c) * std::polar(1.0, -angle * phi(std::abs(x - c)));
  }
  // Derivative of s -> h(x0 + s d).
  cd derivative(cd x, cd d) const {
    if (!active) return d;
    const cd w = x - c;
    const double rho = std::abs(w);
    const cd rot = std::polar(1.0, -angle * phi(rho));
    double dphi = 0.0;
    if (rho > r1 && rho < r2) dphi = -1.0 / (r2 - r1);
    const double drho = rho > 0 ? (std::conj(w) * d).real() / rho : 0.0;
    return d * rot + w * rot * cd(0.0, -angle * dphi * drho);
  }
};

inline Twist half_twist(const std::vector<cd>& p, int position, double angle = pi) {
  Twist t;
  t.angle = angle;
  if (position <= 0) return t;
  const cd a = p[position - 1], b = p[position];
  t.active = true;
  t.c = 0.5 * (a + b);
  const double r0 = 0.5 * std::abs(b - a);
  double clear = 1e300;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (static_cast<int>(k) != position - 1 && static_cast<int>(k) != position)
      clear = std::min(clear, std::abs(p[k] - t.c));
  t.r1 = r0 + 0.25 * (clear - r0);
  t.r2 = r0 + 0.75 * (clear - r0);
  return t;
}

// Slit integrals of prod (x - p_k)^{-1/3} dx for points already sorted by
// (Re, Im), under the polygon branch convention, carried along the image of
// the contour system by the twist. With no twist these are the plain periods.
class ContourPeriods {
 public:
  ContourPeriods(std::vector<cd> points, Twist twist) : p_(std::move(points)), f_(p_), h_(twist) {
    const int n = static_cast<int>(p_.size());
    double spacing = 1e300, size = 0;
    for (int a = 0; a < n; ++a) {
      size = std::max(size, std::abs(p_[a]));
      for (int b = a + 1; b < n; ++b) spacing = std::min(spacing, std::abs(p_[a] - p_[b]));
    }
    delta_ = 1e-3 * spacing;
    far_ = p_[0] - (10.0 + 10.0 * size);

    // Convention at the start of the first slit, then back to the far point.
    const cd u0 = (p_[1] - p_[0]) / std::abs(p_[1] - p_[0]);
    const cd q0 = p_[0] + delta_ * u0;
    std::vector<double> args(n);
    args[0] = std::arg(u0);
    for (int k = 1; k < n; ++k) {
      double a = std::arg(p_[0] - p_[k]);
      if (a < 0) a += 2 * pi;
      args[k] = a + std::arg((q0 - p_[k]) / (p_[0] - p_[k]));
    }
    Twist none;
    auto back_arc = [&](double s) { return p_[0] + delta_ * std::polar(1.0, arc_end0_ - s * (arc_end0_ - pi)); };
    arc_end0_ = std::arg(u0);
    while (arc_end0_ <= pi) arc_end0_ += 2 * pi;
    track(none, back_arc, 0.0, 1.0, args, nullptr);
    track(none, [&](double s) { return (p_[0] - delta_) + s * (far_ - (p_[0] - delta_)); }, 0.0, 1.0, args, nullptr);
    far_args_ = args;
  }

  // Factor points after the twist.
  const std::vector<cd>& moved() const { return f_; }

  // Slit j (1-based) joins p_j and p_{j+1}.
  cd slit(int j) {
    const int n = static_cast<int>(p_.size());
    std::vector<double> args = far_args_;
    for (std::size_t k = 0; k < p_.size(); ++k) {
      f_[k] = h_(p_[k]);
      args[k] += std::arg((far_ - f_[k]) / (far_ - p_[k]));
    }
    track(h_, [&](double s) { return far_ + s * ((p_[0] - delta_) - far_); }, 0.0, 1.0, args, nullptr);
    track(h_, [&](double s) { return p_[0] + delta_ * std::polar(1.0, pi + s * (arc_end0_ - pi)); }, 0.0, 1.0, args,
          nullptr);
    for (int m = 0; m + 1 < n; ++m) {
      const cd d = p_[m + 1] - p_[m];
      const double len = std::abs(d);
      const double s0 = delta_ / len, s1 = 1.0 - delta_ / len;
      if (m + 1 == j) {
        samples_.clear();
        track(h_, [&](double s) { return p_[m] + s * d; }, s0, s1, args, &samples_);
        return integrate(m, d);
      }
      track(h_, [&](double s) { return p_[m] + s * d; }, s0, s1, args, nullptr);
      const double in = std::arg(-d);
      double out = std::arg(p_[m + 2] - p_[m + 1]);
      while (out <= in) out += 2 * pi;
      track(h_, [&](double s) { return p_[m + 1] + delta_ * std::polar(1.0, in + s * (out - in)); }, 0.0, 1.0, args,
            nullptr);
    }
    return {};
  }

 private:
  struct Sample {
    double s;
    cd x;
    std::vector<double> args;
  };

  void step(const Twist& h, const std::function<cd(double)>& path, double sa, double sb, std::vector<double>& args,
            std::vector<Sample>* out, int depth) {
    const cd xa = h(path(sa)), xb = h(path(sb));
    double worst = 0;
    for (std::size_t k = 0; k < f_.size(); ++k) worst = std::max(worst, std::abs(std::arg((xb - f_[k]) / (xa - f_[k]))));
    if (worst > 0.05 && depth < 40) {
      const double sm = 0.5 * (sa + sb);
      step(h, path, sa, sm, args, out, depth + 1);
      step(h, path, sm, sb, args, out, depth + 1);
      return;
    }
    for (std::size_t k = 0; k < f_.size(); ++k) args[k] += std::arg((xb - f_[k]) / (xa - f_[k]));
    if (out) out->push_back({sb, xb, args});
  }

  void track(const Twist& h, const std::function<cd(double)>& path, double s0, double s1, std::vector<double>& args,
             std::vector<Sample>* out) {
    if (out) out->push_back({s0, h(path(s0)), args});
    const int pieces = 256;
    for (int i = 0; i < pieces; ++i)
      step(h, path, s0 + (s1 - s0) * i / pieces, s0 + (s1 - s0) * (i + 1) / pieces, args, out, 0);
  }

  cd integrate(int m, cd d) {
    const cd pa = p_[m], pb = p_[m + 1];
    const std::size_t ia = m, ib = m + 1;
    const cd rot_a = std::polar(1.0, -h_.angle * h_.phi(std::abs(pa - h_.c)));
    const cd rot_b = std::polar(1.0, -h_.angle * h_.phi(std::abs(pb - h_.c)));
    const std::size_t n = p_.size();
    // tl, tr: parameter distances to the two ends of the slit.
    auto value = [&](double tl, double tr) -> cd {
      const double s = tl <= tr ? tl : 1.0 - tr;
      const cd pre = tl <= tr ? pa + tl * d : pb - tr * d;
      const cd x = h_(pre);
      auto it = std::lower_bound(samples_.begin(), samples_.end(), s,
                                 [](const Sample& a, double v) { return a.s < v; });
      if (it == samples_.end()) --it;
      if (it != samples_.begin() && std::abs(std::prev(it)->s - s) < std::abs(it->s - s)) --it;
      double re = 0, im = 0;
      for (std::size_t k = 0; k < n; ++k) {
        cd w;
        if (k == ia && tl < 1e-6)
          w = rot_a * (tl * d);
        else if (k == ib && tr < 1e-6)
          w = rot_b * (-tr * d);
        else
          w = x - f_[k];
        re += std::log(std::abs(w));
        im += it->args[k] + std::arg(w / (it->x - f_[k]));
      }
      return std::exp(-cd(re, im) / 3.0) * h_.derivative(pre, d);
    };
    std::vector<double> cuts{0.0, 1.0};
    if (h_.active)
      for (double r : {h_.r1, h_.r2}) {
        const cd w0 = pa - h_.c;
        const double A = std::norm(d), B = 2 * (std::conj(w0) * d).real(), C = std::norm(w0) - r * r;
        const double disc = B * B - 4 * A * C;
        if (disc <= 0) continue;
        for (double sgn : {-1.0, 1.0}) {
          const double s = (-B + sgn * std::sqrt(disc)) / (2 * A);
          if (s > 1e-12 && s < 1 - 1e-12) cuts.push_back(s);
        }
      }
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> ts(15);
    cd total = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      auto f = [&](double u, double uc) {
        double tl = a + (b - a) * u, tr = 1.0 - tl;
        if (a == 0.0 && uc < 0) tl = -uc * (b - a);
        if (b == 1.0 && uc > 0) tr = uc * (b - a);
        return value(tl, tr) * (b - a);
      };
      const double re = ts.integrate([&](double u, double uc) { return f(u, uc).real(); }, 0.0, 1.0, 1e-13);
      const double im = ts.integrate([&](double u, double uc) { return f(u, uc).imag(); }, 0.0, 1.0, 1e-13);
      total += cd(re, im);
    }
    return total;
  }

  std::vector<cd> p_, f_;
  Twist h_;
  double delta_ = 0;
  cd far_;
  double arc_end0_ = 0;
  std::vector<double> far_args_;
  std::vector<Sample> samples_;
};

inline std::vector<cd> sorted_points(std::vector<cd> p) {
  std::sort(p.begin(), p.end(), [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return p;
}

// Cross ratio (a, b; c, d) with exact arithmetic and a point at infinity allowed.
inline std::optional<torelli::Rational> cross_ratio(const torelli::PointValue& a, const torelli::PointValue& b,
                                                    const torelli::PointValue& c, const torelli::PointValue& d) {
  using torelli::Rational;
  // (c - a)(d - b) / ((c - b)(d - a)), dropping factors containing infinity.
  auto diff = [](const torelli::PointValue& x, const torelli::PointValue& y) -> std::optional<Rational> {
    if (x.is_infinity() || y.is_infinity()) return std::nullopt;
    return x.q() - y.q();
  };
  Rational num = 1, den = 1;
  for (auto [x, y, top] : {std::tuple{c, a, true}, std::tuple{d, b, true}, std::tuple{c, b, false}, std::tuple{d, a, false}}) {
    const auto v = diff(x, y);
    if (!v) continue;
    (top ? num : den) *= *v;
  }
  if (den == 0) return std::nullopt;
  return num / den;
}

// Brute force over all 720 orderings: b is a Mobius image of a permutation of
// a iff the three cross ratios (b0, b1; b2, bk) agree. Distinct exact points only.
inline bool equivalent_by_cross_ratios(const torelli::PointConfig& a, const torelli::PointConfig& b) {
  std::array<int, 6> perm;
  std::iota(perm.begin(), perm.end(), 0);
  std::array<torelli::Rational, 3> target;
  for (int k = 3; k < 6; ++k) target[k - 3] = *cross_ratio(b.points[0], b.points[1], b.points[2], b.points[k]);
  do {
    bool same = true;
    for (int k = 3; k < 6 && same; ++k) {
      const auto cr = cross_ratio(a.points[perm[0]], a.points[perm[1]], a.points[perm[2]], a.points[perm[k]]);
      same = cr && *cr == target[k - 3];
    }
    if (same) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Exhaustive scan of the box max |a|,|b| <= bound with the form evaluated in floating point.
inline std::size_t count_short_roots(const torelli::HermitianForm& h, int bound) {
  const Eigen::Matrix4cd g = h.gram().to_complex();
  const cd w(-0.5, std::sqrt(3.0) / 2.0);
  const int side = 2 * bound + 1;
  long long total = 1;
  for (int i = 0; i < 8; ++i) total *= side;
  std::size_t count = 0;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) {
      const int a = static_cast<int>(c % side) - bound;
      c /= side;
      const int b = static_cast<int>(c % side) - bound;
      c /= side;
      v(i) = double(a) + double(b) * w;
    }
    const double n = (v.adjoint() * g * v)(0, 0).real();
    if (std::abs(n - 1.0) < 1e-6) ++count;
  }
  return count;
}

// Hodge types of x^a dx / y^b on y^3 = sextic: holomorphic iff 1 <= b <= 2 and
// 0 <= a <= 2b - 2 (local orders at branch points and at the three points over
// infinity). The automorphism y -> omega y acts by omega^{-b}.
struct CurveCount {
  int omega = 0, omega_bar = 0;
};

inline CurveCount holomorphic_differentials() {
  CurveCount c;
  for (int b = 1; b <= 5; ++b)
    for (int a = 0; a <= 10; ++a) {
      const bool at_branch = 2 - b >= 0;
      const bool at_infinity = 2 * b - a - 2 >= 0;
      if (!at_branch || !at_infinity) continue;
      ((((-b) % 3) + 3) % 3 == 1 ? c.omega : c.omega_bar) += 1;
    }
  return c;
}

// Types (p, q) of the wedge cube of a graded space with dims (h10, h01).
inline std::vector<std::pair<int, int>> wedge_cube(int h10, int h01) {
  std::vector<int> types(h10, 0);
  types.insert(types.end(), h01, 1);
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(types.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const int q = types[a] + types[b] + types[c];
        out.emplace_back(3 - q, q);
      }
  return out;
}

}  // namespace oracle
