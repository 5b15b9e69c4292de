#pragma once

// Six ordered points on P^1 and six hyperplanes in P^3.
//
// Values are exact rationals, complex floats, or infinity. A configuration is
// processed exactly when it contains no complex float; otherwise equality is
// tested with relative tolerance 1e-9.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace torelli {

using Rational = boost::multiprecision::cpp_rational;
using cd = std::complex<double>;

inline constexpr double kModuliTolerance = 1e-9;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

class PointValue {
 public:
  enum class Kind { rational, complex, infinity };

  PointValue() = default;
  static PointValue rational(const Rational& q);
  static PointValue complex(cd z);
  static PointValue infinity();

  Kind kind() const { return kind_; }
  bool is_infinity() const { return kind_ == Kind::infinity; }
  bool is_exact() const { return kind_ != Kind::complex; }
  const Rational& q() const;
  cd z() const;  // throws on infinity
  std::string str() const;

 private:
  Kind kind_ = Kind::rational;
  Rational q_{0};
  cd z_{};
};

struct PointConfig {
  std::array<PointValue, 6> points;

  bool is_exact() const;
  int infinity_index() const;  // first infinite entry, -1 if none
  static PointConfig from_complex(const std::array<cd, 6>& z);
};

// x -> (m00 x + m01) / (m10 x + m11)
class Mobius {
 public:
  static Mobius identity();
  static Mobius exact(const std::array<Rational, 4>& m);
  static Mobius numeric(const std::array<cd, 4>& m);

  bool is_exact() const { return exact_; }
  const std::array<Rational, 4>& q() const { return q_; }
  std::array<cd, 4> matrix() const;  // normalized to determinant 1

  PointValue apply(const PointValue& x) const;
  PointConfig apply(const PointConfig& c) const;
  Mobius compose(const Mobius& inner) const;  // this o inner
  Mobius inverse() const;

 private:
  bool exact_ = true;
  std::array<Rational, 4> q_{1, 0, 0, 1};
  std::array<cd, 4> c_{1.0, 0.0, 0.0, 1.0};
};

struct Normalized {
  Mobius map;                     // sends the anchors to 0, 1, infinity
  std::array<int, 3> anchors{};   // indices of the first three distinct values
  std::array<PointValue, 6> image;
  std::array<PointValue, 3> rest;  // images of the remaining entries, in index order
};

Normalized normalize(const PointConfig& c);

struct EquivalenceWitness {
  std::array<int, 6> permutation{};  // b[i] = map(a[permutation[i]])
  Mobius map;
};

std::optional<EquivalenceWitness> is_equivalent(const PointConfig& a, const PointConfig& b);
bool check_witness(const PointConfig& a, const PointConfig& b, const EquivalenceWitness& w);

struct StabilityClass {
  int k = 0;
  bool stable = true;
  int max_multiplicity = 1;
};

StabilityClass stability(const PointConfig& c);

// Hyperplane i is {sum_m h[i][m] X_m = 0}.
struct ArrangementConfig {
  bool exact = true;
  std::array<std::array<Rational, 4>, 6> q{};
  std::array<std::array<cd, 4>, 6> c{};

  static ArrangementConfig from_rational(const std::array<std::array<Rational, 4>, 6>& h);
  static ArrangementConfig from_complex(const std::array<std::array<cd, 4>, 6>& h);
  Eigen::Matrix<cd, 6, 4> matrix() const;
};

// Gale transform: the hyperplane rows span the kernel of the 2x6 point matrix.
// A double point becomes four hyperplanes through a common point; a triple
// point makes all six hyperplanes pass through one point.
ArrangementConfig associate(const PointConfig& c);

// Hyperplane of binary cubics c0 u^3 + c1 u^2 v + c2 u v^2 + c3 v^3 vanishing at p.
ArrangementConfig sym3_arrangement(const PointConfig& c);

// Inverse of associate (up to Mobius equivalence).
PointConfig points_from_arrangement(const ArrangementConfig& a);

// T with B_i proportional to A_i T for all i; requires A_0..A_4 in general position.
std::optional<Eigen::Matrix4cd> arrangement_equivalence(const ArrangementConfig& a, const ArrangementConfig& b);

struct IntersectionPoint {
  Eigen::Vector4cd point;
  std::vector<int> hyperplanes;
};

struct ArrangementStability {
  StabilityClass cls;
  std::vector<IntersectionPoint> points;  // every point on three or more hyperplanes
  std::vector<std::array<int, 3>> common_lines;  // triples meeting in a line
};

// Stable iff no point lies on five hyperplanes and no three share a line.

ArrangementStability arrangement_stability(const ArrangementConfig& a);

struct NormalForm {
  enum class Kind { general, fourfold };
  Kind kind = Kind::general;
  std::array<int, 6> order{};   // original index of l_0 .. l_5
  std::array<cd, 3> coeffs{};   // (a, b, c) or (b1, b2, b3)
  Eigen::Matrix4cd transform;   // new coordinates X' = transform * X
  std::array<std::array<cd, 4>, 6> forms{};  // l_i in the new coordinates
  std::array<std::string, 2> equations;
  std::string quotient;
};

struct CoverEquation {
  std::array<std::array<cd, 4>, 6> forms{};  // original linear forms
  std::string affine;                        // y^3 = prod l_i in the chart X_0 = 1
  std::optional<NormalForm> normal_form;
  std::string obstruction;
};

CoverEquation cover_equation(const ArrangementConfig& a);

// Relative residuals of the two cubics of the P^5 model at Y.
std::array<double, 2> y_model_residuals(const NormalForm& nf, const std::array<cd, 6>& y);
std::array<cd, 4> quotient_map(const std::array<cd, 6>& y);
cd evaluate_form(const std::array<cd, 4>& l, const std::array<cd, 4>& x);

struct Differential {
  int a = 0, b = 0;  // x^a dx / y^b
  bool omega_eigen = false;  // eigenvalue omega under y -> omega y (else omega-bar)
};

struct HodgeTable {
  int k = 0;
  int rank_eisenstein = 4;
  int dim_q = 8;
  std::pair<int, int> signature{3, 1};
  std::vector<Differential> holomorphic;  // basis of H^{1,0} of the curve (k = 0)
  std::pair<int, int> curve_omega{0, 0};     // (h^{1,0}, h^{0,1}) of the omega-eigenspace
  std::pair<int, int> curve_omegabar{0, 0};
  std::pair<int, int> threefold{0, 0};       // (h^{3,0}, h^{2,1}) of the omega-eigenspace of H^3
};

HodgeTable hodge_numbers(int k);

}  // namespace torelli
