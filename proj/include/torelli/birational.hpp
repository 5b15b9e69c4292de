#pragma once

// Numerical verification of rational maps between affine varieties given by
// cube-root equations, driven by a declarative manifest.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace torelli {

using cd = std::complex<double>;

// Arithmetic expressions: numbers, identifiers, + - * / ^ (integer
// exponents), parentheses. The identifier omega is exp(2 pi i / 3) and i is
// the imaginary unit unless a scope defines them.
class Expression {
 public:
  struct Node;

  Expression();
  ~Expression();
  Expression(const Expression& other);
  Expression& operator=(const Expression& other);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  static Expression parse(const std::string& text);

  // Resolves identifiers to slots of an environment; names are first passed through rename.
  void bind(const std::map<std::string, int>& slots, const std::map<std::string, std::string>& rename = {});

  cd eval(const std::vector<cd>& env) const;
  // Same tree evaluated on absolute values with + and - both adding: a cancellation-free scale.
  double magnitude(const std::vector<cd>& env) const;

  std::string str() const;
  std::vector<std::string> identifiers() const;

 private:
  std::unique_ptr<Node> root_;
};

using Equation = std::pair<std::string, std::string>;  // lhs = rhs
using Binding = std::pair<std::string, std::string>;   // name := expression

struct VarietySpec {
  std::string name;
  std::string anchor;
  std::vector<std::string> vars;
  std::vector<Binding> lets;
  std::vector<Equation> equations;
  std::vector<Binding> solve;  // var^3 = expression, solved in order
  std::vector<std::string> poles;
  std::map<std::string, std::string> action;  // generator of the cyclic action
};

struct FactorRef {
  std::string variety;
  std::map<std::string, std::string> rename;
};

struct RationalMapSpec {
  std::string name;
  std::string anchor;
  std::vector<FactorRef> domain;
  std::string codomain;
  std::vector<Binding> lets;
  std::vector<Binding> components;  // one per codomain variable
  std::vector<std::string> poles;
};

struct EquivarianceSpec {
  std::string map;
  std::string anchor;
  std::vector<int> domain_powers;  // power of each factor's generator
  int codomain_power = 1;
};

struct CompositionSpec {
  std::string name;
  std::string anchor;
  std::vector<std::string> chain;
  std::string direct;  // a map name, or "identity"
};

struct Manifest {
  std::vector<std::string> parameters;
  std::vector<VarietySpec> varieties;
  std::vector<RationalMapSpec> maps;
  std::vector<EquivarianceSpec> equivariance;
  std::vector<CompositionSpec> compositions;

  const VarietySpec& variety(const std::string& name) const;
  const RationalMapSpec& map(const std::string& name) const;
};

Manifest parse_manifest(const std::string& json_text);
Manifest load_manifest(const std::string& path);
const std::string& builtin_manifest_text();
Manifest builtin_manifest();

using Params = std::vector<cd>;  // values of Manifest::parameters
using Point = std::vector<cd>;   // ambient coordinates of a (product) variety

// Random parameters away from 0, 1 and each other.
Params random_parameters(const Manifest& m, std::uint64_t seed);

struct SampleSet {
  std::vector<std::string> vars;
  std::vector<Point> points;
  double max_residual = 0.0;
  int rejected = 0;
};

// Free coordinates are complex normal; each solved variable is the principal
// cube root times omega^s with sheet s drawn from the seeded generator.
SampleSet sample_on_variety(const Manifest& m, const std::vector<FactorRef>& factors, const Params& p,
                            std::uint64_t seed, int count);
SampleSet sample_on_variety(const Manifest& m, const std::string& variety, const Params& p, std::uint64_t seed,
                            int count);

struct CheckReport {
  std::string kind;
  std::string name;
  std::string anchor;
  double max_residual = 0.0;
  long long evaluations = 0;
  int rejected = 0;
  bool passed = false;
  std::string dump;  // symbolic substitution of the worst case on failure
};

struct CheckOptions {
  int triples = 100;
  int samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

CheckReport verify_map(const Manifest& m, const std::string& map, const CheckOptions& opt = {});
CheckReport verify_equivariance(const Manifest& m, const EquivarianceSpec& e, const CheckOptions& opt = {});
CheckReport verify_composition(const Manifest& m, const CompositionSpec& c, const CheckOptions& opt = {});

// Rank of the derivative of the map restricted to the tangent space of its domain.
int jacobian_rank(const Manifest& m, const std::string& map, const Params& p, const Point& at, double step = 1e-6,
                  double threshold = 1e-7);
int variety_dimension(const Manifest& m, const std::string& variety);

struct ManifestReport {
  std::vector<CheckReport> rows;
  bool all_passed() const;
};

ManifestReport run_manifest(const Manifest& m, const CheckOptions& opt = {});

}  // namespace torelli
