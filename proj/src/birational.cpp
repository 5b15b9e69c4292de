#include "torelli/birational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "torelli/errors.hpp"

namespace torelli {

// ---------------------------------------------------------------- expressions

struct Expression::Node {
  enum class Kind { number, name, add, sub, mul, div, pow, neg };
  Kind kind = Kind::number;
  cd value{};
  std::string name;
  int slot = -1;
  int exponent = 0;
  std::unique_ptr<Node> a, b;

  std::unique_ptr<Node> clone() const {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->value = value;
    n->name = name;
    n->slot = slot;
    n->exponent = exponent;
    if (a) n->a = a->clone();
    if (b) n->b = b->clone();
    return n;
  }
};

namespace {

using Node = Expression::Node;
using Kind = Expression::Node::Kind;

const cd kOmega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::unique_ptr<Node> parse() {
    auto n = expr(0);
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression \"" + s_ + "\": " + what + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static int infix_power(char op) {
    switch (op) {
      case '+':
      case '-': return 10;
      case '*':
      case '/': return 20;
      case '^': return 30;
      default: return -1;
    }
  }

  static std::unique_ptr<Node> binary(Kind k, std::unique_ptr<Node> a, std::unique_ptr<Node> b) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  std::unique_ptr<Node> expr(int min_power) {
    auto lhs = prefix();
    for (;;) {
      const char op = peek();
      const int p = infix_power(op);
      if (p < 0 || p < min_power) break;
      ++pos_;
      if (op == '^') {
        const int e = integer_exponent();
        auto n = std::make_unique<Node>();
        n->kind = Kind::pow;
        n->exponent = e;
        n->a = std::move(lhs);
        lhs = std::move(n);
        continue;
      }
      auto rhs = expr(p + 1);
      const Kind k = op == '+' ? Kind::add : op == '-' ? Kind::sub : op == '*' ? Kind::mul : Kind::div;
      lhs = binary(k, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  int integer_exponent() {
    bool paren = false, negative = false;
    if (peek() == '(') {
      paren = true;
      ++pos_;
    }
    if (peek() == '-') {
      negative = true;
      ++pos_;
    }
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer");
    const int e = std::stoi(s_.substr(start, pos_ - start));
    if (paren) {
      if (peek() != ')') fail("missing ')'");
      ++pos_;
    }
    return negative ? -e : e;
  }

  std::unique_ptr<Node> prefix() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      auto n = std::make_unique<Node>();
      n->kind = Kind::neg;
      n->a = expr(25);
      return n;
    }
    if (c == '+') {
      ++pos_;
      return expr(25);
    }
    if (c == '(') {
      ++pos_;
      auto n = expr(0);
      if (peek() != ')') fail("missing ')'");
      ++pos_;
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      auto n = std::make_unique<Node>();
      n->kind = Kind::number;
      try {
        n->value = std::stod(s_.substr(start, pos_ - start));
      } catch (const std::exception&) {
        fail("bad number");
      }
      n->name = s_.substr(start, pos_ - start);
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      auto n = std::make_unique<Node>();
      n->kind = Kind::name;
      n->name = s_.substr(start, pos_ - start);
      return n;
    }
    if (c == '\0') fail("unexpected end");
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

cd ipow(cd x, int e) {
  if (e < 0) return 1.0 / ipow(x, -e);
  cd r = 1.0;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

cd eval_node(const Node& n, const std::vector<cd>& env) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::name: return n.slot >= 0 ? env[n.slot] : n.value;
    case Kind::add: return eval_node(*n.a, env) + eval_node(*n.b, env);
    case Kind::sub: return eval_node(*n.a, env) - eval_node(*n.b, env);
    case Kind::mul: return eval_node(*n.a, env) * eval_node(*n.b, env);
    case Kind::div: return eval_node(*n.a, env) / eval_node(*n.b, env);
    case Kind::pow: return ipow(eval_node(*n.a, env), n.exponent);
    case Kind::neg: return -eval_node(*n.a, env);
  }
  return 0.0;
}

double magnitude_node(const Node& n, const std::vector<cd>& env) {
  switch (n.kind) {
    case Kind::number:
    case Kind::name: return std::abs(eval_node(n, env));
    case Kind::add:
    case Kind::sub: return magnitude_node(*n.a, env) + magnitude_node(*n.b, env);
    case Kind::mul: return magnitude_node(*n.a, env) * magnitude_node(*n.b, env);
    case Kind::div: return magnitude_node(*n.a, env) / std::abs(eval_node(*n.b, env));
    case Kind::pow:
      return n.exponent >= 0 ? std::pow(magnitude_node(*n.a, env), n.exponent)
                             : std::pow(std::abs(eval_node(*n.a, env)), n.exponent);
    case Kind::neg: return magnitude_node(*n.a, env);
  }
  return 0.0;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub: return 10;
    case Kind::mul:
    case Kind::div: return 20;
    case Kind::neg: return 25;
    case Kind::pow: return 30;
    default: return 40;
  }
}

std::string print(const Node& n) {
  auto wrap = [](const Node& c, int p) { return precedence(c) < p ? "(" + print(c) + ")" : print(c); };
  switch (n.kind) {
    case Kind::number: return n.name;
    case Kind::name: return n.name;
    case Kind::add: return wrap(*n.a, 10) + " + " + wrap(*n.b, 11);
    case Kind::sub: return wrap(*n.a, 10) + " - " + wrap(*n.b, 11);
    case Kind::mul: return wrap(*n.a, 20) + "*" + wrap(*n.b, 21);
    case Kind::div: return wrap(*n.a, 20) + "/" + wrap(*n.b, 21);
    case Kind::neg: return "-" + wrap(*n.a, 26);
    case Kind::pow: return wrap(*n.a, 31) + "^" + std::to_string(n.exponent);
  }
  return {};
}

void bind_node(Node& n, const std::map<std::string, int>& slots, const std::map<std::string, std::string>& rename) {
  if (n.kind == Kind::name) {
    auto r = rename.find(n.name);
    const std::string& key = r == rename.end() ? n.name : r->second;
    auto it = slots.find(key);
    if (it != slots.end()) {
      n.slot = it->second;
      n.name = key;
    } else if (key == "omega") {
      n.slot = -1;
      n.value = kOmega;
    } else if (key == "i") {
      n.slot = -1;
      n.value = cd(0.0, 1.0);
    } else {
      throw InputError("unknown identifier '" + key + "'");
    }
  }
  if (n.a) bind_node(*n.a, slots, rename);
  if (n.b) bind_node(*n.b, slots, rename);
}

void collect(const Node& n, std::vector<std::string>& out) {
  if (n.kind == Kind::name && std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
  if (n.a) collect(*n.a, out);
  if (n.b) collect(*n.b, out);
}

}  // namespace

Expression::Expression() = default;
Expression::~Expression() = default;
Expression::Expression(const Expression& other) : root_(other.root_ ? other.root_->clone() : nullptr) {}
Expression& Expression::operator=(const Expression& other) {
  if (this != &other) root_ = other.root_ ? other.root_->clone() : nullptr;
  return *this;
}
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  return e;
}

void Expression::bind(const std::map<std::string, int>& slots, const std::map<std::string, std::string>& rename) {
  if (root_) bind_node(*root_, slots, rename);
}

cd Expression::eval(const std::vector<cd>& env) const { return root_ ? eval_node(*root_, env) : cd(0.0); }

double Expression::magnitude(const std::vector<cd>& env) const {
  return root_ ? magnitude_node(*root_, env) : 0.0;
}

std::string Expression::str() const { return root_ ? print(*root_) : std::string(); }

std::vector<std::string> Expression::identifiers() const {
  std::vector<std::string> out;
  if (root_) collect(*root_, out);
  return out;
}

// ---------------------------------------------------------------- manifest

const VarietySpec& Manifest::variety(const std::string& name) const {
  for (const auto& v : varieties)
    if (v.name == name) return v;
  throw InputError("manifest has no variety '" + name + "'");
}

const RationalMapSpec& Manifest::map(const std::string& name) const {
  for (const auto& m : maps)
    if (m.name == name) return m;
  throw InputError("manifest has no map '" + name + "'");
}

namespace {

using nlohmann::json;

std::vector<Binding> pairs_of(const json& j, const char* key) {
  std::vector<Binding> out;
  if (!j.contains(key)) return out;
  for (const auto& p : j.at(key)) {
    if (!p.is_array() || p.size() != 2) throw InputError(std::string("'") + key + "' entries must be pairs");
    out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return out;
}

}  // namespace

Manifest parse_manifest(const std::string& json_text) {
  Manifest m;
  try {
    const json j = json::parse(json_text);
    m.parameters = j.at("parameters").get<std::vector<std::string>>();
    for (const auto& v : j.at("varieties")) {
      VarietySpec s;
      s.name = v.at("name").get<std::string>();
      s.anchor = v.value("anchor", "");
      s.vars = v.at("vars").get<std::vector<std::string>>();
      s.lets = pairs_of(v, "lets");
      s.equations = pairs_of(v, "equations");
      s.solve = pairs_of(v, "solve");
      if (v.contains("poles")) s.poles = v.at("poles").get<std::vector<std::string>>();
      if (v.contains("action")) s.action = v.at("action").get<std::map<std::string, std::string>>();
      m.varieties.push_back(std::move(s));
    }
    for (const auto& f : j.at("maps")) {
      RationalMapSpec s;
      s.name = f.at("name").get<std::string>();
      s.anchor = f.value("anchor", "");
      for (const auto& d : f.at("domain")) {
        FactorRef r;
        r.variety = d.at("variety").get<std::string>();
        if (d.contains("rename")) r.rename = d.at("rename").get<std::map<std::string, std::string>>();
        s.domain.push_back(std::move(r));
      }
      s.codomain = f.at("codomain").get<std::string>();
      s.lets = pairs_of(f, "lets");
      s.components = pairs_of(f, "components");
      if (f.contains("poles")) s.poles = f.at("poles").get<std::vector<std::string>>();
      m.maps.push_back(std::move(s));
    }
    if (j.contains("equivariance"))
      for (const auto& e : j.at("equivariance")) {
        EquivarianceSpec s;
        s.map = e.at("map").get<std::string>();
        s.anchor = e.value("anchor", "");
        s.domain_powers = e.at("domain").get<std::vector<int>>();
        s.codomain_power = e.at("codomain").get<int>();
        m.equivariance.push_back(std::move(s));
      }
    if (j.contains("compositions"))
      for (const auto& c : j.at("compositions")) {
        CompositionSpec s;
        s.name = c.at("name").get<std::string>();
        s.anchor = c.value("anchor", "");
        s.chain = c.at("chain").get<std::vector<std::string>>();
        s.direct = c.at("direct").get<std::string>();
        m.compositions.push_back(std::move(s));
      }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  // reference checks
  for (const auto& f : m.maps) {
    for (const auto& d : f.domain) (void)m.variety(d.variety);
    (void)m.variety(f.codomain);
  }
  for (const auto& e : m.equivariance) {
    const auto& f = m.map(e.map);
    if (e.domain_powers.size() != f.domain.size())
      throw InputError("equivariance entry for '" + e.map + "' has the wrong number of powers");
  }
  for (const auto& c : m.compositions)
    for (const auto& n : c.chain) (void)m.map(n);
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

const std::string& builtin_manifest_text() {
  static const std::string text =
#include "appendix_manifest.inc"
      ;
  return text;
}

Manifest builtin_manifest() { return parse_manifest(builtin_manifest_text()); }

// ---------------------------------------------------------------- compiled spaces

namespace {

struct Compiled {
  std::map<std::string, int> slots;
  int nparams = 0;
  int size = 0;
  std::vector<std::string> vars;
  std::vector<int> var_slots;
  std::vector<int> factor_of_var;
  struct Let {
    int slot;
    Expression e;
  };
  std::vector<Let> lets;
  struct Eq {
    Expression lhs, rhs;
    std::string text;
  };
  std::vector<Eq> equations;
  struct Solve {
    int slot;
    Expression e;
  };
  std::vector<Solve> solves;
  std::vector<int> free_slots;
  std::vector<Expression> poles;
  struct Act {
    int slot;
    Expression e;
  };
  std::vector<std::vector<Act>> actions;  // per factor

  int add_slot(const std::string& name) {
    if (slots.count(name)) throw InputError("name '" + name + "' defined twice");
    slots[name] = size;
    return size++;
  }

  Expression compile(const std::string& text, const std::map<std::string, std::string>& rename = {}) const {
    Expression e = Expression::parse(text);
    e.bind(slots, rename);
    return e;
  }

  std::vector<cd> env(const Params& p) const {
    std::vector<cd> out(size, cd(0.0));
    std::copy(p.begin(), p.end(), out.begin());
    return out;
  }

  void update_lets(std::vector<cd>& env) const {
    for (const auto& l : lets) env[l.slot] = l.e.eval(env);
  }

  std::vector<cd> env_at(const Params& p, const Point& x) const {
    auto e = env(p);
    for (std::size_t k = 0; k < var_slots.size(); ++k) e[var_slots[k]] = x[k];
    update_lets(e);
    return e;
  }

  Point point(const std::vector<cd>& env) const {
    Point x;
    for (int s : var_slots) x.push_back(env[s]);
    return x;
  }

  double residual(const std::vector<cd>& env) const {
    double r = 0.0;
    for (const auto& q : equations) {
      const cd d = q.lhs.eval(env) - q.rhs.eval(env);
      const double scale = q.lhs.magnitude(env) + q.rhs.magnitude(env);
      if (std::abs(d) > 0.0) r = std::max(r, scale > 0 ? std::abs(d) / scale : std::abs(d));
    }
    return r;
  }

  bool near_pole(const std::vector<cd>& env, double tol) const {
    for (const auto& p : poles) {
      const double v = std::abs(p.eval(env));
      if (!std::isfinite(v) || v < tol * std::max(1.0, p.magnitude(env))) return true;
    }
    return false;
  }

  void act(std::vector<cd>& env, const std::vector<int>& powers) const {
    for (std::size_t f = 0; f < powers.size() && f < actions.size(); ++f) {
      const int n = ((powers[f] % 3) + 3) % 3;
      for (int k = 0; k < n; ++k) {
        std::vector<cd> next = env;
        for (const auto& a : actions[f]) next[a.slot] = a.e.eval(env);
        env = std::move(next);
        update_lets(env);
      }
    }
  }
};

Compiled compile_space(const Manifest& m, const std::vector<FactorRef>& factors) {
  Compiled c;
  for (const auto& p : m.parameters) c.add_slot(p);
  c.nparams = c.size;
  std::vector<const VarietySpec*> specs;
  for (const auto& f : factors) specs.push_back(&m.variety(f.variety));
  auto renamed = [](const FactorRef& f, const std::string& n) {
    auto it = f.rename.find(n);
    return it == f.rename.end() ? n : it->second;
  };
  for (std::size_t k = 0; k < factors.size(); ++k)
    for (const auto& v : specs[k]->vars) {
      c.var_slots.push_back(c.add_slot(renamed(factors[k], v)));
      c.vars.push_back(renamed(factors[k], v));
      c.factor_of_var.push_back(static_cast<int>(k));
    }
  for (std::size_t k = 0; k < factors.size(); ++k)
    for (const auto& l : specs[k]->lets) {
      const int slot = c.add_slot(renamed(factors[k], l.first));
      c.lets.push_back({slot, c.compile(l.second, factors[k].rename)});
    }
  c.actions.resize(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& s = *specs[k];
    const auto& rn = factors[k].rename;
    for (const auto& q : s.equations)
      c.equations.push_back({c.compile(q.first, rn), c.compile(q.second, rn), q.first + " = " + q.second});
    std::vector<std::string> solved;
    for (const auto& sv : s.solve) {
      c.solves.push_back({c.slots.at(renamed(factors[k], sv.first)), c.compile(sv.second, rn)});
      solved.push_back(sv.first);
    }
    for (const auto& v : s.vars)
      if (std::find(solved.begin(), solved.end(), v) == solved.end())
        c.free_slots.push_back(c.slots.at(renamed(factors[k], v)));
    for (const auto& p : s.poles) c.poles.push_back(c.compile(p, rn));
    for (const auto& [v, e] : s.action) {
      auto it = c.slots.find(renamed(factors[k], v));
      if (it == c.slots.end()) throw InputError("action of '" + s.name + "' refers to unknown variable " + v);
      c.actions[k].push_back({it->second, c.compile(e, rn)});
    }
  }
  return c;
}

struct CompiledMap {
  Compiled dom;  // domain space extended by the map's lets
  Compiled cod;
  std::vector<Expression> comps;  // in codomain variable order
  std::vector<std::string> comp_text;
  std::vector<Expression> poles;
};

CompiledMap compile_map(const Manifest& m, const RationalMapSpec& f) {
  CompiledMap c;
  c.dom = compile_space(m, f.domain);
  for (const auto& l : f.lets) {
    Expression e = c.dom.compile(l.second);
    const int slot = c.dom.add_slot(l.first);
    c.dom.lets.push_back({slot, std::move(e)});
  }
  c.cod = compile_space(m, {FactorRef{f.codomain, {}}});
  for (const auto& v : c.cod.vars) {
    auto it = std::find_if(f.components.begin(), f.components.end(), [&](const Binding& b) { return b.first == v; });
    if (it == f.components.end()) throw InputError("map '" + f.name + "' has no component for " + v);
    c.comps.push_back(c.dom.compile(it->second));
    c.comp_text.push_back(v + " := " + it->second);
  }
  if (f.components.size() != c.cod.vars.size()) throw InputError("map '" + f.name + "' has extra components");
  for (const auto& p : f.poles) c.poles.push_back(c.dom.compile(p));
  return c;
}

struct Image {
  std::vector<cd> env;       // codomain environment
  std::vector<double> mags;  // magnitude of each component expression
};

Image apply(const CompiledMap& f, const Params& p, const std::vector<cd>& dom_env) {
  Image out;
  out.env = f.cod.env(p);
  for (std::size_t k = 0; k < f.comps.size(); ++k) {
    out.env[f.cod.var_slots[k]] = f.comps[k].eval(dom_env);
    out.mags.push_back(f.comps[k].magnitude(dom_env));
  }
  f.cod.update_lets(out.env);
  return out;
}

bool map_near_pole(const CompiledMap& f, const std::vector<cd>& dom_env, const Image* img, double tol) {
  if (f.dom.near_pole(dom_env, tol)) return true;
  for (const auto& p : f.poles) {
    const double v = std::abs(p.eval(dom_env));
    if (!std::isfinite(v) || v < tol * std::max(1.0, p.magnitude(dom_env))) return true;
  }
  if (img) {
    for (const cd& z : img->env)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
    if (f.cod.near_pole(img->env, tol)) return true;
  }
  return false;
}

std::uint64_t mix(std::uint64_t seed, const std::string& tag, std::uint64_t index) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

constexpr double kPoleTolerance = 1e-4;

// Draws one point of the space; returns the environment.
std::optional<std::vector<cd>> draw(const Compiled& c, const Params& p, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> sheet(0, 2);
  auto env = c.env(p);
  for (int s : c.free_slots) env[s] = cd(nd(rng), nd(rng));
  c.update_lets(env);
  for (const auto& sv : c.solves) {
    const cd rad = sv.e.eval(env);
    env[sv.slot] = std::pow(rad, 1.0 / 3.0) * ipow(kOmega, sheet(rng));
    c.update_lets(env);
  }
  for (const cd& z : env)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
  if (c.near_pole(env, kPoleTolerance)) return std::nullopt;
  return env;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(cd z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

std::string describe_params(const Manifest& m, const Params& p) {
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) s += (k ? ", " : "") + m.parameters[k] + " = " + fmt(p[k]);
  return s;
}

std::string describe_point(const Compiled& c, const std::vector<cd>& env) {
  std::string s;
  for (std::size_t k = 0; k < c.vars.size(); ++k) s += (k ? ", " : "") + c.vars[k] + " = " + fmt(env[c.var_slots[k]]);
  return s;
}

double component_residual(cd x, cd y, double scale) {
  const double d = std::abs(x - y);
  if (d == 0.0) return 0.0;
  return scale > 0.0 ? d / scale : d;
}

// Samples domain points of f that avoid all declared poles.
std::vector<std::vector<cd>> domain_points(const CompiledMap& f, const Params& p, std::mt19937_64& rng, int count,
                                           int& rejected) {
  std::vector<std::vector<cd>> out;
  int tries = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++tries > 20 * count + 100) throw VerificationError("sampling keeps hitting the exceptional locus");
    auto env = draw(f.dom, p, rng);
    if (!env) {
      ++rejected;
      continue;
    }
    const Image img = apply(f, p, *env);
    if (map_near_pole(f, *env, &img, kPoleTolerance)) {
      ++rejected;
      continue;
    }
    out.push_back(std::move(*env));
  }
  return out;
}

}  // namespace

Params random_parameters(const Manifest& m, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, "parameters", 0));
  std::normal_distribution<double> nd(0.0, 1.5);
  for (;;) {
    Params p;
    for (std::size_t k = 0; k < m.parameters.size(); ++k) p.push_back(cd(nd(rng), nd(rng)));
    bool ok = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
      ok = ok && std::abs(p[k]) > 0.2 && std::abs(p[k] - 1.0) > 0.2;
      for (std::size_t l = 0; l < k; ++l) ok = ok && std::abs(p[k] - p[l]) > 0.2;
    }
    if (ok) return p;
  }
}

SampleSet sample_on_variety(const Manifest& m, const std::vector<FactorRef>& factors, const Params& p,
                            std::uint64_t seed, int count) {
  if (p.size() != m.parameters.size()) throw InputError("wrong number of parameters");
  const Compiled c = compile_space(m, factors);
  std::mt19937_64 rng(seed);
  SampleSet out;
  out.vars = c.vars;
  int tries = 0;
  while (static_cast<int>(out.points.size()) < count) {
    if (++tries > 20 * count + 100) throw VerificationError("sampling keeps hitting the exceptional locus");
    auto env = draw(c, p, rng);
    if (!env) {
      ++out.rejected;
      continue;
    }
    out.max_residual = std::max(out.max_residual, c.residual(*env));
    out.points.push_back(c.point(*env));
  }
  return out;
}

SampleSet sample_on_variety(const Manifest& m, const std::string& variety, const Params& p, std::uint64_t seed,
                            int count) {
  return sample_on_variety(m, {FactorRef{variety, {}}}, p, seed, count);
}

CheckReport verify_map(const Manifest& m, const std::string& name, const CheckOptions& opt) {
  const RationalMapSpec& spec = m.map(name);
  const CompiledMap f = compile_map(m, spec);
  CheckReport rep{"map", name, spec.anchor};
  std::string worst;
  for (int t = 0; t < opt.triples; ++t) {
    const Params p = random_parameters(m, mix(opt.seed, "triple", t));
    std::mt19937_64 rng(mix(opt.seed, name, t));
    for (const auto& env : domain_points(f, p, rng, opt.samples, rep.rejected)) {
      const Image img = apply(f, p, env);
      const double r = f.cod.residual(img.env);
      ++rep.evaluations;
      if (r > rep.max_residual || rep.evaluations == 1) {
        rep.max_residual = r;
        worst = describe_params(m, p) + "; " + describe_point(f.dom, env);
      }
    }
  }
  rep.passed = rep.max_residual < opt.tolerance;
  if (!rep.passed) {
    rep.dump = "worst point: " + worst + "\nsubstitution:";
    for (const auto& c : f.comp_text) rep.dump += "\n  " + c;
    for (const auto& q : f.cod.equations) rep.dump += "\ninto: " + q.text;
  }
  return rep;
}

CheckReport verify_equivariance(const Manifest& m, const EquivarianceSpec& e, const CheckOptions& opt) {
  const RationalMapSpec& spec = m.map(e.map);
  const CompiledMap f = compile_map(m, spec);
  std::string powers;
  for (int k : e.domain_powers) powers += (powers.empty() ? "" : ",") + std::to_string(k);
  CheckReport rep{"equivariance", e.map + " [" + powers + "] -> " + std::to_string(e.codomain_power), e.anchor};
  std::string worst;
  for (int t = 0; t < opt.triples; ++t) {
    const Params p = random_parameters(m, mix(opt.seed, "triple", t));
    std::mt19937_64 rng(mix(opt.seed, rep.name, t));
    for (auto env : domain_points(f, p, rng, opt.samples, rep.rejected)) {
      const Image fx = apply(f, p, env);
      std::vector<cd> moved = fx.env;
      f.cod.act(moved, {e.codomain_power});
      f.dom.act(env, e.domain_powers);
      const Image fs = apply(f, p, env);
      double r = 0.0;
      for (std::size_t k = 0; k < f.cod.var_slots.size(); ++k) {
        const int s = f.cod.var_slots[k];
        r = std::max(r, component_residual(fs.env[s], moved[s], fs.mags[k] + fx.mags[k]));
      }
      ++rep.evaluations;
      if (r > rep.max_residual) {
        rep.max_residual = r;
        worst = describe_params(m, p) + "; " + describe_point(f.dom, env);
      }
    }
  }
  rep.passed = rep.max_residual < opt.tolerance;
  if (!rep.passed) {
    rep.dump = "worst point (after the action): " + worst + "\nsubstitution:";
    for (const auto& c : f.comp_text) rep.dump += "\n  " + c;
  }
  return rep;
}

CheckReport verify_composition(const Manifest& m, const CompositionSpec& c, const CheckOptions& opt) {
  if (c.chain.empty()) throw InputError("composition '" + c.name + "' has an empty chain");
  std::vector<CompiledMap> chain;
  for (const auto& n : c.chain) chain.push_back(compile_map(m, m.map(n)));
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (chain[k].dom.vars.size() != (k == 0 ? chain[0].dom.vars.size() : chain[k - 1].cod.vars.size()))
      throw InputError("composition '" + c.name + "' does not chain");
  }
  const bool identity = c.direct == "identity";
  std::optional<CompiledMap> direct;
  if (!identity) direct = compile_map(m, m.map(c.direct));
  CheckReport rep{"composition", c.name, c.anchor};
  std::string worst;
  for (int t = 0; t < opt.triples; ++t) {
    const Params p = random_parameters(m, mix(opt.seed, "triple", t));
    std::mt19937_64 rng(mix(opt.seed, c.name, t));
    for (const auto& env : domain_points(chain[0], p, rng, opt.samples, rep.rejected)) {
      std::vector<cd> cur = env;
      Image img;
      bool skip = false;
      for (std::size_t k = 0; k < chain.size() && !skip; ++k) {
        if (k > 0) {
          cur = chain[k].dom.env_at(p, chain[k - 1].cod.point(img.env));
          if (map_near_pole(chain[k], cur, nullptr, kPoleTolerance)) skip = true;
        }
        if (!skip) img = apply(chain[k], p, cur);
      }
      if (skip) {
        ++rep.rejected;
        continue;
      }
      const Point got = chain.back().cod.point(img.env);
      Point want;
      std::vector<double> scale = img.mags;
      if (identity) {
        want = chain[0].dom.point(env);
        for (std::size_t k = 0; k < want.size(); ++k) scale[k] += std::abs(want[k]);
      } else {
        const Image d = apply(*direct, p, direct->dom.env_at(p, chain[0].dom.point(env)));
        want = direct->cod.point(d.env);
        for (std::size_t k = 0; k < want.size(); ++k) scale[k] += d.mags[k];
      }
      if (got.size() != want.size()) throw InputError("composition '" + c.name + "' has mismatched targets");
      double r = 0.0;
      for (std::size_t k = 0; k < got.size(); ++k) r = std::max(r, component_residual(got[k], want[k], scale[k]));
      ++rep.evaluations;
      if (r > rep.max_residual) {
        rep.max_residual = r;
        worst = describe_params(m, p) + "; " + describe_point(chain[0].dom, env);
      }
    }
  }
  rep.passed = rep.max_residual < opt.tolerance;
  if (!rep.passed) rep.dump = "worst point: " + worst;
  return rep;
}

int variety_dimension(const Manifest& m, const std::string& variety) {
  const auto& v = m.variety(variety);
  return static_cast<int>(v.vars.size() - v.equations.size());
}

int jacobian_rank(const Manifest& m, const std::string& name, const Params& p, const Point& at, double step,
                  double threshold) {
  const CompiledMap f = compile_map(m, m.map(name));
  const Compiled& d = f.dom;
  const int n = static_cast<int>(d.vars.size());
  if (static_cast<int>(at.size()) != n) throw InputError("point has the wrong number of coordinates");
  const auto env0 = d.env_at(p, at);
  const Image img0 = apply(f, p, env0);
  if (map_near_pole(f, env0, &img0, 1e-6)) throw InputError("point too close to the exceptional locus");

  auto eqs = [&](const Point& x) {
    const auto env = d.env_at(p, x);
    Eigen::VectorXcd v(d.equations.size());
    for (std::size_t k = 0; k < d.equations.size(); ++k)
      v[static_cast<Eigen::Index>(k)] = d.equations[k].lhs.eval(env) - d.equations[k].rhs.eval(env);
    return v;
  };
  auto image = [&](const Point& x) {
    const Image im = apply(f, p, d.env_at(p, x));
    const Point y = f.cod.point(im.env);
    return Eigen::Map<const Eigen::VectorXcd>(y.data(), static_cast<Eigen::Index>(y.size())).eval();
  };
  auto shifted = [&](const Eigen::VectorXcd& dir, double h) {
    Point x = at;
    for (int k = 0; k < n; ++k) x[k] += h * dir[k];
    return x;
  };
  double scale = 1.0;
  for (const cd& z : at) scale = std::max(scale, std::abs(z));
  const double h = step * scale;

  Eigen::MatrixXcd tangent;
  if (d.equations.empty()) {
    tangent = Eigen::MatrixXcd::Identity(n, n);
  } else {
    Eigen::MatrixXcd J(static_cast<Eigen::Index>(d.equations.size()), n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e[k] = 1.0;
      J.col(k) = (eqs(shifted(e, h)) - eqs(shifted(e, -h))) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] > threshold * std::max(1.0, smax)) ++rank;
    tangent = svd.matrixV().rightCols(n - rank);
  }
  const Eigen::Index out_dim = static_cast<Eigen::Index>(f.cod.vars.size());
  Eigen::MatrixXcd D(out_dim, tangent.cols());
  for (Eigen::Index k = 0; k < tangent.cols(); ++k)
    D.col(k) = (image(shifted(tangent.col(k), h)) - image(shifted(tangent.col(k), -h))) / (2.0 * h);
  if (D.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > threshold * std::max(1.0, smax)) ++rank;
  return rank;
}

bool ManifestReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckReport& r) { return r.passed; });
}

namespace {

CheckReport check_variety(const Manifest& m, const VarietySpec& v, const CheckOptions& opt) {
  CheckReport rep{"variety", v.name, v.anchor};
  for (int t = 0; t < opt.triples; ++t) {
    const Params p = random_parameters(m, mix(opt.seed, "triple", t));
    const SampleSet s = sample_on_variety(m, v.name, p, mix(opt.seed, v.name, t), opt.samples);
    rep.max_residual = std::max(rep.max_residual, s.max_residual);
    rep.rejected += s.rejected;
    rep.evaluations += static_cast<long long>(s.points.size());
  }
  rep.passed = rep.max_residual < 1e-12;
  return rep;
}

CheckReport check_rank(const Manifest& m, const RationalMapSpec& spec, const CheckOptions& opt) {
  CheckReport rep{"rank", spec.name, "derivative has full rank onto the target"};
  const int target = variety_dimension(m, spec.codomain);
  const CompiledMap f = compile_map(m, spec);
  const int points = std::min(opt.triples, 20);
  int mismatches = 0;
  for (int t = 0; t < points; ++t) {
    const Params p = random_parameters(m, mix(opt.seed, "triple", t));
    std::mt19937_64 rng(mix(opt.seed, "rank " + spec.name, t));
    int rejected = 0;
    const auto env = domain_points(f, p, rng, 1, rejected).front();
    const int r = jacobian_rank(m, spec.name, p, f.dom.point(env));
    ++rep.evaluations;
    if (r != target) {
      ++mismatches;
      rep.dump += "rank " + std::to_string(r) + " instead of " + std::to_string(target) + " at " +
                  describe_params(m, p) + "; " + describe_point(f.dom, env) + "\n";
    }
  }
  rep.max_residual = mismatches;
  rep.passed = mismatches == 0;
  return rep;
}

}  // namespace

ManifestReport run_manifest(const Manifest& m, const CheckOptions& opt) {
  std::vector<std::future<CheckReport>> jobs;
  auto launch = [&](auto&& fn) { jobs.push_back(std::async(std::launch::async, fn)); };
  for (const auto& v : m.varieties) launch([&m, &v, opt] { return check_variety(m, v, opt); });
  for (const auto& f : m.maps) launch([&m, &f, opt] { return verify_map(m, f.name, opt); });
  for (const auto& e : m.equivariance) launch([&m, &e, opt] { return verify_equivariance(m, e, opt); });
  for (const auto& c : m.compositions) launch([&m, &c, opt] { return verify_composition(m, c, opt); });
  for (const auto& f : m.maps) launch([&m, &f, opt] { return check_rank(m, f, opt); });
  ManifestReport rep;
  for (auto& j : jobs) rep.rows.push_back(j.get());
  return rep;
}

}  // namespace torelli
