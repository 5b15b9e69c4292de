#include "torelli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "torelli/errors.hpp"

namespace torelli::io {

namespace {

void emit(const Json& j, std::string& out, int indent) {
  const std::string pad(indent * 2, ' ');
  const std::string inner((indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        emit(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) {
        flat = flat && !e.is_object();
        if (e.is_array())
          for (const auto& x : e) flat = flat && !x.is_structured();
      }
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s(buf);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void bad(const std::string& what) { throw InputError(what); }

i128 integer_from_json(const Json& j) {
  if (j.is_number_integer()) return static_cast<i128>(j.get<long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty()) bad("empty integer string");
    i128 v = 0;
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) bad("bad integer '" + s + "'");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') bad("bad integer '" + s + "'");
      v = v * 10 + (s[i] - '0');
    }
    return s[0] == '-' ? -v : v;
  }
  bad("expected an integer");
}

Json integer_to_json(i128 v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return Json(static_cast<long long>(v));
  return Json(to_string(v));
}

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_array() && j.size() == 2) {
      const Rational num = rational_from_json(j[0]);
      const Rational den = rational_from_json(j[1]);
      if (den == 0) bad("zero denominator");
      return num / den;
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    bad(std::string("bad rational: ") + e.what());
  }
  bad("expected a rational as an integer, \"p/q\" or [num, den]");
}

Json rational_to_json(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  auto part = [](const auto& z) -> Json {
    if (z >= INT64_MIN && z <= INT64_MAX) return Json(static_cast<long long>(z));
    return Json(z.str());
  };
  return Json::array({part(numerator(q)), part(denominator(q))});
}

Json configuration_to_json(const Configuration& c) {
  Json pts = Json::array();
  for (int k = 0; k < 6; ++k) pts.push_back(c.is_finite(k) ? to_json(c.z[k]) : Json("inf"));
  return Json{{"points", pts}};
}

Configuration configuration_from_json(const Json& j) {
  const Json& pts = j.at("points");
  if (!pts.is_array() || pts.size() != 6) bad("configuration needs six points");
  Configuration c;
  for (int k = 0; k < 6; ++k) {
    if (pts[k].is_string() && pts[k].get<std::string>() == "inf") {
      if (c.infinity >= 0) bad("base configuration has two points at infinity");
      c.infinity = k;
    } else {
      c.z[k] = complex_from_json(pts[k]);
    }
  }
  return c;
}

Json braid_to_json(const BraidWord& w) { return Json(w); }

Json residue_matrix(const residue::OrthogonalElement& m) { return Json(residue::to_string(m)); }

residue::OrthogonalElement residue_matrix_from_json(const Json& j) {
  if (!j.is_string()) bad("residue matrix must be a string of four rows");
  const std::string s = j.get<std::string>();
  residue::OrthogonalElement m;
  int i = 0, col = 0;
  for (char ch : s) {
    if (ch == ' ') {
      if (col != 4) bad("residue matrix row has wrong length: " + s);
      ++i;
      col = 0;
      continue;
    }
    if (ch < '0' || ch > '2' || i > 3 || col > 3) bad("bad residue matrix: " + s);
    m.m[i][col++] = static_cast<std::uint8_t>(ch - '0');
  }
  if (i != 3 || col != 4) bad("bad residue matrix: " + s);
  return m;
}

void verify(bool ok, const std::string& what) {
  if (!ok) throw VerificationError(what);
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path);
  out << text;
}

Json to_json(const EisensteinInt& z) { return Json::array({integer_to_json(z.a()), integer_to_json(z.b())}); }

EisensteinInt eisenstein_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) bad("Eisenstein integer must be [a, b]");
  return {integer_from_json(j[0]), integer_from_json(j[1])};
}

Json to_json(const EisVec& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(to_json(z));
  return out;
}

EisVec eisvec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) bad("vector must have four entries");
  EisVec v;
  for (int i = 0; i < 4; ++i) v[i] = eisenstein_from_json(j[i]);
  return v;
}

Json to_json(const EisensteinMatrix& m) {
  Json out = Json::array();
  for (const auto& row : m.rows()) out.push_back(to_json(row));
  return out;
}

EisensteinMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) bad("matrix must have four rows");
  EisensteinMatrix::Rows rows;
  for (int i = 0; i < 4; ++i) rows[i] = eisvec_from_json(j[i]);
  return EisensteinMatrix(rows);
}

Json to_json(cd z) { return Json::array({z.real(), z.imag()}); }

cd complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  bad("expected a complex number [re, im]");
}

Json to_json(const Eigen::Vector4cd& v) {
  Json out = Json::array();
  for (int i = 0; i < 4; ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const PointValue& p) {
  switch (p.kind()) {
    case PointValue::Kind::infinity:
      return "inf";
    case PointValue::Kind::rational:
      return rational_to_json(p.q());
    case PointValue::Kind::complex:
      return Json{{"re", p.z().real()}, {"im", p.z().imag()}};
  }
  return nullptr;
}

PointValue point_value_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return PointValue::infinity();
    return PointValue::rational(rational_from_json(j));
  }
  if (j.is_object()) {
    if (!j.contains("re")) bad("complex point needs \"re\"");
    return PointValue::complex(complex_from_json(j));
  }
  if (j.is_number_float()) bad("real points must be exact: use [num, den]");
  return PointValue::rational(rational_from_json(j));
}

Json to_json(const PointConfig& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  return Json{{"points", pts}};
}

Json to_json(const ArrangementConfig& a) {
  Json rows = Json::array();
  for (int i = 0; i < 6; ++i) {
    Json row = Json::array();
    for (int m = 0; m < 4; ++m) {
      if (a.exact)
        row.push_back(rational_to_json(a.q[i][m]));
      else
        row.push_back(Json{{"re", a.c[i][m].real()}, {"im", a.c[i][m].imag()}});
    }
    rows.push_back(row);
  }
  return Json{{"hyperplanes", rows}};
}

bool is_arrangement(const Json& j) { return j.is_object() && j.contains("hyperplanes"); }

PointConfig point_config_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("points")) bad("configuration needs a \"points\" array");
  const Json& pts = j["points"];
  if (!pts.is_array() || pts.size() != 6) bad("configuration needs exactly six points");
  PointConfig c;
  for (int k = 0; k < 6; ++k) c.points[k] = point_value_from_json(pts[k]);
  return c;
}

ArrangementConfig arrangement_from_json(const Json& j) {
  if (!is_arrangement(j)) bad("arrangement needs a \"hyperplanes\" array");
  const Json& rows = j["hyperplanes"];
  if (!rows.is_array() || rows.size() != 6) bad("arrangement needs exactly six hyperplanes");
  bool exact = true;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != 4) bad("each hyperplane needs four coefficients");
    for (const auto& x : row) exact = exact && !x.is_object() && !x.is_number_float();
  }
  if (exact) {
    std::array<std::array<Rational, 4>, 6> q;
    for (int i = 0; i < 6; ++i)
      for (int m = 0; m < 4; ++m) q[i][m] = rational_from_json(rows[i][m]);
    return ArrangementConfig::from_rational(q);
  }
  std::array<std::array<cd, 4>, 6> c;
  for (int i = 0; i < 6; ++i)
    for (int m = 0; m < 4; ++m) {
      const Json& x = rows[i][m];
      if (x.is_object() || x.is_number())
        c[i][m] = complex_from_json(x);
      else
        c[i][m] = cd(static_cast<double>(rational_from_json(x)), 0.0);
    }
  return ArrangementConfig::from_complex(c);
}

Json to_json(const Mobius& m) {
  Json out;
  out["exact"] = m.is_exact();
  if (m.is_exact()) {
    Json q = Json::array();
    for (const auto& x : m.q()) q.push_back(rational_to_json(x));
    out["matrix"] = q;
  } else {
    Json c = Json::array();
    for (const auto& x : m.matrix()) c.push_back(to_json(x));
    out["matrix"] = c;
  }
  return out;
}

Json to_json(const MonodromyMatrix& m) {
  return Json{{"matrix", to_json(m.exact)},
              {"float_residual", m.float_residual},
              {"braid_word", braid_to_json(m.braid_word)}};
}

Json certificate_to_json(const MonodromyCertificate& cert) {
  Json j;
  j["kind"] = "monodromy-certificate";
  j["base"] = configuration_to_json(cert.base);
  Json gens = Json::array();
  for (int i = 0; i < 5; ++i) {
    Json g{{"name", "M" + std::to_string(i + 1)}};
    g.update(to_json(cert.generators[i]));
    g["root"] = to_json(cert.reflections[i].root);
    g["multiplier"] = to_json(cert.reflections[i].multiplier);
    gens.push_back(g);
  }
  j["generators"] = gens;
  Json gram;
  gram["matrix"] = to_json(cert.gram.form.gram());
  gram["solution_dimension"] = cert.gram.solution_dimension;
  gram["rounding_residual"] = cert.gram.rounding_residual;
  gram["singular_values"] = cert.gram.singular_values;
  const auto sig = signature(cert.gram.form);
  gram["signature"] = {sig.first, sig.second};
  gram["determinant"] = to_json(cert.gram.form.gram().det());
  j["gram"] = gram;
  Json rel = Json::array();
  for (const auto& r : cert.relations.relations) rel.push_back(Json{{"relation", r.name}, {"holds", r.holds}});
  j["relations"] = rel;
  return j;
}

MonodromyCertificate certificate_from_json(const Json& j) {
  try {
    if (j.value("kind", std::string()) != "monodromy-certificate") bad("not a monodromy certificate");
    MonodromyCertificate cert{configuration_from_json(j.at("base")), {}, {HermitianForm::standard()}, {}, {}};
    const Json& gens = j.at("generators");
    if (!gens.is_array() || gens.size() != 5) bad("certificate needs five generators");
    for (int i = 0; i < 5; ++i) {
      const Json& g = gens[i];
      cert.generators[i].exact = matrix_from_json(g.at("matrix"));
      cert.generators[i].float_residual = g.at("float_residual").get<double>();
      cert.generators[i].braid_word = g.at("braid_word").get<BraidWord>();
      cert.reflections[i].root = eisvec_from_json(g.at("root"));
      cert.reflections[i].multiplier = eisenstein_from_json(g.at("multiplier"));
      verify(cert.reflections[i].multiplier == -EisensteinInt::omega(),
             "generator " + std::to_string(i + 1) + " is not a -omega reflection");
      verify(cert.generators[i].float_residual < 1e-6,
             "generator " + std::to_string(i + 1) + " rounding residual above 1e-6");
    }
    const Json& gram = j.at("gram");
    cert.gram.form = HermitianForm(matrix_from_json(gram.at("matrix")));
    cert.gram.solution_dimension = gram.at("solution_dimension").get<int>();
    cert.gram.rounding_residual = gram.at("rounding_residual").get<double>();
    cert.gram.singular_values = gram.value("singular_values", std::vector<double>{});
    verify(cert.gram.solution_dimension == 1, "invariant form solution space is not one dimensional");
    for (const auto& r : j.at("relations"))
      cert.relations.relations.push_back({r.at("relation").get<std::string>(), r.at("holds").get<bool>(), ""});
    validate_certificate(cert);
    return cert;
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed certificate: ") + e.what());
  }
}

MonodromyCertificate load_certificate(const std::string& path) { return certificate_from_json(read_json_file(path)); }

GroupAudit run_group_audit(const MonodromyCertificate& cert) {
  const HermitianForm& h = cert.form();
  residue::ResidueForm form = residue::residue_form(h);
  auto group = residue::enumerate_orthogonal_group(form);
  std::vector<int> spinor;
  spinor.reserve(group.size());
  std::size_t kernel = 0;
  for (const auto& g : group) {
    spinor.push_back(residue::spinor_norm(form, g));
    if (spinor.back() == 0) ++kernel;
  }
  std::vector<residue::OrthogonalElement> gens;
  for (const auto& g : cert.generators) gens.push_back(residue::reduce_isometry(h, g.exact));
  residue::S6Report s6 = residue::verify_s6(form, gens);
  const bool scalar = residue::reduce_isometry(h, EisensteinMatrix::scalar(EisensteinInt::omega())).is_identity();
  return GroupAudit{form, std::move(group), std::move(spinor), kernel, std::move(gens), std::move(s6), scalar};
}

Json group_audit_to_json(const GroupAudit& a) {
  Json j;
  j["kind"] = "group-certificate";
  j["form"] = residue_matrix(a.form.gram());
  j["order"] = a.group.size();
  j["kernel_order"] = a.kernel_order;
  Json gens = Json::array();
  for (std::size_t i = 0; i < a.generators.size(); ++i)
    gens.push_back(Json{{"name", "M" + std::to_string(i + 1)},
                        {"matrix", residue_matrix(a.generators[i])},
                        {"spinor_norm", a.s6.spinor_norms.at(i)}});
  j["generators"] = gens;
  Json rel = Json::array();
  for (const auto& r : a.s6.relations) rel.push_back(Json{{"relation", r.name}, {"holds", r.holds}});
  j["relations"] = rel;
  j["generated_order"] = a.s6.generated_order;
  j["abelian"] = a.s6.abelian;
  j["omega_identity_trivial"] = a.scalar_trivial;
  j["counterexamples"] = a.s6.counterexamples;
  Json elems = Json::array();
  for (std::size_t i = 0; i < a.group.size(); ++i)
    elems.push_back(Json::array({residue_matrix(a.group[i]), a.spinor[i]}));
  j["elements"] = elems;
  return j;
}

void validate_group_certificate(const Json& j) {
  try {
    if (j.value("kind", std::string()) != "group-certificate") bad("not a group certificate");
    const residue::ResidueForm form(residue_matrix_from_json(j.at("form")));
    verify(form.nondegenerate(), "recorded form is degenerate");
    const Json& elems = j.at("elements");
    std::vector<residue::OrthogonalElement> group;
    std::size_t kernel = 0;
    for (const auto& e : elems) {
      const auto g = residue_matrix_from_json(e.at(0));
      verify(form.preserves(g), "element " + residue::to_string(g) + " does not preserve q");
      const int s = e.at(1).get<int>();
      verify(s == residue::spinor_norm(form, g), "wrong spinor norm recorded for " + residue::to_string(g));
      if (s == 0) ++kernel;
      verify(group.empty() || group.back() < g, "element list is not sorted and duplicate free");
      group.push_back(g);
    }
    verify(group.size() == j.at("order").get<std::size_t>(), "recorded order does not match the element list");
    verify(kernel == j.at("kernel_order").get<std::size_t>(), "recorded kernel order does not match");
    // Reflections generate the orthogonal group.
    for (const auto& v : residue::all_vectors<4>()) {
      if (form.q(v) == 0) continue;
      const auto r = form.reflection(v);
      verify(std::binary_search(group.begin(), group.end(), r), "a reflection is missing from the element list");
      for (const auto& g : group)
        verify(std::binary_search(group.begin(), group.end(), r * g), "element list is not closed");
    }
    std::vector<residue::OrthogonalElement> gens;
    for (const auto& g : j.at("generators")) gens.push_back(residue_matrix_from_json(g.at("matrix")));
    const auto s6 = residue::verify_s6(form, gens);
    verify(s6.passed(), "presentation check fails on recorded generators");
    verify(s6.generated_order == j.at("generated_order").get<std::size_t>(), "recorded generated order is wrong");
    for (std::size_t i = 0; i < gens.size(); ++i)
      verify(s6.spinor_norms[i] == j["generators"][i].at("spinor_norm").get<int>(), "wrong generator spinor norm");
    for (const auto& r : j.at("relations")) verify(r.at("holds").get<bool>(), "recorded relation fails");
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed group certificate: ") + e.what());
  }
}

Json to_json(const TorelliVerdict& v, const PointConfig& a, const PointConfig& b) {
  Json j;
  j["a"] = to_json(a);
  j["b"] = to_json(b);
  j["verdict"] = to_string(v.kind);
  j["ground_truth"] = v.ground_truth ? "Equivalent" : "Distinct";
  j["agrees"] = v.agrees();
  j["k"] = v.k;
  j["distance"] = v.distance;
  j["depth"] = v.depth;
  j["words_searched"] = v.words_searched;
  if (v.witness) {
    j["witness"] = Json{{"permutation", v.witness->permutation}, {"mobius", to_json(v.witness->map)}};
  } else {
    j["witness"] = nullptr;
  }
  const char* key = v.kind == TorelliVerdict::Kind::equivalent ? "isometry" : "closest_element";
  j[key] = v.isometry ? to_json(*v.isometry) : Json(nullptr);
  j["braid_word"] = braid_to_json(v.word);
  j["word_matches"] = v.word_matches;
  j["reason"] = v.reason;
  return j;
}

Json to_json(const PeriodPoint& p) {
  Json j;
  j["configuration"] = to_json(p.working);
  j["k"] = p.cls.k;
  j["stable"] = p.cls.stable;
  Json raw = Json::array();
  for (int i = 0; i < 4; ++i) raw.push_back(to_json(p.periods.values(i)));
  j["periods"] = raw;
  j["precision"] = p.periods.precision;
  if (p.periods.fifth) {
    j["fifth_period"] = to_json(*p.periods.fifth);
    j["relation_residual"] = p.periods.relation_residual;
  }
  j["ball_point"] = to_json(p.point.v);
  j["vanishing_slits"] = p.vanishing;
  Json roots = Json::array();
  for (const auto& r : p.roots) roots.push_back(to_json(r.r));
  j["vanishing_roots"] = roots;
  if (p.mirror) j["mirror"] = Json{{"root", to_json(p.mirror->root.r)}, {"distance", p.mirror->distance}};
  return j;
}

Json to_json(const DegenerationReport& r) {
  Json j;
  j["pair"] = r.pair;
  j["slit"] = r.slit;
  j["root"] = to_json(r.root.r);
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"eps", row.eps}, {"vanishing_period", row.vanishing}, {"mirror_distance", row.mirror}});
  j["rows"] = rows;
  j["exponent"] = r.exponent;
  j["mirror_monotone"] = r.mirror_monotone;
  j["limit"] = to_json(r.limit.v);
  j["direct"] = to_json(r.direct.v);
  j["limit_distance"] = r.limit_distance;
  j["k_after"] = r.k_after;
  j["dim_q_after"] = r.dim_q_after;
  return j;
}

Json to_json(const CheckReport& r) {
  Json j{{"kind", r.kind},         {"name", r.name},           {"anchor", r.anchor},
         {"max_residual", r.max_residual}, {"evaluations", r.evaluations}, {"rejected", r.rejected},
         {"passed", r.passed}};
  if (!r.dump.empty()) j["dump"] = r.dump;
  return j;
}

Json to_json(const ManifestReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return Json{{"all_passed", r.all_passed()}, {"rows", rows}};
}

Json to_json(const HodgeTable& t) {
  Json j;
  j["k"] = t.k;
  j["rank_eisenstein"] = t.rank_eisenstein;
  j["dim_q"] = t.dim_q;
  j["signature"] = {t.signature.first, t.signature.second};
  Json diff = Json::array();
  for (const auto& d : t.holomorphic)
    diff.push_back(Json{{"x_power", d.a}, {"y_power", d.b}, {"eigenvalue", d.omega_eigen ? "omega" : "omega-bar"}});
  j["holomorphic_differentials"] = diff;
  j["curve_omega"] = {t.curve_omega.first, t.curve_omega.second};
  j["curve_omega_bar"] = {t.curve_omegabar.first, t.curve_omegabar.second};
  j["threefold"] = {t.threefold.first, t.threefold.second};
  return j;
}

}  // namespace torelli::io
