#include "torelli/residue.hpp"

#include <sstream>

namespace torelli::residue {

std::uint8_t reduce(const EisensteinInt& z) { return static_cast<std::uint8_t>((((z.a() + z.b()) % 3) + 3) % 3); }

ResidueVector reduce_vector(const EisVec& v) {
  ResidueVector r;
  for (int i = 0; i < 4; ++i) r[i] = reduce(v[i]);
  return r;
}

OrthogonalElement reduce_matrix(const EisensteinMatrix& m) {
  OrthogonalElement r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m[i][j] = reduce(m(i, j));
  return r;
}

ResidueForm residue_form(const HermitianForm& h) { return ResidueForm(reduce_matrix(h.gram())); }

OrthogonalElement reduce_isometry(const HermitianForm& h, const EisensteinMatrix& m) {
  if (!is_isometry(h, m)) throw InputError("reduce_isometry: matrix is not an isometry");
  return reduce_matrix(m);
}

bool in_gamma_theta(const HermitianForm& h, const EisensteinMatrix& m) { return reduce_isometry(h, m).is_identity(); }

S6Report verify_s6(const ResidueForm& form, const std::vector<OrthogonalElement>& gens) {
  if (gens.size() != 5) throw InputError("verify_s6 expects five generators");
  S6Report rep;
  auto check = [&](const std::string& name, bool holds) {
    rep.relations.push_back({name, holds});
    if (!holds) rep.counterexamples.push_back(name);
  };
  for (int i = 0; i < 5; ++i) {
    if (!form.preserves(gens[i])) rep.counterexamples.push_back("g" + std::to_string(i + 1) + " does not preserve q");
    check("g" + std::to_string(i + 1) + "^2 = 1", (gens[i] * gens[i]).is_identity());
  }
  for (int i = 0; i + 1 < 5; ++i) {
    const auto& a = gens[i];
    const auto& b = gens[i + 1];
    check("g" + std::to_string(i + 1) + " g" + std::to_string(i + 2) + " g" + std::to_string(i + 1) + " = g" +
              std::to_string(i + 2) + " g" + std::to_string(i + 1) + " g" + std::to_string(i + 2),
          a * b * a == b * a * b);
  }
  for (int i = 0; i < 5; ++i)
    for (int j = i + 2; j < 5; ++j)
      check("g" + std::to_string(i + 1) + " g" + std::to_string(j + 1) + " = g" + std::to_string(j + 1) + " g" +
                std::to_string(i + 1),
            gens[i] * gens[j] == gens[j] * gens[i]);
  for (const auto& g : gens) rep.spinor_norms.push_back(spinor_norm(form, g));
  rep.abelian = true;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) rep.abelian = rep.abelian && gens[i] * gens[j] == gens[j] * gens[i];
  rep.generated_order = generated_group<4>(gens).size();
  if (rep.generated_order != 720)
    rep.counterexamples.push_back("generated order is " + std::to_string(rep.generated_order) + ", expected 720");
  return rep;
}

std::string to_string(const OrthogonalElement& m) {
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    if (i) os << ' ';
    for (int j = 0; j < 4; ++j) os << int(m.m[i][j]);
  }
  return os.str();
}

}  // namespace torelli::residue
