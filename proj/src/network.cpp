#include "kronred/network.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kronred/errors.hpp"

namespace kronred {

int Network::add_species(const std::string& name) {
  auto it = species_index_.find(name);
  if (it != species_index_.end()) return it->second;
  int idx = static_cast<int>(species.size());
  species.push_back({name, idx});
  species_index_.emplace(name, idx);
  return idx;
}

int Network::find_species(const std::string& name) const {
  auto it = species_index_.find(name);
  return it == species_index_.end() ? -1 : it->second;
}

int Network::find_complex(const Composition& composition) const {
  for (const auto& c : complexes)
    if (c.composition == composition) return c.index;
  return -1;
}

int Network::intern_complex(const Composition& composition) {
  if (composition.empty()) throw ModelError("complex composition must be non-empty");
  for (const auto& [sp, coeff] : composition) {
    if (sp < 0 || sp >= species_count())
      throw ModelError("complex references unknown species index " + std::to_string(sp));
    if (coeff < 1 || coeff > kMaxStoichCoeff)
      throw ModelError("stoichiometric coefficient " + std::to_string(coeff) +
                       " outside [1, " + std::to_string(kMaxStoichCoeff) + "]");
  }
  if (!std::is_sorted(composition.begin(), composition.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw ModelError("complex composition not sorted by species index");
  int existing = find_complex(composition);
  if (existing >= 0) return existing;
  int idx = static_cast<int>(complexes.size());
  complexes.push_back({composition, idx});
  return idx;
}

DenominatorSpec mm_denominator(const Composition& substrate, const Composition& product,
                               const std::map<int, double>& km) {
  DenominatorSpec spec;
  for (const Composition* side : {&substrate, &product}) {
    std::vector<std::pair<int, double>> group;
    for (const auto& [sp, mult] : *side) {
      auto it = km.find(sp);
      if (it == km.end())
        throw ModelError("missing Michaelis constant for species index " + std::to_string(sp));
      if (!(it->second > 0.0))
        throw ModelError("non-positive Michaelis constant for species index " + std::to_string(sp));
      group.emplace_back(sp, static_cast<double>(mult) / it->second);
    }
    spec.groups.push_back(std::move(group));
  }
  return spec;
}

void Network::add_reaction(const std::string& id, int substrate, int product, RateLaw law) {
  if (substrate < 0 || substrate >= complex_count() || product < 0 || product >= complex_count())
    throw ModelError("reaction '" + id + "' references unknown complex");
  if (substrate == product)
    throw ModelError("reaction '" + id + "': substrate equals product");
  if (!(law.k_forward > 0.0))
    throw ModelError("reaction '" + id + "': non-positive forward rate constant");
  if (law.k_reverse < 0.0)
    throw ModelError("reaction '" + id + "': negative reverse rate constant");
  for (const auto& r : reactions)
    if (r.id == id) throw ModelError("duplicate reaction id '" + id + "'");

  if (law.kind == LawKind::MichaelisMenten) {
    // Reject Km entries for species outside the reaction; catches typos early.
    for (const auto& [sp, v] : law.km) {
      bool used = false;
      for (int ci : {substrate, product})
        for (const auto& [s, c] : complexes[ci].composition)
          if (s == sp) used = true;
      if (!used)
        throw ModelError("reaction '" + id + "': Michaelis constant given for species '" +
                         species[sp].name + "' which does not participate");
      (void)v;
    }
    law.denominator =
        mm_denominator(complexes[substrate].composition, complexes[product].composition, law.km);
  } else {
    law.denominator = DenominatorSpec{};
  }

  Reaction r;
  r.id = id;
  r.substrate = substrate;
  r.product = product;
  r.reversible = law.k_reverse > 0.0;
  r.law = std::move(law);
  reactions.push_back(std::move(r));
}

void Network::add_boundary(BoundaryFlux flux) {
  if (flux.complex < 0 || flux.complex >= complex_count())
    throw ModelError("boundary flux references unknown complex");
  for (const auto& b : boundary)
    if (b.complex == flux.complex)
      throw ModelError("duplicate boundary flux for complex " + complex_name(flux.complex));
  if (flux.form == BoundaryFlux::Form::Linear &&
      (flux.species < 0 || flux.species >= species_count()))
    throw ModelError("boundary flux references unknown species");
  boundary.push_back(flux);
}

void Network::validate() const {
  std::map<std::string, int> seen;
  for (const auto& s : species) {
    if (s.name.empty()) throw ModelError("species with empty name");
    if (!seen.emplace(s.name, s.index).second)
      throw ModelError("duplicate species name '" + s.name + "'");
  }
  for (int i = 0; i < complex_count(); ++i) {
    const auto& c = complexes[i];
    if (c.index != i) throw ModelError("complex index out of order");
    if (c.composition.empty()) throw ModelError("empty complex composition");
    for (const auto& [sp, coeff] : c.composition) {
      if (sp < 0 || sp >= species_count()) throw ModelError("complex references unknown species");
      if (coeff < 1 || coeff > kMaxStoichCoeff)
        throw ModelError("stoichiometric coefficient outside [1, " +
                         std::to_string(kMaxStoichCoeff) + "]");
    }
    for (int j = i + 1; j < complex_count(); ++j)
      if (complexes[j].composition == c.composition)
        throw ModelError("duplicate complex composition " + complex_name(i));
  }
  for (const auto& r : reactions) {
    if (r.substrate < 0 || r.substrate >= complex_count() || r.product < 0 ||
        r.product >= complex_count())
      throw ModelError("reaction '" + r.id + "' references unknown complex");
    if (r.substrate == r.product)
      throw ModelError("reaction '" + r.id + "': substrate equals product");
    if (!(r.law.k_forward > 0.0))
      throw ModelError("reaction '" + r.id + "': non-positive forward rate constant");
    if (r.law.k_reverse < 0.0 || r.reversible != (r.law.k_reverse > 0.0))
      throw ModelError("reaction '" + r.id + "': inconsistent reversibility");
  }
  std::vector<bool> has_boundary(complex_count(), false);
  for (const auto& b : boundary) {
    if (b.complex < 0 || b.complex >= complex_count())
      throw ModelError("boundary flux references unknown complex");
    if (has_boundary[b.complex])
      throw ModelError("duplicate boundary flux for complex " + complex_name(b.complex));
    has_boundary[b.complex] = true;
  }
}

std::string Network::complex_name(int complex_index) const {
  const auto& comp = complexes.at(complex_index).composition;
  std::ostringstream out;
  bool first = true;
  for (const auto& [sp, coeff] : comp) {
    if (!first) out << "+";
    first = false;
    if (coeff != 1) out << coeff << " ";
    out << species[sp].name;
  }
  return out.str();
}

int Network::complex_by_name(const std::string& text) const {
  // Tiny scanner over "coeff Name + coeff Name + ..." with optional spacing.
  std::map<int, int> acc;
  size_t i = 0;
  auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
  while (true) {
    skip_ws();
    if (i >= text.size()) return -1;
    long coeff = 1;
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      coeff = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        coeff = coeff * 10 + (text[i++] - '0');
      skip_ws();
    }
    size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
      ++i;
    if (start == i) return -1;
    int sp = find_species(text.substr(start, i - start));
    if (sp < 0 || coeff < 1 || coeff > kMaxStoichCoeff) return -1;
    acc[sp] += static_cast<int>(coeff);
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != '+') return -1;
    ++i;
  }
  Composition comp(acc.begin(), acc.end());
  return find_complex(comp);
}

bool Network::operator==(const Network& other) const {
  if (species.size() != other.species.size() || complexes.size() != other.complexes.size() ||
      reactions.size() != other.reactions.size() || boundary.size() != other.boundary.size())
    return false;
  for (size_t i = 0; i < species.size(); ++i)
    if (species[i].name != other.species[i].name) return false;
  for (size_t i = 0; i < complexes.size(); ++i)
    if (complexes[i].composition != other.complexes[i].composition) return false;
  for (size_t i = 0; i < reactions.size(); ++i) {
    const auto& a = reactions[i];
    const auto& b = other.reactions[i];
    if (a.id != b.id || a.substrate != b.substrate || a.product != b.product ||
        a.reversible != b.reversible || !(a.law == b.law))
      return false;
  }
  for (size_t i = 0; i < boundary.size(); ++i) {
    const auto& a = boundary[i];
    const auto& b = other.boundary[i];
    if (a.complex != b.complex || a.form != b.form || a.value != b.value ||
        a.species != b.species || a.gain != b.gain)
      return false;
  }
  return true;
}

}  // namespace kronred
