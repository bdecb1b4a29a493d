#ifndef KRONRED_NETWORK_HPP
#define KRONRED_NETWORK_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace kronred {

/// Largest stoichiometric coefficient accepted anywhere in a model.
inline constexpr int kMaxStoichCoeff = 64;

struct Species {
  std::string name;
  int index = 0;
};

/// Sparse complex composition: (species index, coefficient) pairs, sorted by
/// species index, coefficients >= 1.
using Composition = std::vector<std::pair<int, int>>;

struct Complex {
  Composition composition;
  int index = 0;
};

enum class LawKind { MassAction, MichaelisMenten };

/// Saturating rational prefactor d(x) = 1 / prod_g (1 + sum_i c_i x_i).
/// Every group is affine with nonnegative coefficients and constant term 1,
/// so d(x) lies in (0, 1] for componentwise nonnegative x. Mass action is the
/// empty product, d(x) = 1.
struct DenominatorSpec {
  std::vector<std::vector<std::pair<int, double>>> groups;

  double value(const Eigen::VectorXd& x) const {
    double p = 1.0;
    for (const auto& g : groups) {
      double s = 1.0;
      for (const auto& [sp, c] : g) s += c * x[sp];
      p *= s;
    }
    return p;
  }
};

struct RateLaw {
  LawKind kind = LawKind::MassAction;
  double k_forward = 0.0;
  double k_reverse = 0.0;  // 0 means irreversible
  std::map<int, double> km;  // Michaelis constants by species (MM laws only)
  DenominatorSpec denominator;

  bool operator==(const RateLaw& o) const {
    return kind == o.kind && k_forward == o.k_forward && k_reverse == o.k_reverse &&
           km == o.km;
  }
};

struct Reaction {
  std::string id;
  int substrate = -1;  // complex index
  int product = -1;    // complex index
  RateLaw law;
  bool reversible = false;
};

/// In/outflow attached to one complex: either a constant flux or a flux
/// proportional to a single species concentration.
struct BoundaryFlux {
  enum class Form { Constant, Linear };
  int complex = -1;
  Form form = Form::Constant;
  double value = 0.0;  // Constant
  int species = -1;    // Linear
  double gain = 0.0;   // Linear

  double value_at(const Eigen::VectorXd& x) const {
    return form == Form::Constant ? value : gain * x[species];
  }
};

/// Validated in-memory reaction network. Species and complexes are indexed in
/// first-appearance order; complexes are deduplicated by composition.
/// Immutable once built (construction itself is single-threaded).
class Network {
 public:
  std::vector<Species> species;
  std::vector<Complex> complexes;
  std::vector<Reaction> reactions;
  std::vector<BoundaryFlux> boundary;

  int species_count() const { return static_cast<int>(species.size()); }
  int complex_count() const { return static_cast<int>(complexes.size()); }

  /// Registers a species name, returning its index (existing or new).
  int add_species(const std::string& name);

  /// Returns the species index or -1.
  int find_species(const std::string& name) const;

  /// Interns a composition, returning the index of the matching complex;
  /// appends a new complex when the composition is unseen.
  int intern_complex(const Composition& composition);

  /// Returns the complex index matching a composition, or -1.
  int find_complex(const Composition& composition) const;

  /// Adds a reaction between two interned complexes. For Michaelis-Menten
  /// laws the saturation denominator is assembled here from the substrate and
  /// product compositions (one affine group per side, coefficient
  /// multiplicity/Km). Both directions of a reversible reaction share it.
  void add_reaction(const std::string& id, int substrate, int product, RateLaw law);

  void add_boundary(BoundaryFlux flux);

  /// Checks all structural invariants; throws ModelError on violation.
  void validate() const;

  /// Canonical display/addressing string of a complex, terms in species-index
  /// order, e.g. "X1+2 X2".
  std::string complex_name(int complex_index) const;

  /// Parses and canonicalizes a composition string such as "X1 + 2 X2";
  /// returns the matching complex index or -1. Accepts any spacing.
  int complex_by_name(const std::string& text) const;

  bool operator==(const Network& other) const;

 private:
  std::map<std::string, int> species_index_;
};

/// Builds the two-group saturation denominator for a Michaelis-Menten law:
/// one group per reaction side, species coefficient = multiplicity / Km.
DenominatorSpec mm_denominator(const Composition& substrate, const Composition& product,
                               const std::map<int, double>& km);

}  // namespace kronred

#endif  // KRONRED_NETWORK_HPP
