#pragma once

// Almost-direct products (V_1 x ... x V_m) / Gamma of atoms with a finite
// twisting group, and the combinatorial criteria decided on them:
// complexity, connectedness via the K_i sets (iv) and via transitivity on
// singular points (vi), and the stability verdict.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ihs/finite_group.hpp"

namespace ihs {

class AtomError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AtomKind { regular, elliptic, hyperbolic, focus };

std::string to_string(AtomKind kind);

struct Atom {
    std::string name;
    AtomKind kind = AtomKind::hyperbolic;
    int vertices = 1;  // singular points on the singular fiber
    bool fiber_connected = true;
};

/// A, B, C1, C2, D1, I1, J1, K3, P4, F1..F4, W_reg.
std::vector<Atom> catalog();

/// Catalog lookup; "F<k>" is accepted for every k >= 1.
Atom atom(const std::string& name);

/// Action of the group on one component. Atoms carry a permutation of
/// their singular points per group element; W_reg carries a translation of
/// its circle in full turns. fixed_point[g], when set, overrides the
/// default rule that g has a fixed point on an atom iff it fixes one of
/// its singular points.
struct ComponentAction {
    std::vector<Permutation> perms;
    std::vector<double> translations;
    std::vector<std::optional<bool>> fixed_point;
};

struct AlmostDirectProduct {
    std::string name;
    std::vector<Atom> components;
    FiniteGroup group;
    std::vector<ComponentAction> actions;  // one per component
};

struct WilliamsonProfile {
    int rank = 0;
    int elliptic = 0;
    int hyperbolic = 0;
    int focus = 0;
};

WilliamsonProfile williamson_profile(const AlmostDirectProduct& p);

/// Shape and homomorphism checks; an empty list means the data is valid.
std::vector<std::string> validate(const AlmostDirectProduct& p);

bool has_fixed_point(const AlmostDirectProduct& p, std::size_t component, int element);

struct FreenessReport {
    bool free = true;
    std::optional<int> witness;  // an element with a fixed point on V
};

/// An element acts freely on the product iff it has no fixed point on at
/// least one component.
FreenessReport check_free(const AlmostDirectProduct& p);

/// Gamma-orbits on the product of the singular-point sets of the
/// non-regular components. Throws AtomError for invalid or non-free data.
int complexity(const AlmostDirectProduct& p);

struct TransitivityWitness {
    std::size_t component = 0;
    int orbits = 0;
};

struct ConnectednessVi {
    bool holds = true;
    std::vector<TransitivityWitness> components;  // non-regular components only
};

ConnectednessVi check_connectedness_vi(const AlmostDirectProduct& p);

/// Gamma-classes of (singular point of V_i, connected fiber of the rest)
/// pairs, with the number of connected components they form.
struct KiSet {
    std::size_t component = 0;
    std::vector<std::pair<int, int>> elements;  // (singular point, fiber label)
    int connected_components = 0;
};

std::vector<KiSet> build_Ki_sets(const AlmostDirectProduct& p);
bool check_connectedness_iv(const AlmostDirectProduct& p);

struct CrossCheck {
    bool iv = false;
    bool vi = false;
};

/// Evaluates (iv) and (vi); throws AtomError when they disagree.
CrossCheck cross_check_criteria(const AlmostDirectProduct& p);

enum class StabilityVerdict { stable_analytic_strong_sense, criterion_not_satisfied };

std::string to_string(StabilityVerdict v);

/// stable-analytic-strong-sense iff the action is free and the
/// connectedness condition holds. Never reports instability.
StabilityVerdict stability_verdict(const AlmostDirectProduct& p);

// ------------------------------------------------------------ named data

struct NamedProduct {
    AlmostDirectProduct product;
    int expected_complexity = 0;
    std::string family;  // "elementary", "complexity-1", "complexity-2", "saddle-focus-2"
};

/// The elementary singularities A, B, A*, F1 and the products listed with
/// complexity 1 and 2, with explicit twisting actions.
std::vector<NamedProduct> named_products();

/// C2 with trivial Gamma: the standard negative example.
AlmostDirectProduct c2_trivial();

struct CatalogException {
    std::string subject;
    std::string initial_value;
    std::string used_value;
    std::string derivation;
};

/// Catalog vertex counts that had to be revised against the complexity
/// values, and the products whose consistency depends on the revision.
std::vector<CatalogException> exceptions_report();

// ------------------------------------------------------------------ JSON

/// {"name", "components": [...], "group": "Z2" | {"name", "elements", "table"},
///  "actions": [{"perms": {"e": [...], ...}} | {"translations": {"e": 0, ...}}],
///  optional "fixed_points": {"a": true, ...} per action}
AlmostDirectProduct parse_product(const std::string& json_text);
std::string serialize_product(const AlmostDirectProduct& p);

/// Random product over catalog atoms with a random homomorphic action
/// (not necessarily free). Deterministic in the seed.
AlmostDirectProduct random_product(std::uint64_t seed);

}  // namespace ihs
