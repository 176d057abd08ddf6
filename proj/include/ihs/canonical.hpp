#pragma once

// Canonical local models of non-degenerate singularities and the
// combinatorial data of their finite quotients.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ihs/finite_group.hpp"
#include "ihs/phase_space.hpp"

namespace ihs {

struct CanonicalSpec {
    int r = 0;   // regular components
    int ke = 0;  // elliptic
    int kh = 0;  // hyperbolic
    int kf = 0;  // focus-focus pairs

    int n() const { return r + ke + kh + 2 * kf; }
    bool operator==(const CanonicalSpec&) const = default;
};

/// Parses "r,ke,kh,kf".
CanonicalSpec parse_canonical_spec(const std::string& text);
std::string to_string(const CanonicalSpec& spec);

enum class ComponentKind { regular, elliptic, hyperbolic, focus_radial, focus_angular };

std::string to_string(ComponentKind kind);

struct CanonicalModel {
    CanonicalSpec spec;
    IntegrableModel model;
    std::vector<ComponentKind> kinds;  // one per momentum component
};

/// Chart (lam_s, phi_s) for s <= r, then (x_j, y_j) pairs, omega = sum of
/// dq ^ dp. Components: lam_s; (x^2 + y^2)/2; x*y; and per focus pair
/// x_j y_j + x_{j+1} y_{j+1}, x_{j+1} y_j - y_{j+1} x_j.
CanonicalModel build_canonical(const CanonicalSpec& spec);

struct DisguiseOptions {
    bool symplectic = true;  // conjugate by random linear symplectomorphism
    bool mixing = true;      // post-compose F with random invertible affine J
    int max_shears = 8;
};

/// Original chart coordinates z relate to disguised ones z' by
/// z = symplectic * z'; F' = mixing * F(symplectic * z') + offset.
struct Disguise {
    Eigen::MatrixXd symplectic;
    Eigen::MatrixXd mixing;
    Eigen::VectorXd offset;
    std::uint64_t seed = 0;

    /// Disguised coordinates of an original-chart point.
    PhasePoint to_disguised(const PhasePoint& original) const;
};

struct DisguisedModel {
    IntegrableModel model;
    Disguise disguise;
};

DisguisedModel randomized_disguise(const IntegrableModel& canonical, std::uint64_t seed,
                                   const DisguiseOptions& options = {});

/// Random product of elementary symplectic shears on a 2m-dimensional
/// canonical chart (pairs interleaved), entries in [-1, 1].
Eigen::MatrixXd random_symplectic(int pairs, std::uint64_t seed, int max_shears = 8);

struct PeriodicityReport {
    bool pass = false;
    double measured_period = 0.0;
    double max_return_error = 0.0;  // max |x(2 pi) - x(0)| over samples
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Integrates the flow of an elliptic or focus-angular component from
/// random points and checks return at t = 2 pi. Throws ModelError for
/// components of non-periodic type.
PeriodicityReport verify_periodicity(const CanonicalModel& model, std::size_t component, double tol,
                                     std::size_t samples = 20, std::uint64_t seed = 0);

// ------------------------------------------------------- quotient models

enum class DiskKind { elliptic, hyperbolic, focus };

/// Combinatorial data of V / Gamma with V = R^{r_o} x T^{r_c} x disks.
/// translations[g][c] is the shift of torus circle c in full turns;
/// signs[g][h] is the sign on the h-th hyperbolic disk.
struct QuotientModelSpec {
    int open_rank = 0;    // r_o
    int closed_rank = 0;  // r_c
    std::vector<DiskKind> disks;
    FiniteGroup group;
    std::vector<std::vector<double>> translations;
    std::vector<std::vector<int>> signs;
};

struct QuotientValidation {
    bool pass = false;
    std::string violated;  // empty on pass
};

/// Checks the action data is a homomorphism, trivial off the torus and the
/// hyperbolic disks, free on V and effective on the disk factor.
QuotientValidation validate_quotient_spec(const QuotientModelSpec& q);

}  // namespace ihs
