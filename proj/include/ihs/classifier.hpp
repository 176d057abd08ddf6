#pragma once

// Rank, linearization, local symplectic reduction and Williamson type of
// singular points of a momentum map.

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ihs/phase_space.hpp"

namespace ihs {

/// Raised when a classification step cannot reach a verdict (inconsistent
/// rank data, nothing to reduce).
class ClassificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClassifierOptions {
    double tol = 1e-8;        // rank cutoff and eigenvalue grouping
    double leaf_tol = 1e-8;   // allowed |C(p) - c| for leaf constraints
    int attempts = 32;        // random combinations tried for simple spectrum
    std::uint64_t seed = 0;
};

/// Orthonormal basis of the leaf tangent space at p (columns, ambient
/// coordinates) and the symplectic form on that basis.
struct LeafFrame {
    Eigen::MatrixXd basis;
    Eigen::MatrixXd omega;
};

/// Throws ModelError when p is off the leaf, or when the bivector does not
/// have full rank on the leaf tangent space.
LeafFrame leaf_frame(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options = {});

/// dF restricted to the leaf tangent space: n x dim(leaf) matrix.
Eigen::MatrixXd leaf_differential(const IntegrableModel& model, const PhasePoint& p, const LeafFrame& frame);

/// Numerical rank of dF on the leaf tangent space.
int rank_at(const IntegrableModel& model, const PhasePoint& p, double tol = 1e-8);

/// Jacobian of the Hamiltonian field of f at p in ambient coordinates.
Eigen::MatrixXd field_jacobian(const IntegrableModel& model, const Expression& f, const PhasePoint& p);

struct Linearization {
    std::vector<Eigen::MatrixXd> operators;  // A_j on `basis`
    Eigen::MatrixXd basis;                   // ambient coordinates of the basis vectors
    Eigen::MatrixXd omega;                   // symplectic form on `basis`

    /// max_j ||A_j^T omega + omega A_j||
    double symplectic_defect() const;
    /// max_{i<j} ||[A_i, A_j]||
    double commutator_defect() const;
    /// Dimension of span{A_j}.
    int span_rank(double tol) const;
};

/// Linearizations of all momentum components at p, projected onto the leaf
/// tangent space. Requires dim(leaf) == 2n.
Linearization linearize(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options = {});

/// Induced action on the 2(n-r)-dimensional symplectic quotient K/T, where
/// K = ker dF|leaf and T is spanned by the r independent Hamiltonian
/// fields. The operators belong to the n - r combinations of f_1..f_n
/// whose differentials vanish at p. At rank 0 this equals linearize().
/// Throws ClassificationError at regular points and when T is not inside K.
Linearization reduce_at(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options = {});

struct WilliamsonType {
    int rank = 0;
    int elliptic = 0;
    int hyperbolic = 0;
    int focus = 0;
    std::vector<std::complex<double>> eigenvalues;  // spectrum of sum c_j A_j
    std::vector<double> coefficients;                // the c_j
    double spectral_gap = 0.0;
    int attempts_used = 0;
    std::uint64_t seed = 0;

    int degrees_of_freedom() const { return rank + elliptic + hyperbolic + 2 * focus; }
};

struct DegenerateReport {
    std::string reason;
    int attempts = 0;
    double best_gap = 0.0;
    std::uint64_t seed = 0;
};

using TypeResult = std::variant<WilliamsonType, DegenerateReport>;

/// Draws unit coefficient vectors until sum c_j A_j has a simple spectrum
/// with relative gap above sqrt(tol), then counts elliptic pairs, hyperbolic
/// pairs and focus quadruples. `rank` is copied into the result.
TypeResult williamson_type(const Linearization& lin, int attempts, double tol, std::uint64_t seed = 0,
                           int rank = 0);

enum class Verdict { nondegenerate, degenerate, inconclusive };

std::string to_string(Verdict v);

struct NonDegeneracyVerdict {
    Verdict verdict = Verdict::inconclusive;
    int rank = 0;
    int n = 0;
    double commutator_defect = 0.0;
    double symplectic_defect = 0.0;
    int span_rank = 0;
    double spectral_gap = 0.0;
    int attempts = 0;
    std::string reason;
    std::optional<WilliamsonType> type;
};

/// Non-degenerate iff the reduced operators commute, span an (n - r)-space
/// and some combination has a simple spectrum.
NonDegeneracyVerdict is_nondegenerate(const IntegrableModel& model, const PhasePoint& p,
                                      const ClassifierOptions& options = {});

/// Rank plus, at singular points, the non-degeneracy verdict and type.
struct PointClassification {
    int rank = 0;
    int n = 0;
    bool regular = false;
    NonDegeneracyVerdict verdict;
};

PointClassification classify_point(const IntegrableModel& model, const PhasePoint& p,
                                   const ClassifierOptions& options = {});

}  // namespace ihs
