#pragma once

// Phase spaces (canonical charts and Lie-Poisson spaces), Poisson brackets,
// Hamiltonian vector fields and flows.
//
// Sign convention: omega(., X_f) = df, so the k-th component of X_f is
// {x_k, f} = sum_j pi_kj d_j f. On a canonical pair (x, y) with
// omega = dx ^ dy this gives X_f = (-df/dy, df/dx), i.e. {x, y} = -1.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ihs/expression.hpp"

namespace ihs {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PhasePoint {
    Eigen::VectorXd coords;

    PhasePoint() = default;
    explicit PhasePoint(Eigen::VectorXd x);
    std::size_t size() const { return static_cast<std::size_t>(coords.size()); }
    std::span<const double> span() const { return {coords.data(), size()}; }
};

/// Antisymmetric bivector with expression entries plus declared Casimirs.
class PoissonStructure {
public:
    PoissonStructure() = default;

    /// Coordinates are taken in conjugate pairs (q1, p1, q2, p2, ...), with
    /// omega = sum dq_i ^ dp_i. Requires an even coordinate count.
    static PoissonStructure canonical(SymbolTable symbols);

    /// Upper-triangular entries {x_i, x_j} for i < j; the rest follows by
    /// antisymmetry. Unlisted entries are zero.
    static PoissonStructure from_entries(SymbolTable symbols,
                                         const std::vector<std::tuple<std::size_t, std::size_t, Expression>>& upper,
                                         std::vector<Expression> casimirs);

    std::size_t dimension() const { return symbols_.coordinates.size(); }
    const SymbolTable& symbols() const { return symbols_; }
    bool is_canonical() const { return canonical_; }
    const Expression& entry(std::size_t i, std::size_t j) const { return entries_[i * dimension() + j]; }
    const std::vector<Expression>& casimirs() const { return casimirs_; }

    /// Numeric bivector matrix at a point.
    Eigen::MatrixXd matrix(std::span<const double> point, std::span<const double> params) const;

    /// Derivative d pi_ij / d x_l for all i, j at a point: result[l](i, j).
    std::vector<Eigen::MatrixXd> matrix_derivatives(std::span<const double> point,
                                                    std::span<const double> params) const;

    /// Largest |cyclic Jacobi sum| over all index triples at a point.
    double jacobi_residual(std::span<const double> point, std::span<const double> params) const;

private:
    SymbolTable symbols_;
    bool canonical_ = false;
    std::vector<Expression> entries_;
    std::vector<Expression> casimirs_;
};

/// Symplectic leaf selector: casimir(x) = value.
struct LeafConstraint {
    Expression casimir;
    Expression value;  // constant or parameter expression
};

struct IntegrableModel {
    std::string name;
    PoissonStructure structure;
    std::vector<std::string> momentum_names;
    std::vector<Expression> momentum;  // F = (f_1, ..., f_n)
    std::vector<LeafConstraint> leaf;
    std::vector<double> parameters;    // aligned with symbols().parameters

    const SymbolTable& symbols() const { return structure.symbols(); }
    std::size_t dimension() const { return structure.dimension(); }
    std::size_t n() const { return momentum.size(); }
    std::span<const double> params() const { return {parameters.data(), parameters.size()}; }

    /// Value of each leaf constraint's right-hand side.
    std::vector<double> leaf_values() const;

    /// Largest |casimir(x) - value| over the leaf constraints.
    double leaf_residual(const PhasePoint& p) const;

    /// F(p).
    Eigen::VectorXd momentum_value(const PhasePoint& p) const;

    /// n x N matrix of momentum gradients.
    Eigen::MatrixXd momentum_jacobian(const PhasePoint& p) const;

    /// c x N matrix of leaf-constraint gradients.
    Eigen::MatrixXd casimir_jacobian(const PhasePoint& p) const;

    double parameter(std::string_view name) const;
    void set_parameter(std::string_view name, double value);
};

Expression poisson_bracket(const Expression& f, const Expression& g, const PoissonStructure& structure);

/// Components {x_k, f}, k = 0..N-1.
std::vector<Expression> hamiltonian_vector_field(const Expression& f, const PoissonStructure& structure);

/// Numeric {f, g} at a point via gradients.
double bracket_value(const Expression& f, const Expression& g, const PoissonStructure& structure,
                     std::span<const double> point, std::span<const double> params);

struct CommutationReport {
    double max_residual = 0.0;
    std::pair<std::size_t, std::size_t> worst_pair{0, 0};
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Samples points uniformly in [-box, box]^N and records max |{f_i, f_j}|.
CommutationReport check_commutation(const IntegrableModel& model, std::size_t samples, double tol,
                                    std::uint64_t seed = 0, double box = 2.0);

struct ResidualReport {
    double max_residual = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool pass = true;
};

ResidualReport check_jacobi(const PoissonStructure& structure, std::span<const double> params,
                            std::size_t samples, double tol, std::uint64_t seed = 0, double box = 2.0);

/// max |{C, x_k}| over Casimirs and coordinates.
ResidualReport check_casimirs(const PoissonStructure& structure, std::span<const double> params,
                              std::size_t samples, double tol, std::uint64_t seed = 0, double box = 2.0);

// ------------------------------------------------------------------ flows

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VectorField {
    std::vector<Expression> components;
    std::vector<double> parameters;

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

VectorField make_hamiltonian_field(const IntegrableModel& model, const Expression& f);

struct StepControl {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    double initial_step = 1e-3;
    double min_step = 1e-14;
    std::size_t max_steps = 10'000'000;
};

struct FlowResult {
    PhasePoint end;
    std::vector<double> drift;  // max |g(x(t)) - g(x(0))| per monitored function
    std::size_t steps = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of `field` from p over
/// [0, time]. Throws IntegrationError on step-size underflow or a
/// non-finite state.
FlowResult flow_integrate(const VectorField& field, const PhasePoint& p, double time,
                          const StepControl& control = {}, const std::vector<Expression>& monitored = {});

}  // namespace ihs
