#include "ihs/phase_space.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "ihs/linalg.hpp"
#include "ihs/random.hpp"

namespace ihs {

PhasePoint::PhasePoint(Eigen::VectorXd x) : coords(std::move(x))
{
    if (!coords.allFinite()) throw ModelError("phase point has non-finite entries");
}

// ------------------------------------------------------- PoissonStructure

PoissonStructure PoissonStructure::canonical(SymbolTable symbols)
{
    const std::size_t n = symbols.coordinates.size();
    if (n % 2 != 0) throw ModelError("canonical chart needs an even number of coordinates");
    PoissonStructure s;
    s.symbols_ = std::move(symbols);
    s.canonical_ = true;
    s.entries_.assign(n * n, Expression::constant(0.0));
    for (std::size_t i = 0; i < n; i += 2) {
        s.entries_[i * n + i + 1] = Expression::constant(-1.0);
        s.entries_[(i + 1) * n + i] = Expression::constant(1.0);
    }
    return s;
}

PoissonStructure PoissonStructure::from_entries(
    SymbolTable symbols, const std::vector<std::tuple<std::size_t, std::size_t, Expression>>& upper,
    std::vector<Expression> casimirs)
{
    const std::size_t n = symbols.coordinates.size();
    PoissonStructure s;
    s.symbols_ = std::move(symbols);
    s.entries_.assign(n * n, Expression::constant(0.0));
    std::vector<bool> seen(n * n, false);
    for (const auto& [i, j, e] : upper) {
        if (i >= n || j >= n) throw ModelError("bivector index out of range");
        if (i == j) throw ModelError("bivector diagonal entries must vanish");
        const std::size_t a = std::min(i, j), b = std::max(i, j);
        if (seen[a * n + b]) throw ModelError("bivector entry listed twice");
        seen[a * n + b] = true;
        s.entries_[i * n + j] = e;
        s.entries_[j * n + i] = -e;
    }
    s.casimirs_ = std::move(casimirs);
    return s;
}

Eigen::MatrixXd PoissonStructure::matrix(std::span<const double> point, std::span<const double> params) const
{
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = evaluate(entries_[static_cast<std::size_t>(i * n + j)], point, params);
    return m;
}

std::vector<Eigen::MatrixXd> PoissonStructure::matrix_derivatives(std::span<const double> point,
                                                                  std::span<const double> params) const
{
    const auto n = static_cast<Eigen::Index>(dimension());
    std::vector<Eigen::MatrixXd> d(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    if (canonical_) return d;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const Expression& e = entries_[static_cast<std::size_t>(i * n + j)];
            if (e.is_constant()) continue;
            const Jet2 jet = evaluate_jet2(e, point, params);
            for (Eigen::Index l = 0; l < n; ++l) d[static_cast<std::size_t>(l)](i, j) = jet.gradient[l];
        }
    return d;
}

double PoissonStructure::jacobi_residual(std::span<const double> point, std::span<const double> params) const
{
    const Eigen::MatrixXd pi = matrix(point, params);
    const auto d = matrix_derivatives(point, params);
    const auto n = static_cast<Eigen::Index>(dimension());
    // sum_l pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            for (Eigen::Index k = j + 1; k < n; ++k) {
                double sum = 0.0;
                for (Eigen::Index l = 0; l < n; ++l) {
                    const auto& dl = d[static_cast<std::size_t>(l)];
                    sum += pi(i, l) * dl(j, k) + pi(j, l) * dl(k, i) + pi(k, l) * dl(i, j);
                }
                worst = std::max(worst, std::abs(sum));
            }
    return worst;
}

// --------------------------------------------------------- IntegrableModel

std::vector<double> IntegrableModel::leaf_values() const
{
    std::vector<double> v;
    v.reserve(leaf.size());
    const std::vector<double> none;
    for (const auto& c : leaf) v.push_back(evaluate(c.value, none, params()));
    return v;
}

double IntegrableModel::leaf_residual(const PhasePoint& p) const
{
    const auto values = leaf_values();
    double worst = 0.0;
    for (std::size_t i = 0; i < leaf.size(); ++i)
        worst = std::max(worst, std::abs(evaluate(leaf[i].casimir, p.span(), params()) - values[i]));
    return worst;
}

Eigen::VectorXd IntegrableModel::momentum_value(const PhasePoint& p) const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(n()));
    for (std::size_t i = 0; i < n(); ++i) v[static_cast<Eigen::Index>(i)] = evaluate(momentum[i], p.span(), params());
    return v;
}

namespace {

Eigen::MatrixXd gradients(const std::vector<Expression>& fs, const PhasePoint& p, std::span<const double> params)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < fs.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) = evaluate_jet2(fs[i], p.span(), params).gradient.transpose();
    return m;
}

}  // namespace

Eigen::MatrixXd IntegrableModel::momentum_jacobian(const PhasePoint& p) const
{
    return gradients(momentum, p, params());
}

Eigen::MatrixXd IntegrableModel::casimir_jacobian(const PhasePoint& p) const
{
    std::vector<Expression> cs;
    for (const auto& c : leaf) cs.push_back(c.casimir);
    return gradients(cs, p, params());
}

double IntegrableModel::parameter(std::string_view name) const
{
    auto i = symbols().parameter_index(name);
    if (!i) throw ModelError("unknown parameter '" + std::string(name) + "'");
    return parameters[*i];
}

void IntegrableModel::set_parameter(std::string_view name, double value)
{
    auto i = symbols().parameter_index(name);
    if (!i) throw ModelError("unknown parameter '" + std::string(name) + "'");
    parameters[*i] = value;
}

// ------------------------------------------------------------- brackets

Expression poisson_bracket(const Expression& f, const Expression& g, const PoissonStructure& structure)
{
    const std::size_t n = structure.dimension();
    std::vector<Expression> df, dg;
    for (std::size_t i = 0; i < n; ++i) {
        df.push_back(differentiate(f, i));
        dg.push_back(differentiate(g, i));
    }
    Expression sum = Expression::constant(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (df[i].is_constant(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (dg[j].is_constant(0.0) || structure.entry(i, j).is_constant(0.0)) continue;
            sum = sum + structure.entry(i, j) * df[i] * dg[j];
        }
    }
    return sum;
}

std::vector<Expression> hamiltonian_vector_field(const Expression& f, const PoissonStructure& structure)
{
    const std::size_t n = structure.dimension();
    std::vector<Expression> df;
    for (std::size_t j = 0; j < n; ++j) df.push_back(differentiate(f, j));
    std::vector<Expression> field;
    for (std::size_t k = 0; k < n; ++k) {
        Expression sum = Expression::constant(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (df[j].is_constant(0.0) || structure.entry(k, j).is_constant(0.0)) continue;
            sum = sum + structure.entry(k, j) * df[j];
        }
        field.push_back(sum);
    }
    return field;
}

double bracket_value(const Expression& f, const Expression& g, const PoissonStructure& structure,
                     std::span<const double> point, std::span<const double> params)
{
    const Eigen::VectorXd df = evaluate_jet2(f, point, params).gradient;
    const Eigen::VectorXd dg = evaluate_jet2(g, point, params).gradient;
    return df.dot(structure.matrix(point, params) * dg);
}

namespace {

Eigen::VectorXd sample_point(Rng& rng, std::size_t n, double box)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-box, box);
    return x;
}

}  // namespace

CommutationReport check_commutation(const IntegrableModel& model, std::size_t samples, double tol,
                                    std::uint64_t seed, double box)
{
    if (samples < 1) throw ModelError("samples must be at least 1");
    CommutationReport report;
    report.samples = samples;
    report.seed = seed;
    report.tolerance = tol;
    Rng rng(seed);
    const std::size_t n = model.n();
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = sample_point(rng, model.dimension(), box);
        const std::span<const double> pt = as_span(x);
        const Eigen::MatrixXd pi = model.structure.matrix(pt, model.params());
        std::vector<Eigen::VectorXd> grads;
        for (const auto& f : model.momentum) grads.push_back(evaluate_jet2(f, pt, model.params()).gradient);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double r = std::abs(grads[i].dot(pi * grads[j]));
                if (r > report.max_residual) {
                    report.max_residual = r;
                    report.worst_pair = {i, j};
                }
            }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

ResidualReport check_jacobi(const PoissonStructure& structure, std::span<const double> params, std::size_t samples,
                            double tol, std::uint64_t seed, double box)
{
    ResidualReport report;
    report.samples = samples;
    report.seed = seed;
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = sample_point(rng, structure.dimension(), box);
        report.max_residual = std::max(report.max_residual, structure.jacobi_residual(as_span(x), params));
    }
    report.pass = report.max_residual <= tol;
    return report;
}

ResidualReport check_casimirs(const PoissonStructure& structure, std::span<const double> params,
                              std::size_t samples, double tol, std::uint64_t seed, double box)
{
    ResidualReport report;
    report.samples = samples;
    report.seed = seed;
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = sample_point(rng, structure.dimension(), box);
        const Eigen::MatrixXd pi = structure.matrix(as_span(x), params);
        for (const auto& c : structure.casimirs()) {
            const Eigen::VectorXd dc = evaluate_jet2(c, as_span(x), params).gradient;
            report.max_residual = std::max(report.max_residual, (pi * dc).cwiseAbs().maxCoeff());
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

// ----------------------------------------------------------------- flows

Eigen::VectorXd VectorField::operator()(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(components.size()));
    for (std::size_t k = 0; k < components.size(); ++k)
        v[static_cast<Eigen::Index>(k)] = evaluate(components[k], as_span(x), parameters);
    return v;
}

VectorField make_hamiltonian_field(const IntegrableModel& model, const Expression& f)
{
    return VectorField{hamiltonian_vector_field(f, model.structure), model.parameters};
}

FlowResult flow_integrate(const VectorField& field, const PhasePoint& p, double time, const StepControl& control,
                          const std::vector<Expression>& monitored)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    if (field.components.size() != p.size()) throw IntegrationError("field and point dimensions differ");
    const auto n = static_cast<Eigen::Index>(p.size());
    auto rhs = [&](const State& x, State& dxdt, double) {
        const Eigen::VectorXd v = field(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
        dxdt.assign(v.data(), v.data() + n);
    };

    std::vector<double> initial;
    for (const auto& g : monitored) initial.push_back(evaluate(g, p.span(), field.parameters));
    std::vector<double> drift(monitored.size(), 0.0);
    auto observe = [&](const State& x) {
        for (std::size_t i = 0; i < monitored.size(); ++i)
            drift[i] = std::max(drift[i], std::abs(evaluate(monitored[i], x, field.parameters) - initial[i]));
    };

    auto stepper = odeint::make_controlled(control.abs_tol, control.rel_tol, odeint::runge_kutta_dopri5<State>());
    State x(p.coords.data(), p.coords.data() + n);
    const double direction = time < 0.0 ? -1.0 : 1.0;
    const double span = std::abs(time);
    double t = 0.0;
    double dt = direction * std::min(control.initial_step, span > 0.0 ? span : control.initial_step);
    std::size_t steps = 0;
    while (direction * (time - t) > 0.0) {
        if (steps >= control.max_steps) throw IntegrationError("step budget exhausted");
        const double remaining = time - t;
        if (std::abs(dt) > std::abs(remaining)) dt = remaining;
        const double t_before = t;
        if (stepper.try_step(rhs, x, t, dt) == odeint::success) {
            ++steps;
            for (double xi : x)
                if (!std::isfinite(xi)) throw IntegrationError("non-finite state");
            observe(x);
            // Land exactly on the end point when the last step covered it.
            if (std::abs(time - t) <= 1e-15 * std::max(1.0, span)) t = time;
        } else if (std::abs(dt) < control.min_step * std::max(1.0, span)) {
            throw IntegrationError("step size underflow at t = " + std::to_string(t_before));
        }
    }
    FlowResult result;
    result.end = PhasePoint(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    result.drift = std::move(drift);
    result.steps = steps;
    return result;
}

}  // namespace ihs
