#include "ihs/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "ihs/linalg.hpp"
#include "ihs/random.hpp"

namespace ihs {

LeafFrame leaf_frame(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options)
{
    if (p.size() != model.dimension()) throw ModelError("point dimension does not match the model");
    const double off = model.leaf_residual(p);
    if (off > options.leaf_tol) throw ModelError("point is off the leaf (residual " + std::to_string(off) + ")");

    LeafFrame frame;
    const Eigen::MatrixXd dc = model.casimir_jacobian(p);
    frame.basis = null_space(dc, options.tol);
    const Eigen::MatrixXd pi = model.structure.matrix(p.span(), model.params());

    // omega(b_a, b_b) = alpha_b . b_a where pi alpha_b = b_b.
    const auto d = frame.basis.cols();
    Eigen::MatrixXd alpha(pi.rows(), d);
    for (Eigen::Index a = 0; a < d; ++a) {
        alpha.col(a) = solve_min_norm(pi, frame.basis.col(a));
        const double miss = (pi * alpha.col(a) - frame.basis.col(a)).norm();
        if (miss > 1e3 * options.tol) throw ModelError("bivector is degenerate on the leaf tangent space");
    }
    frame.omega = alpha.transpose() * frame.basis;
    frame.omega = 0.5 * (frame.omega - frame.omega.transpose()).eval();
    if (numerical_rank(frame.omega, options.tol) != d)
        throw ModelError("bivector is degenerate on the leaf tangent space");
    return frame;
}

Eigen::MatrixXd leaf_differential(const IntegrableModel& model, const PhasePoint& p, const LeafFrame& frame)
{
    return model.momentum_jacobian(p) * frame.basis;
}

int rank_at(const IntegrableModel& model, const PhasePoint& p, double tol)
{
    ClassifierOptions options;
    options.tol = tol;
    const LeafFrame frame = leaf_frame(model, p, options);
    return numerical_rank(leaf_differential(model, p, frame), tol);
}

Eigen::MatrixXd field_jacobian(const IntegrableModel& model, const Expression& f, const PhasePoint& p)
{
    const Jet2 jet = evaluate_jet2(f, p.span(), model.params());
    const Eigen::MatrixXd pi = model.structure.matrix(p.span(), model.params());
    Eigen::MatrixXd a = pi * jet.hessian;
    if (!model.structure.is_canonical()) {
        const auto dpi = model.structure.matrix_derivatives(p.span(), model.params());
        for (Eigen::Index l = 0; l < a.cols(); ++l) a.col(l) += dpi[static_cast<std::size_t>(l)] * jet.gradient;
    }
    return a;
}

// ----------------------------------------------------------- Linearization

double Linearization::symplectic_defect() const
{
    double worst = 0.0;
    for (const auto& a : operators) worst = std::max(worst, (a.transpose() * omega + omega * a).norm());
    return worst;
}

double Linearization::commutator_defect() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < operators.size(); ++i)
        for (std::size_t j = i + 1; j < operators.size(); ++j)
            worst = std::max(worst, (operators[i] * operators[j] - operators[j] * operators[i]).norm());
    return worst;
}

int Linearization::span_rank(double tol) const
{
    if (operators.empty()) return 0;
    const auto d = operators.front().size();
    Eigen::MatrixXd stacked(d, static_cast<Eigen::Index>(operators.size()));
    for (std::size_t j = 0; j < operators.size(); ++j)
        stacked.col(static_cast<Eigen::Index>(j)) = operators[j].reshaped();
    return numerical_rank(stacked, tol);
}

Linearization linearize(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options)
{
    const LeafFrame frame = leaf_frame(model, p, options);
    if (static_cast<std::size_t>(frame.basis.cols()) != 2 * model.n())
        throw ModelError("leaf tangent space has dimension " + std::to_string(frame.basis.cols()) + ", expected " +
                         std::to_string(2 * model.n()));
    Linearization lin;
    lin.basis = frame.basis;
    lin.omega = frame.omega;
    for (const auto& f : model.momentum)
        lin.operators.push_back(frame.basis.transpose() * field_jacobian(model, f, p) * frame.basis);
    return lin;
}

Linearization reduce_at(const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& options)
{
    const LeafFrame frame = leaf_frame(model, p, options);
    const auto d = frame.basis.cols();
    const auto n = static_cast<Eigen::Index>(model.n());
    if (d != 2 * n)
        throw ModelError("leaf tangent space has dimension " + std::to_string(d) + ", expected " +
                         std::to_string(2 * n));

    const Eigen::MatrixXd dF = leaf_differential(model, p, frame);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dF, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int r = numerical_rank(dF, options.tol);
    if (r == n) throw ClassificationError("regular point: rank equals n, nothing to reduce");
    if (r == 0) return linearize(model, p, options);

    // Recombine F: the first r rows of U^T give independent differentials,
    // the remaining n - r combinations are critical at p.
    const Eigen::MatrixXd u = svd.matrixU();
    std::vector<Expression> combos;
    for (Eigen::Index i = 0; i < n; ++i) {
        Expression g = Expression::constant(0.0);
        for (Eigen::Index j = 0; j < n; ++j)
            g = g + Expression::constant(u(j, i)) * model.momentum[static_cast<std::size_t>(j)];
        combos.push_back(g);
    }

    const Eigen::MatrixXd kernel = null_space(dF, options.tol);  // d x (d - r), leaf coordinates
    const Eigen::MatrixXd pi = model.structure.matrix(p.span(), model.params());
    Eigen::MatrixXd orbit(d, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const Eigen::VectorXd grad = evaluate_jet2(combos[static_cast<std::size_t>(i)], p.span(), model.params()).gradient;
        const Eigen::VectorXd field = pi * grad;
        orbit.col(i) = frame.basis.transpose() * field;
        if ((frame.basis * orbit.col(i) - field).norm() > 1e3 * options.tol * std::max(1.0, field.norm()))
            throw ClassificationError("Hamiltonian field leaves the leaf tangent space");
    }
    const double scale = std::max(1.0, dF.norm() * orbit.norm());
    if ((dF * orbit).norm() > 1e3 * options.tol * scale)
        throw ClassificationError("orbit directions are not inside ker dF (inconsistent rank)");

    const Eigen::MatrixXd orbit_basis = range_space(orbit, options.tol);
    if (orbit_basis.cols() != r) throw ClassificationError("orbit directions are not independent");
    const Eigen::MatrixXd complement =
        kernel - orbit_basis * (orbit_basis.transpose() * kernel);
    const Eigen::MatrixXd q = range_space(complement, 1e-6);
    if (q.cols() != d - 2 * r) throw ClassificationError("reduced space has unexpected dimension");

    Linearization lin;
    lin.basis = frame.basis * q;
    lin.omega = q.transpose() * frame.omega * q;
    for (Eigen::Index i = r; i < n; ++i) {
        const Eigen::MatrixXd a = frame.basis.transpose() * field_jacobian(model, combos[static_cast<std::size_t>(i)], p) *
                                  frame.basis;
        lin.operators.push_back(q.transpose() * a * q);
    }
    return lin;
}

// -------------------------------------------------------- Williamson type

namespace {

double relative_gap(const Eigen::VectorXcd& ev)
{
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
            const double scale = 1.0 + std::max(std::abs(ev[i]), std::abs(ev[j]));
            gap = std::min(gap, std::abs(ev[i] - ev[j]) / scale);
        }
    return gap;
}

bool has_partner(const Eigen::VectorXcd& ev, std::complex<double> target, double tol)
{
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i] - target) <= tol * (1.0 + std::abs(target))) return true;
    return false;
}

}  // namespace

TypeResult williamson_type(const Linearization& lin, int attempts, double tol, std::uint64_t seed, int rank)
{
    DegenerateReport degenerate;
    degenerate.seed = seed;
    if (lin.operators.empty()) {
        degenerate.reason = "no operators";
        return degenerate;
    }
    const std::size_t m = lin.operators.size();
    const auto dim = lin.operators.front().rows();
    Rng rng(seed);
    degenerate.best_gap = 0.0;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        std::vector<double> c(m);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& ci : c) {
                ci = rng.normal();
                norm += ci * ci;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& ci : c) ci /= norm;

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t j = 0; j < m; ++j) a += c[j] * lin.operators[j];
        Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
        if (es.info() != Eigen::Success) continue;
        const Eigen::VectorXcd ev = es.eigenvalues();
        const double gap = relative_gap(ev);
        degenerate.best_gap = std::max(degenerate.best_gap, gap);
        degenerate.attempts = attempt;
        // A Jordan block perturbed by rounding splits by about sqrt(eps), so
        // a gap is only trusted above sqrt(tol).
        if (!(gap > std::sqrt(tol))) continue;

        WilliamsonType type;
        type.rank = rank;
        int imag = 0, real = 0, complex = 0;
        bool symmetric = true;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const std::complex<double> l = ev[i];
            const double s = tol * (1.0 + std::abs(l));
            if (!has_partner(ev, -l, tol) || !has_partner(ev, std::conj(l), tol)) symmetric = false;
            if (std::abs(l.real()) <= s)
                ++imag;
            else if (std::abs(l.imag()) <= s)
                ++real;
            else
                ++complex;
        }
        if (!symmetric || imag % 2 != 0 || real % 2 != 0 || complex % 4 != 0) {
            degenerate.reason = "spectrum is not closed under l -> -l, conj(l)";
            return degenerate;
        }
        type.elliptic = imag / 2;
        type.hyperbolic = real / 2;
        type.focus = complex / 4;
        for (Eigen::Index i = 0; i < ev.size(); ++i) type.eigenvalues.push_back(ev[i]);
        std::sort(type.eigenvalues.begin(), type.eigenvalues.end(), [](auto x, auto y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
        type.coefficients = c;
        type.spectral_gap = gap;
        type.attempts_used = attempt;
        type.seed = seed;
        return type;
    }
    degenerate.attempts = attempts;
    degenerate.reason = "no combination with simple spectrum found";
    return degenerate;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::nondegenerate: return "nondegenerate";
    case Verdict::degenerate: return "degenerate";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

NonDegeneracyVerdict is_nondegenerate(const IntegrableModel& model, const PhasePoint& p,
                                      const ClassifierOptions& options)
{
    NonDegeneracyVerdict out;
    out.n = static_cast<int>(model.n());
    out.rank = rank_at(model, p, options.tol);
    if (out.rank == out.n) {
        out.verdict = Verdict::inconclusive;
        out.reason = "regular point";
        return out;
    }
    Linearization lin;
    try {
        lin = reduce_at(model, p, options);
    } catch (const ClassificationError& e) {
        out.verdict = Verdict::inconclusive;
        out.reason = e.what();
        return out;
    }
    double norm = 0.0;
    for (const auto& a : lin.operators) norm = std::max(norm, a.norm());
    out.commutator_defect = lin.commutator_defect();
    out.symplectic_defect = lin.symplectic_defect();
    out.span_rank = lin.span_rank(options.tol);

    if (out.symplectic_defect > 1e3 * options.tol * (1.0 + norm * lin.omega.norm())) {
        out.verdict = Verdict::inconclusive;
        out.reason = "linearization is not infinitesimally symplectic";
        return out;
    }
    if (out.commutator_defect > 1e3 * options.tol * (1.0 + norm * norm)) {
        out.verdict = Verdict::degenerate;
        out.reason = "linearizations do not commute";
        return out;
    }
    if (out.span_rank != out.n - out.rank) {
        out.verdict = Verdict::degenerate;
        out.reason = "linearizations span a space of dimension " + std::to_string(out.span_rank) + " < " +
                     std::to_string(out.n - out.rank);
        return out;
    }
    const TypeResult t = williamson_type(lin, options.attempts, options.tol, options.seed, out.rank);
    if (const auto* d = std::get_if<DegenerateReport>(&t)) {
        out.verdict = Verdict::degenerate;
        out.reason = d->reason;
        out.attempts = d->attempts;
        out.spectral_gap = d->best_gap;
        return out;
    }
    out.type = std::get<WilliamsonType>(t);
    out.attempts = out.type->attempts_used;
    out.spectral_gap = out.type->spectral_gap;
    out.verdict = Verdict::nondegenerate;
    return out;
}

PointClassification classify_point(const IntegrableModel& model, const PhasePoint& p,
                                   const ClassifierOptions& options)
{
    PointClassification out;
    out.n = static_cast<int>(model.n());
    out.rank = rank_at(model, p, options.tol);
    out.regular = out.rank == out.n;
    if (out.regular) {
        out.verdict.rank = out.rank;
        out.verdict.n = out.n;
        out.verdict.reason = "regular point";
        return out;
    }
    out.verdict = is_nondegenerate(model, p, options);
    return out;
}

}  // namespace ihs
