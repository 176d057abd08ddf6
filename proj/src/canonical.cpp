#include "ihs/canonical.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ihs/linalg.hpp"
#include "ihs/random.hpp"

namespace ihs {

CanonicalSpec parse_canonical_spec(const std::string& text)
{
    CanonicalSpec spec;
    int* fields[] = {&spec.r, &spec.ke, &spec.kh, &spec.kf};
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 4) throw ModelError("canonical spec needs exactly four integers r,ke,kh,kf");
        try {
            std::size_t used = 0;
            *fields[i] = std::stoi(item, &used);
            if (used != item.size()) throw ModelError("bad integer '" + item + "'");
        } catch (const std::logic_error&) {
            throw ModelError("bad integer '" + item + "' in canonical spec");
        }
        if (*fields[i] < 0) throw ModelError("canonical spec entries must be non-negative");
        ++i;
    }
    if (i != 4) throw ModelError("canonical spec needs exactly four integers r,ke,kh,kf");
    if (spec.n() < 1) throw ModelError("canonical spec must have n >= 1");
    return spec;
}

std::string to_string(const CanonicalSpec& spec)
{
    return std::to_string(spec.r) + "," + std::to_string(spec.ke) + "," + std::to_string(spec.kh) + "," +
           std::to_string(spec.kf);
}

std::string to_string(ComponentKind kind)
{
    switch (kind) {
    case ComponentKind::regular: return "regular";
    case ComponentKind::elliptic: return "elliptic";
    case ComponentKind::hyperbolic: return "hyperbolic";
    case ComponentKind::focus_radial: return "focus-radial";
    case ComponentKind::focus_angular: return "focus-angular";
    }
    return "regular";
}

CanonicalModel build_canonical(const CanonicalSpec& spec)
{
    if (spec.r < 0 || spec.ke < 0 || spec.kh < 0 || spec.kf < 0 || spec.n() < 1)
        throw ModelError("invalid canonical spec");
    SymbolTable symbols;
    for (int s = 1; s <= spec.r; ++s) {
        symbols.coordinates.push_back("lam" + std::to_string(s));
        symbols.coordinates.push_back("phi" + std::to_string(s));
    }
    const int pairs = spec.ke + spec.kh + 2 * spec.kf;
    for (int j = 1; j <= pairs; ++j) {
        symbols.coordinates.push_back("x" + std::to_string(j));
        symbols.coordinates.push_back("y" + std::to_string(j));
    }

    CanonicalModel out;
    out.spec = spec;
    std::vector<std::string> sources;
    for (int s = 1; s <= spec.r; ++s) {
        sources.push_back("lam" + std::to_string(s));
        out.kinds.push_back(ComponentKind::regular);
    }
    int j = 1;
    for (int e = 0; e < spec.ke; ++e, ++j) {
        const std::string x = "x" + std::to_string(j), y = "y" + std::to_string(j);
        sources.push_back("(1/2)*(" + x + "^2+" + y + "^2)");
        out.kinds.push_back(ComponentKind::elliptic);
    }
    for (int h = 0; h < spec.kh; ++h, ++j) {
        sources.push_back("x" + std::to_string(j) + "*y" + std::to_string(j));
        out.kinds.push_back(ComponentKind::hyperbolic);
    }
    for (int f = 0; f < spec.kf; ++f, j += 2) {
        const std::string x1 = "x" + std::to_string(j), y1 = "y" + std::to_string(j);
        const std::string x2 = "x" + std::to_string(j + 1), y2 = "y" + std::to_string(j + 1);
        sources.push_back(x1 + "*" + y1 + "+" + x2 + "*" + y2);
        sources.push_back(x2 + "*" + y1 + "-" + y2 + "*" + x1);
        out.kinds.push_back(ComponentKind::focus_radial);
        out.kinds.push_back(ComponentKind::focus_angular);
    }

    IntegrableModel& m = out.model;
    m.name = "canonical:" + to_string(spec);
    m.structure = PoissonStructure::canonical(symbols);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        m.momentum_names.push_back("h" + std::to_string(i + 1));
        m.momentum.push_back(parse(sources[i], symbols));
    }
    return out;
}

// ------------------------------------------------------------- disguises

Eigen::MatrixXd random_symplectic(int pairs, std::uint64_t seed, int max_shears)
{
    const int dim = 2 * pairs;
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
    Rng rng(seed);
    for (int k = 0; k < max_shears; ++k) {
        const int i = static_cast<int>(rng.index(static_cast<std::uint64_t>(pairs)));
        const int j = static_cast<int>(rng.index(static_cast<std::uint64_t>(pairs)));
        const double c = rng.uniform(-1.0, 1.0);
        const bool lower = rng.index(2) == 0;
        Eigen::MatrixXd e = Eigen::MatrixXd::Identity(dim, dim);
        // lower: p_i += c q_j, p_j += c q_i; upper: q_i += c p_j, q_j += c p_i.
        const int to = lower ? 1 : 0, from = lower ? 0 : 1;
        e(2 * i + to, 2 * j + from) += c;
        if (i != j) e(2 * j + to, 2 * i + from) += c;
        s = e * s;
    }
    return s;
}

PhasePoint Disguise::to_disguised(const PhasePoint& original) const
{
    return PhasePoint(symplectic.lu().solve(original.coords));
}

DisguisedModel randomized_disguise(const IntegrableModel& canonical, std::uint64_t seed,
                                   const DisguiseOptions& options)
{
    if (!canonical.structure.is_canonical()) throw ModelError("disguise needs a canonical chart");
    const auto dim = static_cast<Eigen::Index>(canonical.dimension());
    const auto n = static_cast<Eigen::Index>(canonical.n());
    Rng rng(seed);

    DisguisedModel out;
    out.disguise.seed = seed;
    out.disguise.symplectic = options.symplectic
                                  ? random_symplectic(static_cast<int>(dim / 2), seed ^ 0x9e3779b97f4a7c15ULL,
                                                      options.max_shears)
                                  : Eigen::MatrixXd::Identity(dim, dim);
    out.disguise.mixing = Eigen::MatrixXd::Identity(n, n);
    out.disguise.offset = Eigen::VectorXd::Zero(n);
    if (options.mixing) {
        for (;;) {
            Eigen::MatrixXd j(n, n);
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) j(a, b) = rng.uniform(-1.0, 1.0);
            const Eigen::VectorXd sv = singular_values(j);
            if (sv[n - 1] > 0.0 && sv[0] / sv[n - 1] < 100.0) {
                out.disguise.mixing = j;
                break;
            }
        }
        for (Eigen::Index a = 0; a < n; ++a) out.disguise.offset[a] = rng.uniform(-1.0, 1.0);
    }

    const Eigen::MatrixXd& s = out.disguise.symplectic;
    std::vector<Expression> images;
    for (Eigen::Index k = 0; k < dim; ++k) {
        Expression sum = Expression::constant(0.0);
        for (Eigen::Index l = 0; l < dim; ++l)
            if (s(k, l) != 0.0) sum = sum + Expression::constant(s(k, l)) * Expression::coordinate(static_cast<std::size_t>(l));
        images.push_back(sum);
    }
    std::vector<Expression> moved;
    for (const auto& f : canonical.momentum) moved.push_back(substitute(f, images));

    IntegrableModel& m = out.model;
    m.name = canonical.name + "/disguised";
    m.structure = canonical.structure;
    m.parameters = canonical.parameters;
    m.leaf = canonical.leaf;
    for (Eigen::Index a = 0; a < n; ++a) {
        Expression g = Expression::constant(out.disguise.offset[a]);
        for (Eigen::Index b = 0; b < n; ++b)
            g = g + Expression::constant(out.disguise.mixing(a, b)) * moved[static_cast<std::size_t>(b)];
        m.momentum.push_back(g);
        m.momentum_names.push_back("g" + std::to_string(a + 1));
    }
    return out;
}

// ------------------------------------------------------------ periodicity

PeriodicityReport verify_periodicity(const CanonicalModel& model, std::size_t component, double tol,
                                     std::size_t samples, std::uint64_t seed)
{
    if (component >= model.kinds.size()) throw ModelError("component index out of range");
    const ComponentKind kind = model.kinds[component];
    if (kind != ComponentKind::elliptic && kind != ComponentKind::focus_angular)
        throw ModelError("component " + std::to_string(component) + " is " + to_string(kind) +
                         ", which does not generate a periodic flow");

    const VectorField field = make_hamiltonian_field(model.model, model.model.momentum[component]);
    const double period = 2.0 * std::numbers::pi;
    PeriodicityReport report;
    report.samples = samples;
    report.seed = seed;
    Rng rng(seed);
    double period_sum = 0.0;
    std::size_t period_count = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Eigen::VectorXd x0(static_cast<Eigen::Index>(model.model.dimension()));
        for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(-1.0, 1.0);
        const FlowResult r = flow_integrate(field, PhasePoint(x0), period);
        const Eigen::VectorXd miss = r.end.coords - x0;
        report.max_return_error = std::max(report.max_return_error, miss.cwiseAbs().maxCoeff());
        // First-order correction to the return time along the flow direction.
        const Eigen::VectorXd v = field(r.end.coords);
        if (v.squaredNorm() > 1e-20) {
            period_sum += period - miss.dot(v) / v.squaredNorm();
            ++period_count;
        }
    }
    report.measured_period = period_count ? period_sum / static_cast<double>(period_count) : period;
    report.pass = report.max_return_error <= tol;
    return report;
}

// -------------------------------------------------------- quotient models

QuotientValidation validate_quotient_spec(const QuotientModelSpec& q)
{
    auto fail = [](std::string why) { return QuotientValidation{false, std::move(why)}; };
    const FiniteGroup& g = q.group;
    const int order = g.order();
    int hyperbolic = 0;
    for (DiskKind d : q.disks)
        if (d == DiskKind::hyperbolic) ++hyperbolic;

    if (q.open_rank < 0 || q.closed_rank < 0) return fail("negative rank");
    if (static_cast<int>(q.translations.size()) != order || static_cast<int>(q.signs.size()) != order)
        return fail("action data must list every group element");
    for (int a = 0; a < order; ++a) {
        if (static_cast<int>(q.translations[a].size()) != q.closed_rank)
            return fail("translation vector length differs from closed rank");
        if (static_cast<int>(q.signs[a].size()) != hyperbolic)
            return fail("sign vector length differs from hyperbolic disk count");
        for (int s : q.signs[a])
            if (s != 1 && s != -1) return fail("signs must be +1 or -1");
    }

    auto wrap = [](double t) {
        double w = t - std::floor(t);
        if (w > 1.0 - 1e-12) w = 0.0;
        return w;
    };
    auto same_turn = [&](double a, double b) {
        const double d = wrap(a - b);
        return d < 1e-12 || d > 1.0 - 1e-12;
    };
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b) {
            const int ab = g.multiply(a, b);
            for (int c = 0; c < q.closed_rank; ++c)
                if (!same_turn(q.translations[ab][c], q.translations[a][c] + q.translations[b][c]))
                    return fail("translations are not a homomorphism");
            for (int h = 0; h < hyperbolic; ++h)
                if (q.signs[ab][h] != q.signs[a][h] * q.signs[b][h]) return fail("signs are not a homomorphism");
        }
    for (int c = 0; c < q.closed_rank; ++c)
        if (!same_turn(q.translations[g.identity()][c], 0.0)) return fail("identity must act trivially");

    for (int a = 0; a < order; ++a) {
        if (a == g.identity()) continue;
        // Sign flips fix each disk's origin, so a fixed point exists
        // unless the element moves the torus factor.
        bool moves_torus = false;
        for (int c = 0; c < q.closed_rank; ++c) moves_torus |= !same_turn(q.translations[a][c], 0.0);
        if (!moves_torus) return fail("not free: element " + g.elements()[a] + " has fixed points");
        bool flips = false;
        for (int s : q.signs[a]) flips |= s == -1;
        if (!flips) return fail("not effective on the disk factor: element " + g.elements()[a] + " acts trivially");
    }
    return {true, ""};
}

}  // namespace ihs
