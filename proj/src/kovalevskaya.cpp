#include "ihs/kovalevskaya.hpp"

#include <algorithm>
#include <cmath>

namespace ihs {

IntegrableModel build_kovalevskaya(double g)
{
    SymbolTable symbols;
    symbols.coordinates = {"R1", "R2", "R3", "S1", "S2", "S3"};
    symbols.parameters = {"g"};
    auto e = [&](const char* s) { return parse(s, symbols); };

    // {S_i, S_j} = eps_ijk S_k, {S_i, R_j} = eps_ijk R_k, {R_i, R_j} = 0.
    std::vector<std::tuple<std::size_t, std::size_t, Expression>> upper = {
        {3, 4, e("S3")}, {4, 5, e("S1")}, {3, 5, e("-S2")},
        {0, 4, e("R3")}, {0, 5, e("-R2")},               // {R1,S2} = R3, {R1,S3} = -R2
        {1, 3, e("-R3")}, {1, 5, e("R1")},               // {R2,S1} = -R3, {R2,S3} = R1
        {2, 3, e("R2")}, {2, 4, e("-R1")},               // {R3,S1} = R2, {R3,S2} = -R1
    };
    const Expression f1 = e("R1^2+R2^2+R3^2");
    const Expression f2 = e("S1*R1+S2*R2+S3*R3");

    IntegrableModel m;
    m.name = "kovalevskaya";
    m.structure = PoissonStructure::from_entries(symbols, upper, {f1, f2});
    m.momentum_names = {"h", "k"};
    m.momentum = {e("(1/2)*(S1^2+S2^2+2*S3^2)+R1"), e("(S1^2/2-S2^2/2-R1)^2+(S1*S2-R2)^2")};
    m.leaf = {{f1, Expression::constant(1.0)}, {f2, Expression::parameter(0)}};
    m.parameters = {g};
    return m;
}

std::array<PhasePoint, 2> involution_fixed_points(double g)
{
    Eigen::VectorXd plus(6), minus(6);
    plus << 1, 0, 0, g, 0, 0;
    minus << -1, 0, 0, -g, 0, 0;
    return {PhasePoint(plus), PhasePoint(minus)};
}

PhasePoint involution(const PhasePoint& p)
{
    Eigen::VectorXd x = p.coords;
    x[1] = -x[1];
    x[2] = -x[2];
    x[4] = -x[4];
    x[5] = -x[5];
    return PhasePoint(x);
}

std::array<Eigen::Vector2d, 2> vertex_values(double g)
{
    const double q = g * g / 2.0;
    return {Eigen::Vector2d(1.0 + q, (1.0 - q) * (1.0 - q)), Eigen::Vector2d(-1.0 + q, (1.0 + q) * (1.0 + q))};
}

std::string type_name(const WilliamsonType& t)
{
    if (t.rank == 0 && t.degrees_of_freedom() == 2) {
        if (t.elliptic == 2) return "elliptic-elliptic";
        if (t.hyperbolic == 2) return "hyperbolic-hyperbolic";
        if (t.elliptic == 1 && t.hyperbolic == 1) return "hyperbolic-elliptic";
        if (t.focus == 1) return "focus-focus";
    }
    return "(" + std::to_string(t.elliptic) + "," + std::to_string(t.hyperbolic) + "," + std::to_string(t.focus) + ")";
}

std::vector<std::string> VertexReport::type_multiset() const
{
    std::vector<std::string> out;
    for (const auto& p : points)
        if (p.verdict.type) out.push_back(type_name(*p.verdict.type));
    std::sort(out.begin(), out.end());
    return out;
}

double regime_threshold_cd() { return 8.0 / (3.0 * std::sqrt(3.0)); }

char regime(double g)
{
    if (!std::isfinite(g)) throw RegimeError("g must be finite");
    const double g2 = g * g;
    if (g2 == 0.0) return 'a';
    const double c = regime_threshold_cd();
    if (g2 == 1.0 || g2 == c || g2 == 2.0)
        throw RegimeError("g^2 = " + std::to_string(g2) + " lies on a regime boundary");
    if (g2 < 1.0) return 'b';
    if (g2 < c) return 'c';
    if (g2 < 2.0) return 'd';
    return 'e';
}

VertexReport classify_vertices(double g, const ClassifierOptions& options)
{
    const IntegrableModel m = build_kovalevskaya(g);
    VertexReport report;
    report.g = g;
    try {
        report.regime = regime(g);
    } catch (const RegimeError&) {
    }
    const auto pts = involution_fixed_points(g);
    const auto vals = vertex_values(g);
    for (std::size_t i = 0; i < 2; ++i) {
        FixedPointReport& r = report.points[i];
        r.name = i == 0 ? "P+" : "P-";
        r.point = pts[i];
        r.value = vals[i];
        r.rank = rank_at(m, pts[i], options.tol);
        r.verdict = is_nondegenerate(m, pts[i], options);
        if (r.verdict.type) r.label = type_name(*r.verdict.type) == "elliptic-elliptic" ? "V" : "IV";
    }
    return report;
}

Box kovalevskaya_box(double s_bound)
{
    Box b;
    b.lower.resize(6);
    b.upper.resize(6);
    b.lower << -1.5, -1.5, -1.5, -s_bound, -s_bound, -s_bound;
    b.upper << 1.5, 1.5, 1.5, s_bound, s_bound, s_bound;
    return b;
}

BifurcationDiagram kovalevskaya_diagram(double g, const KovalevskayaDiagramOptions& options)
{
    const IntegrableModel m = build_kovalevskaya(g);
    const Box box = kovalevskaya_box(options.s_bound);
    ScanOptions scan;
    scan.resolution = options.resolution;
    scan.tol = options.continuation.tol;
    scan.dedupe_radius = 2.0 * options.continuation.max_step;
    std::vector<SingularSeed> seeds;
    for (const auto& p : involution_fixed_points(g)) seeds.push_back({p, 0, m.momentum_value(p)});
    for (auto& s : scan_singular_points(m, box, scan)) seeds.push_back(std::move(s));
    return trace_diagram(m, seeds, box, options.continuation);
}

}  // namespace ihs
