#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihs/bifurcation.hpp"
#include "ihs/canonical.hpp"
#include "ihs/classifier.hpp"
#include "ihs/kovalevskaya.hpp"

using namespace ihs;

namespace {

CanonicalModel canonical(const char* spec) { return build_canonical(parse_canonical_spec(spec)); }

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

BifurcationDiagram trace_canonical(const CanonicalModel& c, double half_width)
{
    const Box box = Box::cube(c.model.dimension(), half_width);
    return trace_diagram(c.model, scan_singular_points(c.model, box), box);
}

}  // namespace

TEST_CASE("scan of two elliptic blocks has one rank-0 seed")
{
    const auto c = canonical("0,2,0,0");
    const auto seeds = scan_singular_points(c.model, Box::cube(4, 1.0));
    int rank0 = 0;
    for (const auto& s : seeds) {
        if (s.rank == 0) {
            ++rank0;
            CHECK(s.point.coords.norm() <= 1e-10);
        } else {
            CHECK(s.rank == 1);
            // Rank-1 points have one of the two planar blocks at rest.
            const double a = s.point.coords.head(2).norm(), b = s.point.coords.tail(2).norm();
            CHECK(std::min(a, b) <= 1e-10);
        }
    }
    CHECK(rank0 == 1);
}

TEST_CASE("scan of a regular times hyperbolic model finds the lambda axis")
{
    const auto c = canonical("1,0,1,0");
    const auto seeds = scan_singular_points(c.model, Box::cube(4, 1.0));
    REQUIRE_FALSE(seeds.empty());
    for (const auto& s : seeds) {
        CHECK(s.rank == 1);
        CHECK(std::abs(s.point.coords[2]) <= 1e-10);
        CHECK(std::abs(s.point.coords[3]) <= 1e-10);
        CHECK(std::abs(s.value[1]) <= 1e-12);
    }
}

TEST_CASE("refine_singular_point")
{
    const auto c = canonical("0,1,1,0");
    Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 1e-3);
    const PhasePoint p = refine_singular_point(c.model, PhasePoint(x), 0);
    CHECK(p.coords.cwiseAbs().maxCoeff() <= 1e-11);

    const double g = 0.5;
    const IntegrableModel k = build_kovalevskaya(g);
    Eigen::VectorXd near(6);
    near << 0.999, 0.002, -0.001, 0.501, 0.001, 0.002;
    const PhasePoint q = refine_singular_point(k, PhasePoint(near), 0);
    CHECK((q.coords - involution_fixed_points(g)[0].coords).cwiseAbs().maxCoeff() <= 1e-11);

    // Regular functions have no singular points at all.
    const auto lam = canonical("2,0,0,0");
    CHECK_THROWS_AS(refine_singular_point(lam.model, PhasePoint(Eigen::VectorXd::Constant(4, 0.3)), 0), RefinementError);
    CHECK_THROWS_AS(refine_singular_point(lam.model, PhasePoint(Eigen::VectorXd::Constant(4, 0.3)), 1), RefinementError);
    CHECK_THROWS_AS(refine_singular_point(c.model, PhasePoint(x), 2), RefinementError);
}

TEST_CASE("trace of the hyperbolic line")
{
    const auto d = trace_canonical(canonical("1,0,1,0"), 2.0);
    REQUIRE(d.arcs.size() == 1);
    CHECK(d.arcs[0].label == ArcLabel::hyperbolic_family);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : d.arcs[0].values) {
        CHECK(std::abs(v[1]) <= 1e-12);
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
    }
    // The arc spans the lambda range of the box.
    CHECK(lo <= -1.9);
    CHECK(hi >= 1.9);
    CHECK(d.vertices.empty());
    CHECK(d.failures.empty());
}

TEST_CASE("trace of the elliptic boundary")
{
    const auto d = trace_canonical(canonical("1,1,0,0"), 2.0);
    REQUIRE_FALSE(d.arcs.empty());
    for (const auto& a : d.arcs) {
        CHECK(a.label == ArcLabel::elliptic_family);
        for (const auto& v : a.values) CHECK(std::abs(v[1]) <= 1e-12);
    }
}

TEST_CASE("Kovalevskaya diagram at g = 0.5")
{
    const double g = 0.5;
    const KovalevskayaDiagramOptions opt;
    const BifurcationDiagram d = kovalevskaya_diagram(g, opt);
    CHECK(d.failures.empty());
    for (const auto& v : vertex_values(g)) CHECK(distance_to_arcs(d, v) <= opt.continuation.max_step);

    const Eigen::Vector2d plus(1 + g * g / 2, std::pow(1 - g * g / 2, 2));
    const Eigen::Vector2d minus(-1 + g * g / 2, std::pow(1 + g * g / 2, 2));
    bool saw_plus = false, saw_minus = false;
    for (const auto& v : d.vertices) {
        saw_plus = saw_plus || (v.value - plus).norm() <= 1e-10;
        saw_minus = saw_minus || (v.value - minus).norm() <= 1e-10;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);

    int elliptic = 0, hyperbolic = 0;
    for (const auto& a : d.arcs) {
        elliptic += a.label == ArcLabel::elliptic_family;
        hyperbolic += a.label == ArcLabel::hyperbolic_family;
    }
    CHECK(elliptic >= 1);
    CHECK(hyperbolic >= 1);

    // Reduced type at an interior point matches the arc's label.
    const IntegrableModel m = build_kovalevskaya(g);
    int checked = 0;
    for (const auto& a : d.arcs) {
        if (a.label == ArcLabel::unknown || a.points.size() < 5) continue;
        const PhasePoint& p = a.points[a.points.size() / 2];
        CHECK(rank_at(m, p) == 1);
        const Linearization red = reduce_at(m, p);
        CHECK(red.operators.front().rows() == 2);
        const auto t = williamson_type(red, 32, 1e-8, 0, 1);
        REQUIRE(std::holds_alternative<WilliamsonType>(t));
        const auto& w = std::get<WilliamsonType>(t);
        CHECK(w.elliptic == (a.label == ArcLabel::elliptic_family ? 1 : 0));
        CHECK(w.hyperbolic == (a.label == ArcLabel::hyperbolic_family ? 1 : 0));
        ++checked;
    }
    CHECK(checked >= 2);

    // Export of the same diagram.
    const std::string svg = export_svg(d);
    CHECK(count(svg, "<polyline") == d.arcs.size());
    CHECK(count(svg, "<circle class=\"vertex\"") == d.vertices.size());
}

TEST_CASE("Kovalevskaya scan finds the fixed points")
{
    const double g = 0.5;
    ScanOptions o;
    o.resolution = 4;
    const auto seeds = scan_singular_points(build_kovalevskaya(g), kovalevskaya_box(4.0), o);
    for (const auto& p : involution_fixed_points(g)) {
        bool found = false;
        for (const auto& s : seeds) found = found || (s.rank == 0 && (s.point.coords - p.coords).norm() <= 1e-8);
        CHECK(found);
    }
}

TEST_CASE("exports")
{
    BifurcationDiagram empty;
    empty.axes = {"h", "k"};
    const std::string svg = export_svg(empty);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "<polyline") == 0);
    CHECK(export_csv(empty) == "arc_id,h,k\n");
    const auto j = nlohmann::json::parse(export_json(empty));
    CHECK(j["arcs"].empty());

    BifurcationDiagram one = empty;
    Arc a;
    a.id = 0;
    a.label = ArcLabel::hyperbolic_family;
    for (int i = 0; i < 3; ++i) a.values.push_back(Eigen::Vector2d(i, 0.5 * i));
    one.arcs.push_back(a);
    const std::string svg1 = export_svg(one);
    CHECK(count(svg1, "<polyline") == 1);
    CHECK(svg1.find("class=\"hyperbolic\"") != std::string::npos);
    CHECK(export_csv(one) == "arc_id,h,k\n0,0,0\n0,1,0.5\n0,2,1\n");

    const auto dir = std::filesystem::temp_directory_path() / "ihs_export_test";
    std::filesystem::create_directories(dir);
    export_diagram(one, ExportFormat::json, (dir / "d.json").string());
    const auto back = nlohmann::json::parse(slurp((dir / "d.json").string()));
    CHECK(back["arcs"][0]["label"] == "hyperbolic-family");
    CHECK(back["arcs"][0]["values"].size() == 3);
    CHECK_THROWS(export_diagram(one, ExportFormat::svg, (dir / "missing" / "x.svg").string()));
}

TEST_CASE("Kovalevskaya g = 0 diagram file has the two vertices")
{
    const BifurcationDiagram d = kovalevskaya_diagram(0.0);
    const auto j = nlohmann::json::parse(export_json(d));
    bool a = false, b = false;
    for (const auto& v : j["vertices"]) {
        const double h = v["value"][0], k = v["value"][1];
        a = a || (std::abs(h - 1) <= 1e-10 && std::abs(k - 1) <= 1e-10);
        b = b || (std::abs(h + 1) <= 1e-10 && std::abs(k - 1) <= 1e-10);
    }
    CHECK(a);
    CHECK(b);
}
