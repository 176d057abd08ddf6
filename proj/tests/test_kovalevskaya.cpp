#include <doctest.h>

#include <cmath>

#include "ihs/kovalevskaya.hpp"
#include "ihs/linalg.hpp"

using namespace ihs;

namespace {

std::vector<std::string> sorted(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("bracket convention")
{
    const IntegrableModel m = build_kovalevskaya(0.5);
    const auto& s = m.symbols();
    CHECK(equivalent(poisson_bracket(parse("S1", s), parse("R2", s), m.structure), parse("R3", s), s));
    CHECK(check_commutation(m, 1000, 1e-9, 0).pass);
    CHECK(check_jacobi(m.structure, m.params(), 1000, 1e-10, 0).max_residual <= 1e-10);
}

TEST_CASE("fixed points")
{
    auto p0 = involution_fixed_points(0.0);
    CHECK(p0[0].coords == (Eigen::VectorXd(6) << 1, 0, 0, 0, 0, 0).finished());
    CHECK(p0[1].coords == (Eigen::VectorXd(6) << -1, 0, 0, 0, 0, 0).finished());

    const double g = 0.5;
    const IntegrableModel m = build_kovalevskaya(g);
    auto p = involution_fixed_points(g);
    const Eigen::VectorXd vp = m.momentum_value(p[0]), vm = m.momentum_value(p[1]);
    CHECK(vp[0] == doctest::Approx(1.125).epsilon(1e-15));
    CHECK(vp[1] == doctest::Approx(0.765625).epsilon(1e-15));
    CHECK(vm[0] == doctest::Approx(-0.875).epsilon(1e-15));
    CHECK(vm[1] == doctest::Approx(1.265625).epsilon(1e-15));
    for (const auto& q : p) {
        CHECK(m.leaf_residual(q) == 0.0);
        CHECK((involution(q).coords - q.coords).norm() == 0.0);
    }
    const auto cf = vertex_values(g);
    CHECK((cf[0] - vp).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cf[1] - vm).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("the involution preserves H, K and the leaf")
{
    const IntegrableModel m = build_kovalevskaya(0.7);
    Eigen::VectorXd x(6);
    x << 0.3, -0.4, 0.5, 1.2, -0.7, 0.9;
    const PhasePoint p(x);
    CHECK((m.momentum_value(involution(p)) - m.momentum_value(p)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(std::abs(m.leaf_residual(involution(p)) - m.leaf_residual(p)) <= 1e-14);
}

TEST_CASE("vertex types")
{
    const std::vector<std::string> hh_ee = sorted({"hyperbolic-hyperbolic", "elliptic-elliptic"});
    const std::vector<std::string> he_ee = sorted({"hyperbolic-elliptic", "elliptic-elliptic"});
    CHECK(classify_vertices(0.5).type_multiset() == hh_ee);
    CHECK(classify_vertices(1.2).type_multiset() == hh_ee);
    CHECK(classify_vertices(1.6).type_multiset() == he_ee);

    const auto r = classify_vertices(0.5);
    for (const auto& p : r.points) {
        CHECK(p.rank == 0);
        REQUIRE(p.verdict.type.has_value());
        CHECK(p.label == (type_name(*p.verdict.type) == "elliptic-elliptic" ? "V" : "IV"));
    }
    CHECK(r.regime == 'b');
}

TEST_CASE("regimes")
{
    CHECK(regime(0.0) == 'a');
    CHECK(regime(0.5) == 'b');
    CHECK(regime(1.2) == 'c');
    CHECK(regime(1.3) == 'd');
    CHECK(regime(1.6) == 'e');
    CHECK(regime(-1.6) == 'e');
    CHECK(regime_threshold_cd() == doctest::Approx(1.5396007178390020));
    CHECK_THROWS_AS(regime(1.0), RegimeError);
    CHECK_THROWS_AS(regime(NAN), RegimeError);
    CHECK_FALSE(classify_vertices(1.0).regime.has_value());
}

TEST_CASE("near-threshold vertex is not asserted non-degenerate")
{
    const auto r = classify_vertices(1.0);
    int typed = 0;
    for (const auto& p : r.points) typed += p.verdict.type.has_value();
    CHECK(typed == 1);
}

TEST_CASE("box")
{
    const Box b = kovalevskaya_box(4.0);
    CHECK(b.lower.size() == 6);
    CHECK(b.upper[3] == 4.0);
    CHECK(b.contains(involution_fixed_points(0.5)[0].coords));
}
