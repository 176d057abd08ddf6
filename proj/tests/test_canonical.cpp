#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ihs/canonical.hpp"
#include "ihs/classifier.hpp"
#include "ihs/linalg.hpp"

using namespace ihs;

namespace {

CanonicalModel canonical(const char* spec) { return build_canonical(parse_canonical_spec(spec)); }

Eigen::MatrixXd standard_omega(int pairs)
{
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * pairs, 2 * pairs);
    for (int i = 0; i < pairs; ++i) {
        w(2 * i, 2 * i + 1) = 1;
        w(2 * i + 1, 2 * i) = -1;
    }
    return w;
}

PhasePoint origin(const IntegrableModel& m)
{
    return PhasePoint(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dimension())));
}

}  // namespace

TEST_CASE("build_canonical components")
{
    const auto e = canonical("0,1,0,0");
    CHECK(e.model.dimension() == 2);
    CHECK(equivalent(e.model.momentum[0], parse("(x1^2+y1^2)/2", e.model.symbols()), e.model.symbols()));

    const auto rh = canonical("1,0,1,0");
    CHECK(rh.model.dimension() == 4);
    const auto& s = rh.model.symbols();
    CHECK(equivalent(rh.model.momentum[0], parse("lam1", s), s));
    CHECK(equivalent(rh.model.momentum[1], parse("x1*y1", s), s));

    const auto f = canonical("0,0,0,1");
    const auto& fs = f.model.symbols();
    CHECK(f.model.dimension() == 4);
    CHECK(equivalent(f.model.momentum[0], parse("x1*y1+x2*y2", fs), fs));
    CHECK(equivalent(f.model.momentum[1], parse("x2*y1-y2*x1", fs), fs));
    CHECK(f.kinds == std::vector<ComponentKind>{ComponentKind::focus_radial, ComponentKind::focus_angular});

    CHECK(to_string(parse_canonical_spec("1,2,0,1")) == "1,2,0,1");
    CHECK_THROWS(parse_canonical_spec("1,2,0"));
    CHECK_THROWS(parse_canonical_spec("0,0,0,0"));
    CHECK_THROWS(parse_canonical_spec("a,1,0,0"));
}

TEST_CASE("random symplectic matrices preserve omega")
{
    for (int pairs = 1; pairs <= 4; ++pairs)
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const Eigen::MatrixXd S = random_symplectic(pairs, seed);
            const Eigen::MatrixXd w = standard_omega(pairs);
            CHECK((S.transpose() * w * S - w).cwiseAbs().maxCoeff() <= 1e-12);
        }
}

TEST_CASE("identity disguise leaves the model unchanged")
{
    const auto c = canonical("0,1,1,0");
    const auto d = randomized_disguise(c.model, 5, {false, false});
    const auto& s = c.model.symbols();
    for (std::size_t i = 0; i < c.model.n(); ++i) CHECK(equivalent(d.model.momentum[i], c.model.momentum[i], s));
}

TEST_CASE("mixing only keeps the singular set and type")
{
    const auto c = canonical("0,1,1,0");
    const auto d = randomized_disguise(c.model, 9, {false, true});
    const auto v = is_nondegenerate(d.model, origin(d.model));
    REQUIRE(v.type.has_value());
    CHECK(v.type->elliptic == 1);
    CHECK(v.type->hyperbolic == 1);
    Eigen::VectorXd x(4);
    x << 0.0, 0.0, 0.4, 0.3;  // singular for the elliptic block only
    CHECK(rank_at(d.model, PhasePoint(x)) == 1);
    CHECK(rank_at(c.model, PhasePoint(x)) == 1);
}

TEST_CASE("full disguises round-trip through the classifier")
{
    for (const char* spec : {"0,1,1,0", "1,0,1,0", "0,0,0,1", "1,1,0,1"}) {
        const auto c = canonical(spec);
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const auto d = randomized_disguise(c.model, seed);
            const PhasePoint p = d.disguise.to_disguised(origin(c.model));
            const auto pc = classify_point(d.model, p);
            REQUIRE(pc.verdict.type.has_value());
            CHECK(pc.verdict.type->rank == c.spec.r);
            CHECK(pc.verdict.type->elliptic == c.spec.ke);
            CHECK(pc.verdict.type->hyperbolic == c.spec.kh);
            CHECK(pc.verdict.type->focus == c.spec.kf);
        }
    }
}

TEST_CASE("disguise leaves the momentum values related by the affine map")
{
    const auto c = canonical("0,1,0,1");
    const auto d = randomized_disguise(c.model, 17);
    Eigen::VectorXd z(6);
    z << 0.2, -0.5, 0.9, 0.1, -0.3, 0.4;
    const PhasePoint zp = d.disguise.to_disguised(PhasePoint(z));
    const Eigen::VectorXd expected = d.disguise.mixing * c.model.momentum_value(PhasePoint(z)) + d.disguise.offset;
    CHECK((d.model.momentum_value(zp) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("periodic components")
{
    const auto e = canonical("0,1,0,0");
    const auto re = verify_periodicity(e, 0, 1e-9);
    CHECK(re.pass);
    CHECK(re.max_return_error <= 1e-9);
    CHECK(std::abs(re.measured_period - 2 * std::numbers::pi) <= 1e-9);
    CHECK(re.samples == 20);

    const auto f = canonical("0,0,0,1");
    const auto rf = verify_periodicity(f, 1, 1e-9);
    CHECK(rf.pass);
    CHECK(std::abs(rf.measured_period - 2 * std::numbers::pi) <= 1e-9);

    const auto h = canonical("0,0,1,0");
    CHECK_THROWS_AS(verify_periodicity(h, 0, 1e-9), ModelError);
    CHECK_THROWS_AS(verify_periodicity(f, 0, 1e-9), ModelError);
    CHECK_THROWS_AS(verify_periodicity(f, 5, 1e-9), ModelError);
}

TEST_CASE("quotient specifications")
{
    QuotientModelSpec q;
    q.closed_rank = 1;
    q.disks = {DiskKind::hyperbolic};
    q.group = FiniteGroup::cyclic(2);
    q.translations = {{0.0}, {0.5}};
    q.signs = {{1}, {-1}};
    CHECK(validate_quotient_spec(q).pass);

    QuotientModelSpec fixed = q;
    fixed.translations = {{0.0}, {0.0}};
    const auto r = validate_quotient_spec(fixed);
    CHECK_FALSE(r.pass);
    CHECK(r.violated.find("free") != std::string::npos);

    QuotientModelSpec trivial;
    trivial.open_rank = 1;
    trivial.disks = {DiskKind::elliptic, DiskKind::focus};
    trivial.group = FiniteGroup::trivial();
    trivial.translations = {{}};
    trivial.signs = {{}};
    CHECK(validate_quotient_spec(trivial).pass);

    QuotientModelSpec not_hom = q;
    not_hom.translations = {{0.0}, {0.25}};
    CHECK_FALSE(validate_quotient_spec(not_hom).pass);

    QuotientModelSpec ineffective = q;
    ineffective.signs = {{1}, {1}};
    CHECK_FALSE(validate_quotient_spec(ineffective).pass);
}
