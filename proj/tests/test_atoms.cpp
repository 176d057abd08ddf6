#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ihs/atoms.hpp"

using namespace ihs;

namespace {

AlmostDirectProduct named(const std::string& name)
{
    for (const auto& n : named_products())
        if (n.product.name == name) return n.product;
    FAIL("no named product " << name);
    return {};
}

// Orbit count by brute force over group elements acting on explicit tuples,
// kept separate from the library's mixed-radix enumeration.
int orbit_count_oracle(const AlmostDirectProduct& p)
{
    std::vector<std::size_t> comps;
    for (std::size_t c = 0; c < p.components.size(); ++c)
        if (p.components[c].kind != AtomKind::regular) comps.push_back(c);
    std::set<std::vector<int>> tuples{{}};
    for (std::size_t c : comps) {
        std::set<std::vector<int>> next;
        for (const auto& t : tuples)
            for (int v = 0; v < p.components[c].vertices; ++v) {
                auto u = t;
                u.push_back(v);
                next.insert(u);
            }
        tuples = next;
    }
    std::set<std::vector<int>> canon;
    for (const auto& t : tuples) {
        std::vector<int> least = t;
        for (int x = 0; x < p.group.order(); ++x) {
            std::vector<int> img(t.size());
            for (std::size_t i = 0; i < comps.size(); ++i) img[i] = p.actions[comps[i]].perms[x][t[i]];
            least = std::min(least, img);
        }
        canon.insert(least);
    }
    return static_cast<int>(canon.size());
}

}  // namespace

TEST_CASE("catalog")
{
    CHECK(atom("B").kind == AtomKind::hyperbolic);
    CHECK(atom("B").vertices == 1);
    CHECK(atom("C2").vertices == 2);
    CHECK(atom("W_reg").kind == AtomKind::regular);
    CHECK(atom("W_reg").vertices == 0);
    CHECK(atom("A").kind == AtomKind::elliptic);
    CHECK(atom("K3").vertices == 4);
    CHECK(atom("F7").vertices == 7);
    CHECK(atom("F7").kind == AtomKind::focus);
    CHECK_THROWS_AS(atom("Q9"), AtomError);
    CHECK_THROWS_AS(atom("F0"), AtomError);
    CHECK(catalog().size() == 14);
}

TEST_CASE("complexity of named products")
{
    CHECK(complexity(named("B x B")) == 1);
    CHECK(complexity(named("(C2 x C2)/(Z2+Z2)")) == 1);
    CHECK(complexity(named("(D1 x D1)/Z2")) == 2);
    for (const auto& n : named_products()) {
        INFO(n.product.name);
        CHECK(validate(n.product).empty());
        CHECK(check_free(n.product).free);
        CHECK(complexity(n.product) == n.expected_complexity);
        CHECK(complexity(n.product) == orbit_count_oracle(n.product));
    }
}

TEST_CASE("family sizes")
{
    std::map<std::string, int> fam;
    for (const auto& n : named_products()) ++fam[n.family];
    CHECK(fam["elementary"] == 4);
    CHECK(fam["complexity-1"] == 6);
    CHECK(fam["complexity-2"] == 11);
    CHECK(fam["saddle-focus-2"] == 4);
}

TEST_CASE("criterion (vi)")
{
    CHECK(check_connectedness_vi(named("B x B")).holds);
    const auto c2 = check_connectedness_vi(c2_trivial());
    CHECK_FALSE(c2.holds);
    REQUIRE(c2.components.size() == 1);
    CHECK(c2.components[0].orbits == 2);
    CHECK(check_connectedness_vi(named("(B x C2)/Z2")).holds);
}

TEST_CASE("criterion (iv)")
{
    CHECK(check_connectedness_iv(named("(C2 x C2)/Z2")));
    AlmostDirectProduct p = named("(C2 x C2)/Z2");
    p.group = FiniteGroup::trivial();
    for (auto& a : p.actions) a.perms = {{0, 1}};
    CHECK_FALSE(check_connectedness_iv(p));
    for (const auto& k : build_Ki_sets(p)) CHECK(k.connected_components == 2);
    CHECK(check_connectedness_iv(named("B x F1")));
}

TEST_CASE("cross-check")
{
    for (const auto& n : named_products()) {
        const auto c = cross_check_criteria(n.product);
        CHECK(c.iv);
        CHECK(c.vi);
    }
    AlmostDirectProduct p = named("(C2 x C2)/Z2");
    p.group = FiniteGroup::trivial();
    for (auto& a : p.actions) a.perms = {{0, 1}};
    const auto c = cross_check_criteria(p);
    CHECK_FALSE(c.iv);
    CHECK_FALSE(c.vi);
}

TEST_CASE("criteria agree on 1000 random actions")
{
    int free_cases = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const AlmostDirectProduct p = random_product(seed);
        REQUIRE(validate(p).empty());
        const auto c = cross_check_criteria(p);
        CHECK(c.iv == c.vi);
        if (check_free(p).free) {
            ++free_cases;
            CHECK(complexity(p) == orbit_count_oracle(p));
        } else {
            CHECK_THROWS_AS(complexity(p), AtomError);
        }
    }
    CHECK(free_cases > 100);
}

TEST_CASE("stability verdicts")
{
    CHECK(stability_verdict(named("(B x C2)/Z2")) == StabilityVerdict::stable_analytic_strong_sense);
    CHECK(stability_verdict(c2_trivial()) == StabilityVerdict::criterion_not_satisfied);
    CHECK(stability_verdict(named("(D1 x F2)/Z2")) == StabilityVerdict::stable_analytic_strong_sense);
    CHECK(to_string(StabilityVerdict::criterion_not_satisfied) == "criterion-not-satisfied");
}

TEST_CASE("freeness")
{
    // Z2 swapping C2 but fixing B's vertex: free because C2 has no fixed point.
    CHECK(check_free(named("(B x C2)/Z2")).free);
    AlmostDirectProduct p = named("(B x C2)/Z2");
    p.actions[1].perms = {{0, 1}, {0, 1}};
    const auto r = check_free(p);
    CHECK_FALSE(r.free);
    CHECK(r.witness == 1);
    CHECK_THROWS_AS(complexity(p), AtomError);

    // An explicit override marks a fixed-point-free rotation of the fiber.
    p.actions[1].fixed_point = {std::nullopt, false};
    CHECK(check_free(p).free);

    // A* needs the half turn on the circle.
    AlmostDirectProduct a = named("A*");
    CHECK(check_free(a).free);
    a.actions[1].translations = {0.0, 0.0};
    CHECK_FALSE(check_free(a).free);
}

TEST_CASE("validation")
{
    AlmostDirectProduct p = named("(B x C2)/Z2");
    p.actions[1].perms = {{0, 1}, {0, 0}};
    CHECK_FALSE(validate(p).empty());
    p = named("A*");
    p.actions[1].translations = {0.0, 0.25};
    CHECK_FALSE(validate(p).empty());
    p.actions.pop_back();
    CHECK_FALSE(validate(p).empty());
}

TEST_CASE("exceptions report lists the revised counts")
{
    const auto ex = exceptions_report();
    auto find = [&](const std::string& subject) {
        return std::find_if(ex.begin(), ex.end(), [&](const auto& e) { return e.subject.find(subject) != std::string::npos; });
    };
    const auto k3 = find("K3 singular-point count");
    REQUIRE(k3 != ex.end());
    CHECK(k3->initial_value == "3");
    CHECK(k3->used_value == "4");
    CHECK(find("(K3 x K3)/(Z4+Z2)") != ex.end());
    const auto fk = find("F_k");
    REQUIRE(fk != ex.end());
    CHECK(fk->used_value == "k");

    // With three points, no free Z4+Z2 action on K3 x K3 gives complexity 2:
    // 9 pairs cannot be a union of orbits of size 8.
    CHECK(9 % 8 != 0);
}

TEST_CASE("product JSON")
{
    for (const auto& n : named_products()) {
        const std::string text = serialize_product(n.product);
        const AlmostDirectProduct back = parse_product(text);
        CHECK(serialize_product(back) == text);
        CHECK(complexity(back) == n.expected_complexity);
    }
    const auto p = parse_product(R"({"name": "BC", "components": ["B", "C2"], "group": "Z2",
        "actions": [{"perms": {"e": [0], "a": [0]}}, {"perms": {"e": [0, 1], "a": [1, 0]}}]})");
    CHECK(complexity(p) == 1);
    CHECK(stability_verdict(p) == StabilityVerdict::stable_analytic_strong_sense);

    const auto w = parse_product(R"({"components": ["B", "W_reg"], "group": "Z2",
        "actions": [{"perms": [[0], [0]]}, {"translations": {"e": 0, "a": 0.5}}]})");
    CHECK(check_free(w).free);

    CHECK_THROWS_AS(parse_product("{"), AtomError);
    CHECK_THROWS_AS(parse_product(R"({"components": ["Q"]})"), AtomError);
    CHECK_THROWS_AS(parse_product(R"({"components": ["C2"], "group": "Z2"})"), AtomError);
    CHECK_THROWS_AS(parse_product(R"({"components": ["C2"], "group": "Z2", "actions": [{"perms": {"x": [0, 1]}}]})"),
                    AtomError);
}
