#include "ihs/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

#include <json.hpp>

#include "ihs/random.hpp"

namespace ihs {

std::string to_string(AtomKind kind)
{
    switch (kind) {
    case AtomKind::regular: return "regular";
    case AtomKind::elliptic: return "elliptic";
    case AtomKind::hyperbolic: return "hyperbolic";
    case AtomKind::focus: return "focus";
    }
    return "regular";
}

std::vector<Atom> catalog()
{
    return {
        {"A", AtomKind::elliptic, 1, true},    {"B", AtomKind::hyperbolic, 1, true},
        {"C1", AtomKind::hyperbolic, 2, true}, {"C2", AtomKind::hyperbolic, 2, true},
        {"D1", AtomKind::hyperbolic, 2, true}, {"I1", AtomKind::hyperbolic, 4, true},
        {"J1", AtomKind::hyperbolic, 4, true}, {"K3", AtomKind::hyperbolic, 4, true},
        {"P4", AtomKind::hyperbolic, 4, true}, {"F1", AtomKind::focus, 1, true},
        {"F2", AtomKind::focus, 2, true},      {"F3", AtomKind::focus, 3, true},
        {"F4", AtomKind::focus, 4, true},      {"W_reg", AtomKind::regular, 0, true},
    };
}

Atom atom(const std::string& name)
{
    for (const auto& a : catalog())
        if (a.name == name) return a;
    if (name.size() > 1 && name[0] == 'F') {
        try {
            std::size_t used = 0;
            const int k = std::stoi(name.substr(1), &used);
            if (used == name.size() - 1 && k >= 1) return {name, AtomKind::focus, k, true};
        } catch (const std::exception&) {
        }
    }
    throw AtomError("unknown atom '" + name + "'");
}

WilliamsonProfile williamson_profile(const AlmostDirectProduct& p)
{
    WilliamsonProfile w;
    for (const auto& a : p.components) {
        switch (a.kind) {
        case AtomKind::regular: ++w.rank; break;
        case AtomKind::elliptic: ++w.elliptic; break;
        case AtomKind::hyperbolic: ++w.hyperbolic; break;
        case AtomKind::focus: ++w.focus; break;
        }
    }
    return w;
}

namespace {

double wrap_turns(double t)
{
    double w = t - std::floor(t);
    if (w > 1.0 - 1e-12) w = 0.0;
    return w;
}

bool same_turn(double a, double b)
{
    const double d = wrap_turns(a - b);
    return d < 1e-12;
}

}  // namespace

std::vector<std::string> validate(const AlmostDirectProduct& p)
{
    std::vector<std::string> problems;
    const FiniteGroup& g = p.group;
    if (p.components.empty()) problems.push_back("product has no components");
    if (p.actions.size() != p.components.size()) {
        problems.push_back("need one action per component");
        return problems;
    }
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        const Atom& a = p.components[c];
        const ComponentAction& act = p.actions[c];
        const std::string where = "component " + std::to_string(c) + " (" + a.name + ")";
        if (!act.fixed_point.empty() && static_cast<int>(act.fixed_point.size()) != g.order())
            problems.push_back(where + ": fixed-point overrides must cover every element");
        if (a.kind == AtomKind::regular) {
            if (static_cast<int>(act.translations.size()) != g.order()) {
                problems.push_back(where + ": translations must list every group element");
                continue;
            }
            for (int x = 0; x < g.order(); ++x)
                for (int y = 0; y < g.order(); ++y)
                    if (!same_turn(act.translations[g.multiply(x, y)], act.translations[x] + act.translations[y])) {
                        problems.push_back(where + ": translations are not a homomorphism");
                        x = y = g.order();
                    }
        } else {
            if (!is_homomorphism(g, act.perms, a.vertices))
                problems.push_back(where + ": permutations do not define a group action on " +
                                   std::to_string(a.vertices) + " singular points");
        }
    }
    return problems;
}

bool has_fixed_point(const AlmostDirectProduct& p, std::size_t component, int element)
{
    const ComponentAction& act = p.actions[component];
    if (!act.fixed_point.empty() && act.fixed_point[static_cast<std::size_t>(element)])
        return *act.fixed_point[static_cast<std::size_t>(element)];
    const Atom& a = p.components[component];
    if (a.kind == AtomKind::regular) return same_turn(act.translations[static_cast<std::size_t>(element)], 0.0);
    const Permutation& perm = act.perms[static_cast<std::size_t>(element)];
    for (int v = 0; v < a.vertices; ++v)
        if (perm[static_cast<std::size_t>(v)] == v) return true;
    return false;
}

FreenessReport check_free(const AlmostDirectProduct& p)
{
    FreenessReport r;
    for (int x = 0; x < p.group.order(); ++x) {
        if (x == p.group.identity()) continue;
        bool moves_everything_somewhere = false;
        for (std::size_t c = 0; c < p.components.size() && !moves_everything_somewhere; ++c)
            moves_everything_somewhere = !has_fixed_point(p, c, x);
        if (!moves_everything_somewhere) {
            r.free = false;
            r.witness = x;
            return r;
        }
    }
    return r;
}

namespace {

void require_valid(const AlmostDirectProduct& p)
{
    const auto problems = validate(p);
    if (!problems.empty()) throw AtomError("invalid product: " + problems.front());
}

std::vector<std::size_t> singular_components(const AlmostDirectProduct& p)
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < p.components.size(); ++c)
        if (p.components[c].kind != AtomKind::regular) out.push_back(c);
    return out;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
    int classes()
    {
        int n = 0;
        for (int i = 0; i < static_cast<int>(parent.size()); ++i) n += find(i) == i;
        return n;
    }
};

}  // namespace

int complexity(const AlmostDirectProduct& p)
{
    require_valid(p);
    const FreenessReport free = check_free(p);
    if (!free.free)
        throw AtomError("action is not free: element " + p.group.elements()[static_cast<std::size_t>(*free.witness)] +
                        " has fixed points on every component");
    const auto comps = singular_components(p);
    // Mixed-radix enumeration of vertex tuples.
    int total = 1;
    for (std::size_t c : comps) total *= p.components[c].vertices;
    std::vector<bool> seen(static_cast<std::size_t>(total), false);
    auto decode = [&](int code) {
        std::vector<int> t(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) {
            t[i] = code % p.components[comps[i]].vertices;
            code /= p.components[comps[i]].vertices;
        }
        return t;
    };
    auto encode = [&](const std::vector<int>& t) {
        int code = 0;
        for (std::size_t i = comps.size(); i-- > 0;) code = code * p.components[comps[i]].vertices + t[i];
        return code;
    };
    int orbits = 0;
    for (int code = 0; code < total; ++code) {
        if (seen[static_cast<std::size_t>(code)]) continue;
        ++orbits;
        const auto t = decode(code);
        for (int x = 0; x < p.group.order(); ++x) {
            std::vector<int> image(t.size());
            for (std::size_t i = 0; i < comps.size(); ++i)
                image[i] = p.actions[comps[i]].perms[static_cast<std::size_t>(x)][static_cast<std::size_t>(t[i])];
            seen[static_cast<std::size_t>(encode(image))] = true;
        }
    }
    return orbits;
}

ConnectednessVi check_connectedness_vi(const AlmostDirectProduct& p)
{
    require_valid(p);
    ConnectednessVi out;
    for (std::size_t c : singular_components(p)) {
        const auto labels = orbit_labels(p.group, p.actions[c].perms, p.components[c].vertices);
        const int orbits = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        out.components.push_back({c, orbits});
        if (orbits != 1) out.holds = false;
    }
    return out;
}

std::vector<KiSet> build_Ki_sets(const AlmostDirectProduct& p)
{
    require_valid(p);
    std::vector<KiSet> sets;
    for (std::size_t i : singular_components(p)) {
        KiSet k;
        k.component = i;
        // Every catalog fiber is connected, so the other components
        // contribute a single fiber label.
        int fibers = 1;
        for (std::size_t c = 0; c < p.components.size(); ++c)
            if (c != i && !p.components[c].fiber_connected) fibers = 0;
        if (fibers == 0) throw AtomError("K_i sets need connected fibers on the other components");
        const int v = p.components[i].vertices;
        for (int a = 0; a < v; ++a) k.elements.emplace_back(a, 0);
        UnionFind uf(v);
        for (int x = 0; x < p.group.order(); ++x)
            for (int a = 0; a < v; ++a) uf.unite(a, p.actions[i].perms[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)]);
        k.connected_components = uf.classes();
        sets.push_back(std::move(k));
    }
    return sets;
}

bool check_connectedness_iv(const AlmostDirectProduct& p)
{
    for (const auto& k : build_Ki_sets(p))
        if (k.connected_components != 1) return false;
    return true;
}

CrossCheck cross_check_criteria(const AlmostDirectProduct& p)
{
    CrossCheck c{check_connectedness_iv(p), check_connectedness_vi(p).holds};
    if (c.iv != c.vi)
        throw AtomError("criteria (iv) and (vi) disagree on " + (p.name.empty() ? std::string("product") : p.name));
    return c;
}

std::string to_string(StabilityVerdict v)
{
    return v == StabilityVerdict::stable_analytic_strong_sense ? "stable-analytic-strong-sense"
                                                               : "criterion-not-satisfied";
}

StabilityVerdict stability_verdict(const AlmostDirectProduct& p)
{
    require_valid(p);
    if (!check_free(p).free) return StabilityVerdict::criterion_not_satisfied;
    const CrossCheck c = cross_check_criteria(p);
    return c.iv && c.vi ? StabilityVerdict::stable_analytic_strong_sense : StabilityVerdict::criterion_not_satisfied;
}

// ------------------------------------------------------------ named data

namespace {

using VertexMap = std::function<int(int element, int vertex)>;

ComponentAction perms_from(const FiniteGroup& g, int vertices, const VertexMap& f)
{
    ComponentAction a;
    for (int x = 0; x < g.order(); ++x) {
        Permutation perm(static_cast<std::size_t>(vertices));
        for (int v = 0; v < vertices; ++v) perm[static_cast<std::size_t>(v)] = f(x, v);
        a.perms.push_back(perm);
    }
    return a;
}

ComponentAction trivial_action(const FiniteGroup& g, int vertices)
{
    return perms_from(g, vertices, [](int, int v) { return v; });
}

// Cyclic group element a^k acting by v -> v + k*step mod size.
ComponentAction rotation(const FiniteGroup& g, int vertices, int step = 1)
{
    return perms_from(g, vertices, [&](int x, int v) { return (v + x * step) % vertices; });
}

AlmostDirectProduct make(std::string name, std::vector<std::string> atoms, FiniteGroup g,
                         std::vector<ComponentAction> actions)
{
    AlmostDirectProduct p;
    p.name = std::move(name);
    for (const auto& a : atoms) p.components.push_back(atom(a));
    p.group = std::move(g);
    p.actions = std::move(actions);
    return p;
}

AlmostDirectProduct trivial_product(const std::string& name, const std::vector<std::string>& atoms)
{
    const FiniteGroup g = FiniteGroup::trivial();
    std::vector<ComponentAction> acts;
    for (const auto& a : atoms) {
        const Atom at = atom(a);
        if (at.kind == AtomKind::regular) {
            ComponentAction c;
            c.translations = {0.0};
            acts.push_back(c);
        } else {
            acts.push_back(trivial_action(g, at.vertices));
        }
    }
    return make(name, atoms, g, acts);
}

// Z_m diagonal product: generator acts on each component by a rotation.
AlmostDirectProduct cyclic_product(const std::string& name, const std::string& a, const std::string& b, int m)
{
    const FiniteGroup g = FiniteGroup::cyclic(m);
    const Atom x = atom(a), y = atom(b);
    return make(name, {a, b}, g, {rotation(g, x.vertices), rotation(g, y.vertices)});
}

}  // namespace

AlmostDirectProduct c2_trivial() { return trivial_product("C2", {"C2"}); }

std::vector<NamedProduct> named_products()
{
    std::vector<NamedProduct> out;
    const FiniteGroup z2 = FiniteGroup::cyclic(2);
    const FiniteGroup z4 = FiniteGroup::cyclic(4);
    const FiniteGroup z2z2 = FiniteGroup::named("Z2+Z2");
    const FiniteGroup z4z2 = FiniteGroup::named("Z4+Z2");
    const FiniteGroup d4 = FiniteGroup::dihedral(4);

    out.push_back({trivial_product("A", {"A"}), 1, "elementary"});
    out.push_back({trivial_product("B", {"B"}), 1, "elementary"});
    {
        // A* = (B x W_reg)/Z2: the half turn on the circle makes it free.
        ComponentAction w;
        w.translations = {0.0, 0.5};
        out.push_back({make("A*", {"B", "W_reg"}, z2, {trivial_action(z2, 1), w}), 1, "elementary"});
    }
    out.push_back({trivial_product("F1", {"F1"}), 1, "elementary"});

    out.push_back({trivial_product("B x B", {"B", "B"}), 1, "complexity-1"});
    out.push_back({make("(B x C2)/Z2", {"B", "C2"}, z2, {trivial_action(z2, 1), rotation(z2, 2)}), 1, "complexity-1"});
    out.push_back({make("(B x D1)/Z2", {"B", "D1"}, z2, {trivial_action(z2, 1), rotation(z2, 2)}), 1, "complexity-1"});
    {
        // Element index = 2 * (first summand) + second summand.
        auto first = perms_from(z2z2, 2, [](int x, int v) { return (v + x / 2) % 2; });
        auto second = perms_from(z2z2, 2, [](int x, int v) { return (v + x % 2) % 2; });
        out.push_back({make("(C2 x C2)/(Z2+Z2)", {"C2", "C2"}, z2z2, {first, second}), 1, "complexity-1"});
    }
    out.push_back({trivial_product("B x F1", {"B", "F1"}), 1, "complexity-1"});
    out.push_back({make("(B x F2)/Z2", {"B", "F2"}, z2, {trivial_action(z2, 1), rotation(z2, 2)}), 1, "complexity-1"});

    out.push_back({cyclic_product("(D1 x D1)/Z2", "D1", "D1", 2), 2, "complexity-2"});
    {
        // Dihedral element r^k s^e has index k + 4e. The first copy uses the
        // symmetries of a square on its vertices; the second is twisted by
        // the automorphism s -> r s, so reflections through vertices become
        // reflections through edge midpoints.
        auto standard = perms_from(d4, 4, [](int x, int v) {
            const int k = x % 4, e = x / 4;
            return (((e ? -v : v) + k) % 4 + 4) % 4;
        });
        auto twisted = perms_from(d4, 4, [](int x, int v) {
            const int k = x % 4, e = x / 4;
            return (((e ? -v : v) + k + e) % 4 + 4) % 4;
        });
        out.push_back({make("(P4 x P4)/D4", {"P4", "P4"}, d4, {standard, twisted}), 2, "complexity-2"});
    }
    out.push_back({cyclic_product("(C2 x C2)/Z2", "C2", "C2", 2), 2, "complexity-2"});
    out.push_back({cyclic_product("(C1 x I1)/Z4", "C1", "I1", 4), 2, "complexity-2"});
    {
        // Element index = 2 * (Z4 part) + (Z2 part).
        auto first = perms_from(z4z2, 4, [](int x, int v) { return (v + x / 2) % 4; });
        auto second = perms_from(z4z2, 4, [](int x, int v) { return (v + x / 2 + 2 * (x % 2)) % 4; });
        out.push_back({make("(K3 x K3)/(Z4+Z2)", {"K3", "K3"}, z4z2, {first, second}), 2, "complexity-2"});
    }
    out.push_back({cyclic_product("(C1 x J1)/Z4", "C1", "J1", 4), 2, "complexity-2"});
    out.push_back({cyclic_product("(C1 x K3)/Z4", "C1", "K3", 4), 2, "complexity-2"});
    out.push_back({cyclic_product("(C1 x P4)/Z4", "C1", "P4", 4), 2, "complexity-2"});
    out.push_back({cyclic_product("(D1 x C2)/Z2", "D1", "C2", 2), 2, "complexity-2"});
    {
        const Permutation id{0, 1, 2, 3}, s13{2, 3, 0, 1}, s12{1, 0, 3, 2};
        auto c2 = perms_from(z2z2, 2, [](int x, int v) { return (v + x / 2) % 2; });
        auto variant = [&](const Permutation& pa, const Permutation& pb) {
            ComponentAction a;
            a.perms = {id, pb, pa, compose(pa, pb)};
            return a;
        };
        out.push_back({make("(C2 x P4)/(Z2+Z2) I", {"C2", "P4"}, z2z2, {c2, variant(s13, s12)}), 2, "complexity-2"});
        out.push_back({make("(C2 x P4)/(Z2+Z2) II", {"C2", "P4"}, z2z2, {c2, variant(s12, s13)}), 2, "complexity-2"});
    }

    out.push_back({cyclic_product("(D1 x F2)/Z2", "D1", "F2", 2), 2, "saddle-focus-2"});
    out.push_back({cyclic_product("(C1 x F4)/Z4", "C1", "F4", 4), 2, "saddle-focus-2"});
    out.push_back({cyclic_product("(C2 x F2)/Z2", "C2", "F2", 2), 2, "saddle-focus-2"});
    out.push_back({cyclic_product("(F2 x F2)/Z2", "F2", "F2", 2), 2, "saddle-focus-2"});
    return out;
}

std::vector<CatalogException> exceptions_report()
{
    return {
        {"K3 singular-point count", "3", "4",
         "(K3 x K3)/(Z4+Z2) has complexity 2 with a group of order 8. A free action has orbits of size 8 on "
         "vertex pairs, so v(K3)^2 = 16. Independently (C1 x K3)/Z4 has complexity 2, giving 2 * v(K3) / 4 = 2. "
         "With 3 points the 9 pairs cannot split into 2 orbits of a free Z4+Z2 action."},
        {"(K3 x K3)/(Z4+Z2)", "complexity unresolved with v(K3) = 3", "complexity 2 with v(K3) = 4",
         "Checked with the action (a, b) -> (rotation, identity) on the first factor and (rotation, half turn) on "
         "the second; this action is free and has 2 orbits on the 16 vertex pairs."},
        {"F_k singular-point count", "1", "k",
         "(D1 x F2)/Z2 = 2, (C1 x F4)/Z4 = 2 and (F2 x F2)/Z2 = 2 need v(F2) = 2 and v(F4) = 4; (B x F2)/Z2 = 1 "
         "is free only if Z2 moves the singular points of F2."},
    };
}

// ------------------------------------------------------------------ JSON

using Json = nlohmann::ordered_json;

namespace {

FiniteGroup group_from_json(const Json& j)
{
    if (j.is_string()) return FiniteGroup::named(j.get<std::string>());
    return FiniteGroup::from_table(j.value("name", std::string("G")), j.at("elements").get<std::vector<std::string>>(),
                                   j.at("table").get<std::vector<std::vector<int>>>());
}

int element_index(const FiniteGroup& g, const std::string& name)
{
    const auto& els = g.elements();
    auto it = std::find(els.begin(), els.end(), name);
    if (it == els.end()) throw AtomError("unknown group element '" + name + "'");
    return static_cast<int>(it - els.begin());
}

template <class T>
std::vector<T> per_element(const FiniteGroup& g, const Json& j, const T& fill)
{
    std::vector<T> out(static_cast<std::size_t>(g.order()), fill);
    std::vector<bool> given(static_cast<std::size_t>(g.order()), false);
    if (j.is_array()) {
        if (static_cast<int>(j.size()) != g.order()) throw AtomError("per-element list has the wrong length");
        for (std::size_t i = 0; i < j.size(); ++i) out[i] = j[i].template get<T>();
        return out;
    }
    for (const auto& [name, value] : j.items()) {
        const auto i = static_cast<std::size_t>(element_index(g, name));
        out[i] = value.template get<T>();
        given[i] = true;
    }
    return out;
}

}  // namespace

AlmostDirectProduct parse_product(const std::string& json_text)
{
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw AtomError(std::string("product spec is not valid JSON: ") + e.what());
    }
    try {
        AlmostDirectProduct p;
        p.name = j.value("name", std::string());
        for (const auto& c : j.at("components")) p.components.push_back(atom(c.get<std::string>()));
        p.group = j.contains("group") ? group_from_json(j["group"]) : FiniteGroup::trivial();
        const Json& actions = j.contains("actions") ? j["actions"] : Json::array();
        if (!actions.empty() && actions.size() != p.components.size())
            throw AtomError("need one action per component");
        for (std::size_t c = 0; c < p.components.size(); ++c) {
            ComponentAction a;
            const Atom& at = p.components[c];
            if (actions.empty()) {
                if (p.group.order() != 1) throw AtomError("a non-trivial group needs explicit actions");
                if (at.kind == AtomKind::regular)
                    a.translations = {0.0};
                else
                    a = trivial_action(p.group, at.vertices);
            } else {
                const Json& ja = actions[c];
                if (at.kind == AtomKind::regular) {
                    if (!ja.contains("translations")) throw AtomError("W_reg components take translations");
                    a.translations = per_element<double>(p.group, ja["translations"], 0.0);
                } else {
                    if (!ja.contains("perms")) throw AtomError(at.name + " needs permutations of its singular points");
                    a.perms = per_element<Permutation>(p.group, ja["perms"], Permutation{});
                }
                if (ja.contains("fixed_points")) {
                    a.fixed_point.assign(static_cast<std::size_t>(p.group.order()), std::nullopt);
                    for (const auto& [name, value] : ja["fixed_points"].items())
                        a.fixed_point[static_cast<std::size_t>(element_index(p.group, name))] = value.get<bool>();
                }
            }
            p.actions.push_back(std::move(a));
        }
        return p;
    } catch (const Json::exception& e) {
        throw AtomError(std::string("malformed product spec: ") + e.what());
    } catch (const GroupError& e) {
        throw AtomError(std::string("bad group: ") + e.what());
    }
}

std::string serialize_product(const AlmostDirectProduct& p)
{
    Json j;
    j["name"] = p.name;
    Json comps = Json::array();
    for (const auto& a : p.components) comps.push_back(a.name);
    j["components"] = comps;
    j["group"] = {{"name", p.group.name()}, {"elements", p.group.elements()}, {"table", p.group.table()}};
    Json actions = Json::array();
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        const ComponentAction& a = p.actions[c];
        Json ja = Json::object();
        Json per = Json::object();
        for (int x = 0; x < p.group.order(); ++x) {
            const std::string& name = p.group.elements()[static_cast<std::size_t>(x)];
            if (p.components[c].kind == AtomKind::regular)
                per[name] = a.translations[static_cast<std::size_t>(x)];
            else
                per[name] = a.perms[static_cast<std::size_t>(x)];
        }
        ja[p.components[c].kind == AtomKind::regular ? "translations" : "perms"] = per;
        if (!a.fixed_point.empty()) {
            Json fp = Json::object();
            for (int x = 0; x < p.group.order(); ++x)
                if (a.fixed_point[static_cast<std::size_t>(x)])
                    fp[p.group.elements()[static_cast<std::size_t>(x)]] = *a.fixed_point[static_cast<std::size_t>(x)];
            ja["fixed_points"] = fp;
        }
        actions.push_back(ja);
    }
    j["actions"] = actions;
    return j.dump(2) + "\n";
}

// ------------------------------------------------------------------ fuzz

namespace {

// Homomorphism to R/Z given by random images of the generators, or the
// trivial one when the images are inconsistent.
std::vector<double> random_translations(const FiniteGroup& g, Rng& rng)
{
    const auto gens = g.generators();
    std::vector<double> image(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        int order = 1;
        for (int y = gens[i]; y != g.identity(); y = g.multiply(y, gens[i])) ++order;
        image[i] = static_cast<double>(rng.index(static_cast<std::uint64_t>(order))) / order;
    }
    std::vector<double> t(static_cast<std::size_t>(g.order()), 0.0);
    std::vector<bool> known(static_cast<std::size_t>(g.order()), false);
    known[static_cast<std::size_t>(g.identity())] = true;
    std::queue<int> queue;
    queue.push(g.identity());
    bool ok = true;
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop();
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const int y = g.multiply(x, gens[i]);
            const double ty = wrap_turns(t[static_cast<std::size_t>(x)] + image[i]);
            if (!known[static_cast<std::size_t>(y)]) {
                known[static_cast<std::size_t>(y)] = true;
                t[static_cast<std::size_t>(y)] = ty;
                queue.push(y);
            } else if (!same_turn(t[static_cast<std::size_t>(y)], ty)) {
                ok = false;
            }
        }
    }
    for (int x = 0; x < g.order() && ok; ++x)
        for (int y = 0; y < g.order() && ok; ++y)
            ok = same_turn(t[static_cast<std::size_t>(g.multiply(x, y))], t[static_cast<std::size_t>(x)] + t[static_cast<std::size_t>(y)]);
    if (!ok) std::fill(t.begin(), t.end(), 0.0);
    return t;
}

}  // namespace

AlmostDirectProduct random_product(std::uint64_t seed)
{
    static const std::vector<std::string> groups = {"1", "Z2", "Z3", "Z4", "Z2+Z2", "Z4+Z2", "D4"};
    static const std::vector<std::string> atoms = {"A",  "B",  "C1", "C2", "D1", "I1",   "J1",
                                                   "K3", "P4", "F1", "F2", "F3", "F4", "W_reg"};
    Rng rng(seed);
    AlmostDirectProduct p;
    p.group = FiniteGroup::named(groups[rng.index(groups.size())]);
    const int count = 1 + static_cast<int>(rng.index(3));
    p.name = "fuzz-" + std::to_string(seed);
    for (int c = 0; c < count; ++c) {
        const Atom a = atom(atoms[rng.index(atoms.size())]);
        p.components.push_back(a);
        ComponentAction act;
        if (a.kind == AtomKind::regular) {
            act.translations = random_translations(p.group, rng);
        } else {
            const auto all = all_actions(p.group, a.vertices);
            act.perms = all[rng.index(all.size())];
        }
        p.actions.push_back(std::move(act));
    }
    return p;
}

}  // namespace ihs
