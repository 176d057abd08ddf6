#include "ihs/finite_group.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

namespace ihs {

FiniteGroup::FiniteGroup() : name_("1"), elements_{"e"}, table_{{0}}, identity_(0), inverse_{0} {}

FiniteGroup FiniteGroup::from_table(std::string name, std::vector<std::string> elements,
                                    std::vector<std::vector<int>> table)
{
    const int n = static_cast<int>(table.size());
    if (n == 0) throw GroupError("empty group table");
    if (static_cast<int>(elements.size()) != n) throw GroupError("element names do not match table size");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n) throw GroupError("group table is not square");
        for (int v : row)
            if (v < 0 || v >= n) throw GroupError("group table entry out of range");
    }
    int identity = -1;
    for (int e = 0; e < n && identity < 0; ++e) {
        bool ok = true;
        for (int a = 0; a < n && ok; ++a) ok = table[e][a] == a && table[a][e] == a;
        if (ok) identity = e;
    }
    if (identity < 0) throw GroupError("group table has no identity");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (table[table[a][b]][c] != table[a][table[b][c]]) throw GroupError("group table is not associative");
    std::vector<int> inverse(n, -1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (table[a][b] == identity && table[b][a] == identity) inverse[a] = b;
    if (std::count(inverse.begin(), inverse.end(), -1) > 0) throw GroupError("group table lacks inverses");

    FiniteGroup g;
    g.name_ = std::move(name);
    g.elements_ = std::move(elements);
    g.table_ = std::move(table);
    g.identity_ = identity;
    g.inverse_ = std::move(inverse);
    return g;
}

FiniteGroup FiniteGroup::trivial() { return FiniteGroup(); }

FiniteGroup FiniteGroup::cyclic(int m)
{
    if (m < 1) throw GroupError("cyclic group order must be positive");
    std::vector<std::string> names;
    std::vector<std::vector<int>> table(m, std::vector<int>(m));
    for (int a = 0; a < m; ++a) {
        names.push_back(a == 0 ? "e" : a == 1 ? "a" : "a^" + std::to_string(a));
        for (int b = 0; b < m; ++b) table[a][b] = (a + b) % m;
    }
    return from_table(m == 1 ? "1" : "Z" + std::to_string(m), std::move(names), std::move(table));
}

FiniteGroup FiniteGroup::dihedral(int m)
{
    if (m < 1) throw GroupError("dihedral group index must be positive");
    // Element (k, s) = r^k s^s, index k + m*s; (r^a s^x)(r^b s^y) = r^(a + (-1)^x b) s^(x+y).
    const int n = 2 * m;
    std::vector<std::string> names(n);
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i) {
        const int k = i % m, s = i / m;
        names[i] = (k == 0 && s == 0) ? "e" : (k ? "r" + (k > 1 ? "^" + std::to_string(k) : std::string()) : "") +
                                                   (s ? "s" : "");
        for (int j = 0; j < n; ++j) {
            const int l = j % m, t = j / m;
            const int kk = ((k + (s ? -l : l)) % m + m) % m;
            table[i][j] = kk + m * ((s + t) % 2);
        }
    }
    return from_table("D" + std::to_string(m), std::move(names), std::move(table));
}

FiniteGroup FiniteGroup::direct_sum(const FiniteGroup& a, const FiniteGroup& b)
{
    const int na = a.order(), nb = b.order();
    std::vector<std::string> names;
    std::vector<std::vector<int>> table(na * nb, std::vector<int>(na * nb));
    for (int i = 0; i < na * nb; ++i) {
        names.push_back("(" + a.elements()[i / nb] + "," + b.elements()[i % nb] + ")");
        for (int j = 0; j < na * nb; ++j)
            table[i][j] = a.multiply(i / nb, j / nb) * nb + b.multiply(i % nb, j % nb);
    }
    return from_table(a.name() + "+" + b.name(), std::move(names), std::move(table));
}

FiniteGroup FiniteGroup::named(const std::string& name)
{
    if (name.empty() || name == "1" || name == "trivial") return trivial();
    if (auto plus = name.find('+'); plus != std::string::npos)
        return direct_sum(named(name.substr(0, plus)), named(name.substr(plus + 1)));
    if ((name[0] == 'Z' || name[0] == 'D') && name.size() > 1) {
        int m = 0;
        try {
            std::size_t used = 0;
            m = std::stoi(name.substr(1), &used);
            if (used != name.size() - 1) m = 0;
        } catch (const std::exception&) {
            m = 0;
        }
        if (m >= 1) return name[0] == 'Z' ? cyclic(m) : dihedral(m);
    }
    throw GroupError("unknown group '" + name + "'");
}

std::vector<int> FiniteGroup::generators() const
{
    std::vector<int> gens;
    std::vector<bool> reached(order(), false);
    reached[identity_] = true;
    auto closure = [&]() {
        std::vector<int> frontier;
        for (int i = 0; i < order(); ++i)
            if (reached[i]) frontier.push_back(i);
        bool grew = true;
        while (grew) {
            grew = false;
            for (int x = 0; x < order(); ++x) {
                if (!reached[x]) continue;
                for (int g : gens) {
                    const int y = multiply(x, g);
                    if (!reached[y]) {
                        reached[y] = true;
                        grew = true;
                    }
                }
            }
        }
    };
    // Prefer elements of large order so that cyclic factors need one generator.
    std::vector<int> candidates(order());
    std::iota(candidates.begin(), candidates.end(), 0);
    auto element_order = [&](int x) {
        int k = 1, y = x;
        while (y != identity_) {
            y = multiply(y, x);
            ++k;
        }
        return k;
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return element_order(a) > element_order(b); });
    for (int c : candidates) {
        if (reached[c]) continue;
        gens.push_back(c);
        closure();
    }
    return gens;
}

bool is_permutation(const Permutation& p, int k)
{
    if (static_cast<int>(p.size()) != k) return false;
    std::vector<bool> seen(k, false);
    for (int v : p) {
        if (v < 0 || v >= k || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Permutation compose(const Permutation& a, const Permutation& b)
{
    Permutation out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[b[i]];
    return out;
}

bool is_homomorphism(const FiniteGroup& g, const std::vector<Permutation>& perm_of, int k)
{
    if (static_cast<int>(perm_of.size()) != g.order()) return false;
    for (const auto& p : perm_of)
        if (!is_permutation(p, k)) return false;
    for (int a = 0; a < g.order(); ++a)
        for (int b = 0; b < g.order(); ++b)
            if (perm_of[g.multiply(a, b)] != compose(perm_of[a], perm_of[b])) return false;
    return true;
}

std::vector<int> orbit_labels(const FiniteGroup& g, const std::vector<Permutation>& perm_of, int k)
{
    std::vector<int> label(k, -1);
    int next = 0;
    for (int start = 0; start < k; ++start) {
        if (label[start] >= 0) continue;
        label[start] = next;
        for (int e = 0; e < g.order(); ++e) label[perm_of[e][start]] = next;
        ++next;
    }
    return label;
}

namespace {

void all_permutations(int k, std::vector<Permutation>& out)
{
    Permutation p(k);
    std::iota(p.begin(), p.end(), 0);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

std::vector<std::vector<Permutation>> all_actions(const FiniteGroup& g, int k)
{
    std::vector<std::vector<Permutation>> result;
    if (k == 0) {
        result.push_back(std::vector<Permutation>(g.order(), Permutation{}));
        return result;
    }
    std::vector<Permutation> sym;
    all_permutations(k, sym);
    const std::vector<int> gens = g.generators();
    Permutation id(k);
    std::iota(id.begin(), id.end(), 0);

    std::vector<std::size_t> choice(gens.size(), 0);
    for (;;) {
        // Extend the generator images along words by breadth-first search.
        std::vector<Permutation> image(g.order());
        std::vector<bool> known(g.order(), false);
        image[g.identity()] = id;
        known[g.identity()] = true;
        std::queue<int> queue;
        queue.push(g.identity());
        bool consistent = true;
        while (!queue.empty() && consistent) {
            const int x = queue.front();
            queue.pop();
            for (std::size_t i = 0; i < gens.size(); ++i) {
                const int y = g.multiply(x, gens[i]);
                Permutation py = compose(image[x], sym[choice[i]]);
                if (!known[y]) {
                    known[y] = true;
                    image[y] = std::move(py);
                    queue.push(y);
                } else if (image[y] != py) {
                    consistent = false;
                    break;
                }
            }
        }
        if (consistent && is_homomorphism(g, image, k)) result.push_back(std::move(image));

        std::size_t i = 0;
        while (i < choice.size() && ++choice[i] == sym.size()) choice[i++] = 0;
        if (i == choice.size()) break;
    }
    return result;
}

}  // namespace ihs
