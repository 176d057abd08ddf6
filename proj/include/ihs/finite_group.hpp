#pragma once

// Finite groups given by explicit multiplication tables, and permutation
// actions of them. All groups used here have order <= 8.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ihs {

class GroupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Permutation = std::vector<int>;

class FiniteGroup {
public:
    FiniteGroup();  // trivial group

    /// Validates closure, associativity, identity and inverses.
    static FiniteGroup from_table(std::string name, std::vector<std::string> elements,
                                  std::vector<std::vector<int>> table);

    static FiniteGroup trivial();
    static FiniteGroup cyclic(int m);
    static FiniteGroup dihedral(int m);  // symmetries of the m-gon, order 2m
    static FiniteGroup direct_sum(const FiniteGroup& a, const FiniteGroup& b);

    /// "1", "Z2", "Z4", "Z2+Z2", "Z4+Z2", "D4", ... (Zm, Dm, and sums of them).
    static FiniteGroup named(const std::string& name);

    const std::string& name() const { return name_; }
    int order() const { return static_cast<int>(table_.size()); }
    int identity() const { return identity_; }
    int multiply(int a, int b) const { return table_[a][b]; }
    int inverse(int a) const { return inverse_[a]; }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::vector<std::vector<int>>& table() const { return table_; }

    /// A small generating set (greedy).
    std::vector<int> generators() const;

private:
    std::string name_;
    std::vector<std::string> elements_;
    std::vector<std::vector<int>> table_;
    int identity_ = 0;
    std::vector<int> inverse_;
};

/// perm_of[g] permutes {0..k-1}; checks perm_of[a*b] = perm_of[a] o perm_of[b].
bool is_permutation(const Permutation& p, int k);
bool is_homomorphism(const FiniteGroup& g, const std::vector<Permutation>& perm_of, int k);

Permutation compose(const Permutation& a, const Permutation& b);  // a o b

/// Orbit partition of {0..k-1}: label of each point's orbit, labels 0..m-1.
std::vector<int> orbit_labels(const FiniteGroup& g, const std::vector<Permutation>& perm_of, int k);

/// Every homomorphism g -> S_k (k small). Order is deterministic.
std::vector<std::vector<Permutation>> all_actions(const FiniteGroup& g, int k);

}  // namespace ihs
