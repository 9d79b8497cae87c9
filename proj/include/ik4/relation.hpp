#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ik4/bitset.hpp"

namespace ik4 {

/// Dense binary relation on {0..n-1}, stored as successor-row bitsets.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::size_t n) : n_(n), rows_(n, Bitset(n)) {}

    std::size_t size() const { return n_; }

    bool at(std::size_t i, std::size_t j) const { return rows_.at(i).test(j); }
    void set(std::size_t i, std::size_t j, bool value = true) { rows_.at(i).set(j, value); }

    const Bitset& row(std::size_t i) const { return rows_.at(i); }
    void or_into_row(std::size_t i, const Bitset& b) { rows_.at(i) |= b; }

    static Relation identity(std::size_t n) {
        Relation r(n);
        for (std::size_t i = 0; i < n; ++i) r.set(i, i);
        return r;
    }

    static Relation from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
        Relation r(n);
        for (auto [i, j] : pairs) r.set(i, j);
        return r;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (at(i, j)) out.emplace_back(i, j);
        return out;
    }

    /// this ∘ other: (i,k) iff exists j with this(i,j) and other(j,k).
    Relation composed(const Relation& other) const;
    Relation transposed() const;
    Relation united(const Relation& other) const;

    Relation transitive_closure() const;
    Relation reflexive_transitive_closure() const;

    bool is_reflexive() const;
    bool is_transitive() const;
    bool is_preorder() const { return is_reflexive() && is_transitive(); }
    bool subset_of(const Relation& other) const;

    bool operator==(const Relation&) const = default;
    auto operator<=>(const Relation&) const = default;

    std::size_t hash_value() const {
        std::size_t h = n_;
        for (const auto& r : rows_) h ^= r.hash_value() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }

private:
    std::size_t n_ = 0;
    std::vector<Bitset> rows_;
};

enum class ClosureMode { Transitive, ReflexiveTransitive };

/// Least transitive (resp. reflexive-transitive) superset. Idempotent.
Relation relation_closure(const Relation& r, ClosureMode mode);

struct RelationHash {
    std::size_t operator()(const Relation& r) const { return r.hash_value(); }
};

}  // namespace ik4
