#include "ik4/relation.hpp"

#include <stdexcept>

namespace ik4 {

namespace {
void check_sizes(const Relation& a, const Relation& b) {
    if (a.size() != b.size()) throw std::invalid_argument("relation size mismatch");
}
}  // namespace

Relation Relation::composed(const Relation& other) const {
    check_sizes(*this, other);
    Relation out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (at(i, j)) out.or_into_row(i, other.row(j));
    return out;
}

Relation Relation::transposed() const {
    Relation out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (at(i, j)) out.set(j, i);
    return out;
}

Relation Relation::united(const Relation& other) const {
    check_sizes(*this, other);
    Relation out = *this;
    for (std::size_t i = 0; i < n_; ++i) out.or_into_row(i, other.row(i));
    return out;
}

Relation Relation::transitive_closure() const {
    Relation out = *this;
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t i = 0; i < n_; ++i)
            if (out.at(i, k)) out.or_into_row(i, out.row(k));
    return out;
}

Relation Relation::reflexive_transitive_closure() const {
    return united(identity(n_)).transitive_closure();
}

bool Relation::is_reflexive() const {
    for (std::size_t i = 0; i < n_; ++i)
        if (!at(i, i)) return false;
    return true;
}

bool Relation::is_transitive() const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (at(i, j) && !row(j).subset_of(row(i))) return false;
    return true;
}

bool Relation::subset_of(const Relation& other) const {
    check_sizes(*this, other);
    for (std::size_t i = 0; i < n_; ++i)
        if (!row(i).subset_of(other.row(i))) return false;
    return true;
}

Relation relation_closure(const Relation& r, ClosureMode mode) {
    return mode == ClosureMode::Transitive ? r.transitive_closure()
                                           : r.reflexive_transitive_closure();
}

}  // namespace ik4
