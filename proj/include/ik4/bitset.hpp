#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ik4 {

/// Fixed-width dynamic bitset. Width is part of the value; mixing widths in a
/// binary operation is an error. Used for formula sets over a closure index
/// and for world sets over a frame.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t width) : width_(width), words_(word_count(width), 0) {}

    static Bitset ones(std::size_t width) {
        Bitset b(width);
        for (std::size_t i = 0; i < width; ++i) b.set(i);
        return b;
    }

    std::size_t width() const { return width_; }

    bool test(std::size_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool value = true) {
        check_index(i);
        if (value)
            words_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else
            words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool subset_of(const Bitset& other) const {
        check_width(other);
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~other.words_[k]) return false;
        return true;
    }

    Bitset& operator&=(const Bitset& o) {
        check_width(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        check_width(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }

    Bitset complement() const {
        Bitset r(width_);
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] = ~words_[k];
        r.trim();
        return r;
    }

    bool operator==(const Bitset&) const = default;
    auto operator<=>(const Bitset& o) const {
        if (auto c = width_ <=> o.width_; c != 0) return c;
        return words_ <=> o.words_;
    }

    /// Low 64 bits, handy when width <= 64.
    std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }

    static Bitset from_word(std::size_t width, std::uint64_t bits) {
        Bitset b(width);
        if (!b.words_.empty()) b.words_[0] = bits;
        b.trim();
        return b;
    }

    std::size_t hash_value() const {
        std::size_t h = width_;
        for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }

    /// "{0,2,5}" style listing of set positions.
    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (std::size_t i = 0; i < width_; ++i) {
            if (!test(i)) continue;
            if (!first) s += ",";
            s += std::to_string(i);
            first = false;
        }
        s += "}";
        return s;
    }

private:
    static std::size_t word_count(std::size_t width) { return (width + 63) / 64; }

    void check_index(std::size_t i) const {
        if (i >= width_) throw std::invalid_argument("bit index out of range");
    }
    void check_width(const Bitset& o) const {
        if (width_ != o.width_) throw std::invalid_argument("bitset width mismatch");
    }
    void trim() {
        if (width_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
    }

    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const { return b.hash_value(); }
};

}  // namespace ik4
