#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace rc {

// Finitely supported sequence s in F.  Stored sparsely as (j, s_j) pairs with
// 1-based coordinates, strictly increasing j and strictly positive s_j.
class MultiIndex {
public:
    using Entry = std::pair<std::uint32_t, std::uint32_t>;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<Entry> entries);  // validates
    static MultiIndex from_dense(const std::vector<int>& dense);
    static MultiIndex unit(std::uint32_t j, std::uint32_t value = 1);

    const std::vector<Entry>& entries() const { return e_; }
    bool is_zero() const { return e_.empty(); }
    int l1() const;
    int l0() const { return static_cast<int>(e_.size()); }
    std::uint32_t get(std::uint32_t j) const;
    std::uint32_t max_coordinate() const { return e_.empty() ? 0 : e_.back().first; }

    // Dense prefix (s_1, ..., s_n) with n >= max_coordinate().
    std::vector<int> dense(std::size_t n) const;

    // Componentwise order s <= other.
    bool leq(const MultiIndex& other) const;

    MultiIndex with(std::uint32_t j, std::uint32_t value) const;

    std::string str() const;

    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<Entry> e_;
};

// Canonical order: by |s|_1, then lexicographically on the dense sequence.
bool canonical_less(const MultiIndex& a, const MultiIndex& b);

struct CanonicalLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return canonical_less(a, b); }
};

}  // namespace rc
