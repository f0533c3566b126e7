#include "relucoll/multi_index.hpp"

#include <algorithm>
#include <sstream>

#include "relucoll/errors.hpp"

namespace rc {

MultiIndex::MultiIndex(std::vector<Entry> entries) : e_(std::move(entries)) {
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (e_[i].first == 0) throw DomainError("MultiIndex: coordinates are 1-based");
        if (e_[i].second == 0) throw DomainError("MultiIndex: stored values must be positive");
        if (i > 0 && e_[i - 1].first >= e_[i].first)
            throw DomainError("MultiIndex: coordinates must be strictly increasing");
    }
}

MultiIndex MultiIndex::from_dense(const std::vector<int>& dense) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] < 0) throw DomainError("MultiIndex: negative entry");
        if (dense[i] > 0) e.emplace_back(static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(dense[i]));
    }
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::unit(std::uint32_t j, std::uint32_t value) {
    if (value == 0) return MultiIndex();
    return MultiIndex({{j, value}});
}

int MultiIndex::l1() const {
    int s = 0;
    for (const auto& [j, v] : e_) s += static_cast<int>(v);
    return s;
}

std::uint32_t MultiIndex::get(std::uint32_t j) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), j,
                               [](const Entry& a, std::uint32_t key) { return a.first < key; });
    return (it != e_.end() && it->first == j) ? it->second : 0;
}

std::vector<int> MultiIndex::dense(std::size_t n) const {
    std::vector<int> d(std::max<std::size_t>(n, max_coordinate()), 0);
    for (const auto& [j, v] : e_) d[j - 1] = static_cast<int>(v);
    return d;
}

bool MultiIndex::leq(const MultiIndex& other) const {
    for (const auto& [j, v] : e_)
        if (v > other.get(j)) return false;
    return true;
}

MultiIndex MultiIndex::with(std::uint32_t j, std::uint32_t value) const {
    std::vector<Entry> e;
    bool placed = false;
    for (const auto& en : e_) {
        if (!placed && en.first >= j) {
            if (value > 0) e.emplace_back(j, value);
            placed = true;
            if (en.first == j) continue;
        }
        e.push_back(en);
    }
    if (!placed && value > 0) e.emplace_back(j, value);
    return MultiIndex(std::move(e));
}

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (i) os << ',';
        os << e_[i].first << ':' << e_[i].second;
    }
    os << '}';
    return os.str();
}

bool canonical_less(const MultiIndex& a, const MultiIndex& b) {
    const int la = a.l1(), lb = b.l1();
    if (la != lb) return la < lb;
    const std::size_t n = std::max(a.max_coordinate(), b.max_coordinate());
    const auto da = a.dense(n), db = b.dense(n);
    return da < db;
}

}  // namespace rc
