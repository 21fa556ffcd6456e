#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarma {

/// Lattice offset in Z^d. Ordered lexicographically so it can key ordered maps,
/// which gives every coefficient container a canonical iteration order.
class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}

    MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}

    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

    int dim() const { return static_cast<int>(entries_.size()); }

    int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    int& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }

    const std::vector<int>& entries() const { return entries_; }

    /// |k| = |k_1| + ... + |k_d|
    long l1_norm() const {
        long s = 0;
        for (int e : entries_) s += std::abs(static_cast<long>(e));
        return s;
    }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e == 0; });
    }

    bool is_nonnegative() const {
        return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e >= 0; });
    }

    /// Componentwise partial order k <= other.
    bool le(const MultiIndex& other) const {
        if (dim() != other.dim()) throw std::invalid_argument("MultiIndex::le: dimension mismatch");
        for (int i = 0; i < dim(); ++i)
            if (entries_[static_cast<std::size_t>(i)] > other[i]) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        check_same_dim(o);
        MultiIndex r(*this);
        for (int i = 0; i < dim(); ++i) r[i] += o[i];
        return r;
    }

    MultiIndex operator-(const MultiIndex& o) const {
        check_same_dim(o);
        MultiIndex r(*this);
        for (int i = 0; i < dim(); ++i) r[i] -= o[i];
        return r;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.entries_ < b.entries_; }

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (int i = 0; i < dim(); ++i) {
            if (i) os << ',';
            os << entries_[static_cast<std::size_t>(i)];
        }
        os << ')';
        return os.str();
    }

private:
    void check_same_dim(const MultiIndex& o) const {
        if (dim() != o.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    }

    std::vector<int> entries_;
};

/// Thrown when an index or point does not match the ambient dimension.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace sarma
