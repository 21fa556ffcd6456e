#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sarma {

/// Dense row-major complex array over a rectangular index box, used for torus
/// grids and transform buffers.
class NdArray {
public:
    NdArray() = default;

    explicit NdArray(std::vector<int> extents) : extents_(std::move(extents)) {
        std::int64_t n = 1;
        for (int e : extents_) {
            if (e < 1) throw std::invalid_argument("NdArray: extent must be >= 1");
            if (n > kMaxElements / e) throw std::invalid_argument("NdArray: grid exceeds memory guard");
            n *= e;
        }
        data_.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    }

    int dim() const { return static_cast<int>(extents_.size()); }
    const std::vector<int>& extents() const { return extents_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    std::complex<double>* data() { return data_.data(); }
    const std::complex<double>* data() const { return data_.data(); }

    std::complex<double>& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const std::complex<double>& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    std::int64_t flat_index(const std::vector<int>& idx) const {
        std::int64_t f = 0;
        for (int a = 0; a < dim(); ++a) f = f * extents_[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)];
        return f;
    }

    std::complex<double>& at(const std::vector<int>& idx) { return data_[static_cast<std::size_t>(flat_index(idx))]; }
    const std::complex<double>& at(const std::vector<int>& idx) const {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }

    /// Advances a mixed-radix counter; returns false after the last index.
    static bool next_index(std::vector<int>& idx, const std::vector<int>& extents) {
        for (int a = static_cast<int>(extents.size()) - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < extents[static_cast<std::size_t>(a)]) return true;
            idx[static_cast<std::size_t>(a)] = 0;
        }
        return false;
    }

    static constexpr std::int64_t kMaxElements = std::int64_t(1) << 26;

private:
    std::vector<int> extents_;
    std::vector<std::complex<double>> data_;
};

}  // namespace sarma
