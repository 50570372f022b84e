#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aagnet/common.hpp"

namespace aagnet {

enum class Dtype { f32, f64 };

template <typename S>
struct dtype_of;
template <>
struct dtype_of<float> {
    static constexpr Dtype value = Dtype::f32;
};
template <>
struct dtype_of<double> {
    static constexpr Dtype value = Dtype::f64;
};

// Dense row-major n-dimensional array. Rank 0 is a scalar holding one element.
// Dimensions must be positive; the flat buffer length always equals the shape product.
template <typename S>
class TensorT {
public:
    TensorT() : data_(1, S(0)) {}
    explicit TensorT(std::vector<int> shape, S fill = S(0));
    static TensorT from_data(std::vector<int> shape, std::vector<S> data);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
    Dtype dtype() const { return dtype_of<S>::value; }

    S* data() { return data_.data(); }
    const S* data() const { return data_.data(); }
    S& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    S operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    // Row-major accessors for the common ranks.
    S& at(int i, int j) { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }
    S at(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }
    S& at(int i, int j, int k) {
        return data_[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k];
    }
    S at(int i, int j, int k) const {
        return data_[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k];
    }
    S& at(int i, int j, int k, int l) {
        return data_[((static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
    }
    S at(int i, int j, int k, int l) const {
        return data_[((static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
    }

    bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }
    bool all_finite() const;

    template <typename T>
    TensorT<T> cast() const {
        std::vector<T> out(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<T>(data_[i]);
        return TensorT<T>::from_data(shape_, std::move(out));
    }

private:
    std::vector<int> shape_;
    std::vector<S> data_;
};

using Tensor32 = TensorT<float>;
using Tensor64 = TensorT<double>;

std::int64_t checked_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

// Deterministic random stream. All draws go through explicit integer/mantissa
// arithmetic so sequences are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::int64_t below(std::int64_t n) {
        return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
    }

    bool coin() { return (gen_() & 1u) != 0; }

    template <typename S>
    void fill_uniform(TensorT<S>& t, double lo, double hi) {
        for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = static_cast<S>(uniform(lo, hi));
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace aagnet
