#include "aagnet/tensor.hpp"

#include <cmath>
#include <sstream>

namespace aagnet {

std::int64_t checked_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive, got " + shape_str(shape));
        n *= d;
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

template <typename S>
TensorT<S>::TensorT(std::vector<int> shape, S fill)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(checked_numel(shape_)), fill) {}

template <typename S>
TensorT<S> TensorT<S>::from_data(std::vector<int> shape, std::vector<S> data) {
    const std::int64_t n = checked_numel(shape);
    if (n != static_cast<std::int64_t>(data.size()))
        throw std::invalid_argument("tensor data length " + std::to_string(data.size()) +
                                    " does not match shape " + shape_str(shape));
    TensorT t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

template <typename S>
bool TensorT<S>::all_finite() const {
    for (const S v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

template class TensorT<float>;
template class TensorT<double>;

}  // namespace aagnet
