#ifndef VOXROT_TENSOR_HPP
#define VOXROT_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxrot {

// Dense row-major tensor, last dimension fastest. Data tensors (images,
// scenes) use float; model parameters and gradient math use double.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(std::vector<std::size_t> shape, T fill = T(0))
        : shape_(std::move(shape)), data_(count(shape_), fill) {
        if (shape_.empty()) throw std::invalid_argument("tensor: empty shape");
        for (std::size_t d : shape_)
            if (d == 0) throw std::invalid_argument("tensor: zero dimension");
    }

    static TensorT from_data(std::vector<std::size_t> shape, std::vector<T> data) {
        TensorT t(std::move(shape));
        if (data.size() != t.size())
            throw std::invalid_argument("tensor: data length does not match shape");
        t.data_ = std::move(data);
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    // 3-D (c, i, j) and 4-D (c, d, h, w) accessors for the common layouts.
    T& at3(std::size_t c, std::size_t i, std::size_t j) {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }
    const T& at3(std::size_t c, std::size_t i, std::size_t j) const {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }
    T& at4(std::size_t c, std::size_t d, std::size_t h, std::size_t w) {
        return data_[((c * shape_[1] + d) * shape_[2] + h) * shape_[3] + w];
    }
    const T& at4(std::size_t c, std::size_t d, std::size_t h, std::size_t w) const {
        return data_[((c * shape_[1] + d) * shape_[2] + h) * shape_[3] + w];
    }

    bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }

    bool operator==(const TensorT& o) const {
        return shape_ == o.shape_ && data_ == o.data_;
    }

private:
    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1},
                               [](std::size_t a, std::size_t b) { return a * b; });
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;
using DTensor = TensorT<double>;

// --- scalar metrics -------------------------------------------------------

template <typename T>
double mse(const TensorT<T>& a, const TensorT<T>& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

template <typename T>
double l1_mean(const TensorT<T>& a, const TensorT<T>& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("l1_mean: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    return acc / static_cast<double>(a.size());
}

// PSNR in dB against MAX = 1, capped at 99 dB (the mse == 0 case).
double psnr(const Tensor& a, const Tensor& b);

// Validates the image contract: 3xHxW or 1xHxW with values in [0,1].
void validate_image(const Tensor& img, const std::string& what);

// Shape guards shared by the rotation modules.
void require_square(const std::vector<std::size_t>& shape, const std::string& what);
void require_cubic_scene(const std::vector<std::size_t>& shape, const std::string& what);

}  // namespace voxrot

#endif
