#include "voxrot/tensor.hpp"

#include <cmath>

namespace voxrot {

double psnr(const Tensor& a, const Tensor& b) {
    const double m = mse(a, b);
    if (m == 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / m));
}

void validate_image(const Tensor& img, const std::string& what) {
    if (img.ndim() != 3 || (img.dim(0) != 3 && img.dim(0) != 1))
        throw std::invalid_argument(what + ": expected 3xHxW or 1xHxW image");
    for (std::size_t i = 0; i < img.size(); ++i) {
        const float v = img[i];
        if (!(v >= 0.0f && v <= 1.0f))
            throw std::invalid_argument(what + ": image values must lie in [0,1]");
    }
}

void require_square(const std::vector<std::size_t>& shape, const std::string& what) {
    if (shape.size() != 3 || shape[1] != shape[2])
        throw std::invalid_argument(what + ": expected a CxNxN tensor with square spatial grid");
}

void require_cubic_scene(const std::vector<std::size_t>& shape, const std::string& what) {
    if (shape.size() != 4 || shape[1] != shape[2] || shape[2] != shape[3])
        throw std::invalid_argument(what + ": expected a CxNxNxN scene tensor with cubic grid");
}

}  // namespace voxrot
