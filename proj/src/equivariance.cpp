#include "voxrot/equivariance.hpp"

#include <cmath>

#include "voxrot/resample.hpp"
#include "voxrot/shear.hpp"

namespace voxrot {

template <typename T>
TensorT<T> spherical_mask(const TensorT<T>& z, double radius_frac) {
    require_cubic_scene(z.shape(), "spherical_mask");
    if (!(radius_frac > 0.0 && radius_frac <= 1.0))
        throw std::invalid_argument("spherical_mask: radius_frac must be in (0, 1]");
    const std::size_t C = z.dim(0), n = z.dim(1);
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    const double r2max = radius_frac * c * radius_frac * c;
    TensorT<T> out = z;
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t h = 0; h < n; ++h)
            for (std::size_t w = 0; w < n; ++w) {
                const double dd = static_cast<double>(d) - c;
                const double dh = static_cast<double>(h) - c;
                const double dw = static_cast<double>(w) - c;
                if (dd * dd + dh * dh + dw * dw > r2max)
                    for (std::size_t ch = 0; ch < C; ++ch) out.at4(ch, d, h, w) = T(0);
            }
    return out;
}

template TensorT<float> spherical_mask(const TensorT<float>&, double);
template TensorT<double> spherical_mask(const TensorT<double>&, double);

Tensor rotate_scene(const Tensor& z, const RelativePose& pose, RotMethod method) {
    if (method == RotMethod::shear) return shear_rotate3d(z, pose.d_elev, pose.d_azim);
    return resample_rotate3d(z, rotmat3_from_elev_azim(pose.d_elev, pose.d_azim));
}

Tensor rotate_scene_inverse(const Tensor& z, const RelativePose& pose, RotMethod method) {
    if (method == RotMethod::shear) return shear_rotate3d_inverse(z, pose.d_elev, pose.d_azim);
    return resample_rotate3d(z, rotmat3_from_elev_azim(pose.d_elev, pose.d_azim).transposed());
}

double render_loss(const Tensor& x1, const Tensor& x2, const Tensor& g_of_z1r,
                   const Tensor& g_of_z2r) {
    return l1_mean(x2, g_of_z1r) + l1_mean(x1, g_of_z2r);
}

double scene_loss(const Tensor& f_x2, const Tensor& z1r, const Tensor& f_x1,
                  const Tensor& z2r) {
    return rms(f_x2, z1r) + rms(f_x1, z2r);
}

LossBreakdown total_loss(double l_render, double l_scene, double scene_weight) {
    if (scene_weight < 0.0)
        throw std::invalid_argument("total_loss: scene_weight must be >= 0");
    return {l_render, l_scene, l_render + scene_weight * l_scene, scene_weight};
}

double equivariance_gap(const Encoder& f, const Tensor& x, const RelativePose& pose,
                        const ImageRotator& rotate_image) {
    const Tensor zx = f(x);
    const Tensor lhs = rotate_scene(zx, pose, RotMethod::shear);
    const Tensor rhs = f(rotate_image(x, pose));
    Tensor zero(zx.shape());
    return rms(lhs, rhs) / (rms(zx, zero) + 1e-12);
}

}  // namespace voxrot
