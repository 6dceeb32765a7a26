#ifndef VOXROT_EQUIVARIANCE_HPP
#define VOXROT_EQUIVARIANCE_HPP

#include <cmath>
#include <functional>

#include "voxrot/tensor.hpp"

namespace voxrot {

// Relative camera transform between the two views of one scene,
// interpreted as elevation-then-azimuth applied in scene space.
struct RelativePose {
    double d_azim;  // degrees
    double d_elev;  // degrees
};

struct LossBreakdown {
    double l_render;
    double l_scene;
    double total;
    double scene_weight;
};

enum class RotMethod { shear, trilinear };

// Zeroes voxels whose centered radius exceeds radius_frac * (n-1)/2.
// Content kept inside radius 0.8 never wraps across the grid under shear
// rotations (worst intermediate shear stretch is 1.2284, brute-forced over
// theta in [-45, 45]; 1/1.2284 ~ 0.814).
template <typename T>
TensorT<T> spherical_mask(const TensorT<T>& z, double radius_frac);

Tensor rotate_scene(const Tensor& z, const RelativePose& pose, RotMethod method);
Tensor rotate_scene_inverse(const Tensor& z, const RelativePose& pose, RotMethod method);

// l1_mean(x2, g(z1 rotated)) + l1_mean(x1, g(z2 counter-rotated))
double render_loss(const Tensor& x1, const Tensor& x2, const Tensor& g_of_z1r,
                   const Tensor& g_of_z2r);

// rms(f(x2) - z1r) + rms(f(x1) - z2r), rms = sqrt(mse)
double scene_loss(const Tensor& f_x2, const Tensor& z1r, const Tensor& f_x1,
                  const Tensor& z2r);

template <typename T>
double rms(const TensorT<T>& a, const TensorT<T>& b) {
    return std::sqrt(mse(a, b));
}

LossBreakdown total_loss(double l_render, double l_scene, double scene_weight);

constexpr double kDefaultSceneWeight = 1e-4;
constexpr double kSafeMaskRadius = 0.8;

// Normalized discrepancy between rotate-then-encode and encode-then-rotate:
// rms(R f(x) - f(R x)) / (rms(f(x)) + 1e-12). rotate_image must be a
// ground-truth view-change oracle; zero for a perfectly equivariant encoder.
using Encoder = std::function<Tensor(const Tensor&)>;
using ImageRotator = std::function<Tensor(const Tensor&, const RelativePose&)>;
double equivariance_gap(const Encoder& f, const Tensor& x, const RelativePose& pose,
                        const ImageRotator& rotate_image);

}  // namespace voxrot

#endif
