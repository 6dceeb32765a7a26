#ifndef VOXROT_RESAMPLE_HPP
#define VOXROT_RESAMPLE_HPP

#include <array>

#include "voxrot/tensor.hpp"

namespace voxrot {

// 2x2 sampling matrix [[cos, sin], [-sin, cos]] acting on centered
// (row, col) coordinates. rotmat2(theta) maps each output position to its
// source position for a rotation by theta; entries are exact at multiples
// of 90 degrees so lattice-preserving angles resample without interpolation.
struct Mat2 {
    std::array<double, 4> m;  // row-major
};
Mat2 rotmat2(double theta_deg);

// Forward 3-D rotation A(azim) * E(elev) in the (depth, height, width)
// frame: elevation about the width axis applied first, then azimuth about
// the height axis. Orthonormal with det = 1.
struct RotationMatrix3 {
    std::array<double, 9> m;  // row-major

    RotationMatrix3 transposed() const;
};
RotationMatrix3 rotmat3_from_elev_azim(double elev_deg, double azim_deg);

// Inverse warping with bilinear interpolation, zero outside the grid.
// Not invertible in general; the baseline the shear path improves on.
Tensor resample_rotate2d(const Tensor& t, double theta_deg);

// Inverse warping with trilinear interpolation. R is the forward rotation;
// each output voxel samples the input at R^T * p. Throws if R is not
// orthonormal within 1e-9.
Tensor resample_rotate3d(const Tensor& z, const RotationMatrix3& R);

namespace serial {
Tensor resample_rotate2d(const Tensor& t, double theta_deg);
Tensor resample_rotate3d(const Tensor& z, const RotationMatrix3& R);
}  // namespace serial

}  // namespace voxrot

#endif
