#ifndef VOXROT_SHEAR_HPP
#define VOXROT_SHEAR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "voxrot/tensor.hpp"

namespace voxrot {

// sin/cos taking degrees, exact {0, +-1} at multiples of 90.
double sin_deg(double deg);
double cos_deg(double deg);

struct AngleDecomposition {
    double coarse;  // in {0, 90, 180, 270}
    double small;   // in [-45, 45], negation-symmetric: small(-t) == -small(t)
};

// Splits an angle into a lossless 90-degree part plus a small residual.
// Ties at +-45 round the coarse part toward zero so that decomposing -theta
// always negates both components; this is what makes rotate(theta) followed
// by rotate(-theta) an exact inverse pair at the quadrant boundaries.
AngleDecomposition decompose_angle(double theta_deg);

// Integer per-line cyclic shifts realizing one small-angle rotation as three
// shear passes (column shift, row shift, column shift again).
struct ShearPlan {
    double theta_small;
    std::size_t n;
    std::vector<int> shift_a;  // per column: vertical shift, stages 1 and 3
    std::vector<int> shift_b;  // per row: horizontal shift, stage 2
};

// shift_a(c) = round_half_away(-tan(t/2) * (c - (n-1)/2))
// shift_b(r) = round_half_away( sin(t)   * (r - (n-1)/2))
ShearPlan make_shear_plan(double theta_small_deg, std::size_t n);

// Counterclockwise quarter turns: k=1 maps out[i][j] = in[j][n-1-i].
template <typename T>
TensorT<T> rot90_2d(const TensorT<T>& t, int k);

// Permutation index maps: out[flat] = in[map[flat]] over one n x n grid
// (2-D) or n^3 grid (3-D, (d,h,w) order). The 3-D map rotates every (d,h)
// slab by elev, then every (d,w) slab by azim.
std::vector<std::uint32_t> rot_index_map_2d(std::size_t n, double theta_deg);
std::vector<std::uint32_t> rot_index_map_3d(std::size_t n, double elev_deg, double azim_deg);
std::vector<std::uint32_t> rot_index_map_3d_inverse(std::size_t n, double elev_deg, double azim_deg);

// Applies an index map to every channel of a CxNxN or CxNxNxN tensor.
template <typename T>
TensorT<T> apply_index_map(const TensorT<T>& t, const std::vector<std::uint32_t>& map);

// Exactly invertible rotation of a CxNxN tensor: rotate(theta) followed by
// rotate(-theta) is the bitwise identity for every angle.
template <typename T>
TensorT<T> shear_rotate2d(const TensorT<T>& t, double theta_deg);

// Elevation about the width axis, then azimuth about the height axis.
template <typename T>
TensorT<T> shear_rotate3d(const TensorT<T>& z, double elev_deg, double azim_deg);

// Inverse composition: -azim first, then -elev.
template <typename T>
TensorT<T> shear_rotate3d_inverse(const TensorT<T>& z, double elev_deg, double azim_deg);

// Smallest representable rotation for an n x n grid: asin(1/(n-1)) degrees.
double angle_resolution(std::size_t n);

// Independent oracle for angle_resolution: sweeps theta = step, 2*step, ...
// strictly below 45 degrees and returns the first angle that moves a probe
// image (single 1.0 at row 0, column n-1). Empty when nothing moves, which
// happens only for n = 2 whose resolution (90 degrees) exceeds the sweep.
std::optional<double> smallest_effective_angle_bruteforce(std::size_t n, double step_deg);

namespace serial {

// Reference implementations: explicit per-stage cyclic shifts, no index-map
// precomputation, no threading. Kept for bitwise cross-checks and benchmarks.
template <typename T>
TensorT<T> shear_rotate2d(const TensorT<T>& t, double theta_deg);
template <typename T>
TensorT<T> shear_rotate3d(const TensorT<T>& z, double elev_deg, double azim_deg);

}  // namespace serial

}  // namespace voxrot

#endif
