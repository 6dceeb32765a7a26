#ifndef VOXROT_SYNTH_HPP
#define VOXROT_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxrot/equivariance.hpp"
#include "voxrot/tensor.hpp"

namespace voxrot {

// SplitMix64: the fixed generator behind every seeded artifact output.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct SceneSpec {
    std::size_t n = 8;          // cubic grid size
    int num_blobs = 3;
    std::uint64_t seed = 0;
    // channels fixed at 4: opacity plus RGB emission
};

// Sum of anisotropic Gaussian blobs, opacity clamped to [0,1], masked to
// radius 0.8. Blob 0 is forced off-center so the scene has no rotational
// symmetry. Draw order per blob (10 uniforms): center d,h,w; sigma d,h,w;
// opacity; color r,g,b.
Tensor gen_scene(const SceneSpec& spec);

// Front-to-back emission-absorption along depth (front = index 0):
// out = sum_d color_d * a_d * prod_{e<d} (1 - a_e), clamped to [0,1].
Tensor project_ortho(const Tensor& z);

// Nearest-neighbor integer upscaling of a CxHxW image.
Tensor upsample_nearest(const Tensor& img, std::size_t factor);

// Dataset view: orthographic projection upscaled 2x so image resolution is
// twice the grid resolution (the toy model pools it back down by 2).
Tensor render_view(const Tensor& z);

struct TrainSample {
    Tensor x1;
    Tensor x2;
    RelativePose pose;
};

// Draw order (4 uniforms): base elev in [-60,60], base azim in [0,360),
// relative elev in [-60,60], relative azim in [-180,180). The second view
// is produced by rotating the first view's scene, so
// x2 == render_view(rotate_scene(z1, pose, shear)) holds bitwise.
TrainSample make_pair(const Tensor& masked_scene, SplitMix64& rng);

// Layout: <dir>/scene_<i>/pair_<j>/{x1.tsr, x2.tsr, pose.csv} plus
// <dir>/manifest.csv. Scene i content stream is seeded with seed^i and its
// pose stream with ~(seed^i), so scenes are independent of each other.
void write_dataset(const std::string& out_dir, std::size_t num_scenes,
                   std::size_t pairs_per_scene, const SceneSpec& spec,
                   std::uint64_t seed, bool export_ppm = false);

void write_pose_csv(const std::string& path, const RelativePose& pose);
RelativePose read_pose_csv(const std::string& path);

std::vector<TrainSample> load_dataset(const std::string& dir);

}  // namespace voxrot

#endif
