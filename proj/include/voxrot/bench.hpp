#ifndef VOXROT_BENCH_HPP
#define VOXROT_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxrot/model.hpp"
#include "voxrot/tensor.hpp"

namespace voxrot {

// White noise smoothed twice with the separable 5-tap binomial kernel
// [1,4,6,4,1]/16 (clamp-to-edge), then min-max normalized to [0,1].
// Stand-in for a natural-image sample set.
Tensor gen_bandlimited_image(std::size_t n, std::uint64_t seed);

struct AliasingRecord {
    double angle_deg;
    std::string method;  // "bilinear" | "shear"
    double mean_abs_err;
    double max_abs_err;
    std::size_t num_images;
};

// Round-trip error rot(-theta)(rot(theta)(img)) vs img for every angle in
// the sweep and both methods. Per-image errors may be computed in parallel;
// the means accumulate in image-index order so output is bit-stable.
std::vector<AliasingRecord> bench_aliasing(const std::vector<Tensor>& images,
                                           double angle_step_deg);

void write_aliasing_csv(const std::vector<AliasingRecord>& rows, const std::string& path);

struct ResolutionRow {
    std::size_t n;
    double formula_deg;
    double bruteforce_deg;  // NaN when the sweep found no change below 45
};

std::vector<ResolutionRow> angle_resolution_table(const std::vector<std::size_t>& sizes,
                                                  double step_deg = 0.005);
void write_resolution_csv(const std::vector<ResolutionRow>& rows, const std::string& path);

struct EvalSummary {
    std::size_t pairs;
    double mean_psnr_db;
    double mean_equiv_gap;
};

// PSNR of decode(rotate(encode(x1))) against x2, and the equivariance gap
// with the dataset's stored second view as the ground-truth image rotation.
EvalSummary eval_dataset(const ToyParams& params, const std::vector<TrainSample>& data);
void write_eval_csv(const EvalSummary& s, const std::string& path);

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path);

}  // namespace voxrot

#endif
