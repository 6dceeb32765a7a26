#ifndef VOXROT_MODEL_HPP
#define VOXROT_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxrot/equivariance.hpp"
#include "voxrot/synth.hpp"
#include "voxrot/tensor.hpp"

namespace voxrot {

// Fixed toy dimensions: 3x16x16 images, 4x8x8x8 scenes, 16 features.
struct ToyDims {
    std::size_t feat = 16;
    std::size_t img = 16;
    std::size_t scene_c = 4;
    std::size_t scene_n = 8;
};

// Per-pixel / per-position linear maps; all parameters in 64-bit.
// enc_mix (3->F), enc_proj (F->C_s*D_s), dec_proj (C_s*D_s->F),
// dec_mix (F->3), one bias vector each.
struct ToyParams {
    ToyDims dims;
    DTensor W1, b1;  // enc_mix
    DTensor W2, b2;  // enc_proj
    DTensor W3, b3;  // dec_proj
    DTensor W4, b4;  // dec_mix
};

// Same shapes as ToyParams; also reused for the Adam moment accumulators.
struct ToyGrads {
    DTensor W1, b1, W2, b2, W3, b3, W4, b4;
};

// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases. Draw order:
// W1, W2, W3, W4 entries row-major from one SplitMix64 stream.
ToyParams init_params(std::uint64_t seed);
ToyGrads zero_grads(const ToyDims& dims);

// Per-pixel 3->F linear, LeakyReLU(0.2), 2x2 average pool, per-position
// F->C_s*D_s linear, reshape channel axis to (C_s, D_s), spherical mask 0.8.
DTensor encode(const ToyParams& p, const Tensor& x);

// Transposed shape: per-position linear, LeakyReLU, nearest 2x upsample,
// per-pixel linear, sigmoid.
DTensor decode(const ToyParams& p, const DTensor& z);

Tensor to_image(const DTensor& t);

struct PairLossResult {
    LossBreakdown loss;
    ToyGrads grads;
};

LossBreakdown pair_loss(const ToyParams& p, const TrainSample& s, double scene_weight);
PairLossResult pair_loss_and_grad(const ToyParams& p, const TrainSample& s,
                                  double scene_weight);

struct AdamState {
    ToyGrads m;
    ToyGrads v;
    std::size_t step = 0;
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam(const ToyDims& dims, double lr);
void adam_step(AdamState& state, ToyParams& params, const ToyGrads& grads);

struct TrainLogRow {
    std::size_t step;
    double l_render;
    double l_scene;
    double total;
    double psnr_db;
};

struct TrainConfig {
    std::size_t steps = 2000;
    double lr = 2e-4;
    double scene_weight = kDefaultSceneWeight;
    std::uint64_t seed = 0;
};

struct TrainResult {
    ToyParams params;
    std::vector<TrainLogRow> log;
};

// Deterministic in the seed. The last dataset pair is held out of sampling
// and supplies the logged PSNR; the sampling stream is seeded with
// seed ^ 0x9E3779B97F4A7C15.
TrainResult train(const std::vector<TrainSample>& dataset, const TrainConfig& cfg);

// Checkpoint: one 1-D f64 TSR with W1,b1,W2,b2,W3,b3,W4,b4 concatenated in
// that order, plus <prefix>.csv recording the dimensions.
void save_checkpoint(const ToyParams& p, const std::string& prefix);
ToyParams load_checkpoint(const std::string& prefix);

}  // namespace voxrot

#endif
