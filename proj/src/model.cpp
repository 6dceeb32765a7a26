#include "voxrot/model.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "voxrot/csv.hpp"
#include "voxrot/io.hpp"
#include "voxrot/shear.hpp"

namespace voxrot {

namespace {

constexpr double kLeakySlope = 0.2;

double lrelu(double v) { return v > 0.0 ? v : kLeakySlope * v; }
double lrelu_grad(double v) { return v > 0.0 ? 1.0 : kLeakySlope; }
double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

DTensor to_double(const Tensor& t) {
    DTensor out(t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<double>(t[i]);
    return out;
}

// 0/1 mask of the 0.8-radius ball, shared by encode and its backward pass.
const DTensor& scene_mask01(std::size_t n) {
    static const DTensor mask = [] {
        DTensor ones({1, 8, 8, 8}, 1.0);
        return spherical_mask(ones, kSafeMaskRadius);
    }();
    if (n != 8) throw std::invalid_argument("toy model: scene grid is fixed at 8");
    return mask;
}

struct EncodeCache {
    DTensor x;       // 3 x I x I
    DTensor pre1;    // F x I x I
    DTensor pooled;  // F x P x P
    DTensor z;       // C x N x N x N (masked)
};

struct DecodeCache {
    DTensor z;     // decoder input, C x N x N x N
    DTensor pre3;  // F x P x P
    DTensor out;   // 3 x I x I
};

void encode_impl(const ToyParams& p, const Tensor& x, EncodeCache& c) {
    const auto& d = p.dims;
    if (x.ndim() != 3 || x.dim(0) != 3 || x.dim(1) != d.img || x.dim(2) != d.img)
        throw std::invalid_argument("encode: expected a 3x16x16 image");
    const std::size_t I = d.img, P = I / 2, F = d.feat, K = d.scene_c * d.scene_n;
    c.x = to_double(x);
    c.pre1 = DTensor({F, I, I});
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < I; ++j) {
                double acc = p.b1[f];
                for (std::size_t ch = 0; ch < 3; ++ch)
                    acc += p.W1[f * 3 + ch] * c.x.at3(ch, i, j);
                c.pre1.at3(f, i, j) = acc;
            }
    c.pooled = DTensor({F, P, P});
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j)
                c.pooled.at3(f, i, j) =
                    0.25 * (lrelu(c.pre1.at3(f, 2 * i, 2 * j)) +
                            lrelu(c.pre1.at3(f, 2 * i, 2 * j + 1)) +
                            lrelu(c.pre1.at3(f, 2 * i + 1, 2 * j)) +
                            lrelu(c.pre1.at3(f, 2 * i + 1, 2 * j + 1)));
    const DTensor& mask = scene_mask01(d.scene_n);
    c.z = DTensor({d.scene_c, d.scene_n, d.scene_n, d.scene_n});
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t cs = k / d.scene_n, dd = k % d.scene_n;
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j) {
                double acc = p.b2[k];
                for (std::size_t f = 0; f < F; ++f)
                    acc += p.W2[k * F + f] * c.pooled.at3(f, i, j);
                c.z.at4(cs, dd, i, j) = acc * mask.at4(0, dd, i, j);
            }
    }
}

// Accumulates enc_mix/enc_proj gradients from d(loss)/d(z).
void encode_backward(const ToyParams& p, const EncodeCache& c, const DTensor& dz,
                     ToyGrads& g) {
    const auto& d = p.dims;
    const std::size_t I = d.img, P = I / 2, F = d.feat, K = d.scene_c * d.scene_n;
    const DTensor& mask = scene_mask01(d.scene_n);
    DTensor dpooled({F, P, P});
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t cs = k / d.scene_n, dd = k % d.scene_n;
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j) {
                const double go = dz.at4(cs, dd, i, j) * mask.at4(0, dd, i, j);
                if (go == 0.0) continue;
                g.b2[k] += go;
                for (std::size_t f = 0; f < F; ++f) {
                    g.W2[k * F + f] += go * c.pooled.at3(f, i, j);
                    dpooled.at3(f, i, j) += p.W2[k * F + f] * go;
                }
            }
    }
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < I; ++j) {
                const double dp = 0.25 * dpooled.at3(f, i / 2, j / 2) *
                                  lrelu_grad(c.pre1.at3(f, i, j));
                if (dp == 0.0) continue;
                g.b1[f] += dp;
                for (std::size_t ch = 0; ch < 3; ++ch)
                    g.W1[f * 3 + ch] += dp * c.x.at3(ch, i, j);
            }
}

void decode_impl(const ToyParams& p, const DTensor& z, DecodeCache& c) {
    const auto& d = p.dims;
    if (z.ndim() != 4 || z.dim(0) != d.scene_c || z.dim(1) != d.scene_n ||
        z.dim(2) != d.scene_n || z.dim(3) != d.scene_n)
        throw std::invalid_argument("decode: expected a 4x8x8x8 scene");
    const std::size_t I = d.img, P = I / 2, F = d.feat, K = d.scene_c * d.scene_n;
    c.z = z;
    c.pre3 = DTensor({F, P, P});
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j) {
                double acc = p.b3[f];
                for (std::size_t k = 0; k < K; ++k)
                    acc += p.W3[f * K + k] * z.at4(k / d.scene_n, k % d.scene_n, i, j);
                c.pre3.at3(f, i, j) = acc;
            }
    c.out = DTensor({3, I, I});
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < I; ++j) {
                double acc = p.b4[ch];
                for (std::size_t f = 0; f < F; ++f)
                    acc += p.W4[ch * F + f] * lrelu(c.pre3.at3(f, i / 2, j / 2));
                c.out.at3(ch, i, j) = 1.0 / (1.0 + std::exp(-acc));
            }
}

// Accumulates dec_proj/dec_mix gradients and d(loss)/d(decoder input).
void decode_backward(const ToyParams& p, const DecodeCache& c, const DTensor& dout,
                     ToyGrads& g, DTensor& dz) {
    const auto& d = p.dims;
    const std::size_t I = d.img, P = I / 2, F = d.feat, K = d.scene_c * d.scene_n;
    DTensor da3({F, P, P});
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < I; ++j) {
                const double o = c.out.at3(ch, i, j);
                const double dpre4 = dout.at3(ch, i, j) * o * (1.0 - o);
                if (dpre4 == 0.0) continue;
                g.b4[ch] += dpre4;
                for (std::size_t f = 0; f < F; ++f) {
                    g.W4[ch * F + f] += dpre4 * lrelu(c.pre3.at3(f, i / 2, j / 2));
                    da3.at3(f, i / 2, j / 2) += p.W4[ch * F + f] * dpre4;
                }
            }
    dz = DTensor(c.z.shape());
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j) {
                const double dpre3 = da3.at3(f, i, j) * lrelu_grad(c.pre3.at3(f, i, j));
                if (dpre3 == 0.0) continue;
                g.b3[f] += dpre3;
                for (std::size_t k = 0; k < K; ++k) {
                    const std::size_t cs = k / d.scene_n, dd = k % d.scene_n;
                    g.W3[f * K + k] += dpre3 * c.z.at4(cs, dd, i, j);
                    dz.at4(cs, dd, i, j) += p.W3[f * K + k] * dpre3;
                }
            }
}

double rms_of(const DTensor& r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * r[i];
    return std::sqrt(acc / static_cast<double>(r.size()));
}

DTensor diff(const DTensor& a, const DTensor& b) {
    DTensor r(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

std::array<DTensor*, 8> tensor_list(ToyParams& p) {
    return {&p.W1, &p.b1, &p.W2, &p.b2, &p.W3, &p.b3, &p.W4, &p.b4};
}
std::array<DTensor*, 8> tensor_list(ToyGrads& g) {
    return {&g.W1, &g.b1, &g.W2, &g.b2, &g.W3, &g.b3, &g.W4, &g.b4};
}
std::array<const DTensor*, 8> tensor_list(const ToyGrads& g) {
    return {&g.W1, &g.b1, &g.W2, &g.b2, &g.W3, &g.b3, &g.W4, &g.b4};
}

}  // namespace

ToyParams init_params(std::uint64_t seed) {
    const ToyDims d;
    const std::size_t F = d.feat, K = d.scene_c * d.scene_n;
    SplitMix64 rng(seed);
    auto uniform_init = [&](std::vector<std::size_t> shape, std::size_t fan_in,
                            std::size_t fan_out) {
        DTensor t(std::move(shape));
        const double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = (2.0 * rng.uniform() - 1.0) * lim;
        return t;
    };
    ToyParams p;
    p.dims = d;
    p.W1 = uniform_init({F, 3}, 3, F);
    p.W2 = uniform_init({K, F}, F, K);
    p.W3 = uniform_init({F, K}, K, F);
    p.W4 = uniform_init({3, F}, F, 3);
    p.b1 = DTensor({F});
    p.b2 = DTensor({K});
    p.b3 = DTensor({F});
    p.b4 = DTensor({3});
    return p;
}

ToyGrads zero_grads(const ToyDims& d) {
    const std::size_t F = d.feat, K = d.scene_c * d.scene_n;
    return {DTensor({F, 3}), DTensor({F}), DTensor({K, F}), DTensor({K}),
            DTensor({F, K}), DTensor({F}), DTensor({3, F}), DTensor({3})};
}

DTensor encode(const ToyParams& p, const Tensor& x) {
    EncodeCache c;
    encode_impl(p, x, c);
    return std::move(c.z);
}

DTensor decode(const ToyParams& p, const DTensor& z) {
    DecodeCache c;
    decode_impl(p, z, c);
    return std::move(c.out);
}

Tensor to_image(const DTensor& t) {
    Tensor out(t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<float>(t[i]);
    return out;
}

namespace {

struct PairForward {
    EncodeCache c1, c2;
    DecodeCache d1, d2;
    std::vector<std::uint32_t> fwd, inv;
    DTensor z1r, z2r, r1, r2;
    double rms1 = 0.0, rms2 = 0.0;
    DTensor x1d, x2d;
    LossBreakdown loss{};
};

void pair_forward(const ToyParams& p, const TrainSample& s, double scene_weight,
                  PairForward& f) {
    encode_impl(p, s.x1, f.c1);
    encode_impl(p, s.x2, f.c2);
    const std::size_t n = p.dims.scene_n;
    f.fwd = rot_index_map_3d(n, s.pose.d_elev, s.pose.d_azim);
    f.inv = rot_index_map_3d_inverse(n, s.pose.d_elev, s.pose.d_azim);
    f.z1r = apply_index_map(f.c1.z, f.fwd);
    f.z2r = apply_index_map(f.c2.z, f.inv);
    decode_impl(p, f.z1r, f.d1);
    decode_impl(p, f.z2r, f.d2);
    f.x1d = to_double(s.x1);
    f.x2d = to_double(s.x2);
    const double l_render = l1_mean(f.x2d, f.d1.out) + l1_mean(f.x1d, f.d2.out);
    f.r1 = diff(f.c2.z, f.z1r);  // f(x2) - z1r
    f.r2 = diff(f.c1.z, f.z2r);  // f(x1) - z2r
    f.rms1 = rms_of(f.r1);
    f.rms2 = rms_of(f.r2);
    f.loss = total_loss(l_render, f.rms1 + f.rms2, scene_weight);
}

}  // namespace

LossBreakdown pair_loss(const ToyParams& p, const TrainSample& s, double scene_weight) {
    PairForward f;
    pair_forward(p, s, scene_weight, f);
    return f.loss;
}

PairLossResult pair_loss_and_grad(const ToyParams& p, const TrainSample& s,
                                  double scene_weight) {
    PairForward f;
    pair_forward(p, s, scene_weight, f);
    ToyGrads g = zero_grads(p.dims);

    const double inv_img = 1.0 / static_cast<double>(f.d1.out.size());
    DTensor dout1(f.d1.out.shape()), dout2(f.d2.out.shape());
    for (std::size_t i = 0; i < dout1.size(); ++i) {
        dout1[i] = sign(f.d1.out[i] - f.x2d[i]) * inv_img;
        dout2[i] = sign(f.d2.out[i] - f.x1d[i]) * inv_img;
    }
    DTensor dz1r, dz2r;
    decode_backward(p, f.d1, dout1, g, dz1r);
    decode_backward(p, f.d2, dout2, g, dz2r);

    // scene-loss terms; the sqrt gradient is defined as 0 at rms == 0,
    // which sub-resolution pairs (x1 == x2 bitwise) do reach
    const double nz = static_cast<double>(f.r1.size());
    if (f.rms1 > 0.0) {
        const double k1 = scene_weight / (nz * f.rms1);
        for (std::size_t i = 0; i < dz1r.size(); ++i) dz1r[i] -= k1 * f.r1[i];
    }
    if (f.rms2 > 0.0) {
        const double k2 = scene_weight / (nz * f.rms2);
        for (std::size_t i = 0; i < dz2r.size(); ++i) dz2r[i] -= k2 * f.r2[i];
    }

    // rotation layers are permutations: the adjoint applies the inverse map
    DTensor dz1 = apply_index_map(dz1r, f.inv);
    DTensor dz2 = apply_index_map(dz2r, f.fwd);
    if (f.rms2 > 0.0) {
        const double k2 = scene_weight / (nz * f.rms2);
        for (std::size_t i = 0; i < dz1.size(); ++i) dz1[i] += k2 * f.r2[i];
    }
    if (f.rms1 > 0.0) {
        const double k1 = scene_weight / (nz * f.rms1);
        for (std::size_t i = 0; i < dz2.size(); ++i) dz2[i] += k1 * f.r1[i];
    }
    encode_backward(p, f.c1, dz1, g);
    encode_backward(p, f.c2, dz2, g);
    return {f.loss, std::move(g)};
}

AdamState make_adam(const ToyDims& dims, double lr) {
    AdamState s{zero_grads(dims), zero_grads(dims)};
    s.lr = lr;
    return s;
}

void adam_step(AdamState& state, ToyParams& params, const ToyGrads& grads) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    auto ps = tensor_list(params);
    auto ms = tensor_list(state.m);
    auto vs = tensor_list(state.v);
    auto gs = tensor_list(grads);
    for (std::size_t t = 0; t < ps.size(); ++t) {
        DTensor& p = *ps[t];
        DTensor& m = *ms[t];
        DTensor& v = *vs[t];
        const DTensor& g = *gs[t];
        if (!p.same_shape(g)) throw std::invalid_argument("adam_step: gradient shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

TrainResult train(const std::vector<TrainSample>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    TrainResult r{init_params(cfg.seed), {}};
    AdamState adam = make_adam(r.params.dims, cfg.lr);
    SplitMix64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    const TrainSample& held_out = dataset.back();
    const std::size_t pool = dataset.size() > 1 ? dataset.size() - 1 : 1;
    r.log.reserve(cfg.steps);
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        const std::size_t idx = static_cast<std::size_t>(rng.next() % pool);
        PairLossResult res = pair_loss_and_grad(r.params, dataset[idx], cfg.scene_weight);
        adam_step(adam, r.params, res.grads);
        const DTensor z1 = encode(r.params, held_out.x1);
        const DTensor z1r = apply_index_map(
            z1, rot_index_map_3d(r.params.dims.scene_n, held_out.pose.d_elev,
                                 held_out.pose.d_azim));
        const double p = psnr(to_image(decode(r.params, z1r)), held_out.x2);
        r.log.push_back({step, res.loss.l_render, res.loss.l_scene, res.loss.total, p});
    }
    return r;
}

void save_checkpoint(const ToyParams& p, const std::string& prefix) {
    ToyParams copy = p;
    auto ts = tensor_list(copy);
    std::size_t total = 0;
    for (auto* t : ts) total += t->size();
    DTensor flat({total});
    std::size_t off = 0;
    for (auto* t : ts)
        for (std::size_t i = 0; i < t->size(); ++i) flat[off++] = (*t)[i];
    tsr_write(flat, prefix + ".tsr");
    std::ofstream f(prefix + ".csv", std::ios::trunc);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open '" + prefix + ".csv'");
    f << "key,value\n"
      << "feat," << p.dims.feat << "\n"
      << "img," << p.dims.img << "\n"
      << "scene_c," << p.dims.scene_c << "\n"
      << "scene_n," << p.dims.scene_n << "\n";
}

ToyParams load_checkpoint(const std::string& prefix) {
    std::ifstream f(prefix + ".csv");
    if (!f) throw std::runtime_error("load_checkpoint: cannot open '" + prefix + ".csv'");
    std::string line;
    std::getline(f, line);
    if (line != "key,value")
        throw std::runtime_error("load_checkpoint: malformed '" + prefix + ".csv'");
    ToyDims d;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw std::runtime_error("load_checkpoint: malformed '" + prefix + ".csv'");
        const std::size_t v = static_cast<std::size_t>(std::stoul(cells[1]));
        if (cells[0] == "feat") d.feat = v;
        else if (cells[0] == "img") d.img = v;
        else if (cells[0] == "scene_c") d.scene_c = v;
        else if (cells[0] == "scene_n") d.scene_n = v;
        else throw std::runtime_error("load_checkpoint: unknown key '" + cells[0] + "'");
    }
    ToyParams p = init_params(0);
    if (d.feat != p.dims.feat || d.img != p.dims.img || d.scene_c != p.dims.scene_c ||
        d.scene_n != p.dims.scene_n)
        throw std::runtime_error("load_checkpoint: unsupported dimensions");
    const DTensor flat = tsr_read_f64(prefix + ".tsr");
    auto ts = tensor_list(p);
    std::size_t total = 0;
    for (auto* t : ts) total += t->size();
    if (flat.ndim() != 1 || flat.size() != total)
        throw std::runtime_error("load_checkpoint: parameter count mismatch");
    std::size_t off = 0;
    for (auto* t : ts)
        for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = flat[off++];
    return p;
}

}  // namespace voxrot
