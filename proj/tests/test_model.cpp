#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "voxrot/model.hpp"
#include "voxrot/shear.hpp"
#include "voxrot/synth.hpp"

#include "fd_check.hpp"

using namespace voxrot;
namespace fs = std::filesystem;

namespace {

Tensor random_image(std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t({3, 16, 16});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform());
    return t;
}

std::vector<TrainSample> tiny_dataset(std::uint64_t seed, std::size_t scenes = 4,
                                      std::size_t pairs = 2) {
    std::vector<TrainSample> out;
    for (std::size_t i = 0; i < scenes; ++i) {
        const Tensor scene = gen_scene(SceneSpec{8, 3, seed ^ i});
        SplitMix64 rng(~(seed ^ i));
        for (std::size_t j = 0; j < pairs; ++j) out.push_back(make_pair(scene, rng));
    }
    return out;
}

// first dataset pair whose pose is not quantized to the identity permutation
const TrainSample& nontrivial_pair(const std::vector<TrainSample>& data) {
    for (const auto& s : data) {
        const auto map = rot_index_map_3d(8, s.pose.d_elev, s.pose.d_azim);
        for (std::size_t i = 0; i < map.size(); ++i)
            if (map[i] != i) return s;
    }
    REQUIRE(false);
    return data.front();
}

struct FlatGrads {
    std::vector<double> v;
    void add(const DTensor& t) { v.insert(v.end(), t.vec().begin(), t.vec().end()); }
};

std::vector<double> flatten(const ToyGrads& g) {
    FlatGrads f;
    f.add(g.W1); f.add(g.b1); f.add(g.W2); f.add(g.b2);
    f.add(g.W3); f.add(g.b3); f.add(g.W4); f.add(g.b4);
    return f.v;
}

std::vector<DTensor*> param_ptrs(ToyParams& p) {
    return {&p.W1, &p.b1, &p.W2, &p.b2, &p.W3, &p.b3, &p.W4, &p.b4};
}

}  // namespace

TEST_CASE("encode shape, zero input, homogeneity") {
    const ToyParams p = init_params(1);
    Tensor zero({3, 16, 16});
    const DTensor z0 = encode(p, zero);
    CHECK(z0.shape() == std::vector<std::size_t>{4, 8, 8, 8});
    for (std::size_t i = 0; i < z0.size(); ++i) CHECK(z0[i] == 0.0);  // biases are zero

    const Tensor x = random_image(2);
    Tensor x2(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = 2.0f * x[i];
    const DTensor zx = encode(p, x);
    const DTensor zx2 = encode(p, x2);
    for (std::size_t i = 0; i < zx.size(); ++i)
        CHECK(zx2[i] == doctest::Approx(2.0 * zx[i]).epsilon(1e-12));

    Tensor wrong({3, 8, 8});
    CHECK_THROWS_AS((void)encode(p, wrong), std::invalid_argument);
}

TEST_CASE("encoded scenes are masked") {
    const ToyParams p = init_params(3);
    const DTensor z = encode(p, random_image(4));
    const double c = 3.5, R = 0.8 * c;
    for (std::size_t d = 0; d < 8; ++d)
        for (std::size_t h = 0; h < 8; ++h)
            for (std::size_t w = 0; w < 8; ++w)
                if (std::sqrt((d - c) * (d - c) + (h - c) * (h - c) + (w - c) * (w - c)) > R)
                    for (std::size_t ch = 0; ch < 4; ++ch)
                        CHECK(z.at4(ch, d, h, w) == 0.0);
}

TEST_CASE("decode shape, range, zero case") {
    const ToyParams p = init_params(5);
    const DTensor z = encode(p, random_image(6));
    const DTensor img = decode(p, z);
    CHECK(img.shape() == std::vector<std::size_t>{3, 16, 16});
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(img[i] > 0.0);
        CHECK(img[i] < 1.0);
    }
    DTensor zero({4, 8, 8, 8});
    const DTensor half = decode(p, zero);
    // dec_proj and dec_mix biases are zero, so a zero scene gives sigmoid(0)
    for (std::size_t i = 0; i < half.size(); ++i)
        CHECK(half[i] == doctest::Approx(0.5).epsilon(1e-15));
    DTensor wrong({4, 8, 8, 4});
    CHECK_THROWS_AS((void)decode(p, wrong), std::invalid_argument);
}

TEST_CASE("perfect reconstruction gives zero loss and zero gradients") {
    // all-zero parameters decode any scene to the constant 0.5 image;
    // a pair of constant 0.5 targets is then fit exactly
    ToyParams p = init_params(0);
    for (auto* t : param_ptrs(p))
        for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = 0.0;
    Tensor half({3, 16, 16}, 0.5f);
    const TrainSample s{half, half, {25.0, -10.0}};
    const PairLossResult r = pair_loss_and_grad(p, s, 0.0);
    CHECK(r.loss.total == 0.0);
    for (const double g : flatten(r.grads)) CHECK(g == 0.0);
}

TEST_CASE("rotation layer adjoint is the inverse permutation") {
    const auto fwd = rot_index_map_3d(8, -33.0, 121.0);
    const auto inv = rot_index_map_3d_inverse(8, -33.0, 121.0);
    DTensor onehot({1, 8, 8, 8});
    onehot[137] = 1.0;
    const DTensor pushed = apply_index_map(onehot, fwd);
    const DTensor back = apply_index_map(pushed, inv);
    CHECK(back == onehot);
    // adjoint of gather-by-fwd is gather-by-inv: one-hot lands at the
    // inverse-permuted site
    std::size_t hot = 0;
    for (std::size_t i = 0; i < pushed.size(); ++i)
        if (pushed[i] == 1.0) hot = i;
    CHECK(fwd[hot] == 137);
}

TEST_CASE("gradients match central finite differences") {
    const auto data = tiny_dataset(11);
    const TrainSample& s = nontrivial_pair(data);
    const auto seeds = testutil::fd_clean_seeds(s, 1);
    REQUIRE(!seeds.empty());
    const double h = 1e-5;
    for (const double w : {1e-4, 0.3}) {
        ToyParams p = testutil::fd_params(seeds[0]);
        const std::vector<double> analytic = flatten(pair_loss_and_grad(p, s, w).grads);
        auto ptrs = param_ptrs(p);
        std::size_t flat = 0;
        for (auto* t : ptrs) {
            double diff2 = 0.0, norm2 = 0.0;
            for (std::size_t i = 0; i < t->size(); ++i, ++flat) {
                const double keep = (*t)[i];
                (*t)[i] = keep + h;
                const double up = pair_loss(p, s, w).total;
                (*t)[i] = keep - h;
                const double dn = pair_loss(p, s, w).total;
                (*t)[i] = keep;
                const double fd = (up - dn) / (2.0 * h);
                diff2 += (analytic[flat] - fd) * (analytic[flat] - fd);
                norm2 += fd * fd;
            }
            const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12);
            CHECK(rel < 1e-6);
        }
    }
}

TEST_CASE("adam first-step magnitude and zero-gradient fixpoint") {
    ToyParams p = init_params(9);
    const ToyParams before = p;
    AdamState st = make_adam(p.dims, 2e-4);
    ToyGrads g = zero_grads(p.dims);
    for (std::size_t i = 0; i < g.W1.size(); ++i)
        g.W1[i] = (i % 2 ? 0.5 : -2.0);  // |g| >> eps
    adam_step(st, p, g);
    CHECK(st.step == 1);
    for (std::size_t i = 0; i < g.W1.size(); ++i) {
        const double delta = std::abs(p.W1[i] - before.W1[i]);
        CHECK(delta >= 0.9999 * st.lr);
        CHECK(delta <= st.lr);
    }

    ToyParams q = init_params(10);
    const ToyParams qbefore = q;
    AdamState st2 = make_adam(q.dims, 1e-3);
    const ToyGrads zeros = zero_grads(q.dims);
    for (int it = 0; it < 5; ++it) adam_step(st2, q, zeros);
    CHECK(st2.step == 5);
    for (std::size_t i = 0; i < q.W1.size(); ++i) CHECK(q.W1[i] == qbefore.W1[i]);
}

TEST_CASE("pair loss is symmetric under view swap with single-axis poses") {
    const Tensor scene = gen_scene(SceneSpec{8, 3, 15});
    const ToyParams p = init_params(4);
    for (const RelativePose pose : {RelativePose{47.0, 0.0}, RelativePose{0.0, -33.0}}) {
        const Tensor z1 = shear_rotate3d(scene, 10.0, 80.0);
        const Tensor x1 = render_view(z1);
        const Tensor x2 = render_view(rotate_scene(z1, pose, RotMethod::shear));
        const TrainSample fwd{x1, x2, pose};
        const TrainSample swapped{x2, x1, {-pose.d_azim, -pose.d_elev}};
        const LossBreakdown a = pair_loss(p, fwd, 1e-4);
        const LossBreakdown b = pair_loss(p, swapped, 1e-4);
        CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
    }
}

TEST_CASE("train determinism and step count") {
    const auto data = tiny_dataset(21);
    TrainConfig cfg;
    cfg.steps = 0;
    cfg.seed = 3;
    const TrainResult untouched = train(data, cfg);
    const ToyParams fresh = init_params(3);
    CHECK(untouched.params.W1 == fresh.W1);
    CHECK(untouched.params.b4 == fresh.b4);
    CHECK(untouched.log.empty());

    cfg.steps = 25;
    const TrainResult a = train(data, cfg);
    const TrainResult b = train(data, cfg);
    CHECK(a.params.W1 == b.params.W1);
    CHECK(a.params.W3 == b.params.W3);
    CHECK(a.log.size() == 25);
    CHECK(a.log.back().step == 25);
    for (std::size_t i = 0; i < a.log.size(); ++i)
        CHECK(a.log[i].total == b.log[i].total);

    CHECK_THROWS_AS((void)train({}, cfg), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is bitwise") {
    const auto data = tiny_dataset(31);
    TrainConfig cfg;
    cfg.steps = 10;
    const TrainResult r = train(data, cfg);
    const std::string prefix = (fs::temp_directory_path() / "voxrot_ckpt").string();
    save_checkpoint(r.params, prefix);
    const ToyParams back = load_checkpoint(prefix);
    CHECK(back.W1 == r.params.W1);
    CHECK(back.b1 == r.params.b1);
    CHECK(back.W2 == r.params.W2);
    CHECK(back.b2 == r.params.b2);
    CHECK(back.W3 == r.params.W3);
    CHECK(back.b3 == r.params.b3);
    CHECK(back.W4 == r.params.W4);
    CHECK(back.b4 == r.params.b4);
}

TEST_CASE("initial loss is finite and positive") {
    const auto data = tiny_dataset(41);
    const ToyParams p = init_params(0);
    double acc = 0.0;
    for (const auto& s : data) acc += pair_loss(p, s, 1e-4).total;
    CHECK(std::isfinite(acc));
    CHECK(acc > 0.0);
}
