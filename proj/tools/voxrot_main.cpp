#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "voxrot/bench.hpp"
#include "voxrot/csv.hpp"
#include "voxrot/io.hpp"
#include "voxrot/model.hpp"
#include "voxrot/resample.hpp"
#include "voxrot/shear.hpp"
#include "voxrot/synth.hpp"

namespace fs = std::filesystem;
using namespace voxrot;

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::vector<Tensor> load_image_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string p = e.path().string();
        if (has_suffix(p, ".ppm") || has_suffix(p, ".pgm")) paths.push_back(p);
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty())
        throw std::runtime_error("no .ppm/.pgm images found in '" + dir + "'");
    std::vector<Tensor> images;
    for (const auto& p : paths) {
        Tensor img = ppm_read(p);
        if (img.dim(1) != img.dim(2))
            throw std::runtime_error("'" + p + "' is not square");
        images.push_back(std::move(img));
    }
    return images;
}

int cmd_rotate(const std::string& in, double theta, double phi, const std::string& method,
               const std::string& out) {
    const bool shear = method == "shear";
    if (!shear && method != "trilinear")
        throw std::runtime_error("method must be 'shear' or 'trilinear'");
    const bool ppm_in = has_suffix(in, ".ppm") || has_suffix(in, ".pgm");
    AnyTensor t = ppm_in ? AnyTensor(ppm_read(in)) : tsr_read(in);

    auto describe = [](const char* name, double angle) {
        const AngleDecomposition d = decompose_angle(angle);
        std::printf("%s %s = %s coarse + %s shear\n", name, format_double(angle).c_str(),
                    format_double(d.coarse).c_str(), format_double(d.small).c_str());
    };

    AnyTensor result = std::visit(
        [&](const auto& tensor) -> AnyTensor {
            using T = std::decay_t<decltype(tensor)>;
            if (tensor.ndim() == 3) {
                if (phi != 0.0)
                    throw std::runtime_error("phi requires a 4-D cubic scene input");
                describe("theta", theta);
                if (shear) return shear_rotate2d(tensor, theta);
                if constexpr (std::is_same_v<T, Tensor>)
                    return resample_rotate2d(tensor, theta);
                else
                    throw std::runtime_error("trilinear path expects 32-bit tensors");
            } else if (tensor.ndim() == 4) {
                describe("theta", theta);
                describe("phi", phi);
                if (shear) return shear_rotate3d(tensor, theta, phi);
                if constexpr (std::is_same_v<T, Tensor>)
                    return resample_rotate3d(tensor, rotmat3_from_elev_azim(theta, phi));
                else
                    throw std::runtime_error("trilinear path expects 32-bit tensors");
            }
            throw std::runtime_error("input must be a CxNxN tensor, CxNxNxN scene, or image");
        },
        t);

    std::visit(
        [&](const auto& tensor) {
            using T = std::decay_t<decltype(tensor)>;
            if (has_suffix(out, ".ppm") || has_suffix(out, ".pgm")) {
                if constexpr (std::is_same_v<T, Tensor>) ppm_write(tensor, out);
                else throw std::runtime_error("image output requires 32-bit data");
            } else {
                tsr_write(tensor, out);
            }
        },
        result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invertible shear rotations, baseline resampling, synthetic posed-view "
                 "data and a toy equivariance-trained renderer"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a posed-pair dataset");
    std::string synth_out = "dataset";
    std::size_t scenes = 64, pairs = 8, size = 8;
    int blobs = 3;
    std::uint64_t seed = 0;
    bool export_ppm = false;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--scenes", scenes, "number of scenes");
    synth->add_option("--pairs", pairs, "pairs per scene");
    synth->add_option("--size", size, "cubic grid size (>= 8)");
    synth->add_option("--blobs", blobs, "Gaussian blobs per scene");
    synth->add_option("--seed", seed, "RNG seed");
    synth->add_flag("--ppm", export_ppm, "also export views as PPM");

    // train
    auto* train_cmd = app.add_subcommand("train", "train the toy renderer");
    std::string data_dir = "dataset", model_out = "model", log_path;
    TrainConfig cfg;
    train_cmd->add_option("--data", data_dir, "dataset directory");
    train_cmd->add_option("--steps", cfg.steps, "Adam steps");
    train_cmd->add_option("--lr", cfg.lr, "learning rate");
    train_cmd->add_option("--scene-weight", cfg.scene_weight, "scene loss weight");
    train_cmd->add_option("--seed", cfg.seed, "init/sampling seed");
    train_cmd->add_option("--out", model_out, "checkpoint prefix");
    train_cmd->add_option("--log", log_path, "training log CSV path");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string eval_data = "dataset", model_in = "model", eval_out = "eval.csv";
    eval_cmd->add_option("--data", eval_data, "dataset directory");
    eval_cmd->add_option("--model", model_in, "checkpoint prefix");
    eval_cmd->add_option("--out", eval_out, "output CSV");

    // bench-aliasing
    auto* bench = app.add_subcommand("bench-aliasing", "round-trip rotation error sweep");
    std::size_t count = 1000, bsize = 32;
    double angle_step = 1.0;
    std::string source = "synthetic", bench_out = "aliasing.csv";
    std::uint64_t bseed = 0;
    int threads = 0;
    bench->add_option("--count", count, "number of synthetic images");
    bench->add_option("--size", bsize, "image size");
    bench->add_option("--angle-step", angle_step, "sweep step in degrees");
    bench->add_option("--source", source, "'synthetic' or a directory of PPM images");
    bench->add_option("--seed", bseed, "RNG seed for synthetic images");
    bench->add_option("--out", bench_out, "output CSV");
    bench->add_option("--threads", threads, "worker threads (0 = default)");

    // table-angle-resolution
    auto* table = app.add_subcommand("table-angle-resolution",
                                     "formula vs brute-force angle resolution");
    std::vector<std::size_t> sizes = {8, 16, 32, 64};
    double step = 0.005;
    std::string table_out = "resolution.csv";
    table->add_option("--sizes", sizes, "grid sizes");
    table->add_option("--step", step, "brute-force sweep step in degrees");
    table->add_option("--out", table_out, "output CSV");

    // rotate
    auto* rot = app.add_subcommand("rotate", "rotate a tensor or image file");
    std::string rot_in, rot_out, method = "shear";
    double theta = 0.0, phi = 0.0;
    rot->add_option("--in", rot_in, "input .tsr/.ppm/.pgm")->required();
    rot->add_option("--theta", theta, "2-D angle / elevation, degrees");
    rot->add_option("--phi", phi, "azimuth, degrees (4-D scenes only)");
    rot->add_option("--method", method, "'shear' or 'trilinear'");
    rot->add_option("--out", rot_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            SceneSpec spec{size, blobs, seed};
            write_dataset(synth_out, scenes, pairs, spec, seed, export_ppm);
            std::printf("wrote %zu scenes x %zu pairs to %s\n", scenes, pairs,
                        synth_out.c_str());
        } else if (*train_cmd) {
            const auto data = load_dataset(data_dir);
            const TrainResult r = train(data, cfg);
            save_checkpoint(r.params, model_out);
            if (!log_path.empty()) write_train_log_csv(r.log, log_path);
            if (!r.log.empty())
                std::printf("step %zu: total %s, held-out psnr %s dB\n", r.log.back().step,
                            format_double(r.log.back().total).c_str(),
                            format_double(r.log.back().psnr_db).c_str());
            std::printf("checkpoint written to %s.tsr\n", model_out.c_str());
        } else if (*eval_cmd) {
            const auto data = load_dataset(eval_data);
            const EvalSummary s = eval_dataset(load_checkpoint(model_in), data);
            write_eval_csv(s, eval_out);
            std::printf("pairs %zu, mean psnr %s dB, mean equivariance gap %s\n", s.pairs,
                        format_double(s.mean_psnr_db).c_str(),
                        format_double(s.mean_equiv_gap).c_str());
        } else if (*bench) {
#ifdef _OPENMP
            if (threads > 0) omp_set_num_threads(threads);
#endif
            std::vector<Tensor> images;
            if (source == "synthetic") {
                if (count < 1) throw std::runtime_error("count must be >= 1");
                for (std::size_t i = 0; i < count; ++i)
                    images.push_back(gen_bandlimited_image(bsize, bseed + i));
            } else {
                images = load_image_dir(source);
            }
            write_aliasing_csv(bench_aliasing(images, angle_step), bench_out);
            std::printf("aliasing sweep over %zu images written to %s\n", images.size(),
                        bench_out.c_str());
        } else if (*table) {
            write_resolution_csv(angle_resolution_table(sizes, step), table_out);
            std::printf("resolution table written to %s\n", table_out.c_str());
        } else if (*rot) {
            return cmd_rotate(rot_in, theta, phi, method, rot_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
