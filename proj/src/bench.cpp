#include "voxrot/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "voxrot/csv.hpp"
#include "voxrot/resample.hpp"
#include "voxrot/shear.hpp"

namespace voxrot {

namespace {

void smooth_binomial5(std::vector<double>& v, std::size_t n) {
    static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    std::vector<double> tmp(n * n);
    auto clampi = [&](long i) { return std::clamp(i, 0L, static_cast<long>(n) - 1); };
    for (std::size_t i = 0; i < n; ++i)  // vertical pass
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t)
                acc += k[t + 2] * v[static_cast<std::size_t>(clampi(static_cast<long>(i) + t)) * n + j];
            tmp[i * n + j] = acc;
        }
    for (std::size_t i = 0; i < n; ++i)  // horizontal pass
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t)
                acc += k[t + 2] * tmp[i * n + static_cast<std::size_t>(clampi(static_cast<long>(j) + t))];
            v[i * n + j] = acc;
        }
}

}  // namespace

Tensor gen_bandlimited_image(std::size_t n, std::uint64_t seed) {
    if (n < 8) throw std::invalid_argument("gen_bandlimited_image: n must be >= 8");
    SplitMix64 rng(seed);
    std::vector<double> chans(3 * n * n);
    for (double& v : chans) v = rng.uniform();
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> plane(chans.begin() + static_cast<long>(c * n * n),
                                  chans.begin() + static_cast<long>((c + 1) * n * n));
        smooth_binomial5(plane, n);
        smooth_binomial5(plane, n);
        std::copy(plane.begin(), plane.end(), chans.begin() + static_cast<long>(c * n * n));
    }
    const auto [lo, hi] = std::minmax_element(chans.begin(), chans.end());
    const double span = *hi - *lo;
    Tensor img({3, n, n});
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>((chans[i] - *lo) / span);
    return img;
}

std::vector<AliasingRecord> bench_aliasing(const std::vector<Tensor>& images,
                                           double angle_step_deg) {
    if (images.empty()) throw std::invalid_argument("bench_aliasing: need at least one image");
    if (!(angle_step_deg > 0.0))
        throw std::invalid_argument("bench_aliasing: angle step must be > 0");
    for (const Tensor& im : images)
        require_square(im.shape(), "bench_aliasing");
    std::vector<double> angles;
    for (double a = 0.0; a < 360.0; a += angle_step_deg) angles.push_back(a);

    std::vector<AliasingRecord> out;
    for (const char* method : {"bilinear", "shear"}) {
        const bool shear = std::string(method) == "shear";
        for (double theta : angles) {
            std::vector<double> mean_err(images.size()), max_err(images.size());
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < images.size(); ++i) {
                Tensor rt;
                if (shear)
                    rt = shear_rotate2d(shear_rotate2d(images[i], theta), -theta);
                else
                    rt = resample_rotate2d(resample_rotate2d(images[i], theta), -theta);
                double mx = 0.0;
                mean_err[i] = l1_mean(rt, images[i]);
                for (std::size_t e = 0; e < rt.size(); ++e)
                    mx = std::max(mx, std::abs(static_cast<double>(rt[e]) -
                                               static_cast<double>(images[i][e])));
                max_err[i] = mx;
            }
            double mean = 0.0, mx = 0.0;  // fixed image-index order
            for (std::size_t i = 0; i < images.size(); ++i) {
                mean += mean_err[i];
                mx = std::max(mx, max_err[i]);
            }
            out.push_back({theta, method, mean / static_cast<double>(images.size()), mx,
                           images.size()});
        }
    }
    return out;
}

void write_aliasing_csv(const std::vector<AliasingRecord>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_aliasing_csv: cannot open '" + path + "'");
    f << "angle_deg,method,mean_abs_err,max_abs_err,num_images\n";
    for (const auto& r : rows)
        f << format_double(r.angle_deg) << "," << r.method << ","
          << format_double(r.mean_abs_err) << "," << format_double(r.max_abs_err) << ","
          << r.num_images << "\n";
}

std::vector<ResolutionRow> angle_resolution_table(const std::vector<std::size_t>& sizes,
                                                  double step_deg) {
    std::vector<ResolutionRow> rows;
    for (std::size_t n : sizes) {
        const auto bf = smallest_effective_angle_bruteforce(n, step_deg);
        rows.push_back({n, angle_resolution(n),
                        bf ? *bf : std::numeric_limits<double>::quiet_NaN()});
    }
    return rows;
}

void write_resolution_csv(const std::vector<ResolutionRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_resolution_csv: cannot open '" + path + "'");
    f << "n,formula_deg,bruteforce_deg\n";
    for (const auto& r : rows) {
        f << r.n << "," << format_double(r.formula_deg) << ",";
        if (std::isnan(r.bruteforce_deg)) f << "no_change";
        else f << format_double(r.bruteforce_deg);
        f << "\n";
    }
}

EvalSummary eval_dataset(const ToyParams& params, const std::vector<TrainSample>& data) {
    if (data.empty()) throw std::invalid_argument("eval_dataset: empty dataset");
    double psnr_acc = 0.0, gap_acc = 0.0;
    for (const TrainSample& s : data) {
        const DTensor z1 = encode(params, s.x1);
        const DTensor z1r = apply_index_map(
            z1, rot_index_map_3d(params.dims.scene_n, s.pose.d_elev, s.pose.d_azim));
        psnr_acc += psnr(to_image(decode(params, z1r)), s.x2);
        const Encoder f = [&](const Tensor& img) { return to_image(encode(params, img)); };
        const ImageRotator oracle = [&](const Tensor&, const RelativePose&) { return s.x2; };
        gap_acc += equivariance_gap(f, s.x1, s.pose, oracle);
    }
    const double n = static_cast<double>(data.size());
    return {data.size(), psnr_acc / n, gap_acc / n};
}

void write_eval_csv(const EvalSummary& s, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_eval_csv: cannot open '" + path + "'");
    f << "pairs,mean_psnr_db,mean_equiv_gap\n"
      << s.pairs << "," << format_double(s.mean_psnr_db) << ","
      << format_double(s.mean_equiv_gap) << "\n";
}

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_train_log_csv: cannot open '" + path + "'");
    f << "step,l_render,l_scene,total,psnr\n";
    for (const auto& r : log)
        f << r.step << "," << format_double(r.l_render) << "," << format_double(r.l_scene)
          << "," << format_double(r.total) << "," << format_double(r.psnr_db) << "\n";
}

}  // namespace voxrot
