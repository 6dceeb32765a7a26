#include "voxrot/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "voxrot/csv.hpp"
#include "voxrot/io.hpp"
#include "voxrot/shear.hpp"

namespace fs = std::filesystem;

namespace voxrot {

Tensor gen_scene(const SceneSpec& spec) {
    if (spec.n < 8) throw std::invalid_argument("gen_scene: grid size must be >= 8");
    if (spec.num_blobs < 1) throw std::invalid_argument("gen_scene: need at least one blob");
    const std::size_t n = spec.n;
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    SplitMix64 rng(spec.seed);
    Tensor z({4, n, n, n});
    for (int b = 0; b < spec.num_blobs; ++b) {
        double cen[3], sig[3], col[3];
        for (double& v : cen) v = c + 0.7 * c * (rng.uniform() - 0.5);
        if (b == 0) {
            // keep the first blob off-center so the scene is asymmetric
            const double off = std::sqrt((cen[0] - c) * (cen[0] - c) +
                                         (cen[1] - c) * (cen[1] - c) +
                                         (cen[2] - c) * (cen[2] - c));
            if (off < 0.1 * c) cen[1] += 0.15 * c;
        }
        for (double& v : sig) v = (0.08 + 0.17 * rng.uniform()) * static_cast<double>(n);
        const double opacity = 0.3 + 0.7 * rng.uniform();
        for (double& v : col) v = rng.uniform();
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t h = 0; h < n; ++h)
                for (std::size_t w = 0; w < n; ++w) {
                    const double gd = (static_cast<double>(d) - cen[0]) / sig[0];
                    const double gh = (static_cast<double>(h) - cen[1]) / sig[1];
                    const double gw = (static_cast<double>(w) - cen[2]) / sig[2];
                    const double g =
                        opacity * std::exp(-0.5 * (gd * gd + gh * gh + gw * gw));
                    z.at4(0, d, h, w) += static_cast<float>(g);
                    for (std::size_t k = 0; k < 3; ++k)
                        z.at4(1 + k, d, h, w) += static_cast<float>(g * col[k]);
                }
    }
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = std::fmin(std::fmax(z[i], 0.0f), 1.0f);
    return spherical_mask(z, kSafeMaskRadius);
}

Tensor project_ortho(const Tensor& z) {
    require_cubic_scene(z.shape(), "project_ortho");
    if (z.dim(0) != 4)
        throw std::invalid_argument("project_ortho: expected 4 channels (opacity + RGB)");
    const std::size_t n = z.dim(1);
    Tensor img({3, n, n});
#pragma omp parallel for collapse(2)
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t w = 0; w < n; ++w) {
            double acc[3] = {0.0, 0.0, 0.0};
            double transmit = 1.0;
            for (std::size_t d = 0; d < n; ++d) {
                const double a = static_cast<double>(z.at4(0, d, h, w));
                const double weight = a * transmit;
                for (std::size_t k = 0; k < 3; ++k)
                    acc[k] += static_cast<double>(z.at4(1 + k, d, h, w)) * weight;
                transmit *= 1.0 - a;
            }
            for (std::size_t k = 0; k < 3; ++k)
                img.at3(k, h, w) =
                    static_cast<float>(std::fmin(std::fmax(acc[k], 0.0), 1.0));
        }
    return img;
}

Tensor upsample_nearest(const Tensor& img, std::size_t factor) {
    if (img.ndim() != 3) throw std::invalid_argument("upsample_nearest: expected CxHxW");
    const std::size_t C = img.dim(0), H = img.dim(1), W = img.dim(2);
    Tensor out({C, H * factor, W * factor});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < H * factor; ++i)
            for (std::size_t j = 0; j < W * factor; ++j)
                out.at3(c, i, j) = img.at3(c, i / factor, j / factor);
    return out;
}

Tensor render_view(const Tensor& z) { return upsample_nearest(project_ortho(z), 2); }

TrainSample make_pair(const Tensor& masked_scene, SplitMix64& rng) {
    const double elev0 = rng.uniform(-60.0, 60.0);
    const double azim0 = rng.uniform(0.0, 360.0);
    const double d_elev = rng.uniform(-60.0, 60.0);
    const double d_azim = rng.uniform(-180.0, 180.0);
    const Tensor z1 = shear_rotate3d(masked_scene, elev0, azim0);
    const RelativePose pose{d_azim, d_elev};
    const Tensor x1 = render_view(z1);
    const Tensor x2 = render_view(rotate_scene(z1, pose, RotMethod::shear));
    return {x1, x2, pose};
}

void write_pose_csv(const std::string& path, const RelativePose& pose) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_pose_csv: cannot open '" + path + "'");
    f << "d_azim_deg,d_elev_deg\n"
      << format_double(pose.d_azim) << "," << format_double(pose.d_elev) << "\n";
}

RelativePose read_pose_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_pose_csv: cannot open '" + path + "'");
    std::string header, row;
    if (!std::getline(f, header) || header != "d_azim_deg,d_elev_deg" || !std::getline(f, row))
        throw std::runtime_error("read_pose_csv: malformed '" + path + "'");
    const auto cells = split_csv_line(row);
    if (cells.size() != 2) throw std::runtime_error("read_pose_csv: malformed '" + path + "'");
    return {parse_double(cells[0]), parse_double(cells[1])};
}

void write_dataset(const std::string& out_dir, std::size_t num_scenes,
                   std::size_t pairs_per_scene, const SceneSpec& spec,
                   std::uint64_t seed, bool export_ppm) {
    fs::create_directories(out_dir);
    std::ofstream manifest(out_dir + "/manifest.csv", std::ios::trunc);
    if (!manifest)
        throw std::runtime_error("write_dataset: cannot open manifest in '" + out_dir + "'");
    manifest << "scene,pair,d_azim_deg,d_elev_deg\n";
    for (std::size_t i = 0; i < num_scenes; ++i) {
        SceneSpec s = spec;
        s.seed = seed ^ static_cast<std::uint64_t>(i);
        const Tensor scene = gen_scene(s);
        SplitMix64 pose_rng(~s.seed);
        for (std::size_t j = 0; j < pairs_per_scene; ++j) {
            const TrainSample sample = make_pair(scene, pose_rng);
            const std::string dir =
                out_dir + "/scene_" + std::to_string(i) + "/pair_" + std::to_string(j);
            fs::create_directories(dir);
            tsr_write(sample.x1, dir + "/x1.tsr");
            tsr_write(sample.x2, dir + "/x2.tsr");
            write_pose_csv(dir + "/pose.csv", sample.pose);
            if (export_ppm) {
                ppm_write(sample.x1, dir + "/x1.ppm");
                ppm_write(sample.x2, dir + "/x2.ppm");
            }
            manifest << i << "," << j << "," << format_double(sample.pose.d_azim) << ","
                     << format_double(sample.pose.d_elev) << "\n";
        }
    }
}

std::vector<TrainSample> load_dataset(const std::string& dir) {
    std::ifstream manifest(dir + "/manifest.csv");
    if (!manifest)
        throw std::runtime_error("load_dataset: no manifest.csv in '" + dir + "'");
    std::string line;
    if (!std::getline(manifest, line) || line != "scene,pair,d_azim_deg,d_elev_deg")
        throw std::runtime_error("load_dataset: malformed manifest in '" + dir + "'");
    std::vector<TrainSample> out;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4)
            throw std::runtime_error("load_dataset: malformed manifest row '" + line + "'");
        const std::string pdir = dir + "/scene_" + cells[0] + "/pair_" + cells[1];
        TrainSample s{tsr_read_f32(pdir + "/x1.tsr"), tsr_read_f32(pdir + "/x2.tsr"),
                      {parse_double(cells[2]), parse_double(cells[3])}};
        out.push_back(std::move(s));
    }
    if (out.empty()) throw std::runtime_error("load_dataset: empty dataset in '" + dir + "'");
    return out;
}

}  // namespace voxrot
