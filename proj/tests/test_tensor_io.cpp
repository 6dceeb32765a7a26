#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "voxrot/io.hpp"
#include "voxrot/synth.hpp"
#include "voxrot/tensor.hpp"

using namespace voxrot;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

std::string read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform());
    return t;
}

}  // namespace

TEST_CASE("metrics closed forms") {
    Tensor a({1, 2, 2});
    Tensor b({1, 2, 2});
    CHECK(mse(a, b) == 0.0);
    CHECK(psnr(a, b) == 99.0);

    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.1f;
    CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));

    Tensor u = Tensor::from_data({2}, {0.0f, 1.0f});
    Tensor v = Tensor::from_data({2}, {1.0f, 0.0f});
    CHECK(l1_mean(u, v) == 1.0);
    CHECK(mse(u, v) == 1.0);
}

TEST_CASE("metrics symmetry and errors") {
    Tensor a = random_tensor({3, 5, 4}, 7);
    Tensor b = random_tensor({3, 5, 4}, 8);
    CHECK(mse(a, b) == mse(b, a));
    CHECK(l1_mean(a, b) == l1_mean(b, a));
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(mse(a, b) >= 0.0);
    CHECK(mse(a, a) == 0.0);
    Tensor c({3, 4, 5});
    CHECK_THROWS_AS((void)mse(a, c), std::invalid_argument);
    CHECK_THROWS_AS((void)l1_mean(a, c), std::invalid_argument);
}

TEST_CASE("tsr round trip is bitwise exact over random shapes") {
    SplitMix64 rng(99);
    for (int it = 0; it < 20; ++it) {
        std::vector<std::size_t> shape;
        const int nd = 1 + static_cast<int>(rng.next() % 4);
        for (int d = 0; d < nd; ++d) shape.push_back(1 + rng.next() % 6);
        Tensor t(shape);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = static_cast<float>(rng.uniform() * 2000.0 - 1000.0);
        const std::string path = tmp_path("rt.tsr");
        tsr_write(t, path);
        CHECK(tsr_read_f32(path) == t);

        DTensor d(shape);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.uniform() * 2e9 - 1e9;
        tsr_write(d, path);
        CHECK(tsr_read_f64(path) == d);
    }
}

TEST_CASE("tsr header layout") {
    // magic(4) + dtype(1) + ndim(1) + pad(6) + 2 dims * 8 = 28 bytes
    Tensor t = Tensor::from_data({2, 2}, {1.0f, 2.0f, 3.0f, 4.0f});
    const std::string path = tmp_path("hdr.tsr");
    tsr_write(t, path);
    const std::string bytes = read_bytes(path);
    CHECK(bytes.size() == 28 + 4 * sizeof(float));
    CHECK(bytes.substr(0, 4) == "TSR1");
    CHECK(bytes[4] == 0);  // f32
    CHECK(bytes[5] == 2);  // ndim
    for (int i = 6; i < 12; ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("tsr error diagnostics are distinct") {
    const std::string path = tmp_path("bad.tsr");
    Tensor t = Tensor::from_data({2}, {1.0f, 2.0f});
    tsr_write(t, path);

    std::string bytes = read_bytes(path);
    {
        std::string b = bytes;
        b[3] = '2';
        std::ofstream(path, std::ios::binary | std::ios::trunc) << b;
        CHECK_THROWS_WITH_AS((void)tsr_read(path), doctest::Contains("bad magic"),
                             std::runtime_error);
    }
    {
        std::string b = bytes;
        b[4] = 7;
        std::ofstream(path, std::ios::binary | std::ios::trunc) << b;
        CHECK_THROWS_WITH_AS((void)tsr_read(path), doctest::Contains("dtype"),
                             std::runtime_error);
    }
    {
        std::string b = bytes.substr(0, bytes.size() - 3);
        std::ofstream(path, std::ios::binary | std::ios::trunc) << b;
        CHECK_THROWS_WITH_AS((void)tsr_read(path), doctest::Contains("truncated"),
                             std::runtime_error);
    }
    {
        Tensor bad = Tensor::from_data({2}, {1.0f, 2.0f});
        bad[1] = std::numeric_limits<float>::quiet_NaN();
        tsr_write(bad, path);
        CHECK_THROWS_WITH_AS((void)tsr_read(path), doctest::Contains("non-finite"),
                             std::runtime_error);
    }
}

TEST_CASE("ppm quantization and layout") {
    Tensor img({3, 1, 1});
    img.at3(0, 0, 0) = 0.5f;
    img.at3(1, 0, 0) = 0.0f;
    img.at3(2, 0, 0) = 1.0f;
    const std::string path = tmp_path("q.ppm");
    ppm_write(img, path);
    const std::string bytes = read_bytes(path);
    CHECK(bytes == std::string("P6\n1 1\n255\n") + '\x80' + '\x00' + '\xff');

    Tensor zeros({3, 2, 3});
    ppm_write(zeros, path);
    const std::string zb = read_bytes(path);
    CHECK(zb.substr(0, 3) == "P6\n");
    CHECK(zb.size() == 11 + 3 * 2 * 3);
    for (std::size_t i = 11; i < zb.size(); ++i) CHECK(zb[i] == 0);
}

TEST_CASE("ppm write-read-write is byte stable and error bounded") {
    Tensor img = random_tensor({3, 9, 7}, 3);
    const std::string p1 = tmp_path("s1.ppm");
    const std::string p2 = tmp_path("s2.ppm");
    ppm_write(img, p1);
    const Tensor back = ppm_read(p1);
    ppm_write(back, p2);
    CHECK(read_bytes(p1) == read_bytes(p2));
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(static_cast<double>(back[i]) - static_cast<double>(img[i])) <=
              1.0 / 510.0 + 1e-9);
}

TEST_CASE("pgm single channel round trip") {
    Tensor img = random_tensor({1, 4, 6}, 4);
    const std::string path = tmp_path("g.pgm");
    ppm_write(img, path);
    const std::string bytes = read_bytes(path);
    CHECK(bytes.substr(0, 2) == "P5");
    const Tensor back = ppm_read(path);
    CHECK(back.shape() == img.shape());
}

TEST_CASE("ppm error paths") {
    const std::string path = tmp_path("bad.ppm");
    std::ofstream(path, std::ios::binary | std::ios::trunc) << "P7\n1 1\n255\nxyz";
    CHECK_THROWS_WITH_AS((void)ppm_read(path), doctest::Contains("malformed"),
                         std::runtime_error);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << "P6\n1 1\n254\nxyz";
    CHECK_THROWS_WITH_AS((void)ppm_read(path), doctest::Contains("maxval"),
                         std::runtime_error);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << "P6\n2 2\n255\nab";
    CHECK_THROWS_WITH_AS((void)ppm_read(path), doctest::Contains("short pixel"),
                         std::runtime_error);
    Tensor not_img({2, 2, 2});
    CHECK_THROWS_AS(ppm_write(not_img, path), std::invalid_argument);
    Tensor out_of_range({3, 1, 1});
    out_of_range[0] = 1.5f;
    CHECK_THROWS_AS(ppm_write(out_of_range, path), std::invalid_argument);
}
