#include "voxrot/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "tsr/ppm codecs assume a little-endian host");

namespace voxrot {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'R', '1'};

template <typename T>
void tsr_write_impl(const TensorT<T>& t, const std::string& path, std::uint8_t dtype) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("tsr_write: cannot open '" + path + "'");
    f.write(kMagic, 4);
    const std::uint8_t ndim = static_cast<std::uint8_t>(t.ndim());
    f.put(static_cast<char>(dtype));
    f.put(static_cast<char>(ndim));
    const char pad[6] = {0, 0, 0, 0, 0, 0};
    f.write(pad, 6);
    for (std::size_t d : t.shape()) {
        const std::uint64_t v = d;
        f.write(reinterpret_cast<const char*>(&v), 8);
    }
    f.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(T)));
    if (!f) throw std::runtime_error("tsr_write: short write to '" + path + "'");
}

template <typename T>
TensorT<T> tsr_read_impl(std::ifstream& f, const std::string& path, std::uint8_t ndim) {
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) {
        std::uint64_t v = 0;
        if (!f.read(reinterpret_cast<char*>(&v), 8))
            throw std::runtime_error("tsr_read: truncated dims in '" + path + "'");
        if (v == 0) throw std::runtime_error("tsr_read: zero dimension in '" + path + "'");
        d = static_cast<std::size_t>(v);
    }
    TensorT<T> t(shape);
    if (!f.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(T))))
        throw std::runtime_error("tsr_read: truncated payload in '" + path + "'");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!std::isfinite(static_cast<double>(t[i])))
            throw std::runtime_error("tsr_read: non-finite value in '" + path + "'");
    return t;
}

struct TsrHeader {
    std::uint8_t dtype;
    std::uint8_t ndim;
};

TsrHeader tsr_read_header(std::ifstream& f, const std::string& path) {
    char magic[4];
    char head[8];
    if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("tsr_read: bad magic in '" + path + "'");
    if (!f.read(head, 8))
        throw std::runtime_error("tsr_read: truncated header in '" + path + "'");
    const std::uint8_t dtype = static_cast<std::uint8_t>(head[0]);
    if (dtype > 1)
        throw std::runtime_error("tsr_read: unknown dtype code in '" + path + "'");
    // head[1] = ndim, head[2..7] = pad (ignored on read)
    return {dtype, static_cast<std::uint8_t>(head[1])};
}

}  // namespace

void tsr_write(const Tensor& t, const std::string& path) { tsr_write_impl(t, path, 0); }
void tsr_write(const DTensor& t, const std::string& path) { tsr_write_impl(t, path, 1); }

AnyTensor tsr_read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("tsr_read: cannot open '" + path + "'");
    const TsrHeader h = tsr_read_header(f, path);
    if (h.dtype == 0) return tsr_read_impl<float>(f, path, h.ndim);
    return tsr_read_impl<double>(f, path, h.ndim);
}

Tensor tsr_read_f32(const std::string& path) {
    AnyTensor t = tsr_read(path);
    if (auto* p = std::get_if<Tensor>(&t)) return std::move(*p);
    throw std::runtime_error("tsr_read: '" + path + "' holds 64-bit data, expected 32-bit");
}

DTensor tsr_read_f64(const std::string& path) {
    AnyTensor t = tsr_read(path);
    if (auto* p = std::get_if<DTensor>(&t)) return std::move(*p);
    throw std::runtime_error("tsr_read: '" + path + "' holds 32-bit data, expected 64-bit");
}

namespace {

std::uint8_t quantize(float v) {
    const double c = std::fmin(std::fmax(static_cast<double>(v), 0.0), 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

int read_pnm_int(std::ifstream& f, const std::string& path) {
    int ch = f.get();
    while (ch == '#' || std::isspace(ch)) {
        if (ch == '#')
            while (ch != '\n' && ch != EOF) ch = f.get();
        ch = f.get();
    }
    if (!std::isdigit(ch))
        throw std::runtime_error("ppm_read: malformed header in '" + path + "'");
    int v = 0;
    while (std::isdigit(ch)) {
        v = v * 10 + (ch - '0');
        ch = f.get();
    }
    if (ch == EOF) throw std::runtime_error("ppm_read: malformed header in '" + path + "'");
    return v;
}

}  // namespace

void ppm_write(const Tensor& img, const std::string& path) {
    validate_image(img, "ppm_write");
    const std::size_t C = img.dim(0), H = img.dim(1), W = img.dim(2);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("ppm_write: cannot open '" + path + "'");
    f << (C == 3 ? "P6" : "P5") << "\n" << W << " " << H << "\n255\n";
    std::vector<std::uint8_t> row(W * C);
    for (std::size_t i = 0; i < H; ++i) {
        for (std::size_t j = 0; j < W; ++j)
            for (std::size_t c = 0; c < C; ++c)
                row[j * C + c] = quantize(img.at3(c, i, j));
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw std::runtime_error("ppm_write: short write to '" + path + "'");
}

Tensor ppm_read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ppm_read: cannot open '" + path + "'");
    char p = static_cast<char>(f.get());
    char kind = static_cast<char>(f.get());
    if (p != 'P' || (kind != '6' && kind != '5'))
        throw std::runtime_error("ppm_read: malformed header in '" + path + "'");
    const std::size_t C = kind == '6' ? 3 : 1;
    const int w = read_pnm_int(f, path);
    const int h = read_pnm_int(f, path);
    const int maxval = read_pnm_int(f, path);
    if (w <= 0 || h <= 0)
        throw std::runtime_error("ppm_read: malformed header in '" + path + "'");
    if (maxval != 255)
        throw std::runtime_error("ppm_read: maxval must be 255 in '" + path + "'");
    const std::size_t H = static_cast<std::size_t>(h), W = static_cast<std::size_t>(w);
    std::vector<std::uint8_t> raw(H * W * C);
    if (!f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw std::runtime_error("ppm_read: short pixel data in '" + path + "'");
    Tensor img({C, H, W});
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j)
            for (std::size_t c = 0; c < C; ++c)
                img.at3(c, i, j) = static_cast<float>(raw[(i * W + j) * C + c]) / 255.0f;
    return img;
}

}  // namespace voxrot
