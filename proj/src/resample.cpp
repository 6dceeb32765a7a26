#include "voxrot/resample.hpp"

#include <cmath>

#include "voxrot/shear.hpp"

namespace voxrot {

namespace {

// One bilinear sample at centered source coords (sx, sy); zero outside.
double sample_bilinear(const float* plane, std::size_t n, double sx, double sy) {
    const double fr = std::floor(sx), fq = std::floor(sy);
    const long r0 = static_cast<long>(fr), q0 = static_cast<long>(fq);
    const double ar = sx - fr, aq = sy - fq;
    const long ln = static_cast<long>(n);
    double v = 0.0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
            const long r = r0 + di, q = q0 + dj;
            if (r < 0 || r >= ln || q < 0 || q >= ln) continue;
            const double w = (di ? ar : 1.0 - ar) * (dj ? aq : 1.0 - aq);
            v += w * static_cast<double>(plane[static_cast<std::size_t>(r) * n +
                                               static_cast<std::size_t>(q)]);
        }
    return v;
}

double sample_trilinear(const float* vol, std::size_t n, double sd, double sh, double sw) {
    const double fd = std::floor(sd), fh = std::floor(sh), fw = std::floor(sw);
    const long d0 = static_cast<long>(fd), h0 = static_cast<long>(fh), w0 = static_cast<long>(fw);
    const double ad = sd - fd, ah = sh - fh, aw = sw - fw;
    const long ln = static_cast<long>(n);
    double v = 0.0;
    for (int dd = 0; dd < 2; ++dd)
        for (int dh = 0; dh < 2; ++dh)
            for (int dw = 0; dw < 2; ++dw) {
                const long d = d0 + dd, h = h0 + dh, w = w0 + dw;
                if (d < 0 || d >= ln || h < 0 || h >= ln || w < 0 || w >= ln) continue;
                const double wt = (dd ? ad : 1.0 - ad) * (dh ? ah : 1.0 - ah) *
                                  (dw ? aw : 1.0 - aw);
                v += wt * static_cast<double>(
                              vol[(static_cast<std::size_t>(d) * n +
                                   static_cast<std::size_t>(h)) * n +
                                  static_cast<std::size_t>(w)]);
            }
    return v;
}

void rotate2d_plane(const float* in, float* out, std::size_t n, const Mat2& R) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) - c;
        for (std::size_t j = 0; j < n; ++j) {
            const double y = static_cast<double>(j) - c;
            const double sx = R.m[0] * x + R.m[1] * y + c;
            const double sy = R.m[2] * x + R.m[3] * y + c;
            out[i * n + j] = static_cast<float>(sample_bilinear(in, n, sx, sy));
        }
    }
}

void check_rotation(const RotationMatrix3& R) {
    const auto& m = R.m;
    // R^T R == I within 1e-9
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) dot += m[k * 3 + i] * m[k * 3 + j];
            if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-9)
                throw std::invalid_argument("resample_rotate3d: matrix is not orthonormal");
        }
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                       m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    if (std::abs(det - 1.0) > 1e-9)
        throw std::invalid_argument("resample_rotate3d: matrix determinant is not 1");
}

}  // namespace

Mat2 rotmat2(double theta_deg) {
    if (!std::isfinite(theta_deg)) throw std::invalid_argument("rotmat2: non-finite angle");
    const double c = cos_deg(theta_deg), s = sin_deg(theta_deg);
    return {{c, s, -s, c}};
}

RotationMatrix3 RotationMatrix3::transposed() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

RotationMatrix3 rotmat3_from_elev_azim(double elev_deg, double azim_deg) {
    if (!std::isfinite(elev_deg) || !std::isfinite(azim_deg))
        throw std::invalid_argument("rotmat3_from_elev_azim: non-finite angle");
    const double ce = cos_deg(elev_deg), se = sin_deg(elev_deg);
    const double ca = cos_deg(azim_deg), sa = sin_deg(azim_deg);
    // E rotates the (d,h) plane, A the (d,w) plane; forward blocks are the
    // transpose of rotmat2 embedded in each plane
    const std::array<double, 9> E = {ce, -se, 0.0, se, ce, 0.0, 0.0, 0.0, 1.0};
    const std::array<double, 9> A = {ca, 0.0, -sa, 0.0, 1.0, 0.0, sa, 0.0, ca};
    RotationMatrix3 R{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += A[i * 3 + k] * E[k * 3 + j];
            R.m[i * 3 + j] = acc;
        }
    return R;
}

Tensor resample_rotate2d(const Tensor& t, double theta_deg) {
    require_square(t.shape(), "resample_rotate2d");
    const std::size_t C = t.dim(0), n = t.dim(1);
    const Mat2 R = rotmat2(theta_deg);
    Tensor out(t.shape());
#pragma omp parallel for
    for (std::size_t ch = 0; ch < C; ++ch)
        rotate2d_plane(t.data() + ch * n * n, out.data() + ch * n * n, n, R);
    return out;
}

Tensor resample_rotate3d(const Tensor& z, const RotationMatrix3& R) {
    require_cubic_scene(z.shape(), "resample_rotate3d");
    check_rotation(R);
    const std::size_t C = z.dim(0), n = z.dim(1);
    const RotationMatrix3 S = R.transposed();  // output position -> source position
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    Tensor out(z.shape());
#pragma omp parallel for collapse(2)
    for (std::size_t ch = 0; ch < C; ++ch)
        for (std::size_t d = 0; d < n; ++d) {
            const float* vol = z.data() + ch * n * n * n;
            float* dst = out.data() + ch * n * n * n;
            const double x = static_cast<double>(d) - c;
            for (std::size_t h = 0; h < n; ++h) {
                const double y = static_cast<double>(h) - c;
                for (std::size_t w = 0; w < n; ++w) {
                    const double zz = static_cast<double>(w) - c;
                    const double sd = S.m[0] * x + S.m[1] * y + S.m[2] * zz + c;
                    const double sh = S.m[3] * x + S.m[4] * y + S.m[5] * zz + c;
                    const double sw = S.m[6] * x + S.m[7] * y + S.m[8] * zz + c;
                    dst[(d * n + h) * n + w] =
                        static_cast<float>(sample_trilinear(vol, n, sd, sh, sw));
                }
            }
        }
    return out;
}

namespace serial {

Tensor resample_rotate2d(const Tensor& t, double theta_deg) {
    require_square(t.shape(), "resample_rotate2d");
    const std::size_t C = t.dim(0), n = t.dim(1);
    const Mat2 R = rotmat2(theta_deg);
    Tensor out(t.shape());
    for (std::size_t ch = 0; ch < C; ++ch)
        rotate2d_plane(t.data() + ch * n * n, out.data() + ch * n * n, n, R);
    return out;
}

Tensor resample_rotate3d(const Tensor& z, const RotationMatrix3& R) {
    require_cubic_scene(z.shape(), "resample_rotate3d");
    check_rotation(R);
    const std::size_t C = z.dim(0), n = z.dim(1);
    const RotationMatrix3 S = R.transposed();
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    Tensor out(z.shape());
    for (std::size_t ch = 0; ch < C; ++ch) {
        const float* vol = z.data() + ch * n * n * n;
        float* dst = out.data() + ch * n * n * n;
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t h = 0; h < n; ++h)
                for (std::size_t w = 0; w < n; ++w) {
                    const double x = static_cast<double>(d) - c;
                    const double y = static_cast<double>(h) - c;
                    const double zz = static_cast<double>(w) - c;
                    const double sd = S.m[0] * x + S.m[1] * y + S.m[2] * zz + c;
                    const double sh = S.m[3] * x + S.m[4] * y + S.m[5] * zz + c;
                    const double sw = S.m[6] * x + S.m[7] * y + S.m[8] * zz + c;
                    dst[(d * n + h) * n + w] =
                        static_cast<float>(sample_trilinear(vol, n, sd, sh, sw));
                }
    }
    return out;
}

}  // namespace serial

}  // namespace voxrot
