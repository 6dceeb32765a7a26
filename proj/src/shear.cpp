#include "voxrot/shear.hpp"

#include <cmath>

namespace voxrot {

namespace {

constexpr double kPi = 3.14159265358979323846;

double reduce_0_360(double deg) {
    double m = std::fmod(deg, 360.0);
    if (m < 0.0) m += 360.0;
    return m;
}

long round_half_away(double v) { return std::lround(v); }

std::size_t flat(std::size_t n, long i, long j) {
    return static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j);
}

long wrap(long v, long n) {
    v %= n;
    return v < 0 ? v + n : v;
}

// out[flat] = in[map[flat]] for an n x n grid; the three builders below give
// the per-stage source maps.
std::vector<std::uint32_t> map_rot90(std::size_t n, int k) {
    const long ln = static_cast<long>(n);
    std::vector<std::uint32_t> m(n * n);
    for (long i = 0; i < ln; ++i)
        for (long j = 0; j < ln; ++j) {
            long si = i, sj = j;
            for (int s = 0; s < (k % 4 + 4) % 4; ++s) {
                // out[i][j] = in[j][n-1-i], applied k times
                const long ti = sj, tj = ln - 1 - si;
                si = ti;
                sj = tj;
            }
            m[flat(n, i, j)] = static_cast<std::uint32_t>(flat(n, si, sj));
        }
    return m;
}

std::vector<std::uint32_t> map_stage_cols(const ShearPlan& p) {
    const long n = static_cast<long>(p.n);
    std::vector<std::uint32_t> m(p.n * p.n);
    for (long j = 0; j < n; ++j) {
        const long s = p.shift_a[static_cast<std::size_t>(j)];
        for (long i = 0; i < n; ++i)
            m[flat(p.n, i, j)] = static_cast<std::uint32_t>(flat(p.n, wrap(i - s, n), j));
    }
    return m;
}

std::vector<std::uint32_t> map_stage_rows(const ShearPlan& p) {
    const long n = static_cast<long>(p.n);
    std::vector<std::uint32_t> m(p.n * p.n);
    for (long i = 0; i < n; ++i) {
        const long s = p.shift_b[static_cast<std::size_t>(i)];
        for (long j = 0; j < n; ++j)
            m[flat(p.n, i, j)] = static_cast<std::uint32_t>(flat(p.n, i, wrap(j - s, n)));
    }
    return m;
}

// total <- total-then-next: out[d] = in[total[next[d]]]
void compose_into(std::vector<std::uint32_t>& total, const std::vector<std::uint32_t>& next) {
    std::vector<std::uint32_t> out(total.size());
    for (std::size_t d = 0; d < total.size(); ++d) out[d] = total[next[d]];
    total = std::move(out);
}

}  // namespace

// trig is evaluated in extended precision and rounded once, so boundary
// values like sin 30 = 0.5 come out exact and the half-away shift rounding
// matches hand evaluation
constexpr long double kPiL = 3.14159265358979323846264338327950288L;

double sin_deg(double deg) {
    const double m = reduce_0_360(deg);
    if (m == 0.0 || m == 180.0) return 0.0;
    if (m == 90.0) return 1.0;
    if (m == 270.0) return -1.0;
    return static_cast<double>(
        std::sin(static_cast<long double>(deg) * kPiL / 180.0L));
}

double cos_deg(double deg) {
    const double m = reduce_0_360(deg);
    if (m == 0.0) return 1.0;
    if (m == 180.0) return -1.0;
    if (m == 90.0 || m == 270.0) return 0.0;
    return static_cast<double>(
        std::cos(static_cast<long double>(deg) * kPiL / 180.0L));
}

static double tan_half_deg(double deg) {
    return static_cast<double>(
        std::tan(static_cast<long double>(deg) * kPiL / 360.0L));
}

AngleDecomposition decompose_angle(double theta_deg) {
    if (!std::isfinite(theta_deg))
        throw std::invalid_argument("decompose_angle: non-finite angle");
    // signed representative in (-180, 180]
    double m = std::fmod(theta_deg, 360.0);
    if (m <= -180.0) m += 360.0;
    else if (m > 180.0) m -= 360.0;
    const double aq = std::abs(m) / 90.0;
    double k = std::floor(aq + 0.5);
    if (k - aq == 0.5) k -= 1.0;  // tie: coarse magnitude rounds down
    const double coarse_signed = 90.0 * (m < 0.0 ? -k : k);
    const double small = m - coarse_signed;
    double coarse = std::fmod(coarse_signed + 360.0, 360.0);
    if (coarse == 360.0) coarse = 0.0;
    return {coarse, small};
}

ShearPlan make_shear_plan(double theta_small_deg, std::size_t n) {
    if (!(std::abs(theta_small_deg) <= 45.0))
        throw std::invalid_argument("make_shear_plan: |theta| must be <= 45 degrees");
    if (n < 1) throw std::invalid_argument("make_shear_plan: n must be >= 1");
    ShearPlan p{theta_small_deg, n, std::vector<int>(n), std::vector<int>(n)};
    const double t = tan_half_deg(theta_small_deg);
    const double s = sin_deg(theta_small_deg);
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double off = static_cast<double>(i) - c;
        p.shift_a[i] = static_cast<int>(round_half_away(-t * off));
        p.shift_b[i] = static_cast<int>(round_half_away(s * off));
    }
    return p;
}

template <typename T>
TensorT<T> rot90_2d(const TensorT<T>& t, int k) {
    if (t.ndim() == 2) {
        if (t.dim(0) != t.dim(1)) throw std::invalid_argument("rot90_2d: non-square input");
    } else {
        require_square(t.shape(), "rot90_2d");
    }
    const std::size_t n = t.dim(t.ndim() - 1);
    const std::size_t chans = t.size() / (n * n);
    const auto m = map_rot90(n, k);
    TensorT<T> out(t.shape());
    for (std::size_t c = 0; c < chans; ++c) {
        const T* src = t.data() + c * n * n;
        T* dst = out.data() + c * n * n;
        for (std::size_t d = 0; d < n * n; ++d) dst[d] = src[m[d]];
    }
    return out;
}

std::vector<std::uint32_t> rot_index_map_2d(std::size_t n, double theta_deg) {
    const AngleDecomposition dec = decompose_angle(theta_deg);
    const int k = static_cast<int>(dec.coarse / 90.0);
    const ShearPlan plan = make_shear_plan(dec.small, n);
    std::vector<std::uint32_t> total(n * n);
    for (std::size_t d = 0; d < total.size(); ++d) total[d] = static_cast<std::uint32_t>(d);
    auto add = [&](const std::vector<std::uint32_t>& m) { compose_into(total, m); };
    const auto sa = map_stage_cols(plan);
    const auto sb = map_stage_rows(plan);
    if (k == 3) {
        // quadrant-boundary order: shears first, quarter turn last, so that
        // rotate(theta) and rotate(-theta) are exact inverses
        add(sa);
        add(sb);
        add(sa);
        add(map_rot90(n, 3));
    } else {
        add(map_rot90(n, k));
        add(sa);
        add(sb);
        add(sa);
    }
    return total;
}

std::vector<std::uint32_t> rot_index_map_3d(std::size_t n, double elev_deg, double azim_deg) {
    const auto pe = rot_index_map_2d(n, elev_deg);
    const auto pa = rot_index_map_2d(n, azim_deg);
    const std::size_t nn = n * n;
    std::vector<std::uint32_t> t1(n * nn), total(n * nn);
    // elev on (d,h) slabs, one per width index
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t h = 0; h < n; ++h) {
                const std::uint32_t s = pe[d * n + h];
                t1[(d * n + h) * n + w] =
                    static_cast<std::uint32_t>((s / n) * nn + (s % n) * n + w);
            }
    // azim on (d,w) slabs, one per height index
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t w = 0; w < n; ++w) {
                const std::uint32_t s = pa[d * n + w];
                total[(d * n + h) * n + w] = t1[(s / n) * nn + h * n + (s % n)];
            }
    return total;
}

std::vector<std::uint32_t> rot_index_map_3d_inverse(std::size_t n, double elev_deg,
                                                    double azim_deg) {
    const auto pa = rot_index_map_2d(n, -azim_deg);
    const auto pe = rot_index_map_2d(n, -elev_deg);
    const std::size_t nn = n * n;
    std::vector<std::uint32_t> t1(n * nn), total(n * nn);
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t w = 0; w < n; ++w) {
                const std::uint32_t s = pa[d * n + w];
                t1[(d * n + h) * n + w] =
                    static_cast<std::uint32_t>((s / n) * nn + h * n + (s % n));
            }
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t d = 0; d < n; ++d)
            for (std::size_t h = 0; h < n; ++h) {
                const std::uint32_t s = pe[d * n + h];
                total[(d * n + h) * n + w] = t1[(s / n) * nn + (s % n) * n + w];
            }
    return total;
}

template <typename T>
TensorT<T> apply_index_map(const TensorT<T>& t, const std::vector<std::uint32_t>& map) {
    const std::size_t per = map.size();
    if (t.size() % per != 0)
        throw std::invalid_argument("apply_index_map: map does not tile the tensor");
    const std::size_t chans = t.size() / per;
    TensorT<T> out(t.shape());
    const T* src = t.data();
    T* dst = out.data();
#pragma omp parallel for collapse(2) if (chans * per > 4096)
    for (std::size_t c = 0; c < chans; ++c)
        for (std::size_t d = 0; d < per; ++d) dst[c * per + d] = src[c * per + map[d]];
    return out;
}

template <typename T>
TensorT<T> shear_rotate2d(const TensorT<T>& t, double theta_deg) {
    if (t.ndim() != 3 || t.dim(1) != t.dim(2))
        throw std::invalid_argument("shear_rotate2d: expected CxNxN with square grid");
    return apply_index_map(t, rot_index_map_2d(t.dim(1), theta_deg));
}

template <typename T>
TensorT<T> shear_rotate3d(const TensorT<T>& z, double elev_deg, double azim_deg) {
    require_cubic_scene(z.shape(), "shear_rotate3d");
    return apply_index_map(z, rot_index_map_3d(z.dim(1), elev_deg, azim_deg));
}

template <typename T>
TensorT<T> shear_rotate3d_inverse(const TensorT<T>& z, double elev_deg, double azim_deg) {
    require_cubic_scene(z.shape(), "shear_rotate3d_inverse");
    return apply_index_map(z, rot_index_map_3d_inverse(z.dim(1), elev_deg, azim_deg));
}

double angle_resolution(std::size_t n) {
    if (n < 2) throw std::invalid_argument("angle_resolution: n must be >= 2");
    return std::asin(1.0 / (static_cast<double>(n) - 1.0)) * 180.0 / kPi;
}

std::optional<double> smallest_effective_angle_bruteforce(std::size_t n, double step_deg) {
    if (n < 2) throw std::invalid_argument("smallest_effective_angle_bruteforce: n must be >= 2");
    if (!(step_deg > 0.0))
        throw std::invalid_argument("smallest_effective_angle_bruteforce: step must be > 0");
    Tensor probe({1, n, n});
    probe.at3(0, 0, n - 1) = 1.0f;
    for (std::size_t k = 1;; ++k) {
        const double theta = static_cast<double>(k) * step_deg;
        if (theta >= 45.0) return std::nullopt;
        if (!(shear_rotate2d(probe, theta) == probe)) return theta;
    }
}

namespace serial {

namespace {

template <typename T>
void stage_cols(const ShearPlan& p, const T* in, T* out) {
    const long n = static_cast<long>(p.n);
    for (long j = 0; j < n; ++j) {
        const long s = p.shift_a[static_cast<std::size_t>(j)];
        for (long i = 0; i < n; ++i) out[flat(p.n, wrap(i + s, n), j)] = in[flat(p.n, i, j)];
    }
}

template <typename T>
void stage_rows(const ShearPlan& p, const T* in, T* out) {
    const long n = static_cast<long>(p.n);
    for (long i = 0; i < n; ++i) {
        const long s = p.shift_b[static_cast<std::size_t>(i)];
        for (long j = 0; j < n; ++j) out[flat(p.n, i, wrap(j + s, n))] = in[flat(p.n, i, j)];
    }
}

template <typename T>
void rot90_plane(std::size_t n, int k, const T* in, T* out) {
    const auto m = map_rot90(n, k);
    for (std::size_t d = 0; d < n * n; ++d) out[d] = in[m[d]];
}

template <typename T>
void shear_plane(std::size_t n, double theta, const T* in, T* out) {
    const AngleDecomposition dec = decompose_angle(theta);
    const int k = static_cast<int>(dec.coarse / 90.0);
    const ShearPlan plan = make_shear_plan(dec.small, n);
    std::vector<T> a(n * n), b(n * n);
    if (k == 3) {
        stage_cols(plan, in, b.data());
        stage_rows(plan, b.data(), a.data());
        stage_cols(plan, a.data(), b.data());
        rot90_plane(n, 3, b.data(), out);
    } else {
        rot90_plane(n, k, in, a.data());
        stage_cols(plan, a.data(), b.data());
        stage_rows(plan, b.data(), a.data());
        stage_cols(plan, a.data(), out);
    }
}

}  // namespace

template <typename T>
TensorT<T> shear_rotate2d(const TensorT<T>& t, double theta_deg) {
    if (t.ndim() != 3 || t.dim(1) != t.dim(2))
        throw std::invalid_argument("shear_rotate2d: expected CxNxN with square grid");
    const std::size_t n = t.dim(1);
    TensorT<T> out(t.shape());
    for (std::size_t c = 0; c < t.dim(0); ++c)
        shear_plane(n, theta_deg, t.data() + c * n * n, out.data() + c * n * n);
    return out;
}

template <typename T>
TensorT<T> shear_rotate3d(const TensorT<T>& z, double elev_deg, double azim_deg) {
    require_cubic_scene(z.shape(), "shear_rotate3d");
    const std::size_t C = z.dim(0), n = z.dim(1), nn = n * n;
    TensorT<T> mid(z.shape()), out(z.shape());
    std::vector<T> slab(nn), rslab(nn);
    for (std::size_t c = 0; c < C; ++c) {
        const T* zc = z.data() + c * n * nn;
        T* mc = mid.data() + c * n * nn;
        for (std::size_t w = 0; w < n; ++w) {  // elev on (d,h), fixed w
            for (std::size_t d = 0; d < n; ++d)
                for (std::size_t h = 0; h < n; ++h) slab[d * n + h] = zc[(d * n + h) * n + w];
            shear_plane(n, elev_deg, slab.data(), rslab.data());
            for (std::size_t d = 0; d < n; ++d)
                for (std::size_t h = 0; h < n; ++h) mc[(d * n + h) * n + w] = rslab[d * n + h];
        }
        T* oc = out.data() + c * n * nn;
        for (std::size_t h = 0; h < n; ++h) {  // azim on (d,w), fixed h
            for (std::size_t d = 0; d < n; ++d)
                for (std::size_t w = 0; w < n; ++w) slab[d * n + w] = mc[(d * n + h) * n + w];
            shear_plane(n, azim_deg, slab.data(), rslab.data());
            for (std::size_t d = 0; d < n; ++d)
                for (std::size_t w = 0; w < n; ++w) oc[(d * n + h) * n + w] = rslab[d * n + w];
        }
    }
    return out;
}

template TensorT<float> shear_rotate2d(const TensorT<float>&, double);
template TensorT<double> shear_rotate2d(const TensorT<double>&, double);
template TensorT<float> shear_rotate3d(const TensorT<float>&, double, double);
template TensorT<double> shear_rotate3d(const TensorT<double>&, double, double);

}  // namespace serial

template TensorT<float> rot90_2d(const TensorT<float>&, int);
template TensorT<double> rot90_2d(const TensorT<double>&, int);
template TensorT<float> apply_index_map(const TensorT<float>&, const std::vector<std::uint32_t>&);
template TensorT<double> apply_index_map(const TensorT<double>&, const std::vector<std::uint32_t>&);
template TensorT<float> shear_rotate2d(const TensorT<float>&, double);
template TensorT<double> shear_rotate2d(const TensorT<double>&, double);
template TensorT<float> shear_rotate3d(const TensorT<float>&, double, double);
template TensorT<double> shear_rotate3d(const TensorT<double>&, double, double);
template TensorT<float> shear_rotate3d_inverse(const TensorT<float>&, double, double);
template TensorT<double> shear_rotate3d_inverse(const TensorT<double>&, double, double);

}  // namespace voxrot
