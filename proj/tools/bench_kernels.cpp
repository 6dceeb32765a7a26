// Times the OpenMP kernels against their serial reference implementations
// and verifies both produce bitwise-identical results.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "voxrot/equivariance.hpp"
#include "voxrot/resample.hpp"
#include "voxrot/shear.hpp"
#include "voxrot/synth.hpp"

using namespace voxrot;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform());
    return t;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; parallel kernels run serially\n");
#endif
    const int reps = 5;

    {
        const Tensor z = random_tensor({8, 48, 48, 48}, 1);
        Tensor a, b;
        const double ts = time_best_of(reps, [&] { a = serial::shear_rotate3d(z, 33.0, 117.0); });
        const double tp = time_best_of(reps, [&] { b = shear_rotate3d(z, 33.0, 117.0); });
        report("shear_rotate3d 8x48^3", ts, tp, a == b);
    }
    {
        const Tensor t = random_tensor({16, 256, 256}, 2);
        Tensor a, b;
        const double ts = time_best_of(reps, [&] { a = serial::shear_rotate2d(t, 17.0); });
        const double tp = time_best_of(reps, [&] { b = shear_rotate2d(t, 17.0); });
        report("shear_rotate2d 16x256^2", ts, tp, a == b);
    }
    {
        const Tensor t = random_tensor({16, 256, 256}, 3);
        Tensor a, b;
        const double ts = time_best_of(reps, [&] { a = serial::resample_rotate2d(t, 17.0); });
        const double tp = time_best_of(reps, [&] { b = resample_rotate2d(t, 17.0); });
        report("resample_rotate2d 16x256^2", ts, tp, a == b);
    }
    {
        const Tensor z = random_tensor({8, 48, 48, 48}, 4);
        const RotationMatrix3 R = rotmat3_from_elev_azim(33.0, 117.0);
        Tensor a, b;
        const double ts = time_best_of(reps, [&] { a = serial::resample_rotate3d(z, R); });
        const double tp = time_best_of(reps, [&] { b = resample_rotate3d(z, R); });
        report("resample_rotate3d 8x48^3", ts, tp, a == b);
    }
    return 0;
}
