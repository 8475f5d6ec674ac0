// Timing comparison of the OpenMP kernels against their serial references:
// backward sampling, correlation pair counting, and Lyapunov cocycles.

#include <chrono>
#include <cstdio>

#include "mme/dimension.hpp"
#include "mme/lyapunov.hpp"
#include "mme/parallel.hpp"
#include "mme/sampler.hpp"

using namespace mme;

namespace {

PolyMap skew_map() {
    Poly1D p({cx(0), cx(0), cx(1)});
    std::vector<Poly1D> q_w = {Poly1D({cx(0), cx(1)}), Poly1D({cx(0)}), Poly1D({cx(1)})};
    return PolyMap::skew(p, q_w);
}

template <class F>
double time_s(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.3f s %10.3f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
    std::printf("workers: %d\n", max_workers());
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    PolyMap map = skew_map();
    const int n_points = 4000, burn_in = 40;

    MeasureSample sample;
    double s_ser = time_s([&] { sample_measure_serial(map, n_points, burn_in, 1); });
    double s_par = time_s([&] { sample = sample_measure(map, n_points, burn_in, 1); });
    row("backward sampling", s_ser, s_par);

    auto flat = flatten(sample.points);
    std::vector<double> radii;
    for (int i = 0; i < 12; ++i) radii.push_back(1e-3 * std::pow(2.0, i));
    std::vector<long long> ref, fast;
    double c_ser = time_s([&] { ref = correlation_counts_brute(flat, radii); });
    double c_par = time_s([&] { fast = correlation_counts(flat, radii); });
    row("pair counting", c_ser, c_par);
    if (ref != fast) {
        std::printf("pair counting mismatch between kernels\n");
        return 1;
    }

    LyapunovEstimate a, b;
    double l_ser = time_s([&] { a = estimate_exponents_serial(map, sample, 30); });
    double l_par = time_s([&] { b = estimate_exponents(map, sample, 30); });
    row("lyapunov cocycles", l_ser, l_par);
    if (a.lambda_sum != b.lambda_sum) {
        std::printf("cocycle mismatch between kernels\n");
        return 1;
    }
    return 0;
}
