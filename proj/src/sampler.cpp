#include "mme/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "mme/parallel.hpp"
#include "mme/roots.hpp"

namespace mme {

CPoint backward_step(const PolyMap& map, const CPoint& z, CounterRng& rng) {
    auto fiber = preimages(map, z);
    return fiber[rng.next_below(fiber.size())];
}

CPoint draw_base_point(const PolyMap& map, double radius, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0xBA5Eull);
    CPoint u(map.n());
    double norm2 = 0.0;
    for (int i = 0; i < map.n(); ++i) {
        u[i] = cx(rng.next_normal(), rng.next_normal());
        norm2 += std::norm(u[i]);
    }
    return u * (radius / std::sqrt(norm2));
}

namespace {

CPoint run_orbit(const PolyMap& map, const CPoint& base, int burn_in, CounterRng& rng) {
    CPoint z = base;
    for (int b = 0; b < burn_in; ++b) z = backward_step(map, z, rng);
    return z;
}

template <class Loop>
MeasureSample sample_measure_impl(const PolyMap& map, int n_points, int burn_in,
                                  std::uint64_t seed, Loop&& loop) {
    if (!is_regular(map)) throw SamplerError("map is not regular");
    if (!map.has_inverse_branches()) throw SamplerError("sampling unsupported for dense maps");
    double radius = escape_radius(map);

    CPoint base;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        base = draw_base_point(map, radius, seed + attempt);
        try {
            CounterRng probe = CounterRng::stream(seed, 0xF0BEull);
            run_orbit(map, base, std::min(burn_in, 8), probe);
            ok = true;
        } catch (const RootFindError&) {
            // base point hit a critical value chain; resample
        }
    }
    if (!ok) throw SamplerError("could not find a non-exceptional base point");

    MeasureSample out;
    out.seed = seed;
    out.burn_in = burn_in;
    out.points.resize(n_points);
    loop(static_cast<std::size_t>(n_points), [&](std::size_t i) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(i) + 1);
        out.points[i] = run_orbit(map, base, burn_in, rng);
    });
    return out;
}

}  // namespace

MeasureSample sample_measure(const PolyMap& map, int n_points, int burn_in, std::uint64_t seed) {
    return sample_measure_impl(map, n_points, burn_in, seed,
                               [](std::size_t c, auto&& f) { parallel_for(c, f); });
}

MeasureSample sample_measure_serial(const PolyMap& map, int n_points, int burn_in,
                                    std::uint64_t seed) {
    return sample_measure_impl(map, n_points, burn_in, seed,
                               [](std::size_t c, auto&& f) { serial_for(c, f); });
}

OrbitWindow backward_orbit_from(const PolyMap& map, const CPoint& x0, int m, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0x0B17ull);
    std::vector<CPoint> states;  // built x_0, x_{-1}, ...
    states.push_back(x0);
    for (int i = 1; i <= m; ++i) {
        auto fiber = preimages(map, states.back());
        CPoint next;
        bool found = false;
        for (int attempt = 0; attempt < 10; ++attempt) {
            const CPoint& cand = fiber[rng.next_below(fiber.size())];
            cx det = jacobian(map, cand).determinant();
            if (std::abs(det) > 1e-12) {
                next = cand;
                found = true;
                break;
            }
        }
        if (!found)
            throw SamplerError("persistent critical-locus hits (postcritical base point?)");
        states.push_back(std::move(next));
    }
    std::reverse(states.begin(), states.end());
    return OrbitWindow{std::move(states)};
}

OrbitWindow backward_orbit(const PolyMap& map, int m, std::uint64_t seed, int burn_in) {
    if (!is_regular(map)) throw SamplerError("map is not regular");
    double radius = escape_radius(map);
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            CPoint base = draw_base_point(map, radius, seed + attempt);
            CounterRng rng = CounterRng::stream(seed + attempt, 0xB011ull);
            CPoint x0 = run_orbit(map, base, burn_in, rng);
            return backward_orbit_from(map, x0, m, seed + attempt);
        } catch (const SamplerError&) {
        } catch (const RootFindError&) {
        }
    }
    throw SamplerError("persistent critical-locus hits (postcritical base point?)");
}

}  // namespace mme
