#pragma once

#include <cstdint>
#include <vector>

#include "mme/endomorphism.hpp"
#include "mme/greens.hpp"
#include "mme/rng.hpp"

namespace mme {

struct SamplerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Empirical approximation of the measure of maximal entropy: one retained
/// point per independent backward orbit.
struct MeasureSample {
    std::vector<CPoint> points;
    std::uint64_t seed = 0;
    int burn_in = 0;
};

/// Finite natural-extension window x_{-m}, ..., x_{-1}, x_0 with
/// F(x_{-i}) = x_{-i+1} and all states off the critical locus.
struct OrbitWindow {
    std::vector<CPoint> states;  // ordered x_{-m} .. x_0
    int length() const { return static_cast<int>(states.size()) - 1; }
    const CPoint& x0() const { return states.back(); }
    const CPoint& back_state(int i) const { return states[states.size() - 1 - i]; }  // x_{-i}
};

/// One preimage of z drawn uniformly over the fiber (multiplicity weights).
CPoint backward_step(const PolyMap& map, const CPoint& z, CounterRng& rng);

/// Base point for backward runs: a seeded random point on the sphere of
/// the escape radius. Retries (up to 10) if the backward run degenerates.
CPoint draw_base_point(const PolyMap& map, double radius, std::uint64_t seed);

/// n_points independent backward orbits of burn_in steps from a common
/// base point; the terminal point of each orbit is retained. Deterministic
/// given the seed; parallel over orbits with per-orbit derived streams.
MeasureSample sample_measure(const PolyMap& map, int n_points, int burn_in, std::uint64_t seed);

/// Serial reference of sample_measure, kept for testing the deterministic
/// parallel contract.
MeasureSample sample_measure_serial(const PolyMap& map, int n_points, int burn_in,
                                    std::uint64_t seed);

/// A backward window of m+1 states after a burn-in prefix. Branch choices
/// that land within 1e-12 of the critical locus are re-drawn (max 10 per
/// step).
OrbitWindow backward_orbit(const PolyMap& map, int m, std::uint64_t seed, int burn_in = 40);

/// Window continuation started from a given point (used by the covering
/// experiment where orbits must start on sampled points).
OrbitWindow backward_orbit_from(const PolyMap& map, const CPoint& x0, int m, std::uint64_t seed);

}  // namespace mme
