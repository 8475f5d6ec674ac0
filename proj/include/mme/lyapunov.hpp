#pragma once

#include "mme/sampler.hpp"

namespace mme {

struct LyapunovEstimate {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_sum = 0.0;  // Lambda = integral of log|det DF|
    double stderr_min = 0.0;
    double stderr_max = 0.0;
    double stderr_sum = 0.0;
    int n_orbits = 0;
    int cocycle_length = 0;
};

struct BoundCheck {
    bool pass = false;
    double threshold = 0.0;
    double margin = 0.0;  // estimate - (threshold - 3*stderr)
};

struct BoundsReport {
    BoundCheck briend_duval;    // lambda_min >= (1/2) log d
    BoundCheck bedford_jonsson; // Lambda >= (n+1)/2 log d
    bool pass() const { return briend_duval.pass && bedford_jonsson.pass; }
};

/// Monte Carlo estimate of (lambda_min, lambda_max, Lambda) over the sample:
/// forward cocycles of length m with QR re-orthonormalization each step,
/// extremal R-diagonal products as singular-value proxies, and the exact
/// per-step log|det DF| average for Lambda. A point's cocycle is truncated
/// as soon as its iterate's escape rate exceeds 1e-6 (sample impurity
/// guard); points impure from the start are skipped.
LyapunovEstimate estimate_exponents(const PolyMap& map, const MeasureSample& sample,
                                    int cocycle_length);

LyapunovEstimate estimate_exponents_serial(const PolyMap& map, const MeasureSample& sample,
                                           int cocycle_length);

BoundsReport check_bounds(const LyapunovEstimate& est, int d, int n);

}  // namespace mme
