#pragma once

#include <cstdint>
#include <vector>

#include "mme/endomorphism.hpp"

namespace mme {

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Points in C^n flattened to R^{2n} rows.
std::vector<std::vector<double>> flatten(const std::vector<CPoint>& points);

/// Pair counts within each radius (cumulative), exact counting through a
/// uniform grid index; parallel over grid cells with integer reduction.
std::vector<long long> correlation_counts(const std::vector<std::vector<double>>& pts,
                                          const std::vector<double>& radii);

/// Brute-force O(N^2) reference for correlation_counts, kept for testing.
std::vector<long long> correlation_counts_brute(const std::vector<std::vector<double>>& pts,
                                                const std::vector<double>& radii);

/// Grassberger-Procaccia slope of log C(r) vs log r over n_scales geometric
/// radii in [r_lo, r_hi]; stderr from the least-squares fit.
Estimate correlation_dimension(const std::vector<CPoint>& points, double r_lo, double r_hi,
                               int n_scales);

/// Levina-Bickel maximum-likelihood local dimension with k neighbors,
/// averaged over points; stderr by bootstrap (200 resamples). Exact
/// duplicates are merged first.
Estimate knn_local_dimension(const std::vector<CPoint>& points, int k,
                             std::uint64_t seed = 0x1D1Dull);

/// Default radii for correlation_dimension relative to the sample diameter.
struct RadiiSpec {
    double r_lo_frac = 1e-3;
    double r_hi_frac = 0.1;
    int n_scales = 12;
};

double sample_diameter(const std::vector<CPoint>& points);

// closed-form expressions

/// dim = log d / L (1D Lyapunov-exponent formula for harmonic measure)
double mane_formula(int d, double lyap_sum);

/// dim = log d * sum_i 1/lambda_i (conjectural n-dimensional formula)
double conjecture2_formula(int d, const std::vector<double>& exponents);

/// dim <= 2n - 2 + log d / max(log d, lambda_max); always <= 2n - 1
double theorem_bound(int d, double lambda_max, int n);

}  // namespace mme
