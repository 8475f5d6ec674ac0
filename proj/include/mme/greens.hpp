#pragma once

#include "mme/endomorphism.hpp"

namespace mme {

struct EscapeParams {
    double escape_radius = 0.0;  // must satisfy ||z|| > R => ||F(z)|| >= 2||z||
    int max_iter = 1000;
    double tol = 1e-9;
};

/// R = max(1, (2 + sum of lower-order coefficient magnitudes) / min of the
/// leading form on the unit sphere); exact for 1D/product maps, sphere
/// sampled for skew/dense. Throws if the map is not regular.
double escape_radius(const PolyMap& map);

inline EscapeParams default_params(const PolyMap& map) {
    return EscapeParams{escape_radius(map), 1000, 1e-9};
}

/// Escape rate G_F(z) = lim d^{-m} log+ ||F^m(z)||, to accuracy params.tol.
/// Returns 0 when the orbit stays bounded for params.max_iter steps.
double escape_rate(const PolyMap& map, const CPoint& z, const EscapeParams& params);

/// True iff the orbit stays within the escape radius for max_iter steps.
/// One-sided: "false" is certain, "true" may be a slow escaper.
bool in_filled_julia(const PolyMap& map, const CPoint& z, const EscapeParams& params);

}  // namespace mme
