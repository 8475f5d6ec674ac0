#pragma once

#include <stdexcept>
#include <vector>

#include "mme/poly.hpp"

namespace mme {

struct RootFindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All complex roots of p, listed with multiplicity (size == degree).
///
/// Degree 1 and 2 are solved in closed form; higher degrees use the
/// Aberth-Ehrlich simultaneous iteration started on a perturbed circle
/// (convergence 1e-12, max 200 iterations, up to 5 restarts on stall).
/// Roots closer than the clustering tolerance are merged into one
/// multiple root at their centroid.
std::vector<cx> all_roots(const Poly1D& p);

}  // namespace mme
