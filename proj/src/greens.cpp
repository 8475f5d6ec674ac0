#include "mme/greens.hpp"

#include <cmath>

namespace mme {

namespace {

double total_coeff_mass(const PolyMap& map) {
    double s = 0.0;
    for (const auto& comp : map.terms())
        for (const auto& t : comp) s += std::abs(t.coeff);
    return s;
}

}  // namespace

double escape_radius(const PolyMap& map) {
    double m = leading_form_min(map);
    if (!(m > 1e-10)) throw MapError("map is not regular: leading form vanishes on the sphere");
    double c = lower_order_mass(map);
    return std::max(1.0, (2.0 + c) / m);
}

double escape_rate(const PolyMap& map, const CPoint& z0, const EscapeParams& params) {
    const double d = static_cast<double>(map.degree());
    // direct evaluation is safe below this norm; beyond it we track
    // log||z|| and the unit direction via the leading form only
    const double mass = total_coeff_mass(map);
    const double switch_norm =
        std::min(1e100, std::pow(1e120 / (1.0 + mass), 1.0 / map.degree()));

    CPoint z = z0;
    int m = 0;
    while (m < params.max_iter && z.norm() <= params.escape_radius) {
        z = evaluate(map, z);
        ++m;
    }
    if (z.norm() <= params.escape_radius) return 0.0;

    // escaped: refine until the geometric tail is below tol
    double log_norm = std::log(z.norm());
    CPoint u;
    bool tracking = false;
    double g_prev = std::pow(d, -m) * std::max(0.0, log_norm);
    for (int extra = 0; extra < params.max_iter + 300; ++extra) {
        if (!tracking && z.norm() > switch_norm) {
            log_norm = std::log(z.norm());
            u = z / z.norm();
            tracking = true;
        }
        if (tracking) {
            CPoint h = evaluate_leading_form(map, u);
            log_norm = d * log_norm + std::log(h.norm());
            u = h / h.norm();
        } else {
            z = evaluate(map, z);
            log_norm = std::log(z.norm());
        }
        ++m;
        double g = std::pow(d, -m) * log_norm;
        if (std::abs(g - g_prev) / (d - 1.0) < 0.5 * params.tol) return g;
        g_prev = g;
    }
    return g_prev;
}

bool in_filled_julia(const PolyMap& map, const CPoint& z0, const EscapeParams& params) {
    CPoint z = z0;
    for (int m = 0; m < params.max_iter; ++m) {
        if (z.norm() > params.escape_radius) return false;
        z = evaluate(map, z);
    }
    return z.norm() <= params.escape_radius;
}

}  // namespace mme
