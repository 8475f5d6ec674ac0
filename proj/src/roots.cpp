#include "mme/roots.hpp"

#include <algorithm>
#include <cmath>

#include "mme/rng.hpp"

namespace mme {

namespace {

// stable complex quadratic a z^2 + b z + c
std::vector<cx> quadratic_roots(cx a, cx b, cx c) {
    cx disc = std::sqrt(b * b - 4.0 * a * c);
    // pick the sign that avoids cancellation in b + disc
    if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
    cx q = -0.5 * (b + disc);
    cx r1 = q / a;
    cx r2 = (std::abs(q) > 0.0) ? c / q : -b / a - r1;
    return {r1, r2};
}

bool aberth_pass(const Poly1D& p, const Poly1D& dp, std::vector<cx>& z) {
    const int d = static_cast<int>(z.size());
    for (int iter = 0; iter < 200; ++iter) {
        double max_step = 0.0;
        for (int i = 0; i < d; ++i) {
            cx pv = p.eval(z[i]);
            cx dv = dp.eval(z[i]);
            cx ratio;
            if (std::abs(dv) > 0.0) {
                ratio = pv / dv;
            } else {
                // nudge off the critical point
                z[i] += cx(1e-8, 1e-8);
                max_step = 1.0;
                continue;
            }
            cx s(0.0);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                cx diff = z[i] - z[j];
                if (std::abs(diff) < 1e-300) diff = cx(1e-300, 0.0);
                s += 1.0 / diff;
            }
            cx denom = 1.0 - ratio * s;
            cx w = (std::abs(denom) > 1e-300) ? ratio / denom : ratio;
            z[i] -= w;
            max_step = std::max(max_step, std::abs(w) / (1.0 + std::abs(z[i])));
        }
        if (max_step < 1e-12) return true;
    }
    return false;
}

void newton_polish(const Poly1D& p, const Poly1D& dp, std::vector<cx>& z) {
    for (cx& r : z) {
        for (int k = 0; k < 3; ++k) {
            cx dv = dp.eval(r);
            if (std::abs(dv) < 1e-300) break;
            cx step = p.eval(r) / dv;
            if (!std::isfinite(std::abs(step))) break;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(r))) break;
            r -= step;
        }
    }
}

// merge roots within 1e-8 (relative to magnitude) into centroid clusters
std::vector<cx> cluster_multiplicities(std::vector<cx> roots) {
    std::vector<cx> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cx sum = roots[i];
        std::size_t count = 1;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            double tol = 1e-8 * (1.0 + std::max(std::abs(roots[i]), std::abs(roots[j])));
            if (std::abs(roots[i] - roots[j]) < tol) {
                used[j] = true;
                sum += roots[j];
                ++count;
            }
        }
        cx centroid = sum / static_cast<double>(count);
        for (std::size_t k = 0; k < count; ++k) out.push_back(centroid);
    }
    return out;
}

}  // namespace

std::vector<cx> all_roots(const Poly1D& p) {
    const int d = p.degree();
    if (d <= 0) throw RootFindError("constant polynomial has no roots");
    const auto& c = p.coeffs();

    // factor out exact roots at the origin
    int zeros = 0;
    while (zeros < d && c[zeros] == cx(0.0)) ++zeros;
    if (zeros > 0) {
        std::vector<cx> reduced(c.begin() + zeros, c.end());
        std::vector<cx> roots(zeros, cx(0.0));
        if (static_cast<int>(reduced.size()) > 1) {
            auto rest = all_roots(Poly1D(std::move(reduced)));
            roots.insert(roots.end(), rest.begin(), rest.end());
        }
        return cluster_multiplicities(std::move(roots));
    }

    if (d == 1) return {-c[0] / c[1]};
    if (d == 2) return cluster_multiplicities(quadratic_roots(c[2], c[1], c[0]));

    // Cauchy bound for the initial circle radius
    double bound = 0.0;
    for (int k = 0; k < d; ++k) bound = std::max(bound, std::abs(c[k] / c[d]));
    double radius = 1.0 + bound;

    Poly1D dp = p.derivative();
    for (int restart = 0; restart < 5; ++restart) {
        CounterRng rng = CounterRng::stream(0x41B2E7ull, static_cast<std::uint64_t>(restart));
        std::vector<cx> z(d);
        for (int i = 0; i < d; ++i) {
            double theta = 2.0 * M_PI * (i + 0.26) / d + 0.1 * rng.next_double();
            double r = radius * (0.7 + 0.4 * rng.next_double());
            z[i] = std::polar(r, theta);
        }
        if (aberth_pass(p, dp, z)) {
            newton_polish(p, dp, z);
            return cluster_multiplicities(std::move(z));
        }
    }
    throw RootFindError("Aberth iteration failed to converge (ill-conditioned coefficients)");
}

}  // namespace mme
