#include "mme/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "mme/parallel.hpp"
#include "mme/rng.hpp"

namespace mme {

std::vector<std::vector<double>> flatten(const std::vector<CPoint>& points) {
    std::vector<std::vector<double>> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const CPoint& p = points[i];
        std::vector<double> row(2 * p.size());
        for (int j = 0; j < p.size(); ++j) {
            row[2 * j] = p[j].real();
            row[2 * j + 1] = p[j].imag();
        }
        out[i] = std::move(row);
    }
    return out;
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

using CellKey = std::vector<long long>;

struct CellKeyLess {
    bool operator()(const CellKey& a, const CellKey& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

// bucket index = first radius containing the distance, or npos
void bucket_pair(double d2, const std::vector<double>& radii2, std::vector<long long>& buckets) {
    auto it = std::lower_bound(radii2.begin(), radii2.end(), d2);
    if (it != radii2.end()) ++buckets[it - radii2.begin()];
}

}  // namespace

std::vector<long long> correlation_counts_brute(const std::vector<std::vector<double>>& pts,
                                                const std::vector<double>& radii) {
    std::vector<double> radii2(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) radii2[i] = radii[i] * radii[i];
    std::vector<long long> buckets(radii.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            bucket_pair(dist2(pts[i], pts[j]), radii2, buckets);
    for (std::size_t i = 1; i < buckets.size(); ++i) buckets[i] += buckets[i - 1];
    return buckets;
}

std::vector<long long> correlation_counts(const std::vector<std::vector<double>>& pts,
                                          const std::vector<double>& radii) {
    if (pts.empty()) return std::vector<long long>(radii.size(), 0);
    const std::size_t dim = pts[0].size();
    const double cell = radii.back();
    std::vector<double> radii2(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) radii2[i] = radii[i] * radii[i];

    std::map<CellKey, std::vector<int>, CellKeyLess> grid;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CellKey key(dim);
        for (std::size_t d = 0; d < dim; ++d)
            key[d] = static_cast<long long>(std::floor(pts[i][d] / cell));
        grid[key].push_back(static_cast<int>(i));
    }

    std::vector<const CellKey*> keys;
    std::vector<const std::vector<int>*> cells;
    for (const auto& [k, v] : grid) {
        keys.push_back(&k);
        cells.push_back(&v);
    }

    // neighbor offsets that are lexicographically positive (plus zero for
    // the in-cell pairs) so each pair is visited exactly once
    std::vector<CellKey> offsets;
    CellKey off(dim, -1);
    while (true) {
        bool positive = false, zero = true;
        for (std::size_t d = 0; d < dim; ++d) {
            if (off[d] != 0) zero = false;
            if (off[d] > 0) {
                positive = true;
                break;
            }
            if (off[d] < 0) break;
        }
        if (positive || zero) offsets.push_back(off);
        std::size_t d = dim;
        while (d > 0 && ++off[d - 1] == 2) off[--d] = -1;
        if (d == 0) break;
    }

    std::vector<std::vector<long long>> local(keys.size());
    parallel_for(keys.size(), [&](std::size_t ci) {
        std::vector<long long> buckets(radii.size(), 0);
        const auto& idx = *cells[ci];
        for (const CellKey& o : offsets) {
            bool zero = std::all_of(o.begin(), o.end(), [](long long v) { return v == 0; });
            if (zero) {
                for (std::size_t a = 0; a < idx.size(); ++a)
                    for (std::size_t b = a + 1; b < idx.size(); ++b)
                        bucket_pair(dist2(pts[idx[a]], pts[idx[b]]), radii2, buckets);
            } else {
                CellKey nk(dim);
                for (std::size_t d = 0; d < dim; ++d) nk[d] = (*keys[ci])[d] + o[d];
                auto it = grid.find(nk);
                if (it == grid.end()) continue;
                for (int a : idx)
                    for (int b : it->second) bucket_pair(dist2(pts[a], pts[b]), radii2, buckets);
            }
        }
        local[ci] = std::move(buckets);
    });

    std::vector<long long> buckets(radii.size(), 0);
    for (const auto& lb : local)
        for (std::size_t i = 0; i < radii.size(); ++i) buckets[i] += lb[i];
    for (std::size_t i = 1; i < buckets.size(); ++i) buckets[i] += buckets[i - 1];
    return buckets;
}

Estimate correlation_dimension(const std::vector<CPoint>& points, double r_lo, double r_hi,
                               int n_scales) {
    if (points.size() < 2000) throw DimensionError("correlation dimension needs >= 2000 points");
    if (!(0.0 < r_lo && r_lo < r_hi)) throw DimensionError("need 0 < r_lo < r_hi");
    if (n_scales < 3) throw DimensionError("need at least 3 scales");

    std::vector<double> radii(n_scales);
    double ratio = std::pow(r_hi / r_lo, 1.0 / (n_scales - 1));
    for (int i = 0; i < n_scales; ++i) radii[i] = r_lo * std::pow(ratio, i);

    auto pts = flatten(points);
    auto counts = correlation_counts(pts, radii);
    if (counts[0] < 10) throw DimensionError("fewer than 10 pairs at r_lo: radii too small");

    const double total = 0.5 * static_cast<double>(points.size()) * (points.size() - 1);
    std::vector<double> xs, ys;
    for (int i = 0; i < n_scales; ++i) {
        xs.push_back(std::log(radii[i]));
        ys.push_back(std::log(static_cast<double>(counts[i]) / total));
    }

    // least-squares slope with standard error
    double xm = 0.0, ym = 0.0;
    for (int i = 0; i < n_scales; ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= n_scales;
    ym /= n_scales;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n_scales; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    double slope = sxy / sxx;
    double ss_res = 0.0;
    for (int i = 0; i < n_scales; ++i) {
        double resid = ys[i] - ym - slope * (xs[i] - xm);
        ss_res += resid * resid;
    }
    double se = std::sqrt(ss_res / (n_scales - 2) / sxx);
    return Estimate{slope, se};
}

Estimate knn_local_dimension(const std::vector<CPoint>& points, int k, std::uint64_t seed) {
    if (k < 4) throw DimensionError("k must be >= 4");
    auto pts = flatten(points);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());  // merge duplicates
    const std::size_t n = pts.size();
    if (n < static_cast<std::size_t>(100 * k))
        throw DimensionError("knn dimension needs >= 100*k distinct points");

    std::vector<double> local_dim(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> d2(n - 1);
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d2[w++] = dist2(pts[i], pts[j]);
        std::nth_element(d2.begin(), d2.begin() + k - 1, d2.end());
        std::sort(d2.begin(), d2.begin() + k);
        double tk = std::sqrt(d2[k - 1]);
        double acc = 0.0;
        for (int j = 0; j < k - 1; ++j) acc += std::log(tk / std::sqrt(d2[j]));
        // (k-2) numerator debiases the inverse-mean: E[(k-1)/acc] = m (k-1)/(k-2)
        local_dim[i] = (k - 2) / acc;
    });

    double mean = 0.0;
    for (double v : local_dim) mean += v;
    mean /= n;

    // bootstrap over points
    const int n_boot = 200;
    CounterRng rng = CounterRng::stream(seed, 0xB007ull);
    double bm = 0.0, bm2 = 0.0;
    for (int b = 0; b < n_boot; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += local_dim[rng.next_below(n)];
        s /= n;
        bm += s;
        bm2 += s * s;
    }
    bm /= n_boot;
    double se = std::sqrt(std::max(0.0, bm2 / n_boot - bm * bm));
    return Estimate{mean, se};
}

double sample_diameter(const std::vector<CPoint>& points) {
    auto pts = flatten(points);
    std::size_t dim = pts[0].size();
    double d2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : pts) {
            lo = std::min(lo, p[d]);
            hi = std::max(hi, p[d]);
        }
        d2 += (hi - lo) * (hi - lo);
    }
    return std::sqrt(d2);
}

double mane_formula(int d, double lyap_sum) {
    if (d < 2) throw DimensionError("degree must be >= 2");
    if (!(lyap_sum > 0.0)) throw DimensionError("Lyapunov exponent must be positive");
    return std::log(static_cast<double>(d)) / lyap_sum;
}

double conjecture2_formula(int d, const std::vector<double>& exponents) {
    if (d < 2) throw DimensionError("degree must be >= 2");
    double s = 0.0;
    for (double l : exponents) {
        if (!(l > 0.0)) throw DimensionError("exponents must be positive");
        s += 1.0 / l;
    }
    return std::log(static_cast<double>(d)) * s;
}

double theorem_bound(int d, double lambda_max, int n) {
    if (d < 2) throw DimensionError("degree must be >= 2");
    if (!(lambda_max > 0.0)) throw DimensionError("lambda_max must be positive");
    double logd = std::log(static_cast<double>(d));
    return 2.0 * n - 2.0 + logd / std::max(logd, lambda_max);
}

}  // namespace mme
