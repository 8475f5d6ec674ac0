#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mme/dimension.hpp"
#include "mme/endomorphism.hpp"
#include "mme/rng.hpp"

namespace mme::testing {

// ---- stock maps ----------------------------------------------------------

inline PolyMap zsq() { return PolyMap::one_d(Poly1D({cx(0), cx(0), cx(1)})); }

inline PolyMap quad(double c) { return PolyMap::one_d(Poly1D({cx(c), cx(0), cx(1)})); }

inline PolyMap prod_zsq_wsq() {
    Poly1D sq({cx(0), cx(0), cx(1)});
    return PolyMap::product({sq, sq});
}

// (z, w) -> (z^2 + c, w^2 + z)
inline PolyMap skew(double c = 0.0) {
    Poly1D p({cx(c), cx(0), cx(1)});
    std::vector<Poly1D> q_w = {Poly1D({cx(0), cx(1)}), Poly1D({cx(0)}), Poly1D({cx(1)})};
    return PolyMap::skew(p, q_w);
}

inline CPoint pt(cx z) {
    CPoint p(1);
    p[0] = z;
    return p;
}

inline CPoint pt(cx z, cx w) {
    CPoint p(2);
    p[0] = z;
    p[1] = w;
    return p;
}

// dense-form copy of any map (shares the term table)
inline PolyMap to_dense(const PolyMap& m) {
    DenseMap dm;
    dm.n = m.n();
    dm.components = m.terms();
    return PolyMap::dense(std::move(dm));
}

// ---- oracles -------------------------------------------------------------

// central finite differences of each component, step h
inline CMatrix fd_jacobian(const PolyMap& map, const CPoint& z, double h = 1e-6) {
    CMatrix J(map.n(), map.n());
    for (int v = 0; v < map.n(); ++v) {
        CPoint zp = z, zm = z;
        zp[v] += h;
        zm[v] -= h;
        CPoint col = (evaluate(map, zp) - evaluate(map, zm)) / (2.0 * h);
        for (int i = 0; i < map.n(); ++i) J(i, v) = col[i];
    }
    return J;
}

// chaos-game sampler for the middle-thirds Cantor set on [0,1] (as points
// in C with zero imaginary part)
inline std::vector<CPoint> cantor_ifs(int n, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0xCA707ull);
    double x = 0.5;
    for (int i = 0; i < 64; ++i) x = (rng.next_below(2) ? x / 3.0 + 2.0 / 3.0 : x / 3.0);
    std::vector<CPoint> out;
    for (int i = 0; i < n; ++i) {
        x = (rng.next_below(2) ? x / 3.0 + 2.0 / 3.0 : x / 3.0);
        out.push_back(pt(cx(x, 0.0)));
    }
    return out;
}

inline std::vector<CPoint> uniform_circle(int n, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0xC1Cull);
    std::vector<CPoint> out;
    for (int i = 0; i < n; ++i) out.push_back(pt(std::polar(1.0, 2.0 * M_PI * rng.next_double())));
    return out;
}

inline std::vector<CPoint> uniform_square(int n, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0x50ull);
    std::vector<CPoint> out;
    for (int i = 0; i < n; ++i) out.push_back(pt(cx(rng.next_double(), rng.next_double())));
    return out;
}

// ---- statistics ----------------------------------------------------------

// Kolmogorov-Smirnov statistic of angles against uniform on [0, 2pi)
inline double ks_uniform_angles(const std::vector<CPoint>& points) {
    std::vector<double> u;
    for (const auto& p : points) {
        double a = std::arg(p[0]);
        if (a < 0) a += 2.0 * M_PI;
        u.push_back(a / (2.0 * M_PI));
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    const double n = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::abs(u[i] - i / n));
        d = std::max(d, std::abs((i + 1) / n - u[i]));
    }
    return d;
}

inline double ks_critical_01(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

// two-sample energy statistic
inline double energy_statistic(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b) {
    auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    };
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (const auto& x : a)
        for (const auto& y : b) ab += dist(x, y);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) aa += dist(a[i], a[j]);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j) bb += dist(b[i], b[j]);
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    return 2.0 * ab / (na * nb) - 2.0 * aa / (na * na) - 2.0 * bb / (nb * nb);
}

// permutation test: true when the observed statistic falls below the 99th
// percentile of the permutation null (subsampled for speed)
inline bool energy_permutation_pass(const std::vector<CPoint>& a, const std::vector<CPoint>& b,
                                    std::size_t n_sub = 1500, int n_perm = 100,
                                    std::uint64_t seed = 0xE4E5ull) {
    CounterRng rng = CounterRng::stream(seed, 1);
    auto fa = flatten(a);
    auto fb = flatten(b);
    auto subsample = [&](std::vector<std::vector<double>>& v) {
        for (std::size_t i = 0; i < std::min(n_sub, v.size()); ++i)
            std::swap(v[i], v[i + rng.next_below(v.size() - i)]);
        if (v.size() > n_sub) v.resize(n_sub);
    };
    subsample(fa);
    subsample(fb);
    double observed = energy_statistic(fa, fb);

    std::vector<std::vector<double>> pool = fa;
    pool.insert(pool.end(), fb.begin(), fb.end());
    std::vector<double> null_stats;
    for (int p = 0; p < n_perm; ++p) {
        for (std::size_t i = 0; i + 1 < pool.size(); ++i)
            std::swap(pool[i], pool[i + rng.next_below(pool.size() - i)]);
        std::vector<std::vector<double>> pa(pool.begin(), pool.begin() + fa.size());
        std::vector<std::vector<double>> pb(pool.begin() + fa.size(), pool.end());
        null_stats.push_back(energy_statistic(pa, pb));
    }
    std::sort(null_stats.begin(), null_stats.end());
    double q99 = null_stats[static_cast<std::size_t>(0.99 * (null_stats.size() - 1))];
    return observed < q99;
}

}  // namespace mme::testing
