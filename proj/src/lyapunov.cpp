#include "mme/lyapunov.hpp"

#include <cmath>

#include "mme/parallel.hpp"

namespace mme {

namespace {

struct PointStats {
    double lmax = 0.0, lmin = 0.0, lsum = 0.0;
    bool used = false;
};

// Cocycle along one forward orbit. The orbit is extended past the cocycle
// length to locate the escape step, if any; the cocycle is truncated at the
// last index whose escape rate stays below 1e-6.
PointStats point_cocycle(const PolyMap& map, const CPoint& x, int m, double radius) {
    PointStats s;
    if (x.norm() > 2.0 * radius)
        throw SamplerError("orbit escapes the 2R ball: sample point not on K_F");

    const int lookahead = 40;
    std::vector<CPoint> orbit;
    orbit.reserve(m + 1);
    orbit.push_back(x);
    int escape_step = -1;
    CPoint z = x;
    for (int k = 1; k <= m + lookahead; ++k) {
        z = evaluate(map, z);
        if (k <= m) orbit.push_back(z);
        if (z.norm() > radius) {
            escape_step = k;
            break;
        }
    }

    int m_eff = m;
    if (escape_step >= 0) {
        // G(z_k) ~ d^{k-e} log||z_e||; keep steps with G below the guard
        double g_at_escape = std::log(std::max(z.norm(), 1.01 * radius));
        double budget = std::log(g_at_escape / 1e-6) / std::log(static_cast<double>(map.degree()));
        m_eff = std::min(m, std::max(0, escape_step - 1 - static_cast<int>(std::ceil(budget))));
    }
    if (m_eff < 1) return s;  // impure sample point, skipped

    const int n = map.n();
    double log_top = 0.0, log_bot = 0.0, log_det = 0.0;
    if (n == 1) {
        for (int k = 0; k < m_eff; ++k) {
            double a = std::abs(jacobian(map, orbit[k])(0, 0));
            if (a < 1e-300) throw SamplerError("singular Jacobian on orbit");
            log_top += std::log(a);
        }
        log_bot = log_det = log_top;
    } else {
        CMatrix Q = CMatrix::Identity(n, n);
        for (int k = 0; k < m_eff; ++k) {
            CMatrix J = jacobian(map, orbit[k]);
            double adet = std::abs(J.determinant());
            if (adet < 1e-300) throw SamplerError("singular Jacobian on orbit");
            log_det += std::log(adet);
            Eigen::HouseholderQR<CMatrix> qr(J * Q);
            CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
            Q = qr.householderQ();
            log_top += std::log(std::abs(R(0, 0)));
            log_bot += std::log(std::abs(R(n - 1, n - 1)));
        }
    }
    s.lmax = log_top / m_eff;
    s.lmin = log_bot / m_eff;
    s.lsum = log_det / m_eff;
    s.used = true;
    return s;
}

template <class Loop>
LyapunovEstimate estimate_impl(const PolyMap& map, const MeasureSample& sample, int m,
                               Loop&& loop) {
    if (m < 1) throw SamplerError("cocycle length must be >= 1");
    if (sample.points.empty()) throw SamplerError("empty sample");
    double radius = escape_radius(map);

    std::vector<PointStats> stats(sample.points.size());
    std::exception_ptr err;  // exceptions must not escape the parallel region
    loop(sample.points.size(), [&](std::size_t i) {
        try {
            stats[i] = point_cocycle(map, sample.points[i], m, radius);
        } catch (...) {
            if (!err) err = std::current_exception();
        }
    });
    if (err) std::rethrow_exception(err);

    // serial reduction keeps parallel and serial runs identical
    auto reduce = [&](auto&& get) {
        double mean = 0.0;
        int n = 0;
        for (const auto& s : stats)
            if (s.used) {
                mean += get(s);
                ++n;
            }
        mean /= n;
        double var = 0.0;
        for (const auto& s : stats)
            if (s.used) var += (get(s) - mean) * (get(s) - mean);
        var = (n > 1) ? var / (n - 1) : 0.0;
        return std::pair<double, double>(mean, std::sqrt(var / n));
    };

    int used = 0;
    for (const auto& s : stats)
        if (s.used) ++used;
    if (used == 0) throw SamplerError("no usable sample points for the cocycle");

    LyapunovEstimate est;
    auto [mn, se_mn] = reduce([](const PointStats& s) { return s.lmin; });
    auto [mx, se_mx] = reduce([](const PointStats& s) { return s.lmax; });
    auto [sm, se_sm] = reduce([](const PointStats& s) { return s.lsum; });
    est.lambda_min = mn;
    est.lambda_max = mx;
    est.lambda_sum = sm;
    est.stderr_min = se_mn;
    est.stderr_max = se_mx;
    est.stderr_sum = se_sm;
    est.n_orbits = used;
    est.cocycle_length = m;
    return est;
}

}  // namespace

LyapunovEstimate estimate_exponents(const PolyMap& map, const MeasureSample& sample,
                                    int cocycle_length) {
    return estimate_impl(map, sample, cocycle_length,
                         [](std::size_t c, auto&& f) { parallel_for(c, f); });
}

LyapunovEstimate estimate_exponents_serial(const PolyMap& map, const MeasureSample& sample,
                                           int cocycle_length) {
    return estimate_impl(map, sample, cocycle_length,
                         [](std::size_t c, auto&& f) { serial_for(c, f); });
}

BoundsReport check_bounds(const LyapunovEstimate& est, int d, int n) {
    BoundsReport r;
    double logd = std::log(static_cast<double>(d));
    r.briend_duval.threshold = 0.5 * logd;
    r.briend_duval.margin = est.lambda_min - r.briend_duval.threshold + 3.0 * est.stderr_min;
    r.briend_duval.pass = r.briend_duval.margin >= 0.0;
    r.bedford_jonsson.threshold = 0.5 * (n + 1) * logd;
    r.bedford_jonsson.margin = est.lambda_sum - r.bedford_jonsson.threshold + 3.0 * est.stderr_sum;
    r.bedford_jonsson.pass = r.bedford_jonsson.margin >= 0.0;
    return r;
}

}  // namespace mme
