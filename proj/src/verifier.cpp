#include "mme/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "mme/parallel.hpp"
#include "mme/roots.hpp"

namespace mme {

namespace {

constexpr const char* kNormNote = "Euclidean (Hermitian) norm on C^n; induced operator norm";

double op_norm(const CMatrix& a) {
    if (a.rows() == 1) return std::abs(a(0, 0));
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

double inv_op_norm(const CMatrix& a) {
    if (a.rows() == 1) return 1.0 / std::abs(a(0, 0));
    Eigen::JacobiSVD<CMatrix> svd(a);
    return 1.0 / svd.singularValues()(svd.singularValues().size() - 1);
}

CPoint sphere_dir(int n, CounterRng& rng) {
    CPoint u(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        u[i] = cx(rng.next_normal(), rng.next_normal());
        norm2 += std::norm(u[i]);
    }
    return u / std::sqrt(norm2);
}

CPoint ball_point(const CPoint& center, double radius, CounterRng& rng) {
    int n = static_cast<int>(center.size());
    double r = radius * std::pow(rng.next_double(), 1.0 / (2.0 * n));
    return center + r * sphere_dir(n, rng);
}

double ball_volume(int complex_dim, double r) {
    // volume of the radius-r ball in R^{2n}: pi^n r^{2n} / n!
    double v = 1.0;
    for (int i = 1; i <= complex_dim; ++i) v *= M_PI * r * r / i;
    return v;
}

CPoint iterate_forward(const PolyMap& map, CPoint z, int m) {
    for (int i = 0; i < m; ++i) z = evaluate(map, z);
    return z;
}

struct BranchAmbiguity : VerifierError {
    using VerifierError::VerifierError;
};

}  // namespace

double default_det_constant(int n) { return n * std::pow(2.0, n); }

bool validate_det_constant(int n, double c, int n_matrices, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, 0x113ull);
    for (int t = 0; t < n_matrices; ++t) {
        CMatrix e(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e(i, j) = cx(rng.next_normal(), rng.next_normal());
        double target = rng.next_double();
        while (target == 0.0) target = rng.next_double();
        e *= target / op_norm(e);
        CMatrix a = CMatrix::Identity(n, n) + e;
        if (std::abs(a.determinant() - cx(1.0)) > 0.5 * c * target + 1e-12) return false;
    }
    return true;
}

double c2_norm_bound(const PolyMap& map, double radius) {
    double s = 0.0;
    for (const auto& comp : map.terms()) {
        for (const auto& t : comp) {
            int k = 0;
            for (int e : t.exponents) k += e;
            double a = std::abs(t.coeff);
            s += a * std::pow(radius, k);
            if (k >= 1) s += a * k * std::pow(radius, k - 1);
            if (k >= 2) s += a * k * k * std::pow(radius, k - 2);
        }
    }
    return s;
}

Lemma1Config::Lemma1Config(const PolyMap& map, double eps_, int n_test_points_)
    : eps(eps_),
      omega_radius(2.0 * escape_radius(map)),
      c2_norm(c2_norm_bound(map, omega_radius)),
      c_n(default_det_constant(map.n())),
      n_test_points(n_test_points_) {
    if (!(eps > 0.0 && eps < 3.0)) throw VerifierError("eps must lie in (0, 3)");
    if (!validate_det_constant(map.n(), c_n))
        throw VerifierError("determinant constant fails its validation");
}

VerificationReport verify_inverse_branch(const PolyMap& map, const CPoint& x,
                                         const Lemma1Config& cfg, std::uint64_t seed) {
    VerificationReport rep;
    rep.experiment = "lemma1";
    rep.note = kNormNote;

    CMatrix J = jacobian(map, x);
    double abs_det = std::abs(J.determinant());
    if (abs_det <= 1e-12) throw VerifierError("critical point");

    const double norm_j = op_norm(J);
    const double inv_j = inv_op_norm(J);
    const double m_const = cfg.c_n * (cfg.c2_norm + 1.0);
    const double r_x = (1.0 - std::exp(-cfg.eps / 3.0)) / (2.0 * m_const * inv_j * inv_j);
    if (r_x < 1e-14) throw VerifierError("r(x) below 1e-14: conditioning too poor to test");
    const double rho = (std::exp(cfg.eps / 3.0) - 1.0) / (m_const * inv_j);
    const CPoint fx = evaluate(map, x);

    const int n_pts = cfg.n_test_points;
    std::vector<CPoint> targets(n_pts), branch(n_pts);
    std::vector<int> in_ball(n_pts, 0);
    std::vector<double> dets(n_pts, 0.0);
    parallel_for(static_cast<std::size_t>(n_pts), [&](std::size_t i) {
        CounterRng rng = CounterRng::stream(seed, i + 1);
        CPoint t = ball_point(fx, r_x, rng);
        targets[i] = t;
        int count = 0;
        for (const CPoint& y : preimages(map, t)) {
            if ((y - x).norm() <= rho) {
                if (count == 0) branch[i] = y;
                ++count;
            }
        }
        in_ball[i] = count;
        if (count >= 1) dets[i] = std::abs(jacobian(map, branch[i]).determinant());
    });

    bool pass_a = true;
    for (int c : in_ball) pass_a = pass_a && (c == 1);

    const double slack = 1.0 + 1e-9;
    const double lip_g_bound = norm_j * std::exp(cfg.eps / 3.0);
    const double lip_ginv_bound = inv_j * std::exp(cfg.eps / 3.0);
    double max_lip_g = 0.0, max_lip_ginv = 0.0;
    if (pass_a) {
        for (int i = 0; i + 1 < n_pts; ++i) {
            double dt = (targets[i] - targets[i + 1]).norm();
            double dy = (branch[i] - branch[i + 1]).norm();
            if (dt <= 0.0 || dy <= 0.0) continue;
            max_lip_g = std::max(max_lip_g, dt / dy);
            max_lip_ginv = std::max(max_lip_ginv, dy / dt);
        }
    }
    bool pass_b = pass_a && max_lip_g <= lip_g_bound * slack;
    bool pass_c = pass_a && max_lip_ginv <= lip_ginv_bound * slack;

    double min_det = 1e300;
    for (int i = 0; i < n_pts; ++i)
        if (in_ball[i] >= 1) min_det = std::min(min_det, dets[i]);
    bool pass_d = pass_a && min_det >= abs_det * std::exp(-cfg.eps / 3.0) / slack;

    rep.pass = pass_a && pass_b && pass_c && pass_d;
    rep.measured = {
        {"r_x", r_x},
        {"rho", rho},
        {"op_norm", norm_j},
        {"inv_op_norm", inv_j},
        {"abs_det", abs_det},
        {"m_const", m_const},
        {"max_lip_g", max_lip_g},
        {"lip_g_bound", lip_g_bound},
        {"max_lip_g_inv", max_lip_ginv},
        {"lip_g_inv_bound", lip_ginv_bound},
        {"min_det", min_det},
        {"det_bound", abs_det * std::exp(-cfg.eps / 3.0)},
        {"unique_branch", pass_a ? 1.0 : 0.0},
    };
    if (!rep.pass)
        rep.note += pass_a ? "; a Lipschitz/determinant check failed" : "; branch not unique";
    return rep;
}

TrackedBranch track_branch(const PolyMap& map, const OrbitWindow& window, const CPoint& y) {
    TrackedBranch tb;
    tb.endpoint = y;
    for (int i = 1; i <= window.length(); ++i) {
        auto fiber = preimages(map, tb.endpoint);
        const CPoint& anchor = window.back_state(i);
        double best = 1e300, second = 1e300;
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < fiber.size(); ++j) {
            double d = (fiber[j] - anchor).norm();
            if (d < best) {
                second = best;
                best = d;
                best_idx = j;
            } else if (d < second) {
                second = d;
            }
        }
        if (second - best < 1e-10)
            throw BranchAmbiguity("two preimages equidistant: branch tracking ambiguous");
        tb.endpoint = fiber[best_idx];
        tb.abs_det *= std::abs(jacobian(map, tb.endpoint).determinant());
    }
    return tb;
}

namespace {

// largest sphere radius around x_{-m} whose forward image stays in B(x_0, r)
double measure_inner_radius(const PolyMap& map, const OrbitWindow& window, double r,
                            double s_init, std::uint64_t seed) {
    const int m = window.length();
    const CPoint& xm = window.states.front();
    const CPoint& x0 = window.x0();
    auto contained = [&](double s) {
        CounterRng rng = CounterRng::stream(seed, 0xD1Bull);
        for (int i = 0; i < 200; ++i) {
            CPoint u = xm + s * sphere_dir(map.n(), rng);
            if ((iterate_forward(map, u, m) - x0).norm() > r) return false;
        }
        return true;
    };

    double s = std::max(s_init, 1e-13);
    if (contained(s)) {
        double hi = s;
        for (int i = 0; i < 80 && contained(hi * 2.0); ++i) hi *= 2.0;
        double lo = hi, hi2 = hi * 2.0;
        for (int i = 0; i < 40; ++i) {
            double mid = 0.5 * (lo + hi2);
            (contained(mid) ? lo : hi2) = mid;
        }
        return lo;
    }
    double lo = s;
    int guard = 0;
    while (!contained(lo) && guard++ < 80) lo *= 0.5;
    if (guard >= 80) return 0.0;
    double hi = lo * 2.0;
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        (contained(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

VerificationReport verify_preimage_scaling(const PolyMap& map, const OrbitWindow& window,
                                           double r, double eps, const LyapunovEstimate& lyap,
                                           std::uint64_t seed) {
    VerificationReport rep;
    rep.experiment = "lemma2";
    rep.note = kNormNote;
    if (window.length() < 1) throw VerifierError("window length must be >= 1");

    const int m = window.length();
    const double lmax = lyap.lambda_max;
    const double lsum = lyap.lambda_sum;

    double radius = r;
    for (int attempt = 0;; ++attempt) {
        try {
            const double scale = std::exp(-m * (lmax + eps));

            double inner = measure_inner_radius(map, window, radius, radius * scale, seed);
            if (!(inner > 0.0)) throw VerifierError("inner radius collapsed to zero");
            double kappa_a = std::max(1.0, radius * scale / inner);

            // (a): verify the lemma-form radius, s' = (s/kappa) e^{-m(lmax+eps)}
            double s_prime = radius * scale / kappa_a;
            CounterRng rng = CounterRng::stream(seed, 0xAAull);
            bool pass_a = true;
            for (int i = 0; i < 200 && pass_a; ++i) {
                CPoint u = window.states.front() + s_prime * sphere_dir(map.n(), rng);
                pass_a = (iterate_forward(map, u, m) - window.x0()).norm() <= radius;
            }

            // (b): Monte Carlo volume of the branch preimage of B(x_0, r);
            // the real-volume Jacobian of F^m is |det_C DF^m|^2
            const int n_vol = 400;
            std::vector<double> inv_jac(n_vol);
            for (int i = 0; i < n_vol; ++i) {
                CPoint y = ball_point(window.x0(), radius, rng);
                TrackedBranch tb = track_branch(map, window, y);
                inv_jac[i] = 1.0 / (tb.abs_det * tb.abs_det);
            }
            double mean_inv = 0.0;
            for (double v : inv_jac) mean_inv += v;
            mean_inv /= n_vol;
            double volume = ball_volume(map.n(), radius) * mean_inv;

            double vol_scale = std::exp(-m * (2.0 * lsum - eps));
            double kappa_b = std::max(1.0, volume / vol_scale);
            double kappa = std::max(kappa_a, kappa_b);
            bool pass_b = volume <= kappa * vol_scale * (1.0 + 1e-9);

            rep.pass = pass_a && pass_b && kappa >= 1.0 && std::isfinite(kappa);
            rep.measured = {
                {"m", static_cast<double>(m)},
                {"r", radius},
                {"inner_radius", inner},
                {"s_prime", s_prime},
                {"kappa", kappa},
                {"kappa_inner", kappa_a},
                {"kappa_volume", kappa_b},
                {"volume", volume},
                {"lambda_max", lmax},
                {"lambda_sum", lsum},
                {"eps", eps},
            };
            return rep;
        } catch (const BranchAmbiguity&) {
            if (attempt >= 5) throw;
            radius *= 0.5;  // shrink and retry
        }
    }
}

VerificationReport covering_statistics(const PolyMap& map, const MeasureSample& sample,
                                       int m_lo, int m_hi, double r0, double eps,
                                       const LyapunovEstimate& lyap, std::uint64_t seed) {
    VerificationReport rep;
    rep.experiment = "covering";
    rep.note = kNormNote;
    if (m_hi - m_lo < 1) throw VerifierError("growth factor needs >= 2 scales");
    if (m_lo < 1 || m_hi > 12) throw VerifierError("m range must lie in [1, 12]");
    if (sample.points.size() < 5000) throw VerifierError("covering needs >= 5000 sample points");

    const int n = map.n();
    const double logd = std::log(static_cast<double>(map.degree()));
    const double lambda0 = std::max(lyap.lambda_max, logd);

    // kappa_0 from a few Lemma-2 windows
    double kappa0 = 1.0;
    for (int w = 0; w < 3; ++w) {
        OrbitWindow win = backward_orbit(map, m_hi, seed + 101 * (w + 1));
        auto l2 = verify_preimage_scaling(map, win, r0, eps, lyap, seed + w);
        kappa0 = std::max(kappa0, l2.measured.at("kappa"));
    }
    const double c = r0 / (4.0 * kappa0 * std::sqrt(2.0 * n));

    // one backward run of m_hi steps per sample point; prefixes give A_m
    const std::size_t n_pts = sample.points.size();
    std::vector<std::vector<CPoint>> tails(n_pts);
    parallel_for(n_pts, [&](std::size_t i) {
        try {
            OrbitWindow w = backward_orbit_from(map, sample.points[i], m_hi, seed ^ (i + 1));
            std::vector<CPoint> tail(m_hi);
            for (int m = 1; m <= m_hi; ++m) tail[m - 1] = w.back_state(m);
            tails[i] = std::move(tail);
        } catch (const std::runtime_error&) {
            // point has no valid m-window; drop it from the A_m proxies
        }
    });

    double max_growth = 0.0;
    std::vector<double> counts(m_hi - m_lo + 1, 0.0);
    for (int m = m_lo; m <= m_hi; ++m) {
        double edge = c * std::exp(-m * (lambda0 + eps));
        std::vector<std::vector<long long>> keys;
        for (const auto& tail : tails) {
            if (tail.empty()) continue;
            const CPoint& p = tail[m - 1];
            std::vector<long long> key(2 * n);
            for (int j = 0; j < n; ++j) {
                key[2 * j] = static_cast<long long>(std::floor(p[j].real() / edge));
                key[2 * j + 1] = static_cast<long long>(std::floor(p[j].imag() / edge));
            }
            keys.push_back(std::move(key));
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        if (keys.size() < 100)
            throw VerifierError("growth factor unreliable below 100 occupied cubes");
        counts[m - m_lo] = static_cast<double>(keys.size());
        if (m > m_lo) max_growth = std::max(max_growth, counts[m - m_lo] / counts[m - m_lo - 1]);
    }

    const double bound =
        map.degree() * std::exp(2.0 * (n - 1) * lambda0) * std::exp((2.0 * n + 1.0) * eps);
    rep.pass = max_growth <= bound * 1.2;
    rep.measured = {
        {"m_lo", static_cast<double>(m_lo)},
        {"m_hi", static_cast<double>(m_hi)},
        {"kappa0", kappa0},
        {"cube_edge_c", c},
        {"lambda0", lambda0},
        {"max_growth", max_growth},
        {"growth_bound", bound},
        {"cubes_at_m_lo", counts.front()},
        {"cubes_at_m_hi", counts.back()},
        {"eps", eps},
    };
    return rep;
}

}  // namespace mme
