#pragma once

#include <map>
#include <string>

#include "mme/lyapunov.hpp"
#include "mme/sampler.hpp"

namespace mme {

struct VerifierError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration for the inverse-branch experiment. Construction validates
/// the determinant constant c_n on 10^4 random matrices with ||A - I|| < 1:
/// |det A - 1| <= (c_n / 2) ||A - I||.
struct Lemma1Config {
    double eps;
    double omega_radius;
    double c2_norm;  // upper bound for ||g||_C2 on the omega ball
    double c_n;
    int n_test_points;

    Lemma1Config(const PolyMap& map, double eps_, int n_test_points_ = 10000);
};

// default determinant constant, n * 2^n
double default_det_constant(int n);

// checks |det A - 1| <= (c/2)||A - I|| on n_matrices random A, ||A - I|| < 1
bool validate_det_constant(int n, double c, int n_matrices = 10000,
                           std::uint64_t seed = 0xDE7ull);

// coefficient-sum upper bound for the C^2 norm of the map on a ball
double c2_norm_bound(const PolyMap& map, double radius);

struct VerificationReport {
    std::string experiment;  // "lemma1", "lemma2", "covering"
    bool pass = false;
    std::map<std::string, double> measured;
    std::string note;  // norm convention and failure details
};

/// Inverse-branch experiment at a noncritical point x: computes the
/// contraction radius r(x) = (1 - e^{-eps/3}) / (2 M ||(D_x g)^{-1}||^2)
/// with M = c_n (||g||_C2 + 1), then Monte Carlo checks over the target
/// ball B(g(x), r(x)): branch uniqueness inside B(x, rho), both Lipschitz
/// ratios, and the determinant lower bound.
VerificationReport verify_inverse_branch(const PolyMap& map, const CPoint& x,
                                         const Lemma1Config& cfg, std::uint64_t seed);

/// Backward-scaling experiment along one window: measures the largest inner
/// radius s' with F^m(B(x_{-m}, s')) inside B(x_0, r), and the volume of the
/// tracked inverse-branch preimage of B(x_0, r) by Monte Carlo change of
/// variables; checks both against the e^{-m(lambda_max+eps)} and
/// e^{-m(2 Lambda - eps)} scaling laws with the measured constant kappa.
VerificationReport verify_preimage_scaling(const PolyMap& map, const OrbitWindow& window,
                                           double r, double eps, const LyapunovEstimate& lyap,
                                           std::uint64_t seed = 0x5CA1Eull);

/// Mesh-cube covering experiment: covers the m-fold backward-iterated
/// sample by cubes of edge c e^{-m(lambda_0+eps)} for each m in
/// [m_lo, m_hi] and checks the per-step growth of occupied-cube counts
/// against d e^{2(n-1) lambda_0} e^{(2n+1) eps} (with 20% slack).
VerificationReport covering_statistics(const PolyMap& map, const MeasureSample& sample,
                                       int m_lo, int m_hi, double r0, double eps,
                                       const LyapunovEstimate& lyap,
                                       std::uint64_t seed = 0xC0E5ull);

// Inverse branch of F^m along a window by nearest-preimage continuation.
// Returns the endpoint and the accumulated |det DF^m| along the branch.
struct TrackedBranch {
    CPoint endpoint;
    double abs_det = 1.0;
};
TrackedBranch track_branch(const PolyMap& map, const OrbitWindow& window, const CPoint& y);

}  // namespace mme
