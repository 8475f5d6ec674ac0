#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mme/poly.hpp"

namespace mme {

using CPoint = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Product of n one-variable polynomials of equal degree, acting coordinatewise.
struct ProductMap {
    std::vector<Poly1D> components;
};

/// F(z, w) = (p(z), q(z, w)) with q(z, w) = sum_j a_j(z) w^j, j = 0..d,
/// deg a_j <= d - j (total degree <= d) and deg_w slot d declared.
struct SkewMap {
    Poly1D p;
    std::vector<Poly1D> q_w;  // a_0 .. a_d as polynomials in z
};

/// Dense n-variate representation: per component, a list of monomial terms.
/// Supports evaluation, derivatives, and Green's function only.
struct DenseMap {
    struct Term {
        std::vector<int> exponents;
        cx coeff;
    };
    int n = 0;
    std::vector<std::vector<Term>> components;
};

/// A polynomial endomorphism of C^n in one of the closed families
/// (1D, product, 2D skew product) or general dense form. Immutable
/// after construction; safe to share across threads.
class PolyMap {
  public:
    static PolyMap one_d(Poly1D p);
    static PolyMap product(std::vector<Poly1D> components);
    static PolyMap skew(Poly1D p, std::vector<Poly1D> q_w);
    static PolyMap dense(DenseMap m);

    int n() const { return n_; }
    int degree() const { return d_; }
    // d^n as a count of preimages
    long fiber_size() const;

    bool is_one_d() const { return std::holds_alternative<Poly1D>(v_); }
    bool is_product() const { return std::holds_alternative<ProductMap>(v_); }
    bool is_skew() const { return std::holds_alternative<SkewMap>(v_); }
    bool is_dense() const { return std::holds_alternative<DenseMap>(v_); }
    bool has_inverse_branches() const { return !is_dense(); }

    const Poly1D& as_one_d() const { return std::get<Poly1D>(v_); }
    const ProductMap& as_product() const { return std::get<ProductMap>(v_); }
    const SkewMap& as_skew() const { return std::get<SkewMap>(v_); }
    const DenseMap& as_dense() const { return std::get<DenseMap>(v_); }

    // monomial-term view of every component (used by escape-radius and
    // C^2-norm bounds; built once at construction)
    const std::vector<std::vector<DenseMap::Term>>& terms() const { return terms_; }

  private:
    PolyMap() = default;
    std::variant<Poly1D, ProductMap, SkewMap, DenseMap> v_;
    int n_ = 0;
    int d_ = 0;
    std::vector<std::vector<DenseMap::Term>> terms_;
};

CPoint evaluate(const PolyMap& map, const CPoint& z);

CMatrix jacobian(const PolyMap& map, const CPoint& z);

struct RegularityResult {
    bool regular = false;
    bool sampled = false;  // true when decided by sphere sampling
    double min_leading_form = 0.0;
};

/// Regularity = the top homogeneous parts vanish simultaneously only at 0.
/// Closed criteria for the three families; sphere sampling with local
/// refinement (tolerance 1e-10) for the dense form.
RegularityResult check_regularity(const PolyMap& map);

inline bool is_regular(const PolyMap& map) { return check_regularity(map).regular; }

/// All d^n solutions of F(x) = target, with multiplicity.
/// Unsupported for DenseMap.
std::vector<CPoint> preimages(const PolyMap& map, const CPoint& target);

// min over the unit sphere of ||H(u)|| for the top homogeneous part H
// (exact for 1D/product, sampled + refined otherwise)
double leading_form_min(const PolyMap& map);

// sum of |coeff| over all monomials of total degree < d, all components
double lower_order_mass(const PolyMap& map);

// evaluate only the top homogeneous part (used for huge-orbit log tracking)
CPoint evaluate_leading_form(const PolyMap& map, const CPoint& u);

}  // namespace mme
