#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace mme {

using cx = std::complex<double>;

/// Univariate polynomial c_0 + c_1 z + ... + c_d z^d with c_d != 0.
class Poly1D {
  public:
    Poly1D() = default;

    // Trailing zero coefficients are stripped; the zero polynomial is
    // stored as the single coefficient 0.
    explicit Poly1D(std::vector<cx> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cx>& coeffs() const { return coeffs_; }
    cx leading() const { return coeffs_.back(); }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == cx(0.0); }

    // Horner evaluation; switches to extended precision when the
    // coefficient magnitudes span more than 1e8 (cancellation guard).
    cx eval(cx z) const;

    cx eval_derivative(cx z) const;

    Poly1D derivative() const;

    // sum of |c_k| for k < degree (used by escape-radius bounds)
    double lower_order_mass() const;

  private:
    std::vector<cx> coeffs_{cx(0.0)};
    bool wide_range_ = false;
};

inline Poly1D operator-(const Poly1D& p, cx c) {
    auto coeffs = p.coeffs();
    coeffs[0] -= c;
    return Poly1D(coeffs);
}

}  // namespace mme
