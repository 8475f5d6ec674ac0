#include "mme/poly.hpp"

#include <algorithm>
#include <cmath>

namespace mme {

Poly1D::Poly1D(std::vector<cx> coeffs) {
    while (coeffs.size() > 1 && coeffs.back() == cx(0.0)) coeffs.pop_back();
    if (coeffs.empty()) coeffs.push_back(cx(0.0));
    coeffs_ = std::move(coeffs);

    double lo = 1e300, hi = 0.0;
    for (const cx& c : coeffs_) {
        double a = std::abs(c);
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    wide_range_ = (hi > 0.0 && hi / lo > 1e8);
}

cx Poly1D::eval(cx z) const {
    if (wide_range_) {
        std::complex<long double> zl(z.real(), z.imag());
        std::complex<long double> acc(0.0L, 0.0L);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * zl + std::complex<long double>(it->real(), it->imag());
        return cx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    cx acc(0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cx Poly1D::eval_derivative(cx z) const {
    cx acc(0.0);
    for (int k = degree(); k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[k];
    return acc;
}

Poly1D Poly1D::derivative() const {
    if (degree() == 0) return Poly1D({cx(0.0)});
    std::vector<cx> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Poly1D(std::move(d));
}

double Poly1D::lower_order_mass() const {
    double s = 0.0;
    for (int k = 0; k < degree(); ++k) s += std::abs(coeffs_[k]);
    return s;
}

}  // namespace mme
