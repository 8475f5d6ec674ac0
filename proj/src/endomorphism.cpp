#include "mme/endomorphism.hpp"

#include <algorithm>
#include <cmath>

#include "mme/rng.hpp"
#include "mme/roots.hpp"

namespace mme {

namespace {

std::vector<DenseMap::Term> terms_of_poly1d(const Poly1D& p, int n, int var) {
    std::vector<DenseMap::Term> out;
    for (int k = 0; k <= p.degree(); ++k) {
        if (p.coeffs()[k] == cx(0.0)) continue;
        DenseMap::Term t;
        t.exponents.assign(n, 0);
        t.exponents[var] = k;
        t.coeff = p.coeffs()[k];
        out.push_back(std::move(t));
    }
    return out;
}

int total_degree(const DenseMap::Term& t) {
    int s = 0;
    for (int e : t.exponents) s += e;
    return s;
}

CPoint random_sphere_point(int n2, CounterRng& rng) {
    // uniform on the unit sphere of R^{2n} identified with C^n
    Eigen::VectorXd v(n2);
    for (int i = 0; i < n2; ++i) v[i] = rng.next_normal();
    v.normalize();
    CPoint u(n2 / 2);
    for (int i = 0; i < n2 / 2; ++i) u[i] = cx(v[2 * i], v[2 * i + 1]);
    return u;
}

}  // namespace

long PolyMap::fiber_size() const {
    long f = 1;
    for (int i = 0; i < n_; ++i) f *= d_;
    return f;
}

PolyMap PolyMap::one_d(Poly1D p) {
    if (p.degree() < 2) throw MapError("degree must be >= 2");
    PolyMap m;
    m.n_ = 1;
    m.d_ = p.degree();
    m.terms_.push_back(terms_of_poly1d(p, 1, 0));
    m.v_ = std::move(p);
    return m;
}

PolyMap PolyMap::product(std::vector<Poly1D> components) {
    if (components.size() < 1) throw MapError("product map needs at least one component");
    int d = components[0].degree();
    if (d < 2) throw MapError("degree must be >= 2");
    for (const auto& c : components)
        if (c.degree() != d) throw MapError("product components must share one degree");
    PolyMap m;
    m.n_ = static_cast<int>(components.size());
    m.d_ = d;
    for (int i = 0; i < m.n_; ++i) m.terms_.push_back(terms_of_poly1d(components[i], m.n_, i));
    m.v_ = ProductMap{std::move(components)};
    return m;
}

PolyMap PolyMap::skew(Poly1D p, std::vector<Poly1D> q_w) {
    int d = p.degree();
    if (d < 2) throw MapError("degree must be >= 2");
    if (static_cast<int>(q_w.size()) != d + 1)
        throw MapError("skew map needs w-coefficients a_0..a_d");
    for (int j = 0; j <= d; ++j) {
        if (!q_w[j].is_zero() && q_w[j].degree() > d - j)
            throw MapError("skew map q must have total degree <= deg p");
    }
    PolyMap m;
    m.n_ = 2;
    m.d_ = d;
    m.terms_.push_back(terms_of_poly1d(p, 2, 0));
    std::vector<DenseMap::Term> second;
    for (int j = 0; j <= d; ++j) {
        for (int k = 0; k <= q_w[j].degree(); ++k) {
            cx c = q_w[j].coeffs()[k];
            if (c == cx(0.0)) continue;
            second.push_back(DenseMap::Term{{k, j}, c});
        }
    }
    m.terms_.push_back(std::move(second));
    m.v_ = SkewMap{std::move(p), std::move(q_w)};
    return m;
}

PolyMap PolyMap::dense(DenseMap dm) {
    if (dm.n < 1 || static_cast<int>(dm.components.size()) != dm.n)
        throw MapError("dense map needs n components");
    int d = 0;
    for (const auto& comp : dm.components)
        for (const auto& t : comp) {
            if (static_cast<int>(t.exponents.size()) != dm.n)
                throw MapError("term arity mismatch");
            d = std::max(d, total_degree(t));
        }
    if (d < 2) throw MapError("degree must be >= 2");
    for (const auto& comp : dm.components) {
        bool has_top = false;
        for (const auto& t : comp)
            if (total_degree(t) == d && t.coeff != cx(0.0)) has_top = true;
        if (!has_top) throw MapError("dense components must share the common degree");
    }
    PolyMap m;
    m.n_ = dm.n;
    m.d_ = d;
    m.terms_ = dm.components;
    m.v_ = std::move(dm);
    return m;
}

CPoint evaluate(const PolyMap& map, const CPoint& z) {
    if (z.size() != map.n()) throw MapError("dimension mismatch");
    CPoint out(map.n());
    if (map.is_one_d()) {
        out[0] = map.as_one_d().eval(z[0]);
    } else if (map.is_product()) {
        const auto& pm = map.as_product();
        for (int i = 0; i < map.n(); ++i) out[i] = pm.components[i].eval(z[i]);
    } else if (map.is_skew()) {
        const auto& sm = map.as_skew();
        out[0] = sm.p.eval(z[0]);
        cx acc(0.0);  // Horner in w, inner Horner in z per coefficient
        for (int j = map.degree(); j >= 0; --j) acc = acc * z[1] + sm.q_w[j].eval(z[0]);
        out[1] = acc;
    } else {
        const auto& dm = map.as_dense();
        for (int i = 0; i < map.n(); ++i) {
            cx acc(0.0);
            for (const auto& t : dm.components[i]) {
                cx mono = t.coeff;
                for (int v = 0; v < map.n(); ++v)
                    for (int e = 0; e < t.exponents[v]; ++e) mono *= z[v];
                acc += mono;
            }
            out[i] = acc;
        }
    }
    return out;
}

CMatrix jacobian(const PolyMap& map, const CPoint& z) {
    if (z.size() != map.n()) throw MapError("dimension mismatch");
    CMatrix J = CMatrix::Zero(map.n(), map.n());
    if (map.is_one_d()) {
        J(0, 0) = map.as_one_d().eval_derivative(z[0]);
    } else if (map.is_product()) {
        const auto& pm = map.as_product();
        for (int i = 0; i < map.n(); ++i) J(i, i) = pm.components[i].eval_derivative(z[i]);
    } else if (map.is_skew()) {
        const auto& sm = map.as_skew();
        J(0, 0) = sm.p.eval_derivative(z[0]);
        cx dz(0.0), dw(0.0);
        for (int j = map.degree(); j >= 0; --j) dz = dz * z[1] + sm.q_w[j].eval_derivative(z[0]);
        for (int j = map.degree(); j >= 1; --j)
            dw = dw * z[1] + static_cast<double>(j) * sm.q_w[j].eval(z[0]);
        J(1, 0) = dz;
        J(1, 1) = dw;
    } else {
        const auto& dm = map.as_dense();
        for (int i = 0; i < map.n(); ++i) {
            for (const auto& t : dm.components[i]) {
                for (int v = 0; v < map.n(); ++v) {
                    if (t.exponents[v] == 0) continue;
                    cx mono = t.coeff * static_cast<double>(t.exponents[v]);
                    for (int u = 0; u < map.n(); ++u) {
                        int e = t.exponents[u] - (u == v ? 1 : 0);
                        for (int k = 0; k < e; ++k) mono *= z[u];
                    }
                    J(i, v) += mono;
                }
            }
        }
    }
    return J;
}

CPoint evaluate_leading_form(const PolyMap& map, const CPoint& u) {
    CPoint out = CPoint::Zero(map.n());
    int d = map.degree();
    for (int i = 0; i < map.n(); ++i) {
        for (const auto& t : map.terms()[i]) {
            if (total_degree(t) != d) continue;
            cx mono = t.coeff;
            for (int v = 0; v < map.n(); ++v)
                for (int e = 0; e < t.exponents[v]; ++e) mono *= u[v];
            out[i] += mono;
        }
    }
    return out;
}

double lower_order_mass(const PolyMap& map) {
    double s = 0.0;
    for (const auto& comp : map.terms())
        for (const auto& t : comp)
            if (total_degree(t) < map.degree()) s += std::abs(t.coeff);
    return s;
}

double leading_form_min(const PolyMap& map) {
    if (map.is_one_d()) return std::abs(map.as_one_d().leading());
    if (map.is_product()) {
        // minimize sum |a_i|^2 t_i^d over the simplex sum t_i = 1 (t_i = |u_i|^2):
        // the minimum is S^(1-d) with S = sum |a_i|^(-2/(d-1))
        double s = 0.0;
        for (const auto& c : map.as_product().components)
            s += std::pow(std::abs(c.leading()), -2.0 / (map.degree() - 1));
        return std::pow(s, 0.5 * (1.0 - map.degree()));
    }
    // Sphere sampling plus local refinement around the worst point.
    CounterRng rng = CounterRng::stream(0x5EAD1Cull, 0);
    const int n2 = 2 * map.n();
    CPoint best;
    double best_val = 1e300;
    for (int i = 0; i < 4096; ++i) {
        CPoint u = random_sphere_point(n2, rng);
        double v = evaluate_leading_form(map, u).norm();
        if (v < best_val) {
            best_val = v;
            best = u;
        }
    }
    double step = 0.3;
    for (int round = 0; round < 60; ++round) {
        bool improved = false;
        for (int trial = 0; trial < 24; ++trial) {
            CPoint cand = best;
            for (int i = 0; i < map.n(); ++i)
                cand[i] += step * cx(rng.next_normal(), rng.next_normal());
            cand /= cand.norm();
            double v = evaluate_leading_form(map, cand).norm();
            if (v < best_val) {
                best_val = v;
                best = cand;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
        if (step < 1e-12) break;
    }
    return best_val;
}

RegularityResult check_regularity(const PolyMap& map) {
    RegularityResult r;
    if (map.is_one_d()) {
        r.regular = true;
        r.min_leading_form = std::abs(map.as_one_d().leading());
        return r;
    }
    if (map.is_product()) {
        r.min_leading_form = leading_form_min(map);
        r.regular = r.min_leading_form > 0.0;
        return r;
    }
    if (map.is_skew()) {
        // top homogeneous parts are (lead(p) z^d, sum_{i+j=d} q_ij z^i w^j);
        // a common zero off 0 forces z = 0, so only the w^d coefficient matters
        const auto& sm = map.as_skew();
        cx top = sm.q_w[map.degree()].coeffs()[0];
        r.regular = (top != cx(0.0));
        r.min_leading_form = std::min(std::abs(sm.p.leading()), std::abs(top));
        return r;
    }
    r.sampled = true;
    r.min_leading_form = leading_form_min(map);
    r.regular = r.min_leading_form > 1e-10;
    return r;
}

std::vector<CPoint> preimages(const PolyMap& map, const CPoint& target) {
    if (target.size() != map.n()) throw MapError("dimension mismatch");
    if (map.is_dense()) throw MapError("preimages unsupported for dense maps");

    std::vector<CPoint> out;
    if (map.is_one_d()) {
        for (cx r : all_roots(map.as_one_d() - target[0])) {
            CPoint x(1);
            x[0] = r;
            out.push_back(std::move(x));
        }
    } else if (map.is_product()) {
        const auto& pm = map.as_product();
        std::vector<std::vector<cx>> per_coord;
        for (int i = 0; i < map.n(); ++i)
            per_coord.push_back(all_roots(pm.components[i] - target[i]));
        // Cartesian product over coordinate fibers
        std::vector<std::size_t> idx(map.n(), 0);
        while (true) {
            CPoint x(map.n());
            for (int i = 0; i < map.n(); ++i) x[i] = per_coord[i][idx[i]];
            out.push_back(std::move(x));
            int i = map.n() - 1;
            while (i >= 0 && ++idx[i] == per_coord[i].size()) idx[i--] = 0;
            if (i < 0) break;
        }
    } else {
        const auto& sm = map.as_skew();
        if (sm.q_w[map.degree()].coeffs()[0] == cx(0.0))
            throw MapError("skew map is not regular: w-fiber degenerates");
        for (cx z : all_roots(sm.p - target[0])) {
            std::vector<cx> wc(map.degree() + 1);
            for (int j = 0; j <= map.degree(); ++j) wc[j] = sm.q_w[j].eval(z);
            wc[0] -= target[1];
            for (cx w : all_roots(Poly1D(std::move(wc)))) {
                CPoint x(2);
                x[0] = z;
                x[1] = w;
                out.push_back(std::move(x));
            }
        }
    }

    // evaluate-back residual guard
    double tol = 1e-8 * (1.0 + target.norm());
    for (const CPoint& x : out) {
        if ((evaluate(map, x) - target).norm() >= tol)
            throw RootFindError("preimage residual too large (ill-conditioned coefficients)");
    }
    return out;
}

}  // namespace mme
