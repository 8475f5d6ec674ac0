#include "doctest.h"
#include "helpers.hpp"
#include "mme/roots.hpp"

using namespace mme;
using namespace mme::testing;

namespace {

PolyMap random_family_map(CounterRng& rng, int family) {
    auto rc = [&](double scale) { return cx(scale * (rng.next_double() - 0.5),
                                            scale * (rng.next_double() - 0.5)); };
    if (family == 0) return PolyMap::one_d(Poly1D({rc(2.0), rc(1.0), cx(1.0) + rc(0.3)}));
    if (family == 1) {
        Poly1D a({rc(2.0), rc(1.0), cx(1.0) + rc(0.3)});
        Poly1D b({rc(2.0), rc(1.0), cx(1.0) + rc(0.3)});
        return PolyMap::product({a, b});
    }
    Poly1D p({rc(1.5), rc(1.0), cx(1.0) + rc(0.3)});
    std::vector<Poly1D> q_w = {Poly1D({rc(1.0), rc(0.8)}), Poly1D({rc(0.5)}),
                               Poly1D({cx(1.0) + rc(0.3)})};
    return PolyMap::skew(p, q_w);
}

CPoint random_point(CounterRng& rng, int n, double scale) {
    CPoint z(n);
    for (int i = 0; i < n; ++i)
        z[i] = cx(scale * (rng.next_double() - 0.5), scale * (rng.next_double() - 0.5));
    return z;
}

bool fiber_contains(const std::vector<CPoint>& fiber, const CPoint& x, double tol) {
    for (const auto& y : fiber)
        if ((y - x).norm() < tol) return true;
    return false;
}

}  // namespace

TEST_CASE("evaluate on the three closed families") {
    CHECK(evaluate(quad(1.0), pt(2.0)) == pt(5.0));
    CHECK(evaluate(prod_zsq_wsq(), pt(2.0, 3.0)) == pt(4.0, 9.0));
    CHECK(evaluate(skew(), pt(1.0, 2.0)) == pt(1.0, 5.0));
    CHECK_THROWS_AS(evaluate(zsq(), pt(1.0, 2.0)), MapError);
}

TEST_CASE("jacobian closed forms") {
    CHECK(jacobian(zsq(), pt(3.0))(0, 0) == cx(6.0));
    CMatrix J = jacobian(skew(), pt(1.0, 2.0));
    CHECK(J(0, 0) == cx(2.0));
    CHECK(J(0, 1) == cx(0.0));
    CHECK(J(1, 0) == cx(1.0));
    CHECK(J(1, 1) == cx(4.0));
}

TEST_CASE("jacobian matches central finite differences on random maps") {
    CounterRng rng = CounterRng::stream(7, 1);
    for (int trial = 0; trial < 100; ++trial) {
        PolyMap map = random_family_map(rng, trial % 3);
        CPoint z = random_point(rng, map.n(), 2.0);
        CMatrix J = jacobian(map, z);
        CMatrix Jfd = fd_jacobian(map, z);
        for (int i = 0; i < map.n(); ++i)
            for (int j = 0; j < map.n(); ++j)
                CHECK(std::abs(J(i, j) - Jfd(i, j)) <= 1e-6 * (1.0 + std::abs(J(i, j))));
    }
}

TEST_CASE("regularity criteria") {
    // skew with q = w^2 + z w: w^2 coefficient is 1
    Poly1D p({cx(0), cx(0), cx(1)});
    std::vector<Poly1D> q1 = {Poly1D({cx(0)}), Poly1D({cx(0), cx(1)}), Poly1D({cx(1)})};
    CHECK(is_regular(PolyMap::skew(p, q1)));
    // q = z w: no w^2 term
    std::vector<Poly1D> q2 = {Poly1D({cx(0)}), Poly1D({cx(0), cx(1)}), Poly1D({cx(0)})};
    CHECK_FALSE(is_regular(PolyMap::skew(p, q2)));
    for (double c : {0.0, -1.0, 3.7}) CHECK(is_regular(quad(c)));
}

TEST_CASE("skew regularity agrees with the sampled dense-path decision") {
    CounterRng rng = CounterRng::stream(11, 1);
    for (int trial = 0; trial < 10; ++trial) {
        PolyMap map = random_family_map(rng, 2);
        auto direct = check_regularity(map);
        auto sampled = check_regularity(to_dense(map));
        CHECK(sampled.sampled);
        CHECK(direct.regular == sampled.regular);
    }
}

TEST_CASE("preimages of the closed-form examples") {
    auto f1 = preimages(zsq(), pt(4.0));
    REQUIRE(f1.size() == 2);
    CHECK(fiber_contains(f1, pt(2.0), 1e-10));
    CHECK(fiber_contains(f1, pt(-2.0), 1e-10));

    auto f2 = preimages(quad(1.0), pt(0.0));
    REQUIRE(f2.size() == 2);
    CHECK(fiber_contains(f2, pt(cx(0.0, 1.0)), 1e-10));
    CHECK(fiber_contains(f2, pt(cx(0.0, -1.0)), 1e-10));

    // skew fiber over (4, 3): evaluate-back oracle
    auto f3 = preimages(skew(), pt(4.0, 3.0));
    REQUIRE(f3.size() == 4);
    double s5 = std::sqrt(5.0);
    CHECK(fiber_contains(f3, pt(2.0, 1.0), 1e-8));
    CHECK(fiber_contains(f3, pt(2.0, -1.0), 1e-8));
    CHECK(fiber_contains(f3, pt(-2.0, s5), 1e-8));
    CHECK(fiber_contains(f3, pt(-2.0, -s5), 1e-8));
    for (const auto& x : f3) CHECK((evaluate(skew(), x) - pt(4.0, 3.0)).norm() < 1e-8);

    CHECK_THROWS_AS(preimages(to_dense(skew()), pt(0.0, 0.0)), MapError);
}

TEST_CASE("preimage round trip: fiber through z contains z") {
    CounterRng rng = CounterRng::stream(13, 1);
    for (int trial = 0; trial < 60; ++trial) {
        PolyMap map = random_family_map(rng, trial % 3);
        CPoint z = random_point(rng, map.n(), 2.0);
        CPoint t = evaluate(map, z);
        auto fiber = preimages(map, t);
        CHECK(static_cast<long>(fiber.size()) == map.fiber_size());
        CHECK(fiber_contains(fiber, z, 1e-8));
        for (const auto& x : fiber)
            CHECK((evaluate(map, x) - t).norm() < 1e-8 * (1.0 + t.norm()));
    }
}

TEST_CASE("aberth root finder against known factorizations") {
    // (z-1)(z-2)(z-3)(z-4i)(z+5) expanded
    std::vector<cx> roots = {cx(1), cx(2), cx(3), cx(0, 4), cx(-5)};
    std::vector<cx> coeffs = {cx(1)};
    for (cx r : roots) {
        std::vector<cx> next(coeffs.size() + 1, cx(0));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] -= r * coeffs[i];
            next[i + 1] += coeffs[i];
        }
        coeffs = next;
    }
    auto found = all_roots(Poly1D(coeffs));
    REQUIRE(found.size() == 5);
    for (cx r : roots) {
        bool hit = false;
        for (cx f : found) hit = hit || std::abs(f - r) < 1e-9;
        CHECK(hit);
    }
}

TEST_CASE("multiple roots are clustered with multiplicity") {
    auto found = all_roots(Poly1D({cx(0), cx(0), cx(0), cx(1)}));  // z^3
    REQUIRE(found.size() == 3);
    for (cx r : found) CHECK(std::abs(r) < 1e-10);

    // (z-1)^2 (z+2) = z^3 - 3z + 2
    auto f2 = all_roots(Poly1D({cx(2), cx(-3), cx(0), cx(1)}));
    REQUIRE(f2.size() == 3);
    int ones = 0;
    for (cx r : f2)
        if (std::abs(r - cx(1)) < 1e-5) ++ones;
    CHECK(ones == 2);
}

TEST_CASE("constructor rejections") {
    CHECK_THROWS_AS(PolyMap::one_d(Poly1D({cx(1), cx(1)})), MapError);  // degree 1
    Poly1D sq({cx(0), cx(0), cx(1)});
    Poly1D cub({cx(0), cx(0), cx(0), cx(1)});
    CHECK_THROWS_AS(PolyMap::product({sq, cub}), MapError);  // mixed degrees
    // skew with q of total degree 3 > deg p
    std::vector<Poly1D> bad = {Poly1D({cx(0), cx(0), cx(0), cx(1)}), Poly1D({cx(0)}),
                               Poly1D({cx(1)})};
    CHECK_THROWS_AS(PolyMap::skew(sq, bad), MapError);
}

TEST_CASE("compensated evaluation path for wide coefficient ranges") {
    // huge constant term forces the extended-precision Horner branch
    Poly1D p({cx(1e12), cx(0), cx(1)});
    CHECK(p.eval(cx(1.0)) == cx(1e12 + 1.0));
    CHECK(std::abs(p.eval(cx(1e-3)) - cx(1e12 + 1e-6)) < 1e-3);
}
