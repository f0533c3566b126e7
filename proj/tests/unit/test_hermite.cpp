#include <doctest.h>

#include <cmath>

#include "relucoll/errors.hpp"
#include "relucoll/hermite.hpp"
#include "support/properties.hpp"

using namespace rc;

TEST_CASE("hermite_eval known values") {
    CHECK(hermite_eval(0, 3.7) == 1.0);
    CHECK(hermite_eval(1, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(hermite_eval(2, 0.0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    // H_3(y) = (y^3 - 3y)/sqrt(6).
    CHECK(hermite_eval(3, 1.5) == doctest::Approx((1.5 * 1.5 * 1.5 - 4.5) / std::sqrt(6.0)).epsilon(1e-14));
}

TEST_CASE("hermite_eval rejects bad degrees") {
    CHECK_THROWS_AS(hermite_eval(-1, 0.0), DomainError);
    HermiteBasis small(5);
    CHECK_THROWS_AS(small.eval(6, 0.0), CapacityError);
}

TEST_CASE("derivative identity") {
    HermiteBasis hb;
    for (int n = 1; n < 10; ++n) {
        const double y = 0.3 * n - 1.0, eps = 1e-6;
        const double fd = (hb.eval(n, y + eps) - hb.eval(n, y - eps)) / (2 * eps);
        CHECK(hb.derivative(n, y) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("gaussian_density") {
    const double a[] = {0.0};
    const double b[] = {0.0, 0.0};
    const double c[] = {1.0, -1.0};
    CHECK(gaussian_density(a) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(gaussian_density(b) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-14));
    CHECK(gaussian_density(c) == doctest::Approx(0.058549831524319168).epsilon(1e-14));
    CHECK(log_gaussian_density(c) == doctest::Approx(-1.0 - std::log(2 * M_PI)).epsilon(1e-14));
}

TEST_CASE("node families of low order") {
    const auto f0 = gauss_hermite_nodes(0);
    REQUIRE(f0.size() == 1);
    CHECK(f0.at(0) == 0.0);
    const auto f1 = gauss_hermite_nodes(1);
    REQUIRE(f1.size() == 2);
    CHECK(f1.at(-1) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(f1.at(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f1.min_index() == -1);
    CHECK(f1.max_index() == 1);
    CHECK_THROWS(f1.position_of(0));
    const auto f2 = gauss_hermite_nodes(2);
    CHECK(f2.at(-1) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
    CHECK(f2.at(0) == 0.0);
    CHECK(f2.at(1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("nodes are roots of the next polynomial") {
    for (int m : {3, 7, 20, 50}) {
        const auto f = gauss_hermite_nodes(m);
        HermiteBasis hb;
        // A Newton step from each node moves it by less than 1e-12 relative.
        for (double y : f.nodes())
            CHECK(std::abs(hb.eval(m + 1, y) / hb.derivative(m + 1, y)) <= 1e-12 * std::max(1.0, std::abs(y)));
    }
}

TEST_CASE("signed index layout") {
    const auto f = gauss_hermite_nodes(4);
    CHECK(f.index_at(0) == -2);
    CHECK(f.index_at(2) == 0);
    CHECK(f.index_at(4) == 2);
    const auto g = gauss_hermite_nodes(3);
    CHECK(g.index_at(1) == -1);
    CHECK(g.index_at(2) == 1);
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(g.position_of(g.index_at(p)) == p);
}

TEST_CASE("quadrature weights sum to one") {
    for (int m : {0, 1, 5, 30}) {
        const auto w = gauss_hermite_weights(gauss_hermite_nodes(m));
        double s = 0;
        for (double x : w) s += x;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("tensor evaluation") {
    const double y1[] = {2.0};
    const double y2[] = {1.0, 0.0};
    CHECK(hermite_tensor_eval(MultiIndex(), y1) == 1.0);
    CHECK(hermite_tensor_eval(MultiIndex::unit(1), y1) == doctest::Approx(2.0));
    CHECK(hermite_tensor_eval(MultiIndex::from_dense({1, 2}), y2) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("node table") {
    NodeTable t(6);
    CHECK(t.max_order() == 6);
    CHECK(t.node(2, 1) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("property: Cramer bound") {
    const auto c = props::cramer_bound();
    CHECK_MESSAGE(c.ok, c.detail);
}

TEST_CASE("property: orthonormality under quadrature") {
    const auto c = props::hermite_orthonormality();
    CHECK_MESSAGE(c.ok, c.detail);
}

TEST_CASE("property: node symmetry, interlacing and spacing") {
    const auto c = props::node_structure();
    CHECK_MESSAGE(c.ok, c.detail);
}
