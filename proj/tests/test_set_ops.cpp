#include <doctest.h>

#include "stlverify/set_ops.hpp"
#include "support/oracles.hpp"

using namespace stlverify;

namespace {

Zonotope random_zonotope(std::mt19937_64& rng, int dim, int gens) {
    return {oracles::random_vector(rng, dim, 2.0), oracles::random_matrix(rng, dim, gens, 1.0)};
}

Polytope random_polytope(std::mt19937_64& rng, int dim, int rows, double offset_scale = 2.0) {
    return {oracles::random_matrix(rng, rows, dim, 1.0),
            oracles::random_vector(rng, rows, offset_scale)};
}

} // namespace

TEST_CASE("linear map is exact") {
    std::mt19937_64 rng(1);

    SUBCASE("identity keeps the zonotope") {
        const Zonotope Z = random_zonotope(rng, 3, 4);
        const Zonotope R = zono_linear_map(Eigen::MatrixXd::Identity(3, 3), Z);
        CHECK((R.c - Z.c).norm() == 0.0);
        CHECK((R.G - Z.G).norm() == 0.0);
    }

    SUBCASE("rotation by 90 degrees") {
        Eigen::MatrixXd M(2, 2);
        M << 0, -1, 1, 0;
        Eigen::VectorXd c(2);
        c << 1, 0;
        Eigen::MatrixXd G(2, 1);
        G << 1, 0;
        const Zonotope R = zono_linear_map(M, Zonotope(c, G));
        CHECK(R.c(0) == doctest::Approx(0));
        CHECK(R.c(1) == doctest::Approx(1));
        CHECK(R.G(0, 0) == doctest::Approx(0));
        CHECK(R.G(1, 0) == doctest::Approx(1));
    }

    SUBCASE("sampled membership transfers") {
        const Zonotope Z = random_zonotope(rng, 3, 5);
        const Eigen::MatrixXd M = oracles::random_matrix(rng, 3, 3);
        const Zonotope R = zono_linear_map(M, Z);
        for (int i = 0; i < 200; ++i) {
            const Eigen::VectorXd a = oracles::sample_factors(rng, 5);
            CHECK(zono_contains_point(R, M * (Z.c + Z.G * a)));
        }
    }

    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(zono_linear_map(Eigen::MatrixXd::Identity(2, 2), random_zonotope(rng, 3, 1)),
                        DimensionError);
    }
}

TEST_CASE("minkowski sum") {
    std::mt19937_64 rng(2);

    SUBCASE("adding a point translates") {
        const Zonotope Z = random_zonotope(rng, 2, 3);
        Eigen::VectorXd p(2);
        p << 5, -1;
        const Zonotope R = zono_minkowski_sum(Z, Zonotope::point(p));
        CHECK((R.c - (Z.c + p)).norm() == 0.0);
        CHECK(R.num_generators() == 3);
    }

    SUBCASE("interval hull of 1-D sum") {
        Eigen::VectorXd z(1);
        z << 0;
        Eigen::MatrixXd G1(1, 1), G2(1, 1);
        G1 << 1;
        G2 << 2;
        const Zonotope R = zono_minkowski_sum(Zonotope(z, G1), Zonotope(z, G2));
        const Interval box = zono_interval_enclosure(R);
        CHECK(box.lo(0) == doctest::Approx(-3));
        CHECK(box.hi(0) == doctest::Approx(3));
    }

    SUBCASE("sampled sums are members") {
        const Zonotope Z1 = random_zonotope(rng, 3, 4);
        const Zonotope Z2 = random_zonotope(rng, 3, 2);
        const Zonotope R = zono_minkowski_sum(Z1, Z2);
        for (int i = 0; i < 200; ++i) {
            const Eigen::VectorXd x =
                oracles::sample_zonotope_point(rng, Z1) + oracles::sample_zonotope_point(rng, Z2);
            CHECK(zono_contains_point(R, x));
        }
    }
}

TEST_CASE("convex hull enclosure") {
    std::mt19937_64 rng(3);

    SUBCASE("conv(Z, Z) equals Z as a set") {
        const Zonotope Z = random_zonotope(rng, 3, 4);
        const Zonotope R = zono_convex_hull_enclosure(Z, Z);
        CHECK(R.num_generators() == 2 * 4 + 1);
        const Interval bz = zono_interval_enclosure(Z);
        const Interval br = zono_interval_enclosure(R);
        CHECK((bz.lo - br.lo).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((bz.hi - br.hi).cwiseAbs().maxCoeff() < 1e-12);
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd x = oracles::sample_zonotope_point(rng, Z);
            CHECK(zono_contains_point(R, x));
        }
    }

    SUBCASE("two points give the segment") {
        Eigen::VectorXd p(2), q(2);
        p << 1, 1;
        q << 3, -1;
        const Zonotope R = zono_convex_hull_enclosure(Zonotope::point(p), Zonotope::point(q));
        CHECK((R.c - 0.5 * (p + q)).norm() < 1e-15);
        REQUIRE(R.num_generators() == 1);
        CHECK((R.G.col(0) - 0.5 * (p - q)).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("contains unions and convex combinations") {
        const Zonotope Z1 = random_zonotope(rng, 2, 3);
        const Zonotope Z2 = random_zonotope(rng, 2, 5);  // also exercises the padding rule
        const Zonotope R = zono_convex_hull_enclosure(Z1, Z2);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < 300; ++i) {
            const Eigen::VectorXd a = oracles::sample_zonotope_point(rng, Z1);
            const Eigen::VectorXd b = oracles::sample_zonotope_point(rng, Z2);
            const double w = unit(rng);
            CHECK(zono_contains_point(R, w * a + (1 - w) * b, 1e-9));
        }
    }
}

TEST_CASE("interval enclosure") {
    std::mt19937_64 rng(4);

    SUBCASE("1-D example") {
        Eigen::VectorXd c(1);
        c << 0;
        Eigen::MatrixXd G(1, 2);
        G << 1, 2;
        const Interval box = zono_interval_enclosure(Zonotope(c, G));
        CHECK(box.lo(0) == doctest::Approx(-3));
        CHECK(box.hi(0) == doctest::Approx(3));
    }

    SUBCASE("point zonotope gives a degenerate interval") {
        Eigen::VectorXd p(3);
        p << 1, 2, 3;
        const Interval box = zono_interval_enclosure(Zonotope::point(p));
        CHECK((box.lo - p).norm() == 0.0);
        CHECK((box.hi - p).norm() == 0.0);
    }

    SUBCASE("contains samples and every face is attained") {
        const Zonotope Z = random_zonotope(rng, 3, 6);
        const Interval box = zono_interval_enclosure(Z);
        for (int i = 0; i < 10000; ++i)
            CHECK(box.contains(oracles::sample_zonotope_point(rng, Z)));
        // sign-pattern factors reach each face exactly
        for (int d = 0; d < 3; ++d) {
            Eigen::VectorXd a(6);
            for (int g = 0; g < 6; ++g) a(g) = Z.G(d, g) >= 0 ? 1.0 : -1.0;
            const Eigen::VectorXd hi = Z.c + Z.G * a;
            CHECK(hi(d) == doctest::Approx(box.hi(d)));
            const Eigen::VectorXd lo = Z.c - Z.G * a;
            CHECK(lo(d) == doctest::Approx(box.lo(d)));
        }
    }
}

TEST_CASE("interval matrix times zonotope") {
    std::mt19937_64 rng(5);

    SUBCASE("degenerate interval equals the linear map") {
        const Zonotope Z = random_zonotope(rng, 3, 2);
        const Eigen::MatrixXd M = oracles::random_matrix(rng, 3, 3);
        const Zonotope R = imat_zono_product_enclosure(IntervalMatrix::exact(M), Z);
        const Zonotope L = zono_linear_map(M, Z);
        CHECK((R.c - L.c).norm() < 1e-14);
        CHECK((R.G.leftCols(2) - L.G).norm() < 1e-14);
        CHECK(R.G.rightCols(R.num_generators() - 2).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("symmetric interval on a point") {
        Eigen::MatrixXd E(2, 2);
        E << 0.1, 0.2, 0.3, 0.4;
        Eigen::VectorXd p(2);
        p << 1, -2;
        const Zonotope R = imat_zono_product_enclosure(IntervalMatrix::symmetric(E), Zonotope::point(p));
        CHECK(R.c.cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXd expect = E * p.cwiseAbs();
        const Interval box = zono_interval_enclosure(R);
        CHECK((box.hi - expect).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("contains sampled products") {
        const Zonotope Z = random_zonotope(rng, 3, 4);
        const Eigen::MatrixXd mid = oracles::random_matrix(rng, 2, 3);
        const Eigen::MatrixXd rad = oracles::random_matrix(rng, 2, 3, 0.3).cwiseAbs();
        const IntervalMatrix M(mid - rad, mid + rad);
        const Zonotope R = imat_zono_product_enclosure(M, Z);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            Eigen::MatrixXd S(2, 3);
            for (int r = 0; r < 2; ++r)
                for (int cidx = 0; cidx < 3; ++cidx) S(r, cidx) = mid(r, cidx) + unit(rng) * rad(r, cidx);
            const Eigen::VectorXd x = oracles::sample_zonotope_point(rng, Z);
            CHECK(zono_contains_point(R, S * x, 1e-9));
        }
    }
}

TEST_CASE("polytope operations") {
    std::mt19937_64 rng(6);

    SUBCASE("intersection with the full space") {
        const Polytope P = random_polytope(rng, 2, 3);
        const Polytope R = poly_intersection(P, Polytope::full_space(2));
        CHECK(R.num_rows() == 3);
    }

    SUBCASE("halved unit box") {
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1), hi = Eigen::VectorXd::Constant(2, 1);
        const Polytope box = Polytope::axis_box(lo, hi);
        Eigen::VectorXd a(2);
        a << 1, 0;
        const Polytope R = poly_intersection(box, Polytope::halfspace(a, 0.0));
        Eigen::VectorXd inside(2), outside(2);
        inside << -0.5, 0.0;
        outside << 0.5, 0.0;
        CHECK(R.contains(inside));
        CHECK(!R.contains(outside));
    }

    SUBCASE("membership matches conjunction on samples") {
        const Polytope P1 = random_polytope(rng, 3, 4);
        const Polytope P2 = random_polytope(rng, 3, 3);
        const Polytope R = poly_intersection(P1, P2);
        for (int i = 0; i < 500; ++i) {
            const Eigen::VectorXd x = oracles::random_vector(rng, 3, 3.0);
            CHECK(R.contains(x) == (P1.contains(x) && P2.contains(x)));
        }
    }
}

TEST_CASE("polytope emptiness") {
    SUBCASE("contradictory rows") {
        Eigen::MatrixXd C(2, 1);
        C << 1, -1;
        Eigen::VectorXd d(2);
        d << -1, -1;
        CHECK(poly_is_empty({C, d}));
    }

    SUBCASE("no rows means the full space") { CHECK(!poly_is_empty(Polytope::full_space(3))); }

    SUBCASE("agrees with a grid oracle in 2-D") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 60; ++trial) {
            const Polytope P = random_polytope(rng, 2, 4, 1.0);
            bool grid_hit = false;
            for (double x = -4; x <= 4 && !grid_hit; x += 0.05) {
                for (double y = -4; y <= 4 && !grid_hit; y += 0.05) {
                    Eigen::VectorXd v(2);
                    v << x, y;
                    if (P.contains(v, -1e-6)) grid_hit = true;  // strict interior hits only
                }
            }
            if (grid_hit) CHECK(!poly_is_empty(P));
            if (poly_is_empty(P)) CHECK(!grid_hit);
        }
    }
}

TEST_CASE("redundancy removal") {
    std::mt19937_64 rng(8);

    SUBCASE("duplicate rows collapse to one") {
        Eigen::MatrixXd C(2, 1);
        C << 1, 1;
        Eigen::VectorXd d(2);
        d << 2, 2;
        const Polytope R = poly_remove_redundant({C, d});
        CHECK(R.num_rows() == 1);
    }

    SUBCASE("dominated row is dropped") {
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1), hi = Eigen::VectorXd::Constant(2, 1);
        Polytope box = Polytope::axis_box(lo, hi);
        Eigen::VectorXd a(2);
        a << 1, 0;
        const Polytope loose = poly_intersection(box, Polytope::halfspace(a, 5.0));
        const Polytope R = poly_remove_redundant(loose);
        CHECK(R.num_rows() == 4);
        Eigen::VectorXd probe(2);
        probe << 0.9, 0.0;
        CHECK(R.contains(probe));
    }

    SUBCASE("membership is preserved on samples") {
        for (int trial = 0; trial < 20; ++trial) {
            const Polytope P = random_polytope(rng, 3, 8, 2.0);
            const Polytope R = poly_remove_redundant(P);
            for (int i = 0; i < 500; ++i) {
                const Eigen::VectorXd x = oracles::random_vector(rng, 3, 3.0);
                CHECK(P.contains(x) == R.contains(x));
            }
        }
    }
}

TEST_CASE("zonotope-polytope intersection") {
    std::mt19937_64 rng(9);

    SUBCASE("polytope containing the center intersects") {
        const Zonotope Z = random_zonotope(rng, 2, 3);
        Eigen::VectorXd a(2);
        a << 1, 0;
        const Polytope P = Polytope::halfspace(a, Z.c(0) + 1.0);
        CHECK(zono_poly_intersects(Z, P));
    }

    SUBCASE("separated halfspace does not intersect") {
        const Zonotope Z = random_zonotope(rng, 2, 3);
        const Interval box = zono_interval_enclosure(Z);
        Eigen::VectorXd a(2);
        a << 1, 0;
        const Polytope P = Polytope::halfspace(a, box.lo(0) - 1.0);
        CHECK(!zono_poly_intersects(Z, P));
    }

    SUBCASE("agrees with a 2-D grid oracle") {
        for (int trial = 0; trial < 40; ++trial) {
            const Zonotope Z = random_zonotope(rng, 2, 3);
            const Polytope P = random_polytope(rng, 2, 3, 1.5);
            bool grid_hit = false;
            for (double a1 = -1; a1 <= 1 && !grid_hit; a1 += 0.05) {
                for (double a2 = -1; a2 <= 1 && !grid_hit; a2 += 0.05) {
                    for (double a3 = -1; a3 <= 1 && !grid_hit; a3 += 0.05) {
                        Eigen::VectorXd al(3);
                        al << a1, a2, a3;
                        if (P.contains(Z.c + Z.G * al, -1e-6)) grid_hit = true;
                    }
                }
            }
            if (grid_hit) CHECK(zono_poly_intersects(Z, P));
            if (!zono_poly_intersects(Z, P)) CHECK(!grid_hit);
        }
    }
}

TEST_CASE("interval matrix frobenius norm") {
    CHECK(imat_frobenius_norm(IntervalMatrix::zero(3, 2)) == 0.0);

    std::mt19937_64 rng(10);
    const Eigen::MatrixXd M = oracles::random_matrix(rng, 3, 3);
    CHECK(imat_frobenius_norm(IntervalMatrix::exact(M)) == doctest::Approx(M.norm()));

    Eigen::MatrixXd lo(1, 1), hi(1, 1);
    lo << -1;
    hi << 2;
    CHECK(imat_frobenius_norm({lo, hi}) == doctest::Approx(2.0));
}
