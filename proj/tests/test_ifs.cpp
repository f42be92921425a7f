#include <doctest.h>

#include <algorithm>
#include <set>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/ifs.hpp"
#include "fracwave/rational.hpp"

using namespace fracwave;

TEST_SUITE("ifs_core") {
    TEST_CASE("rational arithmetic and parsing") {
        CHECK(Rational(6, -4) == Rational(-3, 2));
        CHECK(Rational(-7, 3).floor() == -3);
        CHECK(Rational(-7, 3).frac() == Rational(2, 3));
        CHECK(parse_rational("3/4") == Rational(3, 4));
        CHECK(parse_rational("-0.75") == Rational(-3, 4));
        CHECK(parse_rational("5") == Rational(5));
        CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
        CHECK_THROWS_AS(parse_rational("x"), InvalidInput);
        CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(2), ComputationError);
        const auto v = RationalVector::from_components(std::vector<Rational>{Rational(1, 2), Rational(-1, 3)});
        CHECK(v.denominator() == 6);
        CHECK(v.frac() == RationalVector::from_components(std::vector<Rational>{Rational(1, 2), Rational(2, 3)}));
    }

    TEST_CASE("rational matrix inverse is exact") {
        const RationalMatrix m(IntMatrix{{2, 1}, {1, 3}});
        CHECK(m * m.inverse() == RationalMatrix::identity(2));
        CHECK(determinant({{2, 1}, {1, 3}}) == 5);
        CHECK(determinant({{0, 2, 1}, {1, 0, 0}, {0, 0, 3}}) == -6);
    }

    TEST_CASE("expansive matrix validation") {
        CHECK_THROWS_AS(ExpansiveIntMatrix(IntMatrix{{1, 0}, {0, 1}}), InvalidInput);
        CHECK_THROWS_AS(ExpansiveIntMatrix::scalar(1), InvalidInput);
        CHECK_THROWS_AS(ExpansiveIntMatrix::scalar(0), InvalidInput);
        CHECK_THROWS_AS(ExpansiveIntMatrix(IntMatrix{{2, 0}, {0, 1}}), InvalidInput);
        CHECK_THROWS_AS(ExpansiveIntMatrix(IntMatrix{{2, 0}}), InvalidInput);
        const ExpansiveIntMatrix A(IntMatrix{{1, 1}, {-1, 1}});
        CHECK(A.det_abs() == 2);
        CHECK(A.contraction_ratio() < 1.0);
        CHECK(A.contraction_power() >= 1);
        const RationalMatrix exact(A.entries());
        CHECK(exact * A.inverse() == RationalMatrix::identity(2));
        CHECK(exact.transpose() * A.transpose_inverse() == RationalMatrix::identity(2));
        const auto neg = ExpansiveIntMatrix::scalar(-3);
        CHECK(neg.det_abs() == 3);
    }

    TEST_CASE("digit sets reject duplicates and mixed dimensions") {
        CHECK_THROWS_AS(DigitSet::scalars({0, 2, 2}), InvalidInput);
        CHECK_THROWS_AS(DigitSet(std::vector<IntVector>{{0, 0}, {1}}), InvalidInput);
        const auto B = DigitSet::scalars({0, 2});
        CHECK(B.contains_zero());
        CHECK(B.contains({2}));
        CHECK_FALSE(B.contains({1}));
    }

    TEST_CASE("attractor boxes of the middle-third set") {
        const AffineIFS ifs(ExpansiveIntMatrix::scalar(3), DigitSet::scalars({0, 2}));
        const Box unit{{0.0, 1.0}};
        const auto one = attractor_boxes(ifs, 1, unit);
        REQUIRE(one.size() == 2);
        CHECK(one[0][0].lo == doctest::Approx(0.0));
        CHECK(one[0][0].hi == doctest::Approx(1.0 / 3));
        CHECK(one[1][0].lo == doctest::Approx(2.0 / 3));
        CHECK(one[1][0].hi == doctest::Approx(1.0));
        const auto two = attractor_boxes(ifs, 2, unit);
        REQUIRE(two.size() == 4);
        const double want[4][2] = {{0, 1.0 / 9}, {2.0 / 9, 1.0 / 3}, {2.0 / 3, 7.0 / 9}, {8.0 / 9, 1}};
        for (int i = 0; i < 4; ++i) {
            CHECK(two[i][0].lo == doctest::Approx(want[i][0]));
            CHECK(two[i][0].hi == doctest::Approx(want[i][1]));
        }
        const auto zero = attractor_boxes(ifs, 0, unit);
        CHECK(zero == std::vector<Box>{unit});
        CHECK_THROWS_AS(attractor_boxes(ifs, 1, Box{{1.0, 0.0}}), InvalidInput);
    }

    TEST_CASE("attractor enumeration respects the cap") {
        const AffineIFS ifs(ExpansiveIntMatrix::scalar(3), DigitSet::scalars({0, 2}));
        const auto saved = enumeration_cap();
        set_enumeration_cap(1000);
        CHECK_THROWS_AS(attractor_boxes(ifs, 10, Box{{0.0, 1.0}}), EnumerationOverflow);
        CHECK_NOTHROW(attractor_boxes(ifs, 9, Box{{0.0, 1.0}}));
        set_enumeration_cap(saved);
    }

    TEST_CASE("hausdorff distance finds gap midpoints") {
        const std::vector<Box> a{{{0.0, 10.0}}};
        const std::vector<Box> b{{{0.0, 1.0}}, {{9.0, 10.0}}};
        CHECK(hausdorff_distance_1d(a, b) == doctest::Approx(4.0));
        CHECK(hausdorff_distance_1d(b, a) == doctest::Approx(4.0));
        CHECK(hausdorff_distance_1d(a, a) == 0.0);
    }

    TEST_CASE("Hutchinson contraction: different seeds converge geometrically") {
        for (const auto& [a, digits] : std::vector<std::pair<std::int64_t, IntVector>>{
                 {3, {0, 2}}, {4, {0, 2}}, {5, {0, 1, 3}}, {-2, {0, 1}}}) {
            const AffineIFS ifs(ExpansiveIntMatrix::scalar(a), DigitSet::scalars(digits));
            const Box h1{{0.0, 1.0}}, h2{{-5.0, 7.0}};
            double prev = hausdorff_distance_1d(attractor_boxes(ifs, 0, h1), attractor_boxes(ifs, 0, h2));
            const double ratio = 1.0 / static_cast<double>(std::llabs(a));
            for (unsigned n = 1; n <= 7; ++n) {
                const double cur = hausdorff_distance_1d(attractor_boxes(ifs, n, h1), attractor_boxes(ifs, n, h2));
                CHECK(cur <= ratio * prev + 1e-12);
                prev = cur;
            }
        }
    }

    TEST_CASE("quadrature points and weights") {
        const AffineIFS cantor4(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}));
        const auto q1 = measure_quadrature_points(cantor4, 1);
        REQUIRE(q1.points.size() == 2);
        CHECK(q1.points[0][0] == 0.0);
        CHECK(q1.points[1][0] == 0.5);
        CHECK(q1.weight == Rational(1, 2));

        const AffineIFS mt(ExpansiveIntMatrix::scalar(3), DigitSet::scalars({0, 2}));
        const auto q2 = measure_quadrature_points(mt, 2);
        std::vector<Rational> pts;
        for (std::size_t i = 0; i < q2.points.size(); ++i) pts.push_back(q2.exact_point(mt, i)[0]);
        std::sort(pts.begin(), pts.end());
        CHECK(pts == std::vector<Rational>{Rational(0), Rational(2, 9), Rational(2, 3), Rational(8, 9)});
        CHECK(q2.weight == Rational(1, 4));
        Rational total;
        for (std::size_t i = 0; i < q2.points.size(); ++i) total += q2.weight;
        CHECK(total == Rational(1));
        CHECK_THROWS_AS(measure_quadrature_points(mt, 0), InvalidInput);
    }

    TEST_CASE("quadrature at depth n+1 refines depth n") {
        const AffineIFS ifs(ExpansiveIntMatrix(IntMatrix{{2, 1}, {0, 2}}), DigitSet({{0, 0}, {1, 0}, {0, 1}}));
        const auto coarse = measure_quadrature_points(ifs, 3);
        const auto fine = measure_quadrature_points(ifs, 4);
        CHECK(fine.points.size() == 3 * coarse.points.size());
        std::set<RationalVector> coarse_pts;
        for (std::size_t i = 0; i < coarse.points.size(); ++i) coarse_pts.insert(coarse.exact_point(ifs, i));
        CHECK(coarse_pts.size() == coarse.points.size());
        // Dropping the last digit b_4 removes M^4 b_4.
        std::vector<RationalVector> tails;
        for (const auto& b : ifs.digits().points()) {
            RationalVector t(b);
            for (int k = 0; k < 4; ++k) t = ifs.contraction().apply(t);
            tails.push_back(t);
        }
        for (std::size_t i = 0; i < fine.points.size(); ++i) {
            const auto x = fine.exact_point(ifs, i);
            const bool truncates = std::any_of(tails.begin(), tails.end(),
                                               [&](const RationalVector& t) { return coarse_pts.count(x - t) > 0; });
            CHECK(truncates);
        }
    }

    TEST_CASE("invariance equation for polynomial test functions") {
        const AffineIFS ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}));
        const auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + x * x * x; };
        double prev = INFINITY;
        for (unsigned n = 2; n <= 8; n += 2) {
            const auto q = measure_quadrature_points(ifs, n);
            const double w = q.weight.to_double();
            double lhs = 0, rhs = 0;
            for (const auto& p : q.points) {
                lhs += w * f(4.0 * p[0]);
                rhs += w * 0.5 * (f(p[0]) + f(p[0] + 2.0));
            }
            const double gap = std::abs(lhs - rhs);
            CHECK(gap <= prev + 1e-15);
            prev = gap;
        }
        CHECK(prev < 1e-3);
    }

    TEST_CASE("dual IFS maps") {
        const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 3}));
        CHECK(dual.orientation() == Orientation::dual);
        const RationalVector one(IntVector{1});
        CHECK(dual.apply(0, one) == RationalVector(IntVector{1}, 4));
        CHECK(dual.apply(1, one) == one);
        const auto dual01 = dual_ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 1}));
        CHECK(dual01.apply(1, RationalVector(IntVector{0})) == RationalVector(IntVector{1}, 4));
    }

    TEST_CASE("non-uniform weights are representable but rejected by analyses") {
        const AffineIFS ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}), Orientation::forward,
                            std::vector<double>{0.25, 0.75});
        CHECK_THROWS_AS(measure_quadrature_points(ifs, 2), InvalidInput);
        CHECK_THROWS_AS(AffineIFS(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}), Orientation::forward,
                                  std::vector<double>{0.5}),
                        InvalidInput);
    }
}
