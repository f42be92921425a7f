#include <doctest.h>

#include <set>

#include "fracwave/config.hpp"
#include "fracwave/cycles.hpp"
#include "fracwave/errors.hpp"
#include "oracles.hpp"

using namespace fracwave;

namespace {

std::vector<std::vector<Rational>> points_of(const std::vector<Cycle>& cs) {
    std::vector<std::vector<Rational>> out;
    for (const auto& c : cs) {
        std::vector<Rational> p;
        for (const auto& x : c.points) p.push_back(x[0]);
        out.push_back(p);
    }
    return out;
}

using RList = std::vector<std::vector<Rational>>;

}  // namespace

TEST_SUITE("cycles") {
    TEST_CASE("scale-4 examples") {
        const auto m = filter_from_digits(DigitSet::scalars({0, 2}));
        const auto A = ExpansiveIntMatrix::scalar(4);
        const auto c01 = find_cycles(dual_ifs(A, DigitSet::scalars({0, 1})), m, 6);
        CHECK(points_of(c01) == RList{{Rational(0)}});
        CHECK(c01[0].is_trivial());
        const auto c03 = find_cycles(dual_ifs(A, DigitSet::scalars({0, 3})), m, 6);
        CHECK(points_of(c03) == RList{{Rational(0)}, {Rational(1)}});
        CHECK(c03[1].word == std::vector<std::size_t>{1});
        CHECK(c03[1].extreme_exact);
    }

    TEST_CASE("stretched Haar cycle on the circle") {
        const auto m0 = TrigPolynomial::from_scalar_map({{0, 0.5}, {3, 0.5}});
        const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1}));
        const auto cs = find_cycles(dual, m0, 6, CycleConvention::modulo_lattice);
        CHECK(points_of(cs) == RList{{Rational(0)}, {Rational(1, 3), Rational(2, 3)}});
        for (const auto& c : cs) CHECK(verify_cycle(dual, c, CycleConvention::modulo_lattice));
        const auto haar = TrigPolynomial::from_scalar_map({{0, 0.5}, {1, 0.5}});
        CHECK(points_of(find_cycles(dual, haar, 12, CycleConvention::modulo_lattice)) == RList{{Rational(0)}});
    }

    TEST_CASE("property: every periodic point is found (exhaustive oracle)") {
        for (const auto& [a, L] : std::vector<std::pair<std::int64_t, IntVector>>{
                 {4, {0, 3}}, {4, {0, 1}}, {3, {0, 1, 5}}, {2, {0, 3}}, {5, {0, 2, -1}}}) {
            const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(a), DigitSet::scalars(L));
            const unsigned P = 4;
            const auto all = find_cycles(dual, TrigPolynomial::constant(1.0), P, CycleConvention::exact_points, true);
            std::set<Rational> found;
            for (const auto& c : all) {
                CHECK(verify_cycle(dual, c, CycleConvention::exact_points));
                CHECK(c.period() <= P);
                for (const auto& x : c.points) CHECK(found.insert(x[0]).second);
            }
            std::set<Rational> expected;
            for (int p = 1; p <= static_cast<int>(P); ++p)
                for (const auto& r : oracle::periodic_points(a, L, p)) expected.insert(Rational(r.num, r.den));
            CHECK(found == expected);
        }
    }

    TEST_CASE("property: fixed-point residual is exactly zero and rotation is canonical") {
        const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(3), DigitSet::scalars({0, 2, 7}));
        const auto all = find_cycles(dual, TrigPolynomial::constant(1.0), 5, CycleConvention::exact_points, true);
        CHECK(all.size() > 10);
        for (const auto& c : all) {
            for (std::size_t i = 0; i < c.period(); ++i)
                CHECK(dual.apply(c.word[i], c.points[i]) == c.points[(i + 1) % c.period()]);
            for (const auto& x : c.points) CHECK_FALSE(x < c.points[0]);
            const auto orbit = word_orbit(dual, c.word);
            CHECK(orbit == c.points);
        }
        for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].period() <= all[i].period());
    }

    TEST_CASE("property: extreme cycles agree with floating evaluation") {
        const auto m = filter_from_digits(DigitSet::scalars({0, 2}));
        for (std::int64_t l = 1; l <= 15; l += 2) {
            const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, l}));
            const auto all = find_cycles(dual, m, 6, CycleConvention::exact_points, true);
            bool trivial = false;
            for (const auto& c : all) {
                bool fl = true;
                for (const auto& x : c.points) fl = fl && std::abs(std::abs(m.evaluate(x)) - 1.0) <= 1e-12;
                CHECK(fl == c.is_extreme);
                trivial = trivial || (c.is_trivial() && c.is_extreme);
            }
            CHECK(trivial);
        }
    }

    TEST_CASE("two-dimensional cycles") {
        const ExpansiveIntMatrix A(IntMatrix{{2, 0}, {0, 2}});
        const DigitSet L({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
        const auto dual = dual_ifs(A, L);
        const auto m = filter_from_digits(L);
        const auto cs = find_cycles(dual, m, 3, CycleConvention::exact_points);
        REQUIRE_FALSE(cs.empty());
        CHECK(cs[0].is_trivial());
        for (const auto& c : cs) CHECK(verify_cycle(dual, c, CycleConvention::exact_points));
    }

    TEST_CASE("enumeration cap") {
        const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 1, 2, 3}));
        const auto saved = enumeration_cap();
        set_enumeration_cap(100);
        CHECK_THROWS_AS(find_cycles(dual, TrigPolynomial::constant(1.0), 8), EnumerationOverflow);
        set_enumeration_cap(saved);
        CHECK_THROWS_AS(find_cycles(dual, TrigPolynomial::constant(1.0), 0), InvalidInput);
    }
}
