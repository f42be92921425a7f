#include <doctest.h>

#include <cmath>
#include <string>

#include "fracwave/errors.hpp"
#include "fracwave/io.hpp"

using namespace fracwave;

namespace {

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("IFS spec parsing") {
        const auto s = parse_ifs_spec(R"({"A": 4, "B": [0, 2], "L": [0, 1]})");
        CHECK(s.A.dim() == 1);
        CHECK(s.B.size() == 2);
        REQUIRE(s.L);
        CHECK(s.L->size() == 2);
        CHECK_FALSE(s.probabilities);
        const auto t = parse_ifs_spec(R"({"A": [[2, 1], [0, 2]], "B": [[0, 0], [1, 0], [0, 1], [1, 1]]})");
        CHECK(t.A.dim() == 2);
        CHECK(t.B.size() == 4);
        const auto p = parse_ifs_spec(R"({"A": 3, "B": [0, 2], "p": ["1/2", 0.5]})");
        REQUIRE(p.probabilities);
        CHECK((*p.probabilities)[0] == 0.5);
    }

    TEST_CASE("IFS diagnostics carry the line number") {
        const std::string text = "{\n  \"A\": [[2, 0],\n        [0, 1.5]],\n  \"B\": [[0, 0]]\n}";
        const auto msg = message_of([&] { parse_ifs_spec(text, "spec.json"); });
        CHECK(msg.find("spec.json:3:") == 0);
        CHECK(msg.find("A[1][1]") != std::string::npos);
        CHECK(msg.find("not an integer") != std::string::npos);
        const auto b = message_of([&] { parse_ifs_spec("{\n\"A\": 4,\n\"B\": [0,\n 2.5]\n}", "x"); });
        CHECK(b.find("x:4:") == 0);
        CHECK(message_of([] { parse_ifs_spec(R"({"A": 4})", "s"); }) == "s: B required");
        CHECK(message_of([] { parse_ifs_spec(R"({"B": [0]})", "s"); }) == "s: A required");
        CHECK(message_of([] { parse_ifs_spec(R"({"A": 4, "B": [0], "Q": 1})", "s"); }).find("unknown key 'Q'") !=
              std::string::npos);
        CHECK(message_of([] { parse_ifs_spec("{\"A\": 4,", "s"); }).find("malformed JSON") != std::string::npos);
        CHECK_THROWS_AS(load_ifs_spec("/nonexistent/spec.json"), InvalidInput);
    }

    TEST_CASE("scalar parsers") {
        CHECK(parse_int_matrix("4") == IntMatrix{{4}});
        CHECK(parse_int_matrix("2,1;0,2") == IntMatrix{{2, 1}, {0, 2}});
        CHECK(parse_digits("0,2", 1).size() == 2);
        CHECK(parse_digits("0,0;1,0", 2).size() == 2);
        CHECK_THROWS_AS(parse_digits("0,0;1", 2), InvalidInput);
        CHECK(parse_rational_list("1/3, -2, 4/6") == std::vector<Rational>{Rational(1, 3), Rational(-2), Rational(2, 3)});
        CHECK(parse_rational_point("1/2,3/4").dim() == 2);
        CHECK(parse_int_list("-1, 5") == IntVector{-1, 5});
        CHECK_THROWS_AS(parse_int_list("1.5"), InvalidInput);
        CHECK(parse_range("-8..8") == std::pair<std::int64_t, std::int64_t>{-8, 8});
        CHECK(parse_range("2,5") == std::pair<std::int64_t, std::int64_t>{2, 5});
        CHECK_THROWS_AS(parse_range("5..2"), InvalidInput);
        CHECK(parse_complex("-0.1+0.65i") == Complex(-0.1, 0.65));
        CHECK(parse_complex("2") == Complex(2, 0));
        CHECK(parse_complex("-i") == Complex(0, -1));
        CHECK(parse_complex("1e-3-2e-2i") == Complex(1e-3, -2e-2));
        CHECK_THROWS_AS(parse_complex("abc"), InvalidInput);
    }

    TEST_CASE("filter JSON round trip and presets") {
        const auto m = resolve_filter("daub4");
        CHECK(m.is_low_pass());
        const auto back = filter_from_json(filter_to_json(m));
        CHECK(back.coefficients() == m.coefficients());
        const auto inl = resolve_filter(R"({"0": 0.5, "[3]": [0.5, 0]})");
        CHECK(inl.coefficients() == resolve_filter("stretched-haar").coefficients());
        const auto two = filter_from_json(json::parse(R"({"[0,0]": 0.5, "[1,0]": [0.25, 0.25]})"));
        CHECK(two.dim() == 2);
        CHECK(two.coefficient({1, 0}) == Complex(0.25, 0.25));
        CHECK_THROWS_AS(filter_from_json(json::parse(R"({"0": 0.5, "[1,0]": 0.5})")), InvalidInput);
        CHECK_THROWS_AS(filter_from_json(json::parse(R"({"x": 1})")), InvalidInput);
        CHECK_THROWS_AS(filter_from_json(json::object()), InvalidInput);
        CHECK_THROWS_AS(resolve_filter("/no/such/filter.json"), InvalidInput);
    }

    TEST_CASE("JSON helpers") {
        CHECK(rational_json(Rational(3)) == json(3));
        CHECK(rational_json(Rational(-1, 3)) == json("-1/3"));
        CHECK(rational_vector_json(RationalVector(IntVector{1, 2}, 2)) == json::parse(R"([ "1/2", 1 ])"));
        CHECK(int_vector_json({5}) == json(5));
        CHECK(complex_json(Complex(1, -2)) == json::parse("[1.0, -2.0]"));
        LacunaryExpansion f;
        f.coefficients = {{0, 1.0}, {5, Complex(0, 1)}};
        CHECK(lacunary_from_json(lacunary_to_json(f)).coefficients == f.coefficients);
        CHECK_THROWS_AS(lacunary_from_json(json::parse(R"({"3": 1})")), InvalidInput);
    }

    TEST_CASE("polynomial parser") {
        const auto p = parse_polynomial("z^2 + c", Complex(-0.1, 0.65));
        CHECK(p.coefficients() == std::vector<Complex>{Complex(-0.1, 0.65), 0.0, 1.0});
        const auto q = parse_polynomial("z^4 - 0.5*z + 1", 0.0);
        CHECK(q.degree() == 4);
        CHECK(q.coefficients()[1] == Complex(-0.5));
        CHECK(q.coefficients()[0] == Complex(1.0));
        const auto r = parse_polynomial("2*z*z^2 + 3i*z^2 - z^2", 0.0);
        CHECK(r.coefficients() == std::vector<Complex>{0.0, 0.0, Complex(-1, 3), 2.0});
        CHECK_THROWS_AS(parse_polynomial("z + 1", 0.0), InvalidInput);
        CHECK_THROWS_AS(parse_polynomial("z^2 + w", 0.0), InvalidInput);
        CHECK_THROWS_AS(parse_polynomial("", 0.0), InvalidInput);
    }
}
