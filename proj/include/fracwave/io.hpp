#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fracwave/complex_dyn.hpp"
#include "fracwave/cycles.hpp"
#include "fracwave/filters.hpp"
#include "fracwave/ifs.hpp"
#include "fracwave/spectra.hpp"

namespace fracwave {

using json = nlohmann::ordered_json;

struct IfsSpec {
    ExpansiveIntMatrix A;
    DigitSet B;
    std::optional<DigitSet> L;
    std::optional<std::vector<double>> probabilities;
};

// {"A": [[...]] | int, "B": [[...]] | [ints], "L": optional, "p": optional}. Non-integer entries are
// rejected with "<source>:<line>: ..." diagnostics.
IfsSpec parse_ifs_spec(const std::string& text, const std::string& source = "<input>");
IfsSpec load_ifs_spec(const std::string& path);

std::string read_file(const std::string& path);

// "4" or "2,1;0,2" (rows separated by ';').
IntMatrix parse_int_matrix(const std::string& text);
// d = 1: "0,2" or "0;2"; d > 1: points separated by ';' with comma-separated components.
DigitSet parse_digits(const std::string& text, std::size_t dim);
std::vector<Rational> parse_rational_list(const std::string& text);
// Rational point: "1/3" or "1/2,3/4".
RationalVector parse_rational_point(const std::string& text);
IntVector parse_int_list(const std::string& text);
// "a,b" ranges or "a..b".
std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text);
Complex parse_complex(const std::string& text);

// {"[k1,...,kd]": [re, im] | re}
TrigPolynomial filter_from_json(const json& j);
json filter_to_json(const TrigPolynomial& m);
// Named presets (haar, stretched-haar, daub4), a JSON file path, or inline JSON.
TrigPolynomial resolve_filter(const std::string& spec);

// d = 1 scalars as an integer or "p/q" string; d > 1 as arrays of those.
json rational_json(const Rational& r);
json rational_vector_json(const RationalVector& v);
json int_vector_json(const IntVector& v);
json complex_json(Complex c);
json cycle_json(const Cycle& c, const DigitSet& branches);
json spectrum_json(const SpectrumSet& s);
json gram_report_json(const GramReport& g);

LacunaryExpansion lacunary_from_json(const json& j);
json lacunary_to_json(const LacunaryExpansion& f);

// Polynomial text such as "z^2 + c", "z^4 - 0.5*z + 1"; the symbol c takes the given value.
ComplexPolynomial parse_polynomial(const std::string& text, Complex c_value);

}  // namespace fracwave
