#include "fracwave/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fracwave/errors.hpp"

namespace fracwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &used);
    } catch (const std::exception&) {
        throw InvalidInput(what + ": '" + t + "' is not an integer");
    }
    if (used != t.size()) throw InvalidInput(what + ": '" + t + "' is not an integer");
    return v;
}

double parse_double(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw InvalidInput(what + ": '" + t + "' is not a number");
    }
    if (used != t.size() || !std::isfinite(v)) throw InvalidInput(what + ": '" + t + "' is not a finite number");
    return v;
}

// Line of every scalar token (keys included) in document order.
std::vector<int> scalar_token_lines(const std::string& text) {
    std::vector<int> lines;
    int line = 1;
    std::size_t i = 0;
    const auto structural = [](char c) {
        return c == '{' || c == '}' || c == '[' || c == ']' || c == ':' || c == ',' || c == ' ' || c == '\t' ||
               c == '\r' || c == '\n';
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (structural(c)) {
            ++i;
        } else if (c == '"') {
            lines.push_back(line);
            ++i;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\') ++i;
                ++i;
            }
            ++i;
        } else {
            lines.push_back(line);
            while (i < text.size() && !structural(text[i])) ++i;
        }
    }
    return lines;
}

void index_lines(const json& j, const std::string& path, const std::vector<int>& lines, std::size_t& next,
                 std::map<std::string, int>& out) {
    const auto line_at = [&](std::size_t k) { return k < lines.size() ? lines[k] : 0; };
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            const std::string child = path.empty() ? key : path + "." + key;
            out[child] = line_at(next++);
            index_lines(value, child, lines, next, out);
        }
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k)
            index_lines(j[k], path + "[" + std::to_string(k) + "]", lines, next, out);
    } else {
        out[path] = line_at(next++);
    }
}

struct LocatedJson {
    json doc;
    std::map<std::string, int> lines;
    std::string source;

    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        const auto it = lines.find(path);
        std::string where = source;
        if (it != lines.end() && it->second > 0) where += ":" + std::to_string(it->second);
        throw InvalidInput(where + ": " + message);
    }

    std::int64_t integer(const json& j, const std::string& path) const {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        if (j.is_number_float()) {
            const double v = j.get<double>();
            if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
        }
        fail(path, path + " = " + j.dump() + " is not an integer");
    }

    IntVector int_row(const json& j, const std::string& path) const {
        if (!j.is_array()) fail(path, path + " must be an array");
        IntVector row;
        for (std::size_t k = 0; k < j.size(); ++k) row.push_back(integer(j[k], path + "[" + std::to_string(k) + "]"));
        return row;
    }

    IntMatrix matrix(const std::string& key) const {
        const auto& j = doc.at(key);
        if (j.is_number()) return {{integer(j, key)}};
        if (!j.is_array() || j.empty()) fail(key, key + " must be an integer or a non-empty array of rows");
        IntMatrix m;
        for (std::size_t r = 0; r < j.size(); ++r) m.push_back(int_row(j[r], key + "[" + std::to_string(r) + "]"));
        return m;
    }

    DigitSet digits(const std::string& key, std::size_t dim) const {
        const auto& j = doc.at(key);
        if (!j.is_array() || j.empty()) fail(key, key + " must be a non-empty array");
        std::vector<IntVector> pts;
        for (std::size_t r = 0; r < j.size(); ++r) {
            const std::string path = key + "[" + std::to_string(r) + "]";
            if (j[r].is_array())
                pts.push_back(int_row(j[r], path));
            else
                pts.push_back({integer(j[r], path)});
            if (pts.back().size() != dim)
                fail(path, path + " has dimension " + std::to_string(pts.back().size()) + ", expected " +
                               std::to_string(dim));
        }
        return DigitSet(std::move(pts));
    }
};

LocatedJson locate(const std::string& text, const std::string& source) {
    LocatedJson out;
    out.source = source;
    try {
        out.doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(source + ": malformed JSON: " + e.what());
    }
    const auto lines = scalar_token_lines(text);
    std::size_t next = 0;
    index_lines(out.doc, "", lines, next, out.lines);
    return out;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IfsSpec parse_ifs_spec(const std::string& text, const std::string& source) {
    const auto loc = locate(text, source);
    if (!loc.doc.is_object()) throw InvalidInput(source + ": IFS spec must be a JSON object");
    for (const auto& [key, value] : loc.doc.items())
        if (key != "A" && key != "B" && key != "L" && key != "p") loc.fail(key, "unknown key '" + key + "'");
    if (!loc.doc.contains("A")) throw InvalidInput(source + ": A required");
    if (!loc.doc.contains("B")) throw InvalidInput(source + ": B required");
    auto A = ExpansiveIntMatrix(loc.matrix("A"));
    auto B = loc.digits("B", A.dim());
    std::optional<DigitSet> L;
    if (loc.doc.contains("L")) L = loc.digits("L", A.dim());
    std::optional<std::vector<double>> p;
    if (loc.doc.contains("p")) {
        const auto& j = loc.doc["p"];
        if (!j.is_array()) loc.fail("p", "p must be an array");
        std::vector<double> probs;
        for (std::size_t k = 0; k < j.size(); ++k) {
            const std::string path = "p[" + std::to_string(k) + "]";
            if (j[k].is_string())
                probs.push_back(parse_rational(j[k].get<std::string>()).to_double());
            else if (j[k].is_number())
                probs.push_back(j[k].get<double>());
            else
                loc.fail(path, path + " must be a number");
        }
        p = std::move(probs);
    }
    return IfsSpec{std::move(A), std::move(B), std::move(L), std::move(p)};
}

IfsSpec load_ifs_spec(const std::string& path) { return parse_ifs_spec(read_file(path), path); }

IntMatrix parse_int_matrix(const std::string& text) {
    if (trim(text).empty()) throw InvalidInput("matrix is empty");
    IntMatrix m;
    for (const auto& row : split(text, ';')) {
        IntVector r;
        for (const auto& e : split(row, ',')) r.push_back(parse_int(e, "matrix entry"));
        m.push_back(std::move(r));
    }
    return m;
}

DigitSet parse_digits(const std::string& text, std::size_t dim) {
    if (trim(text).empty()) throw InvalidInput("digit set is empty");
    std::vector<IntVector> pts;
    if (dim == 1) {
        std::string flat = text;
        for (auto& ch : flat)
            if (ch == ';') ch = ',';
        for (const auto& e : split(flat, ',')) pts.push_back({parse_int(e, "digit")});
    } else {
        for (const auto& p : split(text, ';')) {
            IntVector v;
            for (const auto& e : split(p, ',')) v.push_back(parse_int(e, "digit"));
            if (v.size() != dim)
                throw InvalidInput("digit '" + p + "' has dimension " + std::to_string(v.size()) + ", expected " +
                                   std::to_string(dim));
            pts.push_back(std::move(v));
        }
    }
    return DigitSet(std::move(pts));
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    if (trim(text).empty()) return out;
    for (const auto& e : split(text, ',')) out.push_back(parse_rational(e));
    return out;
}

RationalVector parse_rational_point(const std::string& text) {
    const auto comps = parse_rational_list(text);
    if (comps.empty()) throw InvalidInput("empty point");
    return RationalVector::from_components(comps);
}

IntVector parse_int_list(const std::string& text) {
    IntVector out;
    if (trim(text).empty()) return out;
    for (const auto& e : split(text, ',')) out.push_back(parse_int(e, "integer list"));
    return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
    const auto t = trim(text);
    const auto dots = t.find("..");
    std::pair<std::int64_t, std::int64_t> r;
    if (dots != std::string::npos) {
        r = {parse_int(t.substr(0, dots), "range"), parse_int(t.substr(dots + 2), "range")};
    } else {
        const auto parts = split(t, ',');
        if (parts.size() != 2) throw InvalidInput("range '" + t + "' must be 'lo,hi' or 'lo..hi'");
        r = {parse_int(parts[0], "range"), parse_int(parts[1], "range")};
    }
    if (r.first > r.second) throw InvalidInput("range '" + t + "' is empty");
    return r;
}

Complex parse_complex(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (ch != ' ') t.push_back(ch);
    if (t.empty()) throw InvalidInput("empty complex number");
    if (t.back() != 'i' && t.back() != 'j') return {parse_double(t, "complex"), 0.0};
    t.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;)
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            cut = k;
            break;
        }
    const auto imag_text = [](std::string s) {
        if (s.empty() || s == "+") return std::string("1");
        if (s == "-") return std::string("-1");
        return s;
    };
    if (cut == std::string::npos) return {0.0, parse_double(imag_text(t), "complex")};
    return {parse_double(t.substr(0, cut), "complex"), parse_double(imag_text(t.substr(cut)), "complex")};
}

TrigPolynomial filter_from_json(const json& j) {
    if (!j.is_object() || j.empty()) throw InvalidInput("filter must be a non-empty JSON object of coefficients");
    std::map<IntVector, Complex> coeffs;
    std::size_t dim = 0;
    for (const auto& [key, value] : j.items()) {
        IntVector k;
        json kj;
        try {
            kj = json::parse(key);
        } catch (const json::parse_error&) {
            throw InvalidInput("filter key '" + key + "' is not an integer or integer list");
        }
        if (kj.is_number_integer()) {
            k = {kj.get<std::int64_t>()};
        } else if (kj.is_array() && !kj.empty()) {
            for (const auto& e : kj) {
                if (!e.is_number_integer()) throw InvalidInput("filter key '" + key + "' has a non-integer entry");
                k.push_back(e.get<std::int64_t>());
            }
        } else {
            throw InvalidInput("filter key '" + key + "' is not an integer or integer list");
        }
        if (dim == 0) dim = k.size();
        if (k.size() != dim) throw InvalidInput("filter key '" + key + "' has inconsistent dimension");
        Complex c;
        if (value.is_number()) {
            c = value.get<double>();
        } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
            c = {value[0].get<double>(), value[1].get<double>()};
        } else {
            throw InvalidInput("filter coefficient for '" + key + "' must be a number or [re, im]");
        }
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidInput("filter coefficient for '" + key + "' is not finite");
        if (coeffs.count(k)) throw InvalidInput("filter frequency '" + key + "' repeated");
        coeffs[k] = c;
    }
    return TrigPolynomial(dim, coeffs);
}

json filter_to_json(const TrigPolynomial& m) {
    json out = json::object();
    for (const auto& [k, c] : m.coefficients()) out[int_vector_json(k).dump()] = {c.real(), c.imag()};
    return out;
}

TrigPolynomial resolve_filter(const std::string& spec) {
    const auto t = trim(spec);
    if (t == "haar") return TrigPolynomial::from_scalar_map({{0, 0.5}, {1, 0.5}});
    if (t == "stretched-haar") return TrigPolynomial::from_scalar_map({{0, 0.5}, {3, 0.5}});
    if (t == "haar3") return TrigPolynomial::from_scalar_map({{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}});
    if (t == "daub4") {
        const double s = std::sqrt(3.0);
        return TrigPolynomial::from_scalar_map(
            {{0, (1 + s) / 8}, {1, (3 + s) / 8}, {2, (3 - s) / 8}, {3, (1 - s) / 8}});
    }
    if (!t.empty() && t.front() == '{') {
        try {
            return filter_from_json(json::parse(t));
        } catch (const json::parse_error& e) {
            throw InvalidInput(std::string("inline filter JSON: ") + e.what());
        }
    }
    const auto text = read_file(t);
    try {
        return filter_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw InvalidInput(t + ": malformed filter JSON: " + e.what());
    }
}

json rational_json(const Rational& r) {
    if (r.is_integer()) return r.num();
    return r.str();
}

json rational_vector_json(const RationalVector& v) {
    if (v.dim() == 1) return rational_json(v[0]);
    json out = json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) out.push_back(rational_json(v[i]));
    return out;
}

json int_vector_json(const IntVector& v) {
    if (v.size() == 1) return v[0];
    json out = json::array();
    for (auto e : v) out.push_back(e);
    return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json cycle_json(const Cycle& c, const DigitSet& branches) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(rational_vector_json(p));
    json word = json::array();
    for (auto w : c.word) word.push_back(int_vector_json(branches[w]));
    return json{{"points", pts},
                {"period", c.period()},
                {"word", word},
                {"extreme", c.is_extreme},
                {"extreme_exact", c.extreme_exact}};
}

json spectrum_json(const SpectrumSet& s) {
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return RationalVector(s.elements[a]) < RationalVector(s.elements[b]);
    });
    json elems = json::array();
    json prov = json::array();
    for (auto i : order) {
        elems.push_back(int_vector_json(s.elements[i]));
        json word = json::array();
        for (auto w : s.provenance[i].word) word.push_back(int_vector_json(s.L[w]));
        prov.push_back({{"element", int_vector_json(s.elements[i])},
                        {"generation", s.generation[i]},
                        {"cycle", s.provenance[i].cycle_index},
                        {"seed_point", s.provenance[i].seed_point},
                        {"digits", word}});
    }
    return json{{"level", s.level}, {"generations", s.generations}, {"size", s.size()}, {"elements", elems},
                {"provenance", prov}};
}

json gram_report_json(const GramReport& g) {
    return json{{"size", g.size},
                {"orthogonal", g.orthogonal()},
                {"certified", g.certified_orthogonal()},
                {"max_offdiag", g.max_offdiag},
                {"exact_zero_pairs", g.exact_zero_pairs},
                {"numeric_zero_pairs", g.numeric_zero_pairs},
                {"nonzero_pairs", g.nonzero_pairs},
                {"max_diag_deviation", g.max_diag_deviation},
                {"error_bound", g.max_tail_bound}};
}

LacunaryExpansion lacunary_from_json(const json& j) {
    const json& coeffs = j.is_object() && j.contains("coefficients") ? j["coefficients"] : j;
    if (!coeffs.is_object()) throw InvalidInput("expansion must be a JSON object {\"lambda\": [re, im]}");
    LacunaryExpansion f;
    for (const auto& [key, value] : coeffs.items()) {
        const auto l = parse_int(key, "frequency");
        Complex c;
        if (value.is_number())
            c = value.get<double>();
        else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number())
            c = {value[0].get<double>(), value[1].get<double>()};
        else
            throw InvalidInput("coefficient for frequency " + key + " must be a number or [re, im]");
        f.coefficients[l] = c;
    }
    f.validate();
    return f;
}

json lacunary_to_json(const LacunaryExpansion& f) {
    json out = json::object();
    for (const auto& [l, c] : f.coefficients) out[std::to_string(l)] = complex_json(c);
    return out;
}

ComplexPolynomial parse_polynomial(const std::string& text, Complex c_value) {
    std::string t;
    for (char ch : text)
        if (ch != ' ') t.push_back(ch);
    if (t.empty()) throw InvalidInput("empty polynomial");
    std::vector<std::string> terms;
    std::string cur;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const char ch = t[k];
        const bool sign = (ch == '+' || ch == '-') && k > 0 && t[k - 1] != 'e' && t[k - 1] != 'E' && t[k - 1] != '^' &&
                          t[k - 1] != '*';
        if (sign) {
            terms.push_back(cur);
            cur.clear();
        }
        cur.push_back(ch);
    }
    terms.push_back(cur);
    std::map<unsigned, Complex> coeffs;
    for (auto term : terms) {
        Complex value = 1.0;
        if (!term.empty() && (term[0] == '+' || term[0] == '-')) {
            if (term[0] == '-') value = -1.0;
            term.erase(0, 1);
        }
        if (term.empty()) throw InvalidInput("polynomial '" + text + "' has an empty term");
        unsigned power = 0;
        for (const auto& factor : split(term, '*')) {
            if (factor.empty()) throw InvalidInput("polynomial '" + text + "' has an empty factor");
            if (factor == "c") {
                value *= c_value;
            } else if (factor[0] == 'z') {
                if (factor == "z") {
                    power += 1;
                } else if (factor.size() > 2 && factor[1] == '^') {
                    const auto e = parse_int(factor.substr(2), "exponent");
                    if (e < 0 || e > 64) throw InvalidInput("exponent out of range in '" + factor + "'");
                    power += static_cast<unsigned>(e);
                } else {
                    throw InvalidInput("cannot parse factor '" + factor + "'");
                }
            } else {
                value *= parse_complex(factor);
            }
        }
        coeffs[power] += value;
    }
    const unsigned degree = coeffs.rbegin()->first;
    std::vector<Complex> dense(degree + 1, 0.0);
    for (const auto& [p, c] : coeffs) dense[p] = c;
    while (dense.size() > 1 && dense.back() == Complex{}) dense.pop_back();
    return ComplexPolynomial(std::move(dense));
}

}  // namespace fracwave
