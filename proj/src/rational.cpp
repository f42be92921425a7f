#include "fracwave/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw ComputationError("rational arithmetic overflow (int64)");
    }
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(i128 num, i128 den) {
    if (den == 0) throw ComputationError("rational division by zero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const i128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational(narrow(num), narrow(den));
}

}  // namespace

std::int64_t checked_mul(std::int64_t a, std::int64_t b) { return narrow(static_cast<i128>(a) * b); }
std::int64_t checked_add(std::int64_t a, std::int64_t b) { return narrow(static_cast<i128>(a) + b); }

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw ComputationError("rational with zero denominator");
    if (denominator < 0) {
        numerator = narrow(-static_cast<i128>(numerator));
        denominator = narrow(-static_cast<i128>(denominator));
    }
    const auto g = std::gcd(numerator, denominator);
    num_ = g > 1 ? numerator / g : numerator;
    den_ = g > 1 ? denominator / g : denominator;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational Rational::frac() const { return *this - Rational(floor()); }

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return Rational(narrow(-static_cast<i128>(num_)), den_); }

Rational& Rational::operator+=(const Rational& o) {
    *this = make_reduced(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                         static_cast<i128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    *this = make_reduced(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw ComputationError("rational division by zero");
    *this = make_reduced(static_cast<i128>(num_) * o.den_, static_cast<i128>(den_) * o.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 lhs = static_cast<i128>(a.num_) * b.den_;
    const i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational parse_rational(const std::string& text) {
    const auto fail = [&] { return InvalidInput("not a rational number: '" + text + "'"); };
    if (text.empty()) throw fail();
    try {
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            std::size_t p1 = 0, p2 = 0;
            const auto num = std::stoll(text.substr(0, slash), &p1);
            const auto den = std::stoll(text.substr(slash + 1), &p2);
            if (p1 != slash || p2 != text.size() - slash - 1 || den == 0) throw fail();
            return Rational(num, den);
        }
        const auto dot_pos = text.find('.');
        if (dot_pos == std::string::npos) {
            std::size_t p = 0;
            const auto v = std::stoll(text, &p);
            if (p != text.size()) throw fail();
            return Rational(v);
        }
        std::string digits = text.substr(0, dot_pos) + text.substr(dot_pos + 1);
        const auto decimals = text.size() - dot_pos - 1;
        if (decimals > 17) throw fail();
        std::size_t p = 0;
        const auto v = std::stoll(digits, &p);
        if (p != digits.size()) throw fail();
        std::int64_t den = 1;
        for (std::size_t i = 0; i < decimals; ++i) den *= 10;
        return Rational(v, den);
    } catch (const InvalidInput&) {
        throw;
    } catch (const std::exception&) {
        throw fail();
    }
}

RationalVector::RationalVector(IntVector numerators, std::int64_t common_denominator)
    : numerators_(std::move(numerators)), denominator_(common_denominator) {
    if (denominator_ == 0) throw ComputationError("rational vector with zero denominator");
    normalize();
}

void RationalVector::normalize() {
    if (denominator_ < 0) {
        denominator_ = narrow(-static_cast<i128>(denominator_));
        for (auto& n : numerators_) n = narrow(-static_cast<i128>(n));
    }
    std::int64_t g = denominator_;
    for (auto n : numerators_) g = std::gcd(g, n);
    if (g > 1) {
        denominator_ /= g;
        for (auto& n : numerators_) n /= g;
    }
}

RationalVector RationalVector::from_components(std::span<const Rational> components) {
    std::int64_t lcm = 1;
    for (const auto& c : components) lcm = narrow(static_cast<i128>(lcm / std::gcd(lcm, c.den())) * c.den());
    IntVector nums;
    nums.reserve(components.size());
    for (const auto& c : components) nums.push_back(checked_mul(c.num(), lcm / c.den()));
    return RationalVector(std::move(nums), lcm);
}

std::vector<Rational> RationalVector::components() const {
    std::vector<Rational> out;
    out.reserve(dim());
    for (std::size_t i = 0; i < dim(); ++i) out.push_back((*this)[i]);
    return out;
}

bool RationalVector::is_zero() const {
    for (auto n : numerators_)
        if (n != 0) return false;
    return true;
}

std::vector<double> RationalVector::to_doubles() const {
    std::vector<double> out;
    out.reserve(dim());
    for (auto n : numerators_) out.push_back(static_cast<double>(n) / static_cast<double>(denominator_));
    return out;
}

double RationalVector::norm2() const {
    double s = 0;
    for (double v : to_doubles()) s += v * v;
    return std::sqrt(s);
}

RationalVector RationalVector::frac() const {
    IntVector nums = numerators_;
    for (auto& n : nums) {
        n %= denominator_;
        if (n < 0) n += denominator_;
    }
    return RationalVector(std::move(nums), denominator_);
}

std::string RationalVector::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < dim(); ++i) os << (i ? ", " : "") << (*this)[i];
    os << ")";
    return os.str();
}

RationalVector operator+(const RationalVector& a, const RationalVector& b) {
    if (a.dim() != b.dim()) throw InvalidInput("rational vector dimension mismatch");
    const auto g = std::gcd(a.denominator_, b.denominator_);
    const auto fa = b.denominator_ / g;
    const auto fb = a.denominator_ / g;
    IntVector nums(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        nums[i] = narrow(static_cast<i128>(a.numerators_[i]) * fa + static_cast<i128>(b.numerators_[i]) * fb);
    }
    return RationalVector(std::move(nums), checked_mul(a.denominator_, fa));
}

RationalVector RationalVector::operator-() const {
    IntVector nums = numerators_;
    for (auto& n : nums) n = narrow(-static_cast<i128>(n));
    return RationalVector(std::move(nums), denominator_);
}

RationalVector operator-(const RationalVector& a, const RationalVector& b) { return a + (-b); }

std::strong_ordering operator<=>(const RationalVector& a, const RationalVector& b) {
    const auto n = std::min(a.dim(), b.dim());
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = a[i] <=> b[i];
        if (c != 0) return c;
    }
    return a.dim() <=> b.dim();
}

Rational dot(const IntVector& b, const RationalVector& x) {
    if (b.size() != x.dim()) throw InvalidInput("dot product dimension mismatch");
    i128 acc = 0;
    for (std::size_t i = 0; i < b.size(); ++i) acc += static_cast<i128>(b[i]) * x.numerators()[i];
    return make_reduced(acc, x.denominator());
}

RationalMatrix::RationalMatrix(std::size_t dim) : rows_(dim, std::vector<Rational>(dim)) {}

RationalMatrix::RationalMatrix(const IntMatrix& integers) : RationalMatrix(integers.size()) {
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = 0; c < dim(); ++c) rows_[r][c] = Rational(integers[r][c]);
}

RationalMatrix RationalMatrix::identity(std::size_t dim) {
    RationalMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
    return m;
}

RationalVector RationalMatrix::apply(const RationalVector& x) const {
    if (x.dim() != dim()) throw InvalidInput("matrix/vector dimension mismatch");
    std::vector<Rational> out(dim());
    const auto xs = x.components();
    for (std::size_t r = 0; r < dim(); ++r) {
        Rational acc;
        for (std::size_t c = 0; c < dim(); ++c) acc += rows_[r][c] * xs[c];
        out[r] = acc;
    }
    return RationalVector::from_components(out);
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    RationalMatrix out(dim());
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = 0; c < dim(); ++c) {
            Rational acc;
            for (std::size_t k = 0; k < dim(); ++k) acc += rows_[r][k] * o.rows_[k][c];
            out(r, c) = acc;
        }
    return out;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix out(dim());
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = 0; c < dim(); ++c) out(c, r) = rows_[r][c];
    return out;
}

RationalMatrix RationalMatrix::inverse() const {
    const auto n = dim();
    RationalMatrix a = *this;
    RationalMatrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col).is_zero()) ++pivot;
        if (pivot == n) throw ComputationError("singular rational matrix");
        std::swap(a.rows_[pivot], a.rows_[col]);
        std::swap(inv.rows_[pivot], inv.rows_[col]);
        const Rational p = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= p;
            inv(col, c) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            const Rational f = a(r, col);
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

RationalVector RationalMatrix::solve(const RationalVector& rhs) const { return inverse().apply(rhs); }

std::vector<std::vector<double>> RationalMatrix::to_doubles() const {
    std::vector<std::vector<double>> out(dim(), std::vector<double>(dim()));
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = 0; c < dim(); ++c) out[r][c] = rows_[r][c].to_double();
    return out;
}

IntVector mat_vec(const IntMatrix& m, const IntVector& v) {
    IntVector out(m.size(), 0);
    for (std::size_t r = 0; r < m.size(); ++r) {
        i128 acc = 0;
        for (std::size_t c = 0; c < v.size(); ++c) acc += static_cast<i128>(m[r][c]) * v[c];
        out[r] = narrow(acc);
    }
    return out;
}

IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b) {
    const auto n = a.size();
    IntMatrix out(n, IntVector(n, 0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            i128 acc = 0;
            for (std::size_t k = 0; k < n; ++k) acc += static_cast<i128>(a[r][k]) * b[k][c];
            out[r][c] = narrow(acc);
        }
    return out;
}

IntMatrix transpose(const IntMatrix& m) {
    IntMatrix out(m.size(), IntVector(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.size(); ++c) out[c][r] = m[r][c];
    return out;
}

IntMatrix identity_matrix(std::size_t dim) {
    IntMatrix out(dim, IntVector(dim, 0));
    for (std::size_t i = 0; i < dim; ++i) out[i][i] = 1;
    return out;
}

IntMatrix mat_pow(const IntMatrix& m, unsigned exponent) {
    IntMatrix result = identity_matrix(m.size());
    for (unsigned i = 0; i < exponent; ++i) result = mat_mul(result, m);
    return result;
}

std::int64_t determinant(const IntMatrix& m) {
    const auto n = m.size();
    if (n == 0) return 1;
    std::vector<std::vector<i128>> a(n, std::vector<i128>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a[r][c] = m[r][c];
    i128 sign = 1;
    i128 prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(a[k], a[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return narrow(sign * a[n - 1][n - 1]);
}

}  // namespace fracwave
