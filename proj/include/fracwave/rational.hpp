#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fracwave {

using IntVector = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVector>;

// Reduced fraction with positive denominator. Arithmetic goes through 128-bit
// intermediates and throws ComputationError if a result leaves int64 range.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t numerator, std::int64_t denominator);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    std::int64_t floor() const;
    // x - floor(x), in [0, 1).
    Rational frac() const;
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Parses "p", "p/q" or a finite decimal such as "-0.75".
Rational parse_rational(const std::string& text);

// A d-vector of rationals stored as integer numerators over one reduced common denominator.
class RationalVector {
public:
    RationalVector() = default;
    explicit RationalVector(std::size_t dim) : numerators_(dim, 0) {}
    explicit RationalVector(const IntVector& integers) : numerators_(integers) {}
    RationalVector(IntVector numerators, std::int64_t common_denominator);
    static RationalVector from_components(std::span<const Rational> components);

    std::size_t dim() const { return numerators_.size(); }
    const IntVector& numerators() const { return numerators_; }
    std::int64_t denominator() const { return denominator_; }
    Rational operator[](std::size_t i) const { return {numerators_[i], denominator_}; }
    std::vector<Rational> components() const;

    bool is_integer() const { return denominator_ == 1; }
    bool is_zero() const;
    // Only meaningful when is_integer().
    const IntVector& as_integers() const { return numerators_; }
    std::vector<double> to_doubles() const;
    double norm2() const;
    // Componentwise x - floor(x).
    RationalVector frac() const;
    std::string str() const;

    friend RationalVector operator+(const RationalVector& a, const RationalVector& b);
    friend RationalVector operator-(const RationalVector& a, const RationalVector& b);
    RationalVector operator-() const;

    friend bool operator==(const RationalVector&, const RationalVector&) = default;
    // Lexicographic by component value.
    friend std::strong_ordering operator<=>(const RationalVector& a, const RationalVector& b);

private:
    void normalize();

    IntVector numerators_;
    std::int64_t denominator_ = 1;
};

// Exact integer dot product b . x as a rational.
Rational dot(const IntVector& b, const RationalVector& x);

// Small dense rational matrix (d <= a handful).
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(std::size_t dim);
    explicit RationalMatrix(const IntMatrix& integers);
    static RationalMatrix identity(std::size_t dim);

    std::size_t dim() const { return rows_.size(); }
    const Rational& operator()(std::size_t r, std::size_t c) const { return rows_[r][c]; }
    Rational& operator()(std::size_t r, std::size_t c) { return rows_[r][c]; }

    RationalVector apply(const RationalVector& x) const;
    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix transpose() const;
    // Throws ComputationError when singular.
    RationalMatrix inverse() const;
    // Solves M x = rhs exactly; throws ComputationError when singular.
    RationalVector solve(const RationalVector& rhs) const;
    std::vector<std::vector<double>> to_doubles() const;

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::vector<std::vector<Rational>> rows_;
};

// Checked integer helpers shared by the exact kernels.
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
IntVector mat_vec(const IntMatrix& m, const IntVector& v);
IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b);
IntMatrix transpose(const IntMatrix& m);
IntMatrix identity_matrix(std::size_t dim);
IntMatrix mat_pow(const IntMatrix& m, unsigned exponent);
// Exact determinant (fraction-free elimination).
std::int64_t determinant(const IntMatrix& m);

}  // namespace fracwave
