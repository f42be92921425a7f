#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracwave/ifs.hpp"
#include "fracwave/rational.hpp"

namespace fracwave {

using Complex = std::complex<double>;

// x -> sum_k a_k e^{2 pi i k.x}, finitely many nonzero a_k.
class TrigPolynomial {
public:
    explicit TrigPolynomial(std::size_t dim = 1) : dim_(dim) {}
    TrigPolynomial(std::size_t dim, const std::map<IntVector, Complex>& coefficients);
    static TrigPolynomial constant(Complex c, std::size_t dim = 1);
    // d = 1 convenience: {k: a_k}.
    static TrigPolynomial from_scalar_map(const std::map<std::int64_t, Complex>& coefficients);

    std::size_t dim() const { return dim_; }
    const std::map<IntVector, Complex>& coefficients() const { return coefficients_; }
    Complex coefficient(const IntVector& k) const;
    void set(const IntVector& k, Complex value);
    bool is_zero() const { return coefficients_.empty(); }

    Complex evaluate(const std::vector<double>& x) const;
    Complex evaluate(double x) const { return evaluate(std::vector<double>{x}); }
    // Phases reduced mod 1 exactly before the exponential.
    Complex evaluate(const RationalVector& x) const;

    TrigPolynomial modulus_squared() const;
    // 2 pi sum |a_k| ||k||_2, a Lipschitz constant of the polynomial.
    double lipschitz_constant() const;
    // max_k ||k||_inf over the support (0 for the zero polynomial).
    std::int64_t max_frequency() const;
    bool is_low_pass(double tol = 1e-12) const;

    // Support when all coefficients are nonnegative reals summing to 1.
    std::optional<std::vector<IntVector>> convex_support() const;
    // Support when additionally every coefficient equals 1/N (a digit filter m_B).
    std::optional<std::vector<IntVector>> digit_form() const;

    // |m(x)| = 1 decided by (k - k_0).x in Z for all k; nullopt if not a convex filter.
    std::optional<bool> is_extreme_exact(const RationalVector& x) const;
    // m(x) = 0 decided by a cyclotomic divisibility test; nullopt if not a digit filter
    // or the denominator is too large for the exact test.
    std::optional<bool> vanishes_exact(const RationalVector& x) const;

    std::string str() const;

private:
    std::size_t dim_;
    std::map<IntVector, Complex> coefficients_;
};

TrigPolynomial filter_from_digits(const DigitSet& B);

// True iff sum_{j} zeta_q^{exponents[j]} = 0, zeta_q a primitive q-th root of unity.
// Exponents are reduced mod q. nullopt when q exceeds the exact-test limit.
std::optional<bool> root_of_unity_sum_vanishes(std::int64_t q, const IntVector& exponents);
inline constexpr std::int64_t kCyclotomicLimit = 200'000;

struct HadamardCertificate {
    ExpansiveIntMatrix A;
    DigitSet B;
    DigitSet L;
    std::vector<std::vector<Complex>> matrix;
    double unitarity_defect = 0;
    bool valid = false;

    static constexpr double kTolerance = 1e-12;
};

HadamardCertificate hadamard_check(const ExpansiveIntMatrix& A, const DigitSet& B, const DigitSet& L);

// max over a grid^d lattice in [0,1)^d of |sum_l |m((A^T)^-1 (x+l))|^2 - 1|.
double qmf_defect(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& L, unsigned grid);

}  // namespace fracwave
