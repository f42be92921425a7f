#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace fracwave {

using Complex = std::complex<double>;

class ComplexPolynomial {
public:
    // Ascending coefficients a_0 .. a_n, n >= 2, a_n != 0.
    explicit ComplexPolynomial(std::vector<Complex> coefficients);
    // z^degree + c
    static ComplexPolynomial monomial_plus(unsigned degree, Complex c = 0.0);

    unsigned degree() const { return static_cast<unsigned>(coefficients_.size() - 1); }
    const std::vector<Complex>& coefficients() const { return coefficients_; }
    double escape_radius() const { return escape_radius_; }
    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;
    // All solutions w of R(w) = z, sorted by (real, imag), Newton-polished.
    std::vector<Complex> preimages(Complex z) const;

private:
    std::vector<Complex> coefficients_;
    double escape_radius_ = 1;
};

inline constexpr unsigned kDefaultBurnIn = 100;
inline constexpr double kRootResidual = 1e-10;

// Random backward orbit from escape_radius + 1, choosing a preimage uniformly at each step.
std::vector<Complex> brolin_sample(const ComplexPolynomial& R, std::size_t n_samples, unsigned burn_in,
                                   std::uint64_t seed);

struct MomentEstimate {
    unsigned n = 0;
    Complex value;
    double std_error = 0;
};

std::vector<MomentEstimate> moments(const std::vector<Complex>& samples, unsigned n_max);

// Base-4 digits all in {0, 1}.
bool in_scale4_spectrum(std::int64_t lambda);

struct LacunaryExpansion {
    std::map<std::int64_t, Complex> coefficients;

    // Throws InvalidInput if a frequency is outside the spectrum.
    void validate() const;
    double norm_sq() const;
};

// f = F0(z^4) + z F1(z^4).
std::pair<LacunaryExpansion, LacunaryExpansion> k2_split(const LacunaryExpansion& f);
LacunaryExpansion k2_merge(const LacunaryExpansion& f0, const LacunaryExpansion& f1);

// sum c_l z^l for |z| < 1 - 1e-6, checked against |F| <= ||f|| / sqrt(1 - |z|^2).
Complex evaluate_Ff(const LacunaryExpansion& f, Complex z);

}  // namespace fracwave
