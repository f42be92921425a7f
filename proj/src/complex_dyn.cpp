#include "fracwave/complex_dyn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "fracwave/errors.hpp"

namespace fracwave {

ComplexPolynomial::ComplexPolynomial(std::vector<Complex> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.size() < 3) throw InvalidInput("polynomial degree must be >= 2");
    for (const auto& c : coefficients_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvalidInput("coefficients must be finite");
    const double lead = std::abs(coefficients_.back());
    if (lead == 0.0) throw InvalidInput("leading coefficient must be nonzero");
    double lower = 0;
    for (std::size_t k = 0; k + 1 < coefficients_.size(); ++k) lower += std::abs(coefficients_[k]);
    // |z| > r implies |R(z)| > 2|z|.
    escape_radius_ = std::max(1.0, (lower + 2.0) / lead);
}

ComplexPolynomial ComplexPolynomial::monomial_plus(unsigned degree, Complex c) {
    std::vector<Complex> coeffs(degree + 1, 0.0);
    coeffs[0] = c;
    coeffs[degree] = 1.0;
    return ComplexPolynomial(std::move(coeffs));
}

Complex ComplexPolynomial::operator()(Complex z) const {
    Complex acc{};
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Complex ComplexPolynomial::derivative(Complex z) const {
    Complex acc{};
    for (std::size_t k = coefficients_.size() - 1; k >= 1; --k) acc = acc * z + static_cast<double>(k) * coefficients_[k];
    return acc;
}

std::vector<Complex> ComplexPolynomial::preimages(Complex z) const {
    const auto n = static_cast<Eigen::Index>(degree());
    const Complex lead = coefficients_.back();
    // Companion matrix of R(w) - z, monic form.
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex c = coefficients_[static_cast<std::size_t>(i)];
        if (i == 0) c -= z;
        companion(i, n - 1) = -c / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw ComputationError("companion eigen-solve failed");
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    const double scale = std::max(1.0, std::abs(z));
    for (auto& w : roots) {
        for (int it = 0; it < 8; ++it) {
            const Complex f = (*this)(w) - z;
            if (std::abs(f) <= 1e-15 * scale) break;
            const Complex df = derivative(w);
            if (df == Complex{}) break;
            w -= f / df;
        }
        const double residual = std::abs((*this)(w) - z) / scale;
        if (!(residual <= kRootResidual))
            throw ComputationError("root polishing failed: residual " + std::to_string(residual) + " > 1e-10");
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

std::vector<Complex> brolin_sample(const ComplexPolynomial& R, std::size_t n_samples, unsigned burn_in,
                                   std::uint64_t seed) {
    std::vector<Complex> out;
    if (n_samples == 0) return out;
    out.reserve(n_samples);
    std::mt19937_64 rng(seed);
    const auto deg = R.degree();
    Complex z = R.escape_radius() + 1.0;
    const std::size_t total = burn_in + n_samples;
    for (std::size_t step = 0; step < total; ++step) {
        std::vector<Complex> pre;
        try {
            pre = R.preimages(z);
        } catch (const ComputationError& e) {
            throw ComputationError(std::string(e.what()) + " at backward step " + std::to_string(step));
        }
        z = pre[static_cast<std::size_t>(rng() % deg)];
        if (step >= burn_in) out.push_back(z);
    }
    return out;
}

std::vector<MomentEstimate> moments(const std::vector<Complex>& samples, unsigned n_max) {
    if (samples.empty()) throw InvalidInput("moments need at least one sample");
    const auto s = static_cast<double>(samples.size());
    std::vector<MomentEstimate> out;
    out.reserve(n_max + 1);
    std::vector<Complex> powers(samples.size(), 1.0);
    for (unsigned n = 0; n <= n_max; ++n) {
        if (n > 0)
            for (std::size_t i = 0; i < samples.size(); ++i) powers[i] *= samples[i];
        Complex mean{};
        for (const auto& p : powers) mean += p;
        mean /= s;
        double var = 0;
        for (const auto& p : powers) var += std::norm(p - mean);
        const double se = samples.size() > 1 ? std::sqrt(var / (s - 1.0) / s) : 0.0;
        out.push_back({n, n == 0 ? Complex{1.0} : mean, n == 0 ? 0.0 : se});
    }
    return out;
}

bool in_scale4_spectrum(std::int64_t lambda) {
    if (lambda < 0) return false;
    while (lambda > 0) {
        if (lambda % 4 > 1) return false;
        lambda /= 4;
    }
    return true;
}

void LacunaryExpansion::validate() const {
    for (const auto& [l, c] : coefficients)
        if (!in_scale4_spectrum(l))
            throw InvalidInput("frequency " + std::to_string(l) + " is outside the spectrum (base-4 digits must be 0 or 1)");
}

double LacunaryExpansion::norm_sq() const {
    double s = 0;
    for (const auto& [l, c] : coefficients) s += std::norm(c);
    return s;
}

std::pair<LacunaryExpansion, LacunaryExpansion> k2_split(const LacunaryExpansion& f) {
    f.validate();
    LacunaryExpansion f0, f1;
    for (const auto& [l, c] : f.coefficients) {
        if (l % 4 == 0)
            f0.coefficients[l / 4] = c;
        else
            f1.coefficients[(l - 1) / 4] = c;
    }
    return {f0, f1};
}

LacunaryExpansion k2_merge(const LacunaryExpansion& f0, const LacunaryExpansion& f1) {
    f0.validate();
    f1.validate();
    LacunaryExpansion f;
    for (const auto& [l, c] : f0.coefficients) f.coefficients[4 * l] = c;
    for (const auto& [l, c] : f1.coefficients) f.coefficients[4 * l + 1] = c;
    return f;
}

Complex evaluate_Ff(const LacunaryExpansion& f, Complex z) {
    f.validate();
    const double r = std::abs(z);
    if (!(r < 1.0 - 1e-6)) throw InvalidInput("|z| must be below 1 - 1e-6");
    Complex acc{};
    for (const auto& [l, c] : f.coefficients) {
        Complex p = 1.0, base = z;
        for (auto e = l; e > 0; e >>= 1) {
            if (e & 1) p *= base;
            base *= base;
        }
        acc += c * p;
    }
    const double bound = std::sqrt(f.norm_sq()) / std::sqrt(1.0 - r * r);
    if (std::abs(acc) > bound * (1.0 + 1e-12) + 1e-300)
        throw ComputationError("Schwarz bound violated: |F(z)| = " + std::to_string(std::abs(acc)) + " > " +
                               std::to_string(bound));
    return acc;
}

}  // namespace fracwave
