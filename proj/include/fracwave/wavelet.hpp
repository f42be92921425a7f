#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracwave/cycles.hpp"
#include "fracwave/filters.hpp"

namespace fracwave {

inline constexpr unsigned kDefaultResolution = 12;

// Step function with cells [origin + i h, origin + (i+1) h), h = 2^-J. Samples are cell averages.
struct SampledFunction {
    double origin = 0;
    unsigned resolution = kDefaultResolution;
    std::vector<Complex> samples;
    Interval support_hint{};

    double step() const { return std::ldexp(1.0, -static_cast<int>(resolution)); }
    double end() const { return origin + step() * static_cast<double>(samples.size()); }
    double norm() const;
    // Cell value at x (0 outside).
    Complex at(double x) const;

    static SampledFunction indicator(double lo, double hi, unsigned resolution, Complex value = 1.0);
    static SampledFunction zero(unsigned resolution = kDefaultResolution);
};

// Exact L^2 distance / inner product of two step functions on dyadic grids.
double l2_distance(const SampledFunction& f, const SampledFunction& g);
Complex inner_product(const SampledFunction& f, const SampledFunction& g);

struct CascadeResult {
    SampledFunction phi;
    // ||phi_{n+1} - phi_n||, one per iteration.
    std::vector<double> successive_distances;
    // ||S phi - phi|| for the returned phi, S the refinement operator.
    double residual = 0;
};

// Cell-averaged cascade phi_{n+1}(x) = a sum_k c_k phi_n(a x - k), started from chi_[0,1).
CascadeResult cascade(const TrigPolynomial& m0, std::int64_t a, unsigned iterations,
                      unsigned resolution = kDefaultResolution);

// Entries <phi(. - k), phi(. - k')> for k, k' in [-shifts, shifts], conjugate-linear in the first slot.
Eigen::MatrixXcd translate_gram(const SampledFunction& phi, unsigned shifts);

// High-pass companion coefficients d_n of m1(x) = -e^{2 pi i K x} conj(m0(x + 1/2)), K odd.
TrigPolynomial high_pass_companion(const TrigPolynomial& m0);

// psi(x) = 2 sum_n d_n phi(2x - n) for dilation 2.
SampledFunction wavelet_from_mra(const TrigPolynomial& m0, const SampledFunction& phi);

// max_f | ||f||^2 - sum_{j,k} |<f, 2^{j/2} psi(2^j . - k)>|^2 |, integrated exactly.
double parseval_defect(const SampledFunction& psi, const std::vector<SampledFunction>& tests, int j_min, int j_max,
                       std::int64_t k_min, std::int64_t k_max);

// Components of the cycle-augmented scaling function: one copy of phi per cycle point with phase e^{2 pi i x_i}.
struct SuperFunction {
    std::vector<SampledFunction> components;
    std::vector<Complex> phases;
    std::vector<Cycle> cycles;
};

// Validates every cycle as an m0-extreme cycle of the dyadic torus map.
SuperFunction make_super_function(const TrigPolynomial& m0, const std::vector<Cycle>& cycles,
                                  const SampledFunction& phi);

// Entry (k, k') = <phi(.-k), phi(.-k')> sum_i conj(w_i)^k w_i^k'.
Eigen::MatrixXcd super_gram(const SuperFunction& f, unsigned shifts);
Eigen::MatrixXcd super_gram(const TrigPolynomial& m0, const std::vector<Cycle>& cycles, const SampledFunction& phi,
                            unsigned shifts);

}  // namespace fracwave
