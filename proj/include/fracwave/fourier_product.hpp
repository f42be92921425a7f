#pragma once

#include <optional>
#include <vector>

#include "fracwave/filters.hpp"
#include "fracwave/ifs.hpp"

namespace fracwave {

inline constexpr double kDefaultProductError = 1e-12;
inline constexpr unsigned kProductDepthCap = 256;

struct ProductEvaluation {
    Complex value;
    unsigned truncation_depth = 0;
    // Certified bound on |true value - value|.
    double tail_bound = 0;
    bool exact_zero = false;
    // Factor index k >= 1 with m((A^T)^-k x) = 0 exactly, when exact_zero.
    std::optional<unsigned> zero_witness;
    // Every factor is provably nonzero, so the product is nonzero.
    bool certified_nonzero = false;
};

// prod_{k>=1} m(M^k x) with M = (S^T)^-1, S the expanding matrix.
ProductEvaluation infinite_product(const TrigPolynomial& m, const ExpansiveIntMatrix& expanding,
                                   const std::vector<double>& x, double target_err = kDefaultProductError,
                                   unsigned depth_cap = kProductDepthCap);
ProductEvaluation infinite_product(const TrigPolynomial& m, const ExpansiveIntMatrix& expanding,
                                   const RationalVector& x, double target_err = kDefaultProductError,
                                   unsigned depth_cap = kProductDepthCap);

// Fourier transform of the invariant measure, x -> int e^{2 pi i x.t} dmu(t).
ProductEvaluation mu_hat(const AffineIFS& ifs, const std::vector<double>& x,
                         double target_err = kDefaultProductError);
ProductEvaluation mu_hat(const AffineIFS& ifs, const RationalVector& x, double target_err = kDefaultProductError);

// Scaling-function transform from a low-pass filter.
ProductEvaluation phi_hat(const TrigPolynomial& m0, const ExpansiveIntMatrix& A, const std::vector<double>& x,
                          double target_err = kDefaultProductError);
ProductEvaluation phi_hat(const TrigPolynomial& m0, const ExpansiveIntMatrix& A, const RationalVector& x,
                          double target_err = kDefaultProductError);

// <e_l1, e_l2> in L^2(mu), conjugate-linear in the first slot: mu_hat(l2 - l1).
ProductEvaluation exp_inner_product(const AffineIFS& ifs, const RationalVector& lambda1,
                                    const RationalVector& lambda2);

struct PartialSum {
    double value = 0;
    double error_bound = 0;
    std::size_t terms = 0;
};

// sum over the listed frequencies of |mu_hat(x + lambda)|^2.
PartialSum h_function_partial(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas,
                              const RationalVector& x);
PartialSum h_function_partial(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas,
                              const std::vector<double>& x);

}  // namespace fracwave
