#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fracwave/cycles.hpp"
#include "fracwave/filters.hpp"
#include "fracwave/ifs.hpp"

namespace fracwave {

enum class TransferSetting {
    // Z^d-periodic functions, branches a complete residue system mod A^T Z^d. Fourier window basis.
    wavelet,
    // Functions on the attractor of the dual IFS. Cylinder basis of depth n.
    fractal,
};

inline constexpr std::size_t kTransferWindowCap = 4096;
inline constexpr std::size_t kCylinderStateCap = 1024;
inline constexpr double kEigenOneTolerance = 1e-8;

struct TransferMatrix {
    TransferSetting setting = TransferSetting::wavelet;
    // wavelet: sorted frequencies indexing rows and columns.
    std::vector<IntVector> window;
    // fractal: cylinder words (digit indices) and their periodic-point representatives.
    std::vector<std::vector<std::size_t>> words;
    std::vector<RationalVector> representatives;
    Eigen::MatrixXcd entries;
    TrigPolynomial filter;
    ExpansiveIntMatrix scale;
    DigitSet branches;
    unsigned depth = 0;

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
    // Index of a window frequency, or nullopt.
    std::optional<std::size_t> index_of(const IntVector& k) const;
    // Coefficient vector of the constant function 1 in this basis.
    Eigen::VectorXcd constant_vector() const;
    // wavelet only: value at x of the image of sum_k coeffs[k] e_k.
    Complex evaluate_image(const Eigen::VectorXcd& coeffs, const std::vector<double>& x) const;
};

// Direct pointwise (R_m f)(x) = sum_l |m((A^T)^-1 (x+l))|^2 f((A^T)^-1 (x+l)).
Complex transfer_apply_direct(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                              const TrigPolynomial& f, const std::vector<double>& x);

// depth = 0 picks the default cylinder depth (largest n with N^n <= 1024, at most 6 for N = 2).
TransferMatrix build_transfer_matrix(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                                     TransferSetting setting = TransferSetting::wavelet, unsigned depth = 0);

struct EigenOneResult {
    std::size_t multiplicity = 0;
    // Columns span the eigenvalue-1 eigenspace.
    Eigen::MatrixXcd eigenvectors;
    Eigen::VectorXcd eigenvalues;
    Eigen::VectorXd singular_values;
    // fractal setting: number of closed communicating classes of the cylinder chain.
    std::optional<std::size_t> closed_classes;
};

EigenOneResult eigenvalue_one_multiplicity(const TransferMatrix& T, double tol = kEigenOneTolerance);

struct LawtonVerdict {
    bool orthonormal = false;
    EigenOneResult eigen;
    double qmf_defect = 0;
    // A non-constant eigenvalue-1 eigenvector when the multiplicity exceeds 1.
    std::optional<Eigen::VectorXcd> non_constant_eigenvector;
    TransferMatrix matrix;
};

LawtonVerdict lawton_test(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                          TransferSetting setting = TransferSetting::wavelet, double tol = kEigenOneTolerance,
                          unsigned depth = 0);

struct CohenVerdict {
    bool positive = false;
    std::vector<Cycle> extreme_cycles;
    unsigned max_period = 0;
};

CohenVerdict cohen_test(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                        unsigned max_period, TransferSetting setting = TransferSetting::wavelet);

}  // namespace fracwave
