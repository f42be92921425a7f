#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "fracwave/rational.hpp"

namespace fracwave {

// Integer d x d matrix whose eigenvalues all lie strictly outside the unit circle.
class ExpansiveIntMatrix {
public:
    static constexpr double kEigenTolerance = 1e-9;

    explicit ExpansiveIntMatrix(IntMatrix entries);
    static ExpansiveIntMatrix scalar(std::int64_t a);

    std::size_t dim() const { return entries_.size(); }
    const IntMatrix& entries() const { return entries_; }
    IntMatrix transpose_entries() const { return transpose(entries_); }
    std::int64_t det_abs() const { return det_abs_; }
    const RationalMatrix& inverse() const { return inverse_; }
    const RationalMatrix& transpose_inverse() const { return transpose_inverse_; }
    const std::vector<std::complex<double>>& eigenvalues() const { return eigenvalues_; }

    // Smallest j with ||A^-j||_2 < 1, and that norm. Drives geometric tail bounds.
    unsigned contraction_power() const { return contraction_power_; }
    double contraction_ratio() const { return contraction_ratio_; }

    bool is_scalar() const { return dim() == 1; }
    std::int64_t scalar_value() const { return entries_[0][0]; }
    std::string str() const;

    friend bool operator==(const ExpansiveIntMatrix& a, const ExpansiveIntMatrix& b) {
        return a.entries_ == b.entries_;
    }

private:
    IntMatrix entries_;
    std::int64_t det_abs_ = 0;
    RationalMatrix inverse_;
    RationalMatrix transpose_inverse_;
    std::vector<std::complex<double>> eigenvalues_;
    unsigned contraction_power_ = 1;
    double contraction_ratio_ = 0;
};

class DigitSet {
public:
    DigitSet() = default;
    explicit DigitSet(std::vector<IntVector> points);
    // d = 1 convenience.
    static DigitSet scalars(const IntVector& values);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<IntVector>& points() const { return points_; }
    const IntVector& operator[](std::size_t i) const { return points_[i]; }
    bool contains_zero() const;
    bool contains(const IntVector& p) const;
    std::string str() const;

    friend bool operator==(const DigitSet&, const DigitSet&) = default;

private:
    std::vector<IntVector> points_;
    std::size_t dim_ = 0;
};

enum class Orientation { forward, dual };

// forward: tau_b(x) = A^-1 (x + b); dual: sigma_l(x) = (A^T)^-1 (x + l).
class AffineIFS {
public:
    AffineIFS(ExpansiveIntMatrix matrix, DigitSet digits, Orientation orientation = Orientation::forward,
              std::optional<std::vector<double>> probabilities = std::nullopt);

    const ExpansiveIntMatrix& matrix() const { return matrix_; }
    const DigitSet& digits() const { return digits_; }
    Orientation orientation() const { return orientation_; }
    const std::optional<std::vector<double>>& probabilities() const { return probabilities_; }
    std::size_t dim() const { return matrix_.dim(); }

    // The integer matrix S whose inverse is the linear part of every map (A or A^T).
    IntMatrix expanding_matrix() const;
    // Linear part of every map (A^-1 or (A^T)^-1).
    const RationalMatrix& contraction() const;

    RationalVector apply(std::size_t digit, const RationalVector& x) const;
    std::vector<double> apply(std::size_t digit, const std::vector<double>& x) const;

    // Rejects configured non-uniform weights; all measure computations assume p_i = 1/N.
    void require_uniform_weights() const;

private:
    ExpansiveIntMatrix matrix_;
    DigitSet digits_;
    Orientation orientation_;
    std::optional<std::vector<double>> probabilities_;
    std::vector<std::vector<double>> contraction_double_;
};

struct Interval {
    double lo = 0;
    double hi = 0;
    friend bool operator==(const Interval&, const Interval&) = default;
};
using Box = std::vector<Interval>;

// Images of seed_box under all N^depth word maps, first digit most significant.
std::vector<Box> attractor_boxes(const AffineIFS& ifs, unsigned depth, const Box& seed_box);

// Hausdorff distance between two finite unions of boxes, d = 1 only (sup over union endpoints).
double hausdorff_distance_1d(const std::vector<Box>& a, const std::vector<Box>& b);

struct QuadratureRule {
    std::vector<std::vector<double>> points;
    // points[i] = S^-depth * scaled[i], exactly.
    std::vector<IntVector> scaled;
    unsigned depth = 0;
    Rational weight;

    RationalVector exact_point(const AffineIFS& ifs, std::size_t i) const;
};

QuadratureRule measure_quadrature_points(const AffineIFS& ifs, unsigned depth);

AffineIFS dual_ifs(const ExpansiveIntMatrix& matrix, const DigitSet& L);

}  // namespace fracwave
