#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fracwave/cycles.hpp"
#include "fracwave/fourier_product.hpp"
#include "fracwave/ifs.hpp"

namespace fracwave {

struct Provenance {
    std::size_t cycle_index = 0;
    // Seed point index within the cycle.
    std::size_t seed_point = 0;
    // Digit indices into L, applied in order after the seed.
    std::vector<std::size_t> word;

    friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

struct SpectrumSet {
    // Breadth-first order; generation[i] is the BFS depth of elements[i].
    std::vector<IntVector> elements;
    std::vector<unsigned> generation;
    std::vector<Provenance> provenance;
    // Requested level; the closure ran level + 1 generations (close_under_digits sets both directly).
    unsigned level = 0;
    unsigned generations = 0;
    ExpansiveIntMatrix A;
    DigitSet L;
    std::vector<Cycle> cycles;

    std::size_t size() const { return elements.size(); }
    bool contains(const IntVector& v) const;
    // Elements reachable within `generations` BFS steps.
    std::vector<IntVector> truncated(unsigned generations) const;
    std::vector<IntVector> sorted() const;
    std::vector<RationalVector> as_rational() const;
};

// BFS closure of the seeds under lambda -> A^T lambda + l for the given number of generations.
SpectrumSet close_under_digits(const ExpansiveIntMatrix& A, const DigitSet& L, const std::vector<IntVector>& seeds,
                               unsigned generations, std::vector<Cycle> cycles = {});

// All sums sum_{k=0}^{level} (A^T)^k l_k.
SpectrumSet lambda0(const ExpansiveIntMatrix& A, const DigitSet& L, unsigned level);

// Closure of {-c : c in an extreme cycle}, with the same level convention as lambda0.
SpectrumSet spectrum_from_cycles(const ExpansiveIntMatrix& A, const DigitSet& L, const std::vector<Cycle>& cycles,
                                 unsigned level);

inline constexpr std::size_t kGramCap = 256;
inline constexpr double kNumericZero = 1e-8;

struct GramReport {
    std::size_t size = 0;
    double max_offdiag = 0;
    std::size_t exact_zero_pairs = 0;
    // |value| <= 1e-8 without an exact witness.
    std::size_t numeric_zero_pairs = 0;
    std::size_t nonzero_pairs = 0;
    double max_diag_deviation = 0;
    double max_tail_bound = 0;
    std::optional<Eigen::MatrixXcd> matrix;

    bool orthogonal() const { return nonzero_pairs == 0; }
    bool certified_orthogonal() const { return nonzero_pairs == 0 && numeric_zero_pairs == 0; }
};

GramReport verify_orthogonality(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas,
                                bool keep_matrix = false);
GramReport verify_orthogonality(const AffineIFS& ifs, const SpectrumSet& spectrum, bool keep_matrix = false);

struct CompletenessRow {
    RationalVector x;
    unsigned level = 0;
    double partial_sum = 0;
    std::size_t n_terms = 0;
    double error_bound = 0;
};

struct CompletenessReport {
    GramReport orthogonality;
    std::vector<CompletenessRow> rows;
};

// Partial sums of h_Lambda(x) for each x and level (level n uses generations <= n + 1).
// Orthogonality is verified first on the largest truncation that fits the Gram cap.
CompletenessReport verify_completeness(const AffineIFS& ifs, const SpectrumSet& spectrum,
                                       const std::vector<RationalVector>& grid, const std::vector<unsigned>& levels);

}  // namespace fracwave
