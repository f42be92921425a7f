#pragma once

#include <vector>

#include "fracwave/filters.hpp"
#include "fracwave/ifs.hpp"

namespace fracwave {

struct Cycle {
    // x_{i+1} = sigma_{word[i]}(x_i), cyclically; lexicographically least point first.
    std::vector<RationalVector> points;
    // Digit indices into the branch set.
    std::vector<std::size_t> word;
    bool is_extreme = false;
    // Extremeness decided by the exact integer criterion rather than floating point.
    bool extreme_exact = false;

    std::size_t period() const { return points.size(); }
    bool is_trivial() const { return points.size() == 1 && points[0].is_zero(); }
    std::string str() const;

    friend bool operator==(const Cycle& a, const Cycle& b) { return a.points == b.points && a.word == b.word; }
};

enum class CycleConvention {
    // Cycles of the maps on R^d (fractal setting): {1} and {0} are different cycles.
    exact_points,
    // Cycles on the torus R^d / Z^d (wavelet setting), points reduced into [0,1)^d.
    modulo_lattice,
};

inline constexpr unsigned kDefaultMaxPeriod1d = 12;
inline constexpr unsigned kDefaultMaxPeriodNd = 6;

// Exhaustive search over primitive words of length <= max_period. Returns extreme cycles only
// unless include_all. Sorted by (period, points).
std::vector<Cycle> find_cycles(const AffineIFS& dual, const TrigPolynomial& m, unsigned max_period,
                               CycleConvention convention = CycleConvention::exact_points, bool include_all = false);

// Exact fixed point of sigma_{w_p} o ... o sigma_{w_1}, and its orbit.
std::vector<RationalVector> word_orbit(const AffineIFS& dual, const std::vector<std::size_t>& word);

// Checks the cycle relation exactly (modulo Z^d under the lattice convention).
bool verify_cycle(const AffineIFS& dual, const Cycle& cycle, CycleConvention convention);

}  // namespace fracwave
