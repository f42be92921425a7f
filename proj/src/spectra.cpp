#include "fracwave/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"

namespace fracwave {

bool SpectrumSet::contains(const IntVector& v) const {
    return std::find(elements.begin(), elements.end(), v) != elements.end();
}

std::vector<IntVector> SpectrumSet::truncated(unsigned max_generation) const {
    std::vector<IntVector> out;
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (generation[i] <= max_generation) out.push_back(elements[i]);
    return out;
}

std::vector<IntVector> SpectrumSet::sorted() const {
    auto out = elements;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RationalVector> SpectrumSet::as_rational() const {
    std::vector<RationalVector> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.emplace_back(e);
    return out;
}

namespace {

SpectrumSet close_with_provenance(const ExpansiveIntMatrix& A, const DigitSet& L,
                                  const std::vector<std::pair<IntVector, Provenance>>& seeds, unsigned generations,
                                  std::vector<Cycle> cycles) {
    if (L.dim() != A.dim()) throw InvalidInput("L must have the dimension of A");
    std::uint64_t bound = 0;
    for (unsigned g = 0; g <= generations; ++g) {
        const auto c = saturating_pow(L.size(), g);
        bound = c > UINT64_MAX - bound ? UINT64_MAX : bound + c;
    }
    const auto seed_count = static_cast<std::uint64_t>(seeds.size());
    check_enumeration(bound > UINT64_MAX / std::max<std::uint64_t>(seed_count, 1) ? UINT64_MAX : bound * seed_count,
                      "spectrum elements");

    SpectrumSet out{{}, {}, {}, generations == 0 ? 0 : generations - 1, generations, A, L, std::move(cycles)};
    std::set<IntVector> present;
    std::vector<std::size_t> frontier;
    for (const auto& [v, prov] : seeds) {
        if (v.size() != A.dim()) throw InvalidInput("seed has the wrong dimension");
        if (!present.insert(v).second) continue;
        frontier.push_back(out.elements.size());
        out.elements.push_back(v);
        out.generation.push_back(0);
        out.provenance.push_back(prov);
    }
    const auto at = A.transpose_entries();
    for (unsigned g = 1; g <= generations; ++g) {
        std::vector<std::size_t> next;
        for (auto parent : frontier) {
            const auto base = mat_vec(at, out.elements[parent]);
            for (std::size_t l = 0; l < L.size(); ++l) {
                IntVector v = base;
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = checked_add(v[i], L[l][i]);
                if (!present.insert(v).second) continue;
                Provenance prov = out.provenance[parent];
                prov.word.push_back(l);
                next.push_back(out.elements.size());
                out.elements.push_back(std::move(v));
                out.generation.push_back(g);
                out.provenance.push_back(std::move(prov));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

SpectrumSet close_under_digits(const ExpansiveIntMatrix& A, const DigitSet& L, const std::vector<IntVector>& seeds,
                               unsigned generations, std::vector<Cycle> cycles) {
    std::vector<std::pair<IntVector, Provenance>> tagged;
    for (std::size_t i = 0; i < seeds.size(); ++i) tagged.push_back({seeds[i], Provenance{0, i, {}}});
    return close_with_provenance(A, L, tagged, generations, std::move(cycles));
}

SpectrumSet lambda0(const ExpansiveIntMatrix& A, const DigitSet& L, unsigned level) {
    if (!L.contains_zero()) throw InvalidInput("0 must belong to L");
    Cycle trivial{{RationalVector(A.dim())}, {0}, true, true};
    for (std::size_t i = 0; i < L.size(); ++i)
        if (L[i] == IntVector(A.dim(), 0)) trivial.word = {i};
    return close_with_provenance(A, L, {{IntVector(A.dim(), 0), Provenance{}}}, level + 1, {trivial});
}

SpectrumSet spectrum_from_cycles(const ExpansiveIntMatrix& A, const DigitSet& L, const std::vector<Cycle>& cycles,
                                 unsigned level) {
    if (cycles.empty()) throw InvalidInput("at least one cycle (the trivial cycle) is required");
    std::vector<std::pair<IntVector, Provenance>> seeds;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        for (std::size_t p = 0; p < cycles[c].points.size(); ++p) {
            const auto& pt = cycles[c].points[p];
            if (pt.dim() != A.dim()) throw InvalidInput("cycle point has the wrong dimension");
            if (!pt.is_integer())
                throw InvalidInput("cycle " + cycles[c].str() + " has a non-integer point " + pt.str() +
                                   "; it cannot seed an integer spectrum");
            seeds.push_back({(-pt).as_integers(), Provenance{c, p, {}}});
        }
    }
    auto out = close_with_provenance(A, L, seeds, level + 1, cycles);
    out.level = level;
    return out;
}

GramReport verify_orthogonality(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas, bool keep_matrix) {
    const auto n = lambdas.size();
    if (n > kGramCap)
        throw EnumerationOverflow("Gram matrix of size " + std::to_string(n) + " exceeds the cap " +
                                  std::to_string(kGramCap));
    std::set<RationalVector> distinct(lambdas.begin(), lambdas.end());
    if (distinct.size() != n) throw InvalidInput("frequency list has repeated elements");

    std::vector<std::vector<ProductEvaluation>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        rows[i].reserve(n - i);
        for (std::size_t j = i; j < n; ++j) rows[i].push_back(exp_inner_product(ifs, lambdas[i], lambdas[j]));
    });

    GramReport report;
    report.size = n;
    if (keep_matrix) report.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const auto& e = rows[i][j - i];
            report.max_tail_bound = std::max(report.max_tail_bound, e.tail_bound);
            if (report.matrix) {
                (*report.matrix)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e.value;
                (*report.matrix)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(e.value);
            }
            const double mag = std::abs(e.value);
            if (i == j) {
                report.max_diag_deviation = std::max(report.max_diag_deviation, std::abs(e.value - 1.0));
                continue;
            }
            report.max_offdiag = std::max(report.max_offdiag, mag);
            if (e.exact_zero)
                ++report.exact_zero_pairs;
            else if (mag <= kNumericZero)
                ++report.numeric_zero_pairs;
            else
                ++report.nonzero_pairs;
        }
    return report;
}

GramReport verify_orthogonality(const AffineIFS& ifs, const SpectrumSet& spectrum, bool keep_matrix) {
    return verify_orthogonality(ifs, spectrum.as_rational(), keep_matrix);
}

CompletenessReport verify_completeness(const AffineIFS& ifs, const SpectrumSet& spectrum,
                                       const std::vector<RationalVector>& grid, const std::vector<unsigned>& levels) {
    for (auto level : levels)
        if (level + 1 > spectrum.generations)
            throw InvalidInput("level " + std::to_string(level) + " exceeds the generated spectrum level " +
                               std::to_string(spectrum.level));
    unsigned checked = 0;
    while (checked < spectrum.generations && spectrum.truncated(checked + 1).size() <= kGramCap) ++checked;
    std::vector<RationalVector> subset;
    for (const auto& v : spectrum.truncated(checked)) subset.emplace_back(v);

    CompletenessReport report;
    report.orthogonality = verify_orthogonality(ifs, subset);
    if (!report.orthogonality.orthogonal())
        throw InvalidInput("spectrum is not orthogonal: max off-diagonal Gram entry " +
                           std::to_string(report.orthogonality.max_offdiag));

    auto sorted_levels = levels;
    std::sort(sorted_levels.begin(), sorted_levels.end());
    const auto m = filter_from_digits(ifs.digits());
    const auto s = ifs.orientation() == Orientation::forward ? ifs.matrix()
                                                               : ExpansiveIntMatrix(ifs.matrix().transpose_entries());
    ifs.require_uniform_weights();

    std::vector<std::vector<CompletenessRow>> per_point(grid.size());
    parallel_for(grid.size(), [&](std::size_t gi) {
        const auto& x = grid[gi];
        double sum = 0, err = 0;
        std::size_t terms = 0;
        std::size_t next = 0;
        for (auto level : sorted_levels) {
            for (; next < spectrum.size() && spectrum.generation[next] <= level + 1; ++next) {
                const auto e = infinite_product(m, s, x + RationalVector(spectrum.elements[next]));
                const double a = std::abs(e.value);
                sum += a * a;
                err += 2.0 * a * e.tail_bound + e.tail_bound * e.tail_bound;
                ++terms;
            }
            per_point[gi].push_back({x, level, sum, terms, err});
        }
    });
    for (auto& rows : per_point)
        for (auto& r : rows) report.rows.push_back(std::move(r));
    return report;
}

}  // namespace fracwave
