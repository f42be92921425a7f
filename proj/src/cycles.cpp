#include "fracwave/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

// Duval's algorithm: Lyndon words over {0..n-1} of length <= max_len, in lexicographic order.
template <typename Fn>
void for_each_lyndon_word(std::size_t n, unsigned max_len, Fn&& fn) {
    if (n == 0 || max_len == 0) return;
    std::vector<std::size_t> w{0};
    while (!w.empty()) {
        fn(w);
        const auto m = w.size();
        while (w.size() < max_len) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == n - 1) w.pop_back();
        if (!w.empty()) ++w.back();
    }
}

std::size_t branch_for_step(const AffineIFS& dual, const RationalVector& from, const RationalVector& to) {
    // sigma_b(from) = to mod Z^d  <=>  S^-1 (from + b - S to) is integral.
    const RationalMatrix s(dual.expanding_matrix());
    const auto v = s.apply(to) - from;
    for (std::size_t b = 0; b < dual.digits().size(); ++b) {
        const auto diff = v - RationalVector(dual.digits()[b]);
        if (dual.contraction().apply(diff).is_integer()) return b;
    }
    throw ComputationError("torus orbit step " + from.str() + " -> " + to.str() + " matches no branch");
}

void canonicalize(Cycle& c) {
    const auto first = std::min_element(c.points.begin(), c.points.end()) - c.points.begin();
    std::rotate(c.points.begin(), c.points.begin() + first, c.points.end());
    std::rotate(c.word.begin(), c.word.begin() + first, c.word.end());
}

void classify(Cycle& c, const TrigPolynomial& m) {
    c.is_extreme = true;
    c.extreme_exact = true;
    for (const auto& x : c.points) {
        const auto exact = m.is_extreme_exact(x);
        if (exact) {
            if (!*exact) {
                c.is_extreme = false;
                return;
            }
        } else {
            c.extreme_exact = false;
            if (std::abs(std::abs(m.evaluate(x)) - 1.0) > 1e-12) {
                c.is_extreme = false;
                return;
            }
        }
    }
}

}  // namespace

std::string Cycle::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out += (i ? ", " : "") + (p.dim() == 1 ? p[0].str() : p.str());
    }
    return out + "}";
}

std::vector<RationalVector> word_orbit(const AffineIFS& dual, const std::vector<std::size_t>& word) {
    if (word.empty()) throw InvalidInput("cycle word must be nonempty");
    const auto d = dual.dim();
    const auto s = dual.expanding_matrix();
    // (S^p - I) x_1 = sum_i S^{i-1} l_i
    IntVector rhs(d, 0);
    IntMatrix power = identity_matrix(d);
    for (auto idx : word) {
        const auto lifted = mat_vec(power, dual.digits().points().at(idx));
        for (std::size_t i = 0; i < d; ++i) rhs[i] = checked_add(rhs[i], lifted[i]);
        power = mat_mul(power, s);
    }
    for (std::size_t i = 0; i < d; ++i) power[i][i] = checked_add(power[i][i], -1);
    RationalVector x = RationalMatrix(power).solve(RationalVector(rhs));

    std::vector<RationalVector> orbit;
    orbit.reserve(word.size());
    for (auto idx : word) {
        orbit.push_back(x);
        x = dual.apply(idx, x);
    }
    if (!(x == orbit.front())) throw ComputationError("cycle fixed point failed exact verification");
    return orbit;
}

bool verify_cycle(const AffineIFS& dual, const Cycle& cycle, CycleConvention convention) {
    const auto p = cycle.points.size();
    if (p == 0 || cycle.word.size() != p) return false;
    for (std::size_t i = 0; i < p; ++i) {
        const auto next = dual.apply(cycle.word[i], cycle.points[i]);
        const auto& want = cycle.points[(i + 1) % p];
        if (convention == CycleConvention::exact_points ? !(next == want) : !((next - want).is_integer()))
            return false;
    }
    return true;
}

std::vector<Cycle> find_cycles(const AffineIFS& dual, const TrigPolynomial& m, unsigned max_period,
                               CycleConvention convention, bool include_all) {
    if (max_period == 0) throw InvalidInput("max_period must be >= 1");
    if (m.dim() != dual.dim()) throw InvalidInput("filter and IFS dimensions differ");
    const auto n = dual.digits().size();
    std::uint64_t total = 0;
    for (unsigned p = 1; p <= max_period; ++p) {
        const auto c = saturating_pow(n, p);
        total = c > UINT64_MAX - total ? UINT64_MAX : total + c;
    }
    check_enumeration(total, "cycle words");

    std::vector<std::vector<std::size_t>> words;
    for_each_lyndon_word(n, max_period, [&](const std::vector<std::size_t>& w) { words.push_back(w); });

    std::vector<Cycle> found(words.size());
    std::vector<char> keep(words.size(), 0);
    parallel_for(words.size(), [&](std::size_t i) {
        Cycle c;
        c.points = word_orbit(dual, words[i]);
        c.word = words[i];
        if (convention == CycleConvention::modulo_lattice) {
            for (auto& p : c.points) p = p.frac();
            std::size_t period = 1;
            while (period < c.points.size() && !(c.points[period] == c.points[0])) ++period;
            c.points.resize(period);
            c.word.resize(period);
            // Loops through a repeated point split into shorter cycles, found from shorter words.
            if (std::set<RationalVector>(c.points.begin(), c.points.end()).size() != period) return;
            for (std::size_t k = 0; k < period; ++k)
                c.word[k] = branch_for_step(dual, c.points[k], c.points[(k + 1) % period]);
        }
        canonicalize(c);
        classify(c, m);
        if (include_all || c.is_extreme) {
            found[i] = std::move(c);
            keep[i] = 1;
        }
    });

    std::vector<Cycle> out;
    std::set<std::vector<RationalVector>> seen;
    for (std::size_t i = 0; i < found.size(); ++i)
        if (keep[i] && seen.insert(found[i].points).second) out.push_back(std::move(found[i]));
    std::sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) {
        if (a.period() != b.period()) return a.period() < b.period();
        return a.points < b.points;
    });
    return out;
}

}  // namespace fracwave
