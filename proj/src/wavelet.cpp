#include "fracwave/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

// Piecewise-constant function as maximal runs, with an exact antiderivative.
class StepRuns {
public:
    explicit StepRuns(const SampledFunction& f) {
        const double h = f.step();
        for (std::size_t i = 0; i < f.samples.size(); ++i) {
            const double x = f.origin + h * static_cast<double>(i);
            if (!values_.empty() && values_.back() == f.samples[i]) continue;
            breaks_.push_back(x);
            values_.push_back(f.samples[i]);
        }
        breaks_.push_back(f.end());
        prefix_.assign(breaks_.size(), Complex{});
        for (std::size_t i = 0; i < values_.size(); ++i)
            prefix_[i + 1] = prefix_[i] + values_[i] * (breaks_[i + 1] - breaks_[i]);
    }

    std::size_t runs() const { return values_.size(); }
    double lo(std::size_t i) const { return breaks_[i]; }
    double hi(std::size_t i) const { return breaks_[i + 1]; }
    Complex value(std::size_t i) const { return values_[i]; }

    // int_{-inf}^t f
    Complex antiderivative(double t) const {
        if (values_.empty() || t <= breaks_.front()) return {};
        if (t >= breaks_.back()) return prefix_.back();
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return prefix_[i] + values_[i] * (t - breaks_[i]);
    }

private:
    std::vector<double> breaks_;
    std::vector<Complex> values_;
    std::vector<Complex> prefix_;
};

std::vector<std::pair<std::int64_t, Complex>> scalar_coefficients(const TrigPolynomial& m) {
    if (m.dim() != 1) throw InvalidInput("wavelet constructions require a one-dimensional filter");
    std::vector<std::pair<std::int64_t, Complex>> out;
    for (const auto& [k, c] : m.coefficients()) out.emplace_back(k[0], c);
    return out;
}

double norm_sq(const std::vector<Complex>& v, double h) {
    double s = 0;
    for (const auto& c : v) s += std::norm(c);
    return s * h;
}

std::vector<Complex> refine(const std::vector<Complex>& old, const std::vector<std::pair<std::int64_t, Complex>>& coeffs,
                            std::int64_t a, std::int64_t lo, std::int64_t cells_per_unit) {
    const auto n = static_cast<std::int64_t>(old.size());
    std::vector<Complex> out(old.size());
    for (std::int64_t i = 0; i < n; ++i) {
        Complex acc{};
        for (const auto& [k, c] : coeffs) {
            const auto base = a * i + (a - 1) * lo * cells_per_unit - k * cells_per_unit;
            Complex s{};
            for (std::int64_t r = 0; r < a; ++r) {
                const auto idx = base + r;
                if (idx >= 0 && idx < n) s += old[static_cast<std::size_t>(idx)];
            }
            acc += c * s;
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

}  // namespace

double SampledFunction::norm() const { return std::sqrt(norm_sq(samples, step())); }

Complex SampledFunction::at(double x) const {
    if (samples.empty() || x < origin || x >= end()) return {};
    const auto i = static_cast<std::size_t>(std::floor((x - origin) / step()));
    return i < samples.size() ? samples[i] : Complex{};
}

SampledFunction SampledFunction::indicator(double lo, double hi, unsigned resolution, Complex value) {
    SampledFunction f;
    f.resolution = resolution;
    const double h = f.step();
    f.origin = std::floor(lo / h) * h;
    const auto cells = static_cast<std::size_t>(std::ceil((hi - f.origin) / h));
    f.samples.resize(cells);
    // Cell averages of value * chi_[lo, hi).
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = f.origin + h * static_cast<double>(i);
        const double overlap = std::max(0.0, std::min(hi, a + h) - std::max(lo, a));
        f.samples[i] = value * (overlap / h);
    }
    f.support_hint = {lo, hi};
    return f;
}

SampledFunction SampledFunction::zero(unsigned resolution) {
    SampledFunction f;
    f.resolution = resolution;
    return f;
}

double l2_distance(const SampledFunction& f, const SampledFunction& g) {
    const unsigned res = std::max(f.resolution, g.resolution);
    const double h = std::ldexp(1.0, -static_cast<int>(res));
    const bool f_empty = f.samples.empty(), g_empty = g.samples.empty();
    if (f_empty && g_empty) return 0.0;
    const double lo = f_empty ? g.origin : (g_empty ? f.origin : std::min(f.origin, g.origin));
    const double hi = f_empty ? g.end() : (g_empty ? f.end() : std::max(f.end(), g.end()));
    const auto cells = static_cast<std::size_t>(std::llround((hi - lo) / h));
    double acc = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double mid = lo + h * (static_cast<double>(i) + 0.5);
        acc += std::norm(f.at(mid) - g.at(mid));
    }
    return std::sqrt(acc * h);
}

Complex inner_product(const SampledFunction& f, const SampledFunction& g) {
    const StepRuns rf(f), rg(g);
    Complex acc{};
    if (rf.runs() <= rg.runs()) {
        for (std::size_t i = 0; i < rf.runs(); ++i)
            acc += std::conj(rf.value(i)) * (rg.antiderivative(rf.hi(i)) - rg.antiderivative(rf.lo(i)));
    } else {
        for (std::size_t i = 0; i < rg.runs(); ++i)
            acc += rg.value(i) * std::conj(rf.antiderivative(rg.hi(i)) - rf.antiderivative(rg.lo(i)));
    }
    return acc;
}

CascadeResult cascade(const TrigPolynomial& m0, std::int64_t a, unsigned iterations, unsigned resolution) {
    if (a < 2) throw InvalidInput("cascade needs an integer dilation a >= 2");
    if (resolution > 20) throw InvalidInput("resolution J must be <= 20");
    const auto coeffs = scalar_coefficients(m0);
    if (!m0.is_low_pass()) throw InvalidInput("filter is not low-pass: m0(0) != 1");
    IntVector residues;
    for (std::int64_t r = 0; r < a; ++r) residues.push_back(r);
    const auto grid = static_cast<unsigned>(std::max<std::int64_t>(16, 2 * m0.modulus_squared().max_frequency() + 1));
    const double defect = qmf_defect(m0, ExpansiveIntMatrix::scalar(a), DigitSet::scalars(residues), grid);
    if (defect > 1e-12) throw InvalidInput("filter fails the QMF condition (defect " + std::to_string(defect) + ")");

    std::int64_t kmin = 0, kmax = 0;
    for (const auto& [k, c] : coeffs) {
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    const auto floor_div = [](std::int64_t p, std::int64_t q) { return p / q - ((p % q != 0) && (p < 0)); };
    const std::int64_t lo = std::min<std::int64_t>(0, floor_div(kmin, a - 1));
    const std::int64_t hi = std::max<std::int64_t>(1, -floor_div(-kmax, a - 1));
    const std::int64_t per_unit = std::int64_t{1} << resolution;

    CascadeResult out;
    out.phi.origin = static_cast<double>(lo);
    out.phi.resolution = resolution;
    out.phi.support_hint = {static_cast<double>(kmin) / static_cast<double>(a - 1),
                            static_cast<double>(kmax) / static_cast<double>(a - 1)};
    out.phi.samples.assign(static_cast<std::size_t>((hi - lo) * per_unit), Complex{});
    for (std::int64_t i = 0; i < per_unit; ++i) out.phi.samples[static_cast<std::size_t>(-lo * per_unit + i)] = 1.0;

    const double h = out.phi.step();
    std::vector<double> norms{std::sqrt(norm_sq(out.phi.samples, h))};
    for (unsigned it = 0; it < iterations; ++it) {
        auto next = refine(out.phi.samples, coeffs, a, lo, per_unit);
        double dist = 0;
        for (std::size_t i = 0; i < next.size(); ++i) dist += std::norm(next[i] - out.phi.samples[i]);
        out.successive_distances.push_back(std::sqrt(dist * h));
        out.phi.samples = std::move(next);
        norms.push_back(std::sqrt(norm_sq(out.phi.samples, h)));
        if (norms.size() > 5 && norms.back() > 10.0 * norms[norms.size() - 6])
            throw ComputationError("cascade diverges: L2 norm grew more than 10x over 5 iterations (iteration " +
                                   std::to_string(it + 1) + ")");
    }
    const auto again = refine(out.phi.samples, coeffs, a, lo, per_unit);
    double res = 0;
    for (std::size_t i = 0; i < again.size(); ++i) res += std::norm(again[i] - out.phi.samples[i]);
    out.residual = std::sqrt(res * h);
    return out;
}

Eigen::MatrixXcd translate_gram(const SampledFunction& phi, unsigned shifts) {
    const auto size = static_cast<Eigen::Index>(2 * shifts + 1);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(size, size);
    if (phi.samples.empty()) return g;
    const auto per_unit = std::int64_t{1} << phi.resolution;
    const auto n = static_cast<std::int64_t>(phi.samples.size());
    const double h = phi.step();
    // lag[m] = <phi, phi(. - m)>, m in [-2 shifts, 2 shifts].
    const auto max_lag = static_cast<std::int64_t>(2 * shifts);
    std::vector<Complex> lag(static_cast<std::size_t>(2 * max_lag + 1));
    for (std::int64_t m = -max_lag; m <= max_lag; ++m) {
        Complex acc{};
        const auto offset = m * per_unit;
        for (std::int64_t i = std::max<std::int64_t>(0, offset); i < n && i - offset < n; ++i)
            acc += std::conj(phi.samples[static_cast<std::size_t>(i)]) *
                   phi.samples[static_cast<std::size_t>(i - offset)];
        lag[static_cast<std::size_t>(m + max_lag)] = acc * h;
    }
    for (Eigen::Index r = 0; r < size; ++r)
        for (Eigen::Index c = 0; c < size; ++c) g(r, c) = lag[static_cast<std::size_t>(c - r + max_lag)];
    return g;
}

TrigPolynomial high_pass_companion(const TrigPolynomial& m0) {
    const auto coeffs = scalar_coefficients(m0);
    std::int64_t kmax = 1;
    for (const auto& [k, c] : coeffs) kmax = std::max(kmax, k);
    const std::int64_t K = kmax % 2 != 0 ? kmax : kmax + 1;
    TrigPolynomial m1(1);
    for (const auto& [k, c] : coeffs) m1.set({K - k}, -(k % 2 == 0 ? 1.0 : -1.0) * std::conj(c));
    return m1;
}

SampledFunction wavelet_from_mra(const TrigPolynomial& m0, const SampledFunction& phi) {
    const auto d = scalar_coefficients(high_pass_companion(m0));
    SampledFunction psi;
    psi.resolution = phi.resolution;
    if (phi.samples.empty()) return psi;
    const double h = phi.step();
    std::int64_t nmin = d.front().first, nmax = d.front().first;
    for (const auto& [n, c] : d) {
        nmin = std::min(nmin, n);
        nmax = std::max(nmax, n);
    }
    const double phi_origin_cells = std::round(phi.origin / h);
    if (std::abs(phi_origin_cells * h - phi.origin) > 1e-12) throw InvalidInput("phi grid origin is not dyadic");
    const auto o = static_cast<std::int64_t>(phi_origin_cells);
    const auto n_phi = static_cast<std::int64_t>(phi.samples.size());
    const auto per_unit = std::int64_t{1} << phi.resolution;
    // Work in units of cells: psi cell i covers [i h, (i+1) h).
    const auto floor_div2 = [](std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); };
    const auto start = floor_div2(o + nmin * per_unit);
    const auto stop = -floor_div2(-(o + n_phi + nmax * per_unit));
    psi.origin = static_cast<double>(start) * h;
    psi.samples.assign(static_cast<std::size_t>(stop - start), Complex{});
    for (auto i = start; i < stop; ++i) {
        Complex acc{};
        for (const auto& [n, c] : d) {
            const auto b = 2 * i - n * per_unit - o;
            Complex s{};
            if (b >= 0 && b < n_phi) s += phi.samples[static_cast<std::size_t>(b)];
            if (b + 1 >= 0 && b + 1 < n_phi) s += phi.samples[static_cast<std::size_t>(b + 1)];
            acc += c * s;
        }
        psi.samples[static_cast<std::size_t>(i - start)] = acc;
    }
    psi.support_hint = {(phi.support_hint.lo + static_cast<double>(nmin)) / 2,
                        (phi.support_hint.hi + static_cast<double>(nmax)) / 2};
    return psi;
}

double parseval_defect(const SampledFunction& psi, const std::vector<SampledFunction>& tests, int j_min, int j_max,
                       std::int64_t k_min, std::int64_t k_max) {
    if (j_min > j_max || k_min > k_max) throw InvalidInput("empty j or k range");
    const StepRuns rpsi(psi);
    double worst = 0;
    for (const auto& f : tests) {
        const StepRuns rf(f);
        const double total = norm_sq(f.samples, f.step());
        const auto nj = static_cast<std::size_t>(j_max - j_min + 1);
        std::vector<double> per_level(nj, 0.0);
        parallel_for(nj, [&](std::size_t jj) {
            const int j = j_min + static_cast<int>(jj);
            const double s = std::ldexp(1.0, j);
            const double amp = 1.0 / std::sqrt(s);
            double acc = 0;
            for (auto k = k_min; k <= k_max; ++k) {
                const double kd = static_cast<double>(k);
                Complex c{};
                if (rf.runs() <= rpsi.runs()) {
                    // <f, psi_jk> = sum conj(v) 2^{-j/2} [Psi(2^j b - k) - Psi(2^j a - k)]
                    for (std::size_t r = 0; r < rf.runs(); ++r)
                        c += std::conj(rf.value(r)) *
                             (rpsi.antiderivative(s * rf.hi(r) - kd) - rpsi.antiderivative(s * rf.lo(r) - kd));
                    c *= amp;
                } else {
                    // = sum w 2^{j/2} [conj F((q+k)/2^j) - conj F((p+k)/2^j)]
                    for (std::size_t r = 0; r < rpsi.runs(); ++r)
                        c += rpsi.value(r) * std::conj(rf.antiderivative((rpsi.hi(r) + kd) / s) -
                                                       rf.antiderivative((rpsi.lo(r) + kd) / s));
                    c *= std::sqrt(s);
                }
                acc += std::norm(c);
            }
            per_level[jj] = acc;
        });
        double sum = 0;
        for (double v : per_level) sum += v;
        worst = std::max(worst, std::abs(total - sum));
    }
    return worst;
}

SuperFunction make_super_function(const TrigPolynomial& m0, const std::vector<Cycle>& cycles,
                                  const SampledFunction& phi) {
    if (cycles.empty()) throw InvalidInput("at least one cycle is required");
    scalar_coefficients(m0);
    const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1}));
    SuperFunction out;
    out.cycles = cycles;
    for (const auto& c : cycles) {
        if (c.points.empty() || c.points[0].dim() != 1) throw InvalidInput("cycles must be one-dimensional");
        if (!verify_cycle(dual, c, CycleConvention::modulo_lattice))
            throw InvalidInput("cycle " + c.str() + " is not a cycle of x -> (x + l)/2 on the circle");
        for (const auto& x : c.points) {
            const auto extreme = m0.is_extreme_exact(x);
            const bool ok = extreme ? *extreme : std::abs(std::abs(m0.evaluate(x)) - 1.0) <= 1e-12;
            if (!ok) throw InvalidInput("cycle " + c.str() + " is not an m0-cycle: |m0(" + x[0].str() + ")| != 1");
            const auto frac = x[0].frac();
            out.phases.push_back(std::polar(1.0, 2.0 * std::numbers::pi * frac.to_double()));
            out.components.push_back(phi);
        }
    }
    return out;
}

Eigen::MatrixXcd super_gram(const SuperFunction& f, unsigned shifts) {
    if (f.components.empty()) throw InvalidInput("super function has no components");
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * shifts + 1, 2 * shifts + 1);
    for (std::size_t i = 0; i < f.components.size(); ++i) {
        const auto base = translate_gram(f.components[i], shifts);
        for (Eigen::Index r = 0; r < base.rows(); ++r)
            for (Eigen::Index c = 0; c < base.cols(); ++c) {
                const auto lag = static_cast<int>(c - r);
                g(r, c) += base(r, c) * std::pow(f.phases[i], lag);
            }
    }
    return g;
}

Eigen::MatrixXcd super_gram(const TrigPolynomial& m0, const std::vector<Cycle>& cycles, const SampledFunction& phi,
                            unsigned shifts) {
    return super_gram(make_super_function(m0, cycles, phi), shifts);
}

}  // namespace fracwave
