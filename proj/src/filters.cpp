#include "fracwave/filters.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex unit_phase(double turns) { return std::polar(1.0, kTwoPi * turns); }

// Exact e^{2 pi i p/q}, with p reduced into [0, q).
Complex unit_phase(std::int64_t p, std::int64_t q) {
    p %= q;
    if (p < 0) p += q;
    if (p == 0) return 1.0;
    if (2 * p == q) return -1.0;
    if (4 * p == q) return {0.0, 1.0};
    if (4 * p == 3 * q) return {0.0, -1.0};
    return unit_phase(static_cast<double>(p) / static_cast<double>(q));
}

// Multiply / divide an integer polynomial (ascending coefficients) by t^m - 1.
void mul_binomial(std::vector<std::int64_t>& poly, std::size_t m) {
    std::vector<std::int64_t> out(poly.size() + m, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        out[i + m] += poly[i];
        out[i] -= poly[i];
    }
    poly = std::move(out);
}

void div_binomial(std::vector<std::int64_t>& poly, std::size_t m) {
    // poly = q(t) (t^m - 1); q_i = -(p_i) + q_{i-m}.
    const auto deg_q = poly.size() - m;
    std::vector<std::int64_t> q(deg_q, 0);
    for (std::size_t i = 0; i < deg_q; ++i) q[i] = -poly[i] + (i >= m ? q[i - m] : 0);
    poly = std::move(q);
}

std::vector<std::int64_t> compute_cyclotomic(std::int64_t q) {
    // Phi_q(t) = prod_{d | q} (t^{q/d} - 1)^{mu(d)}.
    std::vector<std::int64_t> primes;
    std::int64_t rest = q;
    for (std::int64_t p = 2; p * p <= rest; ++p) {
        if (rest % p == 0) {
            primes.push_back(p);
            while (rest % p == 0) rest /= p;
        }
    }
    if (rest > 1) primes.push_back(rest);

    std::vector<std::int64_t> poly{1};
    std::vector<std::size_t> divide_by;
    const auto subsets = std::size_t{1} << primes.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::int64_t d = 1;
        int bits = 0;
        for (std::size_t i = 0; i < primes.size(); ++i)
            if (mask >> i & 1U) {
                d *= primes[i];
                ++bits;
            }
        const auto m = static_cast<std::size_t>(q / d);
        if (bits % 2 == 0)
            mul_binomial(poly, m);
        else
            divide_by.push_back(m);
    }
    for (auto m : divide_by) div_binomial(poly, m);
    while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
    return poly;
}

std::shared_ptr<const std::vector<std::int64_t>> cyclotomic(std::int64_t q) {
    static std::mutex mutex;
    static std::unordered_map<std::int64_t, std::shared_ptr<const std::vector<std::int64_t>>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(q); it != cache.end()) return it->second;
    }
    auto poly = std::make_shared<const std::vector<std::int64_t>>(compute_cyclotomic(q));
    std::lock_guard lock(mutex);
    return cache.emplace(q, std::move(poly)).first->second;
}

std::string key_str(const IntVector& k) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    os << "]";
    return os.str();
}

}  // namespace

std::optional<bool> root_of_unity_sum_vanishes(std::int64_t q, const IntVector& exponents) {
    if (q <= 0) throw InvalidInput("root-of-unity order must be positive");
    if (exponents.empty()) return true;
    if (q == 1) return false;
    if (q > kCyclotomicLimit) return std::nullopt;
    std::vector<std::int64_t> poly(static_cast<std::size_t>(q), 0);
    for (auto e : exponents) {
        auto r = e % q;
        if (r < 0) r += q;
        ++poly[static_cast<std::size_t>(r)];
    }
    const auto phi = cyclotomic(q);
    const auto deg_phi = phi->size() - 1;
    std::vector<std::pair<std::size_t, std::int64_t>> sparse;
    for (std::size_t i = 0; i < phi->size(); ++i)
        if ((*phi)[i] != 0) sparse.emplace_back(i, (*phi)[i]);
    // Long division by the monic Phi_q, skipping zero leading terms.
    for (std::size_t i = poly.size(); i-- > deg_phi;) {
        const auto c = poly[i];
        if (c == 0) continue;
        const auto shift = i - deg_phi;
        for (const auto& [j, a] : sparse) poly[shift + j] = checked_add(poly[shift + j], -checked_mul(c, a));
    }
    for (std::size_t i = 0; i < deg_phi; ++i)
        if (poly[i] != 0) return false;
    return true;
}

TrigPolynomial::TrigPolynomial(std::size_t dim, const std::map<IntVector, Complex>& coefficients) : dim_(dim) {
    for (const auto& [k, a] : coefficients) set(k, a);
}

TrigPolynomial TrigPolynomial::constant(Complex c, std::size_t dim) {
    TrigPolynomial p(dim);
    p.set(IntVector(dim, 0), c);
    return p;
}

TrigPolynomial TrigPolynomial::from_scalar_map(const std::map<std::int64_t, Complex>& coefficients) {
    TrigPolynomial p(1);
    for (const auto& [k, a] : coefficients) p.set({k}, a);
    return p;
}

Complex TrigPolynomial::coefficient(const IntVector& k) const {
    const auto it = coefficients_.find(k);
    return it == coefficients_.end() ? Complex{} : it->second;
}

void TrigPolynomial::set(const IntVector& k, Complex value) {
    if (k.size() != dim_) throw InvalidInput("frequency " + key_str(k) + " has the wrong dimension");
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw InvalidInput("coefficient at " + key_str(k) + " is not finite");
    if (value == Complex{})
        coefficients_.erase(k);
    else
        coefficients_[k] = value;
}

Complex TrigPolynomial::evaluate(const std::vector<double>& x) const {
    if (x.size() != dim_) throw InvalidInput("evaluation point has the wrong dimension");
    Complex acc{};
    for (const auto& [k, a] : coefficients_) {
        double phase = 0;
        for (std::size_t i = 0; i < dim_; ++i) phase += static_cast<double>(k[i]) * x[i];
        acc += a * unit_phase(phase - std::floor(phase));
    }
    return acc;
}

Complex TrigPolynomial::evaluate(const RationalVector& x) const {
    if (x.dim() != dim_) throw InvalidInput("evaluation point has the wrong dimension");
    Complex acc{};
    for (const auto& [k, a] : coefficients_) {
        const auto phase = dot(k, x);
        acc += a * unit_phase(phase.num() % phase.den(), phase.den());
    }
    return acc;
}

TrigPolynomial TrigPolynomial::modulus_squared() const {
    std::map<IntVector, Complex> out;
    for (const auto& [k, a] : coefficients_)
        for (const auto& [j, b] : coefficients_) {
            IntVector diff(dim_);
            for (std::size_t i = 0; i < dim_; ++i) diff[i] = k[i] - j[i];
            out[diff] += a * std::conj(b);
        }
    TrigPolynomial p(dim_);
    for (const auto& [k, a] : out)
        if (std::abs(a) > 1e-15) p.set(k, a);
    return p;
}

double TrigPolynomial::lipschitz_constant() const {
    double acc = 0;
    for (const auto& [k, a] : coefficients_) {
        double n2 = 0;
        for (auto v : k) n2 += static_cast<double>(v) * static_cast<double>(v);
        acc += std::abs(a) * std::sqrt(n2);
    }
    return kTwoPi * acc;
}

std::int64_t TrigPolynomial::max_frequency() const {
    std::int64_t m = 0;
    for (const auto& [k, a] : coefficients_)
        for (auto v : k) m = std::max(m, v < 0 ? -v : v);
    return m;
}

bool TrigPolynomial::is_low_pass(double tol) const {
    return std::abs(evaluate(std::vector<double>(dim_, 0.0)) - 1.0) <= tol;
}

std::optional<std::vector<IntVector>> TrigPolynomial::convex_support() const {
    if (coefficients_.empty()) return std::nullopt;
    double sum = 0;
    std::vector<IntVector> support;
    for (const auto& [k, a] : coefficients_) {
        if (a.imag() != 0.0 || a.real() <= 0.0) return std::nullopt;
        sum += a.real();
        support.push_back(k);
    }
    if (std::abs(sum - 1.0) > 1e-12) return std::nullopt;
    return support;
}

std::optional<std::vector<IntVector>> TrigPolynomial::digit_form() const {
    auto support = convex_support();
    if (!support) return std::nullopt;
    const double w = 1.0 / static_cast<double>(support->size());
    for (const auto& [k, a] : coefficients_)
        if (std::abs(a.real() - w) > 1e-14) return std::nullopt;
    return support;
}

std::optional<bool> TrigPolynomial::is_extreme_exact(const RationalVector& x) const {
    if (x.dim() != dim_) throw InvalidInput("evaluation point has the wrong dimension");
    const auto support = convex_support();
    if (!support) return std::nullopt;
    const auto& k0 = support->front();
    for (const auto& k : *support) {
        IntVector diff(dim_);
        for (std::size_t i = 0; i < dim_; ++i) diff[i] = k[i] - k0[i];
        if (!dot(diff, x).is_integer()) return false;
    }
    return true;
}

std::optional<bool> TrigPolynomial::vanishes_exact(const RationalVector& x) const {
    if (x.dim() != dim_) throw InvalidInput("evaluation point has the wrong dimension");
    const auto support = digit_form();
    if (!support) return std::nullopt;
    const auto q = x.denominator();
    IntVector exponents;
    exponents.reserve(support->size());
    for (const auto& k : *support) {
        const auto phase = dot(k, x);  // = e / q after scaling
        exponents.push_back(checked_mul(phase.num(), q / phase.den()));
    }
    return root_of_unity_sum_vanishes(q, exponents);
}

std::string TrigPolynomial::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [k, a] : coefficients_) {
        os << (first ? "" : ", ") << key_str(k) << ": " << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i";
        first = false;
    }
    os << "}";
    return os.str();
}

TrigPolynomial filter_from_digits(const DigitSet& B) {
    TrigPolynomial m(B.dim());
    const double w = 1.0 / static_cast<double>(B.size());
    for (const auto& b : B.points()) m.set(b, w);
    return m;
}

HadamardCertificate hadamard_check(const ExpansiveIntMatrix& A, const DigitSet& B, const DigitSet& L) {
    if (B.size() != L.size())
        throw InvalidInput("Hadamard triple requires |B| = |L| (got " + std::to_string(B.size()) + " and " +
                           std::to_string(L.size()) + ")");
    if (B.dim() != A.dim() || L.dim() != A.dim()) throw InvalidInput("B and L must have the dimension of A");
    if (!B.contains_zero()) throw InvalidInput("0 must belong to B");
    if (!L.contains_zero()) throw InvalidInput("0 must belong to L");

    const auto n = B.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    HadamardCertificate cert{A, B, L, {}, 0.0, false};
    cert.matrix.assign(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = A.inverse().apply(RationalVector(B[i]));
        for (std::size_t j = 0; j < n; ++j) {
            const auto phase = dot(L[j], y);
            cert.matrix[i][j] = scale * unit_phase(phase.num() % phase.den(), phase.den());
        }
    }
    double defect = 0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            Complex acc{};
            for (std::size_t k = 0; k < n; ++k) acc += std::conj(cert.matrix[k][r]) * cert.matrix[k][c];
            defect = std::max(defect, std::abs(acc - (r == c ? 1.0 : 0.0)));
        }
    cert.unitarity_defect = defect;
    cert.valid = defect <= HadamardCertificate::kTolerance;
    return cert;
}

double qmf_defect(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& L, unsigned grid) {
    if (grid == 0) throw InvalidInput("grid must be >= 1");
    if (m.dim() != A.dim() || L.dim() != A.dim()) throw InvalidInput("filter, A and L dimensions differ");
    const auto d = A.dim();
    const auto minv = A.transpose_inverse().to_doubles();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= grid;
    double worst = 0;
    std::vector<double> x(d), shifted(d), y(d);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        auto rem = idx;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = static_cast<double>(rem % grid) / grid;
            rem /= grid;
        }
        double sum = 0;
        for (const auto& l : L.points()) {
            for (std::size_t i = 0; i < d; ++i) shifted[i] = x[i] + static_cast<double>(l[i]);
            for (std::size_t r = 0; r < d; ++r) {
                y[r] = 0;
                for (std::size_t c = 0; c < d; ++c) y[r] += minv[r][c] * shifted[c];
            }
            sum += std::norm(m.evaluate(y));
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

}  // namespace fracwave
