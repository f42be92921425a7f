#include "fracwave/fourier_product.hpp"

#include <cmath>
#include <set>

#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

constexpr double kNumericNonzero = 1e-6;

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

class ProductRunner {
public:
    ProductRunner(const TrigPolynomial& m, const ExpansiveIntMatrix& s)
        : m_(m),
          step_(s.transpose_inverse()),
          step_double_(step_.to_doubles()),
          j_(s.contraction_power()),
          rho_(s.contraction_ratio()),
          lipschitz_(m.lipschitz_constant()) {
        if (m.dim() != s.dim()) throw InvalidInput("filter and matrix dimensions differ");
        if (!m.is_low_pass(1e-12)) throw InvalidInput("filter is not low-pass: m(0) != 1");
    }

    ProductEvaluation run(const std::vector<double>& x, std::optional<RationalVector> exact, double target_err,
                          unsigned depth_cap) {
        if (!(target_err > 0)) throw InvalidInput("target error must be positive");
        if (x.size() != step_.dim()) throw InvalidInput("argument has the wrong dimension");
        ProductEvaluation out;
        if (norm2(x) == 0.0) {
            out.value = 1.0;
            out.certified_nonzero = true;
            return out;
        }

        std::vector<std::vector<double>> ys{x};
        const auto ensure = [&](std::size_t k) {
            while (ys.size() <= k) ys.push_back(apply(ys.back()));
        };
        Complex value = 1.0;
        bool all_nonzero = true;
        for (unsigned k = 1; k <= depth_cap; ++k) {
            ensure(k + j_);
            if (exact) {
                try {
                    exact = step_.apply(*exact);
                } catch (const ComputationError&) {
                    exact.reset();
                }
            }
            const Complex factor = exact ? m_.evaluate(*exact) : m_.evaluate(ys[k]);
            if (std::abs(factor) < kNumericNonzero) {
                const auto vanishes = exact ? m_.vanishes_exact(*exact) : std::nullopt;
                if (vanishes == true) {
                    out.value = 0.0;
                    out.truncation_depth = k;
                    out.exact_zero = true;
                    out.zero_witness = k;
                    return out;
                }
                if (vanishes != false) all_nonzero = false;
            }
            value *= factor;

            double tail = 0;
            for (unsigned r = 1; r <= j_; ++r) tail += norm2(ys[k + r]);
            tail /= (1.0 - rho_);
            const double lc = lipschitz_ * tail;
            const double bound = std::abs(value) * std::expm1(lc);
            // With an exact argument keep going until later factors provably cannot vanish.
            const bool zero_free_tail = lc < 1.0;
            if (bound <= target_err && (zero_free_tail || !exact)) {
                out.value = value;
                out.truncation_depth = k;
                out.tail_bound = bound;
                out.certified_nonzero = all_nonzero && zero_free_tail && value != Complex{};
                return out;
            }
        }
        throw ComputationError("infinite product: requested error " + std::to_string(target_err) +
                               " not reached within " + std::to_string(depth_cap) + " factors");
    }

private:
    std::vector<double> apply(const std::vector<double>& y) const {
        std::vector<double> out(y.size(), 0.0);
        for (std::size_t r = 0; r < y.size(); ++r)
            for (std::size_t c = 0; c < y.size(); ++c) out[r] += step_double_[r][c] * y[c];
        return out;
    }

    const TrigPolynomial& m_;
    RationalMatrix step_;
    std::vector<std::vector<double>> step_double_;
    unsigned j_;
    double rho_;
    double lipschitz_;
};

ExpansiveIntMatrix expanding_for(const AffineIFS& ifs) {
    ifs.require_uniform_weights();
    if (ifs.orientation() == Orientation::forward) return ifs.matrix();
    return ExpansiveIntMatrix(ifs.matrix().transpose_entries());
}

}  // namespace

ProductEvaluation infinite_product(const TrigPolynomial& m, const ExpansiveIntMatrix& expanding,
                                   const std::vector<double>& x, double target_err, unsigned depth_cap) {
    return ProductRunner(m, expanding).run(x, std::nullopt, target_err, depth_cap);
}

ProductEvaluation infinite_product(const TrigPolynomial& m, const ExpansiveIntMatrix& expanding,
                                   const RationalVector& x, double target_err, unsigned depth_cap) {
    return ProductRunner(m, expanding).run(x.to_doubles(), x, target_err, depth_cap);
}

ProductEvaluation mu_hat(const AffineIFS& ifs, const std::vector<double>& x, double target_err) {
    return infinite_product(filter_from_digits(ifs.digits()), expanding_for(ifs), x, target_err);
}

ProductEvaluation mu_hat(const AffineIFS& ifs, const RationalVector& x, double target_err) {
    return infinite_product(filter_from_digits(ifs.digits()), expanding_for(ifs), x, target_err);
}

ProductEvaluation phi_hat(const TrigPolynomial& m0, const ExpansiveIntMatrix& A, const std::vector<double>& x,
                          double target_err) {
    return infinite_product(m0, A, x, target_err);
}

ProductEvaluation phi_hat(const TrigPolynomial& m0, const ExpansiveIntMatrix& A, const RationalVector& x,
                          double target_err) {
    return infinite_product(m0, A, x, target_err);
}

ProductEvaluation exp_inner_product(const AffineIFS& ifs, const RationalVector& lambda1,
                                    const RationalVector& lambda2) {
    return mu_hat(ifs, lambda2 - lambda1, kDefaultProductError);
}

namespace {

template <typename Point, typename Shift>
PartialSum h_partial(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas, const Point& x,
                     const Shift& shift) {
    std::set<RationalVector> seen;
    for (const auto& l : lambdas)
        if (!seen.insert(l).second) throw InvalidInput("frequency list has a repeated element " + l.str());
    const auto m = filter_from_digits(ifs.digits());
    const auto s = expanding_for(ifs);
    PartialSum out;
    for (const auto& l : lambdas) {
        const auto e = infinite_product(m, s, shift(x, l));
        const double a = std::abs(e.value);
        out.value += a * a;
        out.error_bound += 2.0 * a * e.tail_bound + e.tail_bound * e.tail_bound;
        ++out.terms;
    }
    return out;
}

}  // namespace

PartialSum h_function_partial(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas,
                              const RationalVector& x) {
    return h_partial(ifs, lambdas, x, [](const RationalVector& p, const RationalVector& l) { return p + l; });
}

PartialSum h_function_partial(const AffineIFS& ifs, const std::vector<RationalVector>& lambdas,
                              const std::vector<double>& x) {
    return h_partial(ifs, lambdas, x, [](const std::vector<double>& p, const RationalVector& l) {
        auto out = p;
        const auto ld = l.to_doubles();
        if (out.size() != ld.size()) throw InvalidInput("frequency dimension mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += ld[i];
        return out;
    });
}

}  // namespace fracwave
