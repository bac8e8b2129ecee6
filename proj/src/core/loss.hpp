#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ordexp {

/// Asymmetry parameter of the linex loss
///
///     L(delta, sigma) = exp(p*D) - p*D - 1,   D = (delta - sigma) / sigma.
///
/// p > 0 penalizes over-estimation harder, p < 0 under-estimation.
/// |p| -> 0 approaches squared error; p = 0 itself is rejected.
class LinexShape {
public:
    explicit LinexShape(double p);

    double p() const noexcept { return p_; }

private:
    double p_;
};

/// Linex loss of `estimate` against the true scale `truth`.
///
/// Requires truth > 0 and a finite estimate >= 0. If exp(p*D) would
/// overflow, the result saturates at DBL_MAX and *saturated (when given)
/// is set instead of failing; callers doing Monte Carlo must count such
/// replications rather than drop them.
double linex_loss(LinexShape shape, double estimate, double truth,
                  bool* saturated = nullptr);

/// p^-1 (1 - exp(-p/(n_i + 1))): multiplier of the per-population sum that
/// minimizes unrestricted linex risk. Requires n_i >= 1.
double bsee_coefficient(std::uint32_t n_i, LinexShape shape);

/// p^-1 (1 - exp(-p/n_i)): multiplier of the residual sum T_i that
/// minimizes unrestricted linex risk. Requires n_i >= 2 so that T_i has a
/// proper gamma law.
double baee_coefficient(std::uint32_t n_i, LinexShape shape);

/// p^-1 (1 - exp(-p/(n + 1))) with n the total sample size across
/// populations; scales the truncation bounds for sum statistics.
/// Requires n_total >= 2.
double truncation_coefficient_known(std::uint64_t n_total, LinexShape shape);

/// p^-1 (1 - exp(-p/(n - k + 1))) with k the population count; scales the
/// truncation bounds for residual-sum statistics. Requires k >= 2 and
/// n_total - k >= 1.
double truncation_coefficient_unknown(std::uint64_t n_total, std::uint32_t k,
                                      LinexShape shape);

namespace detail {

/// Loss arithmetic without argument checks, for callers that already hold
/// the preconditions (the Monte Carlo hot loop).
inline double linex_loss_unchecked(double p, double estimate, double truth,
                                   bool& saturated) {
    const double x = p * ((estimate - truth) / truth);
    if (x > 709.0) {
        saturated = true;
        return std::numeric_limits<double>::max();
    }
    return std::expm1(x) - x;
}

}  // namespace detail

}  // namespace ordexp
