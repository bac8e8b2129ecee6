#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Allocation-free computational kernels shared by the public estimator API
// and the Monte Carlo risk engine. No input validation here; callers hold
// the invariants (k >= 2, positive statistics, matching lengths).

namespace ordexp::kernels {

/// Reusable block buffers for the pool-adjacent-violators pass.
struct PavaScratch {
    std::vector<double> num;
    std::vector<double> den;
    std::vector<std::size_t> len;
};

/// Weighted isotonic (nondecreasing) fit of the ratios num[i]/den[i] by
/// pool-adjacent-violators, pooling numerators and denominators so block
/// means are exactly sum(num)/sum(den) over the pooled window. Equivalent
/// to the max over s <= i of the min over t >= i of the pooled window
/// mean. `out` has the fitted value per position.
void pooled_isotonic_fit(std::span<const double> num,
                         std::span<const std::uint32_t> den,
                         std::span<double> out, PavaScratch& scratch);

/// Truncation clamp of an equivariant multiplier for component i
/// (0-based). Bounds are trunc and trunc*(1 + sum of stat[j]/stat[i] over
/// j != i ahead resp. behind): for i = 0 the multiplier is clamped to
/// [trunc, trunc*(1 + sum_{j>0} stat[j]/stat[0])]; for i > 0 only the
/// lower bound trunc*(1 + sum_{j<i} stat[j]/stat[i]) applies.
double clamp_multiplier(std::size_t i, double base,
                        std::span<const double> stat, double trunc);

/// out[i] = coef[i] * stat[i].
void best_equivariant(std::span<const double> stat,
                      std::span<const double> coef, std::span<double> out);

/// out[i] = clamp_multiplier(i, coef[i]) * stat[i].
void improved_equivariant(std::span<const double> stat,
                          std::span<const double> coef, double trunc,
                          std::span<double> out);

/// out[i] = clamp_multiplier(i, rmle[i]/stat[i]) * stat[i], where rmle is
/// the isotonic fit of stat against weights.
void improved_isotonic(std::span<const double> stat,
                       std::span<const std::uint32_t> weights, double trunc,
                       std::span<double> out, PavaScratch& scratch);

/// Left-to-right sum; the single definition of the sum statistic so the
/// sampling engine and the public constructors agree bit for bit.
double sum_of(std::span<const double> xs);

/// Sample minimum and residual sum T = sum(x - min) of one population.
struct MinResidual {
    double xmin;
    double t;
};
MinResidual min_residual_of(std::span<const double> xs);

}  // namespace ordexp::kernels
