#pragma once

#include <cstdint>
#include <vector>

#include "core/loss.hpp"

namespace ordexp {

/// Sufficient statistics for k >= 2 exponential populations with known
/// (zero) locations: per-population sample sizes and sums S_i. Immutable
/// after construction.
class KnownLocStats {
public:
    /// Validates k >= 2, matching lengths, every n_i >= 1, every S_i > 0.
    KnownLocStats(std::vector<std::uint32_t> n, std::vector<double> sums);

    /// Builds the statistics from raw samples; every population must be
    /// nonempty and every observation strictly positive.
    static KnownLocStats from_samples(
        const std::vector<std::vector<double>>& samples);

    std::size_t k() const noexcept { return n_.size(); }
    const std::vector<std::uint32_t>& n() const noexcept { return n_; }
    const std::vector<double>& sums() const noexcept { return sums_; }
    std::uint64_t total_n() const noexcept { return total_n_; }

private:
    std::vector<std::uint32_t> n_;
    std::vector<double> sums_;
    std::uint64_t total_n_;
};

/// Unrestricted best scale equivariant estimator: component i is
/// bsee_coefficient(n_i) * S_i.
std::vector<double> bsee(const KnownLocStats& stats, LinexShape shape);

/// Truncation clamp for the equivariant multiplier of component i
/// (0-based). Component 0 is clamped to [d2, d2*(1 + sum_{j>0} S_j/S_0)];
/// later components only get the lower bound d2*(1 + sum_{j<i} S_j/S_i),
/// where d2 = truncation_coefficient_known(total n).
double clamp_psi_known(std::size_t i, double base_psi,
                       const KnownLocStats& stats, LinexShape shape);

/// BSEE with each multiplier passed through clamp_psi_known; dominates
/// the BSEE under the scale ordering.
std::vector<double> improved_bsee(const KnownLocStats& stats,
                                  LinexShape shape);

/// Maximum likelihood estimate under the nondecreasing-scale constraint:
/// max over s <= i of min over t >= i of pooled means
/// sum(S_j)/sum(n_j) over j in [s, t]. Computed by weighted
/// pool-adjacent-violators; output is nondecreasing.
std::vector<double> restricted_mle_known(const KnownLocStats& stats);

/// Restricted MLE with its equivariant multiplier S_i -> rmle_i/S_i
/// passed through clamp_psi_known.
std::vector<double> improved_restricted_mle_known(const KnownLocStats& stats,
                                                  LinexShape shape);

}  // namespace ordexp
