#pragma once

#include <cstdint>
#include <vector>

#include "core/loss.hpp"

namespace ordexp {

/// Sufficient statistics for k >= 2 exponential populations with unknown
/// locations: sample sizes, sample minima, and residual sums
/// T_i = sum_j (x_ij - min_j x_ij). A T_i of exactly zero (all
/// observations equal) is representable but marks the statistics as
/// degenerate; estimators reject degenerate inputs.
class UnknownLocStats {
public:
    /// Validates k >= 2, matching lengths, every n_i >= 2, finite minima,
    /// every T_i >= 0.
    UnknownLocStats(std::vector<std::uint32_t> n, std::vector<double> xmin,
                    std::vector<double> t);

    /// Builds the statistics from raw samples; every population needs at
    /// least two observations.
    static UnknownLocStats from_samples(
        const std::vector<std::vector<double>>& samples);

    std::size_t k() const noexcept { return n_.size(); }
    const std::vector<std::uint32_t>& n() const noexcept { return n_; }
    const std::vector<double>& xmin() const noexcept { return xmin_; }
    const std::vector<double>& t() const noexcept { return t_; }
    std::uint64_t total_n() const noexcept { return total_n_; }

    /// True when some T_i == 0, a probability-zero event under the model.
    bool degenerate() const noexcept { return degenerate_; }

private:
    std::vector<std::uint32_t> n_;
    std::vector<double> xmin_;
    std::vector<double> t_;
    std::uint64_t total_n_;
    bool degenerate_;
};

/// Unrestricted best affine equivariant estimator: component i is
/// baee_coefficient(n_i) * T_i.
std::vector<double> baee(const UnknownLocStats& stats, LinexShape shape);

/// Truncation clamp for the multiplier of T_i, component i 0-based;
/// bounds as in clamp_psi_known but over the ratios T_j/T_i with
/// e2 = truncation_coefficient_unknown(total n, k).
double clamp_phi_unknown(std::size_t i, double base_phi,
                         const UnknownLocStats& stats, LinexShape shape);

/// BAEE with each multiplier passed through clamp_phi_unknown.
std::vector<double> improved_baee(const UnknownLocStats& stats,
                                  LinexShape shape);

/// Maximum likelihood estimate under the nondecreasing-scale constraint:
/// pooled means of T with weights n, fitted isotonically.
std::vector<double> restricted_mle_unknown(const UnknownLocStats& stats);

/// Restricted MLE with the multiplier rmle_i/T_i passed through
/// clamp_phi_unknown.
std::vector<double> improved_restricted_mle_unknown(
    const UnknownLocStats& stats, LinexShape shape);

}  // namespace ordexp
