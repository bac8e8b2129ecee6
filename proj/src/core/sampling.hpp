#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/estimators.hpp"
#include "core/loss.hpp"
#include "core/rng.hpp"

namespace ordexp {

/// One simulation setting: population truth, linex shape, replication
/// count and reproducibility seed. Scales must be positive and
/// nondecreasing.
class Scenario {
public:
    Scenario(std::vector<std::uint32_t> n, std::vector<double> mu,
             std::vector<double> sigma, LinexShape shape,
             std::uint64_t replications, std::uint64_t seed);

    /// All locations fixed at zero.
    static Scenario zero_location(std::vector<std::uint32_t> n,
                                  std::vector<double> sigma, LinexShape shape,
                                  std::uint64_t replications,
                                  std::uint64_t seed);

    std::size_t k() const noexcept { return n_.size(); }
    const std::vector<std::uint32_t>& n() const noexcept { return n_; }
    const std::vector<double>& mu() const noexcept { return mu_; }
    const std::vector<double>& sigma() const noexcept { return sigma_; }
    LinexShape shape() const noexcept { return shape_; }
    std::uint64_t replications() const noexcept { return replications_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t total_n() const noexcept { return total_n_; }
    bool all_zero_location() const noexcept;

private:
    std::vector<std::uint32_t> n_;
    std::vector<double> mu_;
    std::vector<double> sigma_;
    LinexShape shape_;
    std::uint64_t replications_;
    std::uint64_t seed_;
    std::uint64_t total_n_;
};

/// Monte Carlo risk of one estimator: per-component mean loss and
/// standard error (sample standard deviation / sqrt(replications)), plus
/// counters for saturated losses and degenerate redraws.
struct RiskEstimate {
    std::vector<double> mean_loss;
    std::vector<double> std_error;
    std::uint64_t replications = 0;
    std::uint64_t overflow_count = 0;
    std::uint64_t degenerate_count = 0;
};

/// Risks of several estimators evaluated on common replications, with the
/// per-component covariance between their per-replication losses (needed
/// for tight standard errors of risk ratios and differences).
class JointRisk {
public:
    JointRisk(std::vector<RiskEstimate> estimates,
              std::vector<double> covariance, std::size_t components);

    const std::vector<RiskEstimate>& estimates() const noexcept {
        return estimates_;
    }
    std::size_t components() const noexcept { return components_; }

    /// Sample covariance of the losses of estimators e and f at the given
    /// component.
    double loss_covariance(std::size_t e, std::size_t f,
                           std::size_t component) const;

private:
    std::vector<RiskEstimate> estimates_;
    std::vector<double> covariance_;  // upper triangular, packed
    std::size_t components_;
};

/// n i.i.d. draws mu + sigma*E with E standard exponential from the
/// stream (inverse transform).
std::vector<double> sample_population(double mu, double sigma,
                                      std::uint32_t n, SubStream& stream);

/// Monte Carlo risks of the given estimators on the scenario. Replication
/// r draws from the substream (seed, r), so the result is bit-identical
/// for any thread count (threads == 0 picks the hardware default). All
/// estimators see the same samples.
JointRisk estimate_risks(std::span<const EstimatorId> ids,
                         const Scenario& scenario, unsigned threads = 0);

/// Single-estimator convenience wrapper around estimate_risks.
RiskEstimate estimate_risk(EstimatorId id, const Scenario& scenario,
                           unsigned threads = 0);

/// Test hook: Monte Carlo risk of an arbitrary estimate function of the
/// raw samples (and the scenario, so stubs can peek at the truth).
using CustomEstimator = std::function<std::vector<double>(
    const std::vector<std::vector<double>>& samples,
    const Scenario& scenario)>;
RiskEstimate estimate_risk_custom(const CustomEstimator& estimator,
                                  const Scenario& scenario,
                                  unsigned threads = 0);

/// Exact linex risk of the estimator c*S when S/sigma ~ Gamma(n, 1):
///     exp(-p) (1 - pc)^(-n) - pcn + p - 1   for pc < 1,
/// and +infinity for pc >= 1 (outside the moment generating function's
/// domain). Analytic oracle for estimate_risk of the BSEE family.
double closed_form_bsee_risk(std::uint32_t n, LinexShape shape, double c);

/// Percentage relative risk improvement of `risk_new` over `risk_base`:
/// 100 * (base - new) / base per component. Requires matching component
/// and replication counts and strictly positive base risks.
std::vector<double> prri(const RiskEstimate& risk_new,
                         const RiskEstimate& risk_base);

/// PRRI of estimator `new_index` over `base_index` inside a joint run,
/// with a delta-method standard error that uses the loss covariance.
struct PrriEstimate {
    std::vector<double> value;
    std::vector<double> std_error;
};
PrriEstimate prri_with_se(const JointRisk& joint, std::size_t new_index,
                          std::size_t base_index);

}  // namespace ordexp
