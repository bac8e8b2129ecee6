#include "core/unknown_location.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core/errors.hpp"
#include "core/kernels.hpp"

namespace ordexp {

UnknownLocStats::UnknownLocStats(std::vector<std::uint32_t> n,
                                 std::vector<double> xmin,
                                 std::vector<double> t)
    : n_(std::move(n)),
      xmin_(std::move(xmin)),
      t_(std::move(t)),
      total_n_(0),
      degenerate_(false) {
    if (n_.size() < 2) {
        throw std::invalid_argument("need at least two populations");
    }
    if (n_.size() != xmin_.size() || n_.size() != t_.size()) {
        throw std::invalid_argument(
            "sample sizes, minima and residual sums differ in length");
    }
    for (std::size_t i = 0; i < n_.size(); ++i) {
        if (n_[i] < 2) {
            throw std::invalid_argument(
                "population " + std::to_string(i) +
                " needs at least two observations for a proper residual "
                "sum");
        }
        if (!std::isfinite(xmin_[i])) {
            throw std::invalid_argument("minimum for population " +
                                        std::to_string(i) + " is not finite");
        }
        if (!std::isfinite(t_[i]) || t_[i] < 0.0) {
            throw std::invalid_argument("residual sum for population " +
                                        std::to_string(i) +
                                        " must be nonnegative and finite");
        }
        if (t_[i] == 0.0) {
            degenerate_ = true;
        }
        total_n_ += n_[i];
    }
}

UnknownLocStats UnknownLocStats::from_samples(
    const std::vector<std::vector<double>>& samples) {
    std::vector<std::uint32_t> n;
    std::vector<double> xmin;
    std::vector<double> t;
    n.reserve(samples.size());
    xmin.reserve(samples.size());
    t.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() < 2) {
            throw std::invalid_argument("population " + std::to_string(i) +
                                        " needs at least two observations");
        }
        for (double x : samples[i]) {
            if (!std::isfinite(x)) {
                throw std::invalid_argument(
                    "population " + std::to_string(i) +
                    " contains a non-finite observation");
            }
        }
        const auto mr = kernels::min_residual_of(samples[i]);
        n.push_back(static_cast<std::uint32_t>(samples[i].size()));
        xmin.push_back(mr.xmin);
        t.push_back(mr.t);
    }
    return UnknownLocStats(std::move(n), std::move(xmin), std::move(t));
}

namespace {

void require_proper(const UnknownLocStats& stats) {
    if (stats.degenerate()) {
        throw DegenerateStatisticError(
            "a residual sum is zero (all observations equal); estimators "
            "are undefined for degenerate statistics");
    }
}

std::vector<double> baee_coefficients(const UnknownLocStats& stats,
                                      LinexShape shape) {
    std::vector<double> coef(stats.k());
    for (std::size_t i = 0; i < stats.k(); ++i) {
        coef[i] = baee_coefficient(stats.n()[i], shape);
    }
    return coef;
}

}  // namespace

std::vector<double> baee(const UnknownLocStats& stats, LinexShape shape) {
    require_proper(stats);
    std::vector<double> out(stats.k());
    kernels::best_equivariant(stats.t(), baee_coefficients(stats, shape),
                              out);
    return out;
}

double clamp_phi_unknown(std::size_t i, double base_phi,
                         const UnknownLocStats& stats, LinexShape shape) {
    if (i >= stats.k()) {
        throw std::out_of_range("component index " + std::to_string(i) +
                                " out of range for k=" +
                                std::to_string(stats.k()));
    }
    require_proper(stats);
    const double e2 = truncation_coefficient_unknown(
        stats.total_n(), static_cast<std::uint32_t>(stats.k()), shape);
    return kernels::clamp_multiplier(i, base_phi, stats.t(), e2);
}

std::vector<double> improved_baee(const UnknownLocStats& stats,
                                  LinexShape shape) {
    require_proper(stats);
    std::vector<double> out(stats.k());
    const double e2 = truncation_coefficient_unknown(
        stats.total_n(), static_cast<std::uint32_t>(stats.k()), shape);
    kernels::improved_equivariant(stats.t(), baee_coefficients(stats, shape),
                                  e2, out);
    return out;
}

std::vector<double> restricted_mle_unknown(const UnknownLocStats& stats) {
    require_proper(stats);
    std::vector<double> out(stats.k());
    kernels::PavaScratch scratch;
    kernels::pooled_isotonic_fit(stats.t(), stats.n(), out, scratch);
    return out;
}

std::vector<double> improved_restricted_mle_unknown(
    const UnknownLocStats& stats, LinexShape shape) {
    require_proper(stats);
    std::vector<double> out(stats.k());
    const double e2 = truncation_coefficient_unknown(
        stats.total_n(), static_cast<std::uint32_t>(stats.k()), shape);
    kernels::PavaScratch scratch;
    kernels::improved_isotonic(stats.t(), stats.n(), e2, out, scratch);
    return out;
}

}  // namespace ordexp
