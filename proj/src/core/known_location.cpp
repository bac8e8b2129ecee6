#include "core/known_location.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core/kernels.hpp"

namespace ordexp {

KnownLocStats::KnownLocStats(std::vector<std::uint32_t> n,
                             std::vector<double> sums)
    : n_(std::move(n)), sums_(std::move(sums)), total_n_(0) {
    if (n_.size() < 2) {
        throw std::invalid_argument("need at least two populations");
    }
    if (n_.size() != sums_.size()) {
        throw std::invalid_argument("sample sizes and sums differ in length");
    }
    for (std::size_t i = 0; i < n_.size(); ++i) {
        if (n_[i] < 1) {
            throw std::invalid_argument("population " + std::to_string(i) +
                                        " has no observations");
        }
        if (!std::isfinite(sums_[i]) || sums_[i] <= 0.0) {
            throw std::invalid_argument("sum for population " +
                                        std::to_string(i) +
                                        " must be positive and finite");
        }
        total_n_ += n_[i];
    }
}

KnownLocStats KnownLocStats::from_samples(
    const std::vector<std::vector<double>>& samples) {
    std::vector<std::uint32_t> n;
    std::vector<double> sums;
    n.reserve(samples.size());
    sums.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].empty()) {
            throw std::invalid_argument("population " + std::to_string(i) +
                                        " is empty");
        }
        for (double x : samples[i]) {
            if (!std::isfinite(x) || x <= 0.0) {
                throw std::invalid_argument(
                    "population " + std::to_string(i) +
                    " contains a non-positive observation");
            }
        }
        n.push_back(static_cast<std::uint32_t>(samples[i].size()));
        sums.push_back(kernels::sum_of(samples[i]));
    }
    return KnownLocStats(std::move(n), std::move(sums));
}

namespace {

std::vector<double> bsee_coefficients(const KnownLocStats& stats,
                                      LinexShape shape) {
    std::vector<double> coef(stats.k());
    for (std::size_t i = 0; i < stats.k(); ++i) {
        coef[i] = bsee_coefficient(stats.n()[i], shape);
    }
    return coef;
}

}  // namespace

std::vector<double> bsee(const KnownLocStats& stats, LinexShape shape) {
    std::vector<double> out(stats.k());
    kernels::best_equivariant(stats.sums(), bsee_coefficients(stats, shape),
                              out);
    return out;
}

double clamp_psi_known(std::size_t i, double base_psi,
                       const KnownLocStats& stats, LinexShape shape) {
    if (i >= stats.k()) {
        throw std::out_of_range("component index " + std::to_string(i) +
                                " out of range for k=" +
                                std::to_string(stats.k()));
    }
    const double d2 = truncation_coefficient_known(stats.total_n(), shape);
    return kernels::clamp_multiplier(i, base_psi, stats.sums(), d2);
}

std::vector<double> improved_bsee(const KnownLocStats& stats,
                                  LinexShape shape) {
    std::vector<double> out(stats.k());
    const double d2 = truncation_coefficient_known(stats.total_n(), shape);
    kernels::improved_equivariant(stats.sums(),
                                  bsee_coefficients(stats, shape), d2, out);
    return out;
}

std::vector<double> restricted_mle_known(const KnownLocStats& stats) {
    std::vector<double> out(stats.k());
    kernels::PavaScratch scratch;
    kernels::pooled_isotonic_fit(stats.sums(), stats.n(), out, scratch);
    return out;
}

std::vector<double> improved_restricted_mle_known(const KnownLocStats& stats,
                                                  LinexShape shape) {
    std::vector<double> out(stats.k());
    const double d2 = truncation_coefficient_known(stats.total_n(), shape);
    kernels::PavaScratch scratch;
    kernels::improved_isotonic(stats.sums(), stats.n(), d2, out, scratch);
    return out;
}

}  // namespace ordexp
