#include "core/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ordexp {

namespace {

// (1 - exp(-p/m)) / p written so that p near zero does not cancel.
double multiplier(double p, double m) {
    return -std::expm1(-p / m) / p;
}

}  // namespace

LinexShape::LinexShape(double p) : p_(p) {
    if (!std::isfinite(p) || p == 0.0) {
        throw std::invalid_argument(
            "linex shape parameter must be finite and nonzero, got " +
            std::to_string(p));
    }
}

double linex_loss(LinexShape shape, double estimate, double truth,
                  bool* saturated) {
    if (!(truth > 0.0)) {
        throw std::domain_error("linex loss requires a positive true scale");
    }
    if (!std::isfinite(estimate) || estimate < 0.0) {
        throw std::invalid_argument(
            "linex loss requires a finite nonnegative estimate");
    }
    bool sat = false;
    const double loss =
        detail::linex_loss_unchecked(shape.p(), estimate, truth, sat);
    if (saturated != nullptr) {
        *saturated = sat;
    }
    return loss;
}

double bsee_coefficient(std::uint32_t n_i, LinexShape shape) {
    if (n_i < 1) {
        throw std::domain_error("bsee coefficient requires n_i >= 1");
    }
    return multiplier(shape.p(), static_cast<double>(n_i) + 1.0);
}

double baee_coefficient(std::uint32_t n_i, LinexShape shape) {
    if (n_i < 2) {
        throw std::domain_error(
            "baee coefficient requires n_i >= 2 (residual sum needs a "
            "positive gamma shape)");
    }
    return multiplier(shape.p(), static_cast<double>(n_i));
}

double truncation_coefficient_known(std::uint64_t n_total, LinexShape shape) {
    if (n_total < 2) {
        throw std::domain_error(
            "known-location truncation coefficient requires n_total >= 2");
    }
    return multiplier(shape.p(), static_cast<double>(n_total) + 1.0);
}

double truncation_coefficient_unknown(std::uint64_t n_total, std::uint32_t k,
                                      LinexShape shape) {
    if (k < 2) {
        throw std::domain_error(
            "unknown-location truncation coefficient requires k >= 2");
    }
    if (n_total < static_cast<std::uint64_t>(k) + 1) {
        throw std::domain_error(
            "unknown-location truncation coefficient requires n_total - k "
            ">= 1");
    }
    return multiplier(shape.p(),
                      static_cast<double>(n_total - k) + 1.0);
}

}  // namespace ordexp
