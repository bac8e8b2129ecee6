#include "core/estimators.hpp"

#include <string>

#include "core/errors.hpp"

namespace ordexp {

bool uses_residual_stats(EstimatorId id) {
    switch (id) {
        case EstimatorId::Bsee:
        case EstimatorId::ImprovedBsee:
        case EstimatorId::RmleKnown:
        case EstimatorId::ImprovedRmleKnown:
            return false;
        case EstimatorId::Baee:
        case EstimatorId::ImprovedBaee:
        case EstimatorId::RmleUnknown:
        case EstimatorId::ImprovedRmleUnknown:
            return true;
    }
    throw std::invalid_argument("unknown estimator id");
}

std::string_view to_string(EstimatorId id) {
    switch (id) {
        case EstimatorId::Bsee:
            return "bsee";
        case EstimatorId::ImprovedBsee:
            return "improved_bsee";
        case EstimatorId::RmleKnown:
            return "rmle_known";
        case EstimatorId::ImprovedRmleKnown:
            return "improved_rmle_known";
        case EstimatorId::Baee:
            return "baee";
        case EstimatorId::ImprovedBaee:
            return "improved_baee";
        case EstimatorId::RmleUnknown:
            return "rmle_unknown";
        case EstimatorId::ImprovedRmleUnknown:
            return "improved_rmle_unknown";
    }
    throw std::invalid_argument("unknown estimator id");
}

std::optional<EstimatorId> estimator_from_string(std::string_view name) {
    for (EstimatorId id : kAllEstimators) {
        if (to_string(id) == name) {
            return id;
        }
    }
    return std::nullopt;
}

std::vector<double> evaluate_known(EstimatorId id, const KnownLocStats& stats,
                                   LinexShape shape) {
    switch (id) {
        case EstimatorId::Bsee:
            return bsee(stats, shape);
        case EstimatorId::ImprovedBsee:
            return improved_bsee(stats, shape);
        case EstimatorId::RmleKnown:
            return restricted_mle_known(stats);
        case EstimatorId::ImprovedRmleKnown:
            return improved_restricted_mle_known(stats, shape);
        default:
            throw IncompatibleEstimatorError(
                std::string(to_string(id)) +
                " needs residual-sum statistics, not sum statistics");
    }
}

std::vector<double> evaluate_unknown(EstimatorId id,
                                     const UnknownLocStats& stats,
                                     LinexShape shape) {
    switch (id) {
        case EstimatorId::Baee:
            return baee(stats, shape);
        case EstimatorId::ImprovedBaee:
            return improved_baee(stats, shape);
        case EstimatorId::RmleUnknown:
            return restricted_mle_unknown(stats);
        case EstimatorId::ImprovedRmleUnknown:
            return improved_restricted_mle_unknown(stats, shape);
        default:
            throw IncompatibleEstimatorError(
                std::string(to_string(id)) +
                " needs sum statistics, not residual-sum statistics");
    }
}

}  // namespace ordexp
