#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "core/known_location.hpp"
#include "core/unknown_location.hpp"

namespace ordexp {

/// The eight estimator families.
enum class EstimatorId {
    Bsee,
    ImprovedBsee,
    RmleKnown,
    ImprovedRmleKnown,
    Baee,
    ImprovedBaee,
    RmleUnknown,
    ImprovedRmleUnknown,
};

inline constexpr EstimatorId kAllEstimators[] = {
    EstimatorId::Bsee,          EstimatorId::ImprovedBsee,
    EstimatorId::RmleKnown,     EstimatorId::ImprovedRmleKnown,
    EstimatorId::Baee,          EstimatorId::ImprovedBaee,
    EstimatorId::RmleUnknown,   EstimatorId::ImprovedRmleUnknown,
};

/// True for the residual-sum (unknown location) families.
bool uses_residual_stats(EstimatorId id);

std::string_view to_string(EstimatorId id);
std::optional<EstimatorId> estimator_from_string(std::string_view name);

/// Dispatch to the matching known-location estimator; throws
/// IncompatibleEstimatorError for residual-statistic families.
std::vector<double> evaluate_known(EstimatorId id, const KnownLocStats& stats,
                                   LinexShape shape);

/// Dispatch to the matching unknown-location estimator; throws
/// IncompatibleEstimatorError for sum-statistic families.
std::vector<double> evaluate_unknown(EstimatorId id,
                                     const UnknownLocStats& stats,
                                     LinexShape shape);

}  // namespace ordexp
