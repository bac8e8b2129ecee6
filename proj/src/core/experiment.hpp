#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/estimators.hpp"
#include "core/sampling.hpp"

namespace ordexp {

inline constexpr std::uint64_t kDefaultReplications = 50000;
inline constexpr std::uint64_t kDefaultSeed = 20250810;

enum class OutputFormat { Csv, Markdown };
std::optional<OutputFormat> format_from_string(std::string_view name);

/// PRRI column: percentage improvement of `candidate` over `baseline`.
struct EstimatorPair {
    EstimatorId candidate;
    EstimatorId baseline;
};
std::string pair_name(const EstimatorPair& pair);

/// A parsed experiment: scenarios to run and PRRI columns to report.
/// Environment variables ORDEXP_SEED and ORDEXP_REPS override every
/// scenario's seed and replication count when set.
struct ExperimentConfig {
    std::vector<Scenario> scenarios;
    std::vector<EstimatorPair> pairs;
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> output_path;  // absent or "-": stdout
};

/// Parses and validates the JSON configuration document; throws
/// ConfigParseError with line/field context on any violation.
ExperimentConfig parse_config(const std::string& text);

/// One scenario's PRRI cells, in the configured pair order.
struct TableRow {
    std::vector<std::uint32_t> n;
    std::vector<double> sigma;
    double p = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t degenerate_count = 0;
    std::uint64_t overflow_count = 0;
    std::vector<PrriEstimate> cells;
};

struct TableResult {
    std::vector<EstimatorPair> pairs;
    std::vector<TableRow> rows;

    std::uint64_t total_degenerate() const noexcept;
    std::uint64_t total_overflow() const noexcept;
    /// True when some row redrew more than `fraction` of its replications.
    bool degenerate_budget_exceeded(double fraction = 0.001) const noexcept;
};

/// Reproduces one of the four reference grids: 4 sample-size pairs x 9
/// scale pairs, six PRRI columns each. Tables 1 and 2 use the
/// sum-statistic estimators at p = +0.5 / -0.5; tables 3 and 4 the
/// residual-sum estimators.
TableResult run_table(int table_id, std::uint64_t replications,
                      std::uint64_t seed, unsigned threads = 0);

/// Runs every scenario of a parsed config against every estimator pair.
TableResult run_config(const ExperimentConfig& config, unsigned threads = 0);

std::string render(const TableResult& result, OutputFormat format);

/// Renders and writes to `destination` ("-" or empty for stdout); throws
/// IoError with the path on failure.
void emit(const TableResult& result, OutputFormat format,
          const std::string& destination);

}  // namespace ordexp
