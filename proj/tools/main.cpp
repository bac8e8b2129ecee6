// ordexp command line front end. Talks to the library exclusively through
// the public C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordexp/ordexp.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitDegenerateBudget = 2;

std::uint64_t env_or(const char* name, std::uint64_t fallback) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') {
        throw CLI::ValidationError(std::string(name) +
                                   " must be an unsigned integer");
    }
    return static_cast<std::uint64_t>(v);
}

int report_failure(const char* action, ordexp_status status) {
    std::cerr << "ordexp: " << action << " failed ("
              << ordexp_status_name(status) << "): " << ordexp_last_error()
              << "\n";
    return kExitFailure;
}

int write_output(const std::string& text, const std::string& destination) {
    if (destination.empty() || destination == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream file(destination, std::ios::binary);
    if (!file) {
        std::cerr << "ordexp: cannot open '" << destination
                  << "' for writing\n";
        return kExitFailure;
    }
    file << text;
    file.flush();
    if (!file) {
        std::cerr << "ordexp: failed writing to '" << destination << "'\n";
        return kExitFailure;
    }
    return 0;
}

struct EstimatorName {
    const char* name;
    ordexp_estimator id;
};

constexpr EstimatorName kEstimators[] = {
    {"bsee", ORDEXP_EST_BSEE},
    {"improved_bsee", ORDEXP_EST_IMPROVED_BSEE},
    {"rmle_known", ORDEXP_EST_RMLE_KNOWN},
    {"improved_rmle_known", ORDEXP_EST_IMPROVED_RMLE_KNOWN},
    {"baee", ORDEXP_EST_BAEE},
    {"improved_baee", ORDEXP_EST_IMPROVED_BAEE},
    {"rmle_unknown", ORDEXP_EST_RMLE_UNKNOWN},
    {"improved_rmle_unknown", ORDEXP_EST_IMPROVED_RMLE_UNKNOWN},
};

bool lookup_estimator(const std::string& name, ordexp_estimator* out) {
    for (const auto& entry : kEstimators) {
        if (name == entry.name) {
            *out = entry.id;
            return true;
        }
    }
    return false;
}

struct TableOptions {
    int id = 0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    bool reps_given = false;
    bool seed_given = false;
    std::string format = "csv";
    std::string out = "-";
    unsigned threads = 0;
};

int run_table_command(const TableOptions& opt) {
    const std::uint64_t reps =
        opt.reps_given ? opt.reps
                       : env_or("ORDEXP_REPS", ORDEXP_DEFAULT_REPLICATIONS);
    const std::uint64_t seed =
        opt.seed_given ? opt.seed : env_or("ORDEXP_SEED", ORDEXP_DEFAULT_SEED);
    const ordexp_format fmt =
        opt.format == "csv" ? ORDEXP_FORMAT_CSV : ORDEXP_FORMAT_MARKDOWN;

    char* text = nullptr;
    std::uint64_t degenerate = 0;
    std::uint64_t overflow = 0;
    const ordexp_status status = ordexp_run_table(
        static_cast<std::uint32_t>(opt.id), reps, seed, fmt, opt.threads,
        &text, &degenerate, &overflow);
    if (status != ORDEXP_OK) {
        return report_failure("table run", status);
    }
    const std::string rendered(text);
    ordexp_string_free(text);

    const int rc = write_output(rendered, opt.out);
    if (rc != 0) {
        return rc;
    }
    std::cerr << "ordexp: table " << opt.id << ", " << reps
              << " replications per cell, seed " << seed
              << ", degenerate redraws " << degenerate << ", saturated losses "
              << overflow << "\n";
    // 36 cells per table
    if (static_cast<double>(degenerate) > 0.001 * 36.0 *
                                              static_cast<double>(reps)) {
        std::cerr << "ordexp: degenerate redraws exceeded 0.1% of "
                     "replications\n";
        return kExitDegenerateBudget;
    }
    return 0;
}

struct RunOptions {
    std::string config_path;
    std::string out;  // empty: honor the config's output_path
    unsigned threads = 0;
};

int run_config_command(const RunOptions& opt) {
    std::ifstream file(opt.config_path, std::ios::binary);
    if (!file) {
        std::cerr << "ordexp: cannot read config '" << opt.config_path
                  << "'\n";
        return kExitFailure;
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const std::string config_text = buffer.str();

    char* text = nullptr;
    char* path = nullptr;
    std::uint64_t degenerate = 0;
    std::uint64_t overflow = 0;
    int budget_exceeded = 0;
    const ordexp_status status =
        ordexp_run_config(config_text.c_str(), opt.threads, &text, &path,
                          &degenerate, &overflow, &budget_exceeded);
    if (status != ORDEXP_OK) {
        return report_failure("config run", status);
    }
    const std::string rendered(text);
    ordexp_string_free(text);
    std::string destination = opt.out;
    if (destination.empty()) {
        destination = path != nullptr ? path : "-";
    }
    ordexp_string_free(path);

    const int rc = write_output(rendered, destination);
    if (rc != 0) {
        return rc;
    }
    std::cerr << "ordexp: config " << opt.config_path
              << ", degenerate redraws " << degenerate << ", saturated losses "
              << overflow << "\n";
    if (budget_exceeded != 0) {
        std::cerr << "ordexp: degenerate redraws exceeded 0.1% of "
                     "replications in some scenario\n";
        return kExitDegenerateBudget;
    }
    return 0;
}

struct RiskOptions {
    std::string estimator;
    std::vector<std::uint32_t> n;
    std::vector<double> sigma;
    std::vector<double> mu;
    double p = 0.5;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    bool reps_given = false;
    bool seed_given = false;
    unsigned threads = 0;
};

int run_risk_command(const RiskOptions& opt) {
    ordexp_estimator estimator;
    if (!lookup_estimator(opt.estimator, &estimator)) {
        std::cerr << "ordexp: unknown estimator '" << opt.estimator << "'\n";
        return kExitFailure;
    }
    const std::uint64_t reps =
        opt.reps_given ? opt.reps
                       : env_or("ORDEXP_REPS", ORDEXP_DEFAULT_REPLICATIONS);
    const std::uint64_t seed =
        opt.seed_given ? opt.seed : env_or("ORDEXP_SEED", ORDEXP_DEFAULT_SEED);

    const std::size_t k = opt.n.size();
    if (opt.sigma.size() != k || (!opt.mu.empty() && opt.mu.size() != k)) {
        std::cerr << "ordexp: --n, --sigma (and --mu when given) must have "
                     "the same length\n";
        return kExitFailure;
    }

    ordexp_scenario* scenario = nullptr;
    ordexp_status status = ordexp_scenario_create(
        k, opt.n.data(), opt.mu.empty() ? nullptr : opt.mu.data(),
        opt.sigma.data(), opt.p, reps, seed, &scenario);
    if (status != ORDEXP_OK) {
        return report_failure("scenario setup", status);
    }

    std::vector<double> mean(k);
    std::vector<double> se(k);
    std::uint64_t overflow = 0;
    std::uint64_t degenerate = 0;
    status = ordexp_estimate_risk(scenario, estimator, opt.threads,
                                  mean.data(), se.data(), &overflow,
                                  &degenerate);
    ordexp_scenario_destroy(scenario);
    if (status != ORDEXP_OK) {
        return report_failure("risk estimation", status);
    }

    std::printf("estimator: %s\n", opt.estimator.c_str());
    std::printf("replications: %" PRIu64 "\n", reps);
    std::printf("seed: %" PRIu64 "\n", seed);
    for (std::size_t c = 0; c < k; ++c) {
        std::printf("component %zu: mean_loss=%.10g std_error=%.4g\n", c + 1,
                    mean[c], se[c]);
    }
    std::printf("saturated_losses: %" PRIu64 "\n", overflow);
    std::printf("degenerate_redraws: %" PRIu64 "\n", degenerate);
    if (static_cast<double>(degenerate) > 0.001 * static_cast<double>(reps)) {
        std::cerr << "ordexp: degenerate redraws exceeded 0.1% of "
                     "replications\n";
        return kExitDegenerateBudget;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Estimators of ordered exponential scale parameters under linex "
        "loss, with a Monte Carlo risk engine"};
    app.set_version_flag("--version", ordexp_version());
    app.require_subcommand(1);

    TableOptions table;
    CLI::App* table_cmd = app.add_subcommand(
        "table", "Run one of the four reference PRRI grids");
    table_cmd->add_option("--id", table.id, "Table number (1-4)")
        ->required()
        ->check(CLI::Range(1, 4));
    table_cmd->add_option("--reps", table.reps, "Replications per cell")
        ->check(CLI::PositiveNumber);
    table_cmd->add_option("--seed", table.seed, "Master seed");
    table_cmd->add_option("--format", table.format, "Output format")
        ->check(CLI::IsMember({"csv", "md", "markdown"}))
        ->default_val("csv");
    table_cmd->add_option("--out", table.out, "Output path ('-' = stdout)");
    table_cmd->add_option("--threads", table.threads,
                          "Worker threads (0 = hardware default)");

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Run the scenario grid described by a JSON config");
    run_cmd->add_option("--config", run.config_path, "Config file path")
        ->required();
    run_cmd->add_option("--out", run.out,
                        "Output path override ('-' = stdout)");
    run_cmd->add_option("--threads", run.threads,
                        "Worker threads (0 = hardware default)");

    RiskOptions risk;
    CLI::App* risk_cmd = app.add_subcommand(
        "risk", "Monte Carlo risk of a single estimator on one scenario");
    risk_cmd->add_option("--estimator", risk.estimator, "Estimator id")
        ->required();
    risk_cmd->add_option("--n", risk.n, "Sample sizes")
        ->required()
        ->delimiter(',');
    risk_cmd->add_option("--sigma", risk.sigma, "True scales (nondecreasing)")
        ->required()
        ->delimiter(',');
    risk_cmd->add_option("--mu", risk.mu, "Locations (default all zero)")
        ->delimiter(',');
    risk_cmd->add_option("--p", risk.p, "Linex shape parameter")->required();
    risk_cmd->add_option("--reps", risk.reps, "Replications")
        ->check(CLI::PositiveNumber);
    risk_cmd->add_option("--seed", risk.seed, "Seed");
    risk_cmd->add_option("--threads", risk.threads,
                         "Worker threads (0 = hardware default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    table.reps_given = table_cmd->count("--reps") > 0;
    table.seed_given = table_cmd->count("--seed") > 0;
    risk.reps_given = risk_cmd->count("--reps") > 0;
    risk.seed_given = risk_cmd->count("--seed") > 0;

    try {
        if (table_cmd->parsed()) {
            return run_table_command(table);
        }
        if (run_cmd->parsed()) {
            return run_config_command(run);
        }
        if (risk_cmd->parsed()) {
            return run_risk_command(risk);
        }
    } catch (const std::exception& e) {
        std::cerr << "ordexp: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
