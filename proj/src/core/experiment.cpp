#include "core/experiment.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ordexp {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<std::uint32_t, std::uint32_t>, 4>
    kGridSampleSizes{{{3, 5}, {10, 15}, {8, 5}, {15, 10}}};

constexpr std::array<std::pair<double, double>, 9> kGridSigmas{{
    {0.2, 0.5},
    {0.2, 1.0},
    {0.2, 1.5},
    {0.5, 1.0},
    {0.5, 1.5},
    {0.5, 2.0},
    {1.0, 1.5},
    {1.0, 2.0},
    {1.0, 2.5},
}};

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_2f(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::optional<std::uint64_t> env_u64(const char* name) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') {
        throw ConfigParseError(std::string(name) +
                               " must be an unsigned integer, got '" + raw +
                               "'");
    }
    return static_cast<std::uint64_t>(v);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigParseError(path + ": " + what);
}

const json& require_key(const json& obj, const char* key,
                        const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        fail(path, std::string("missing required field '") + key + "'");
    }
    return *it;
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) {
        fail(path, "must be an unsigned integer");
    }
    return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) {
        fail(path, "must be a number");
    }
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        fail(path, "must be a string");
    }
    return v.get<std::string>();
}

EstimatorId as_estimator(const json& v, const std::string& path) {
    const std::string name = as_string(v, path);
    const auto id = estimator_from_string(name);
    if (!id) {
        fail(path, "unknown estimator '" + name +
                       "' (expected one of bsee, improved_bsee, rmle_known, "
                       "improved_rmle_known, baee, improved_baee, "
                       "rmle_unknown, improved_rmle_unknown)");
    }
    return *id;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (known.find(it.key()) == known.end()) {
            fail(path.empty() ? it.key() : path + "." + it.key(),
                 "unknown field");
        }
    }
}

EstimatorPair parse_pair(const json& v, const std::string& path) {
    if (v.is_array()) {
        if (v.size() != 2) {
            fail(path, "must be a [candidate, baseline] pair");
        }
        return {as_estimator(v[0], path + "[0]"),
                as_estimator(v[1], path + "[1]")};
    }
    if (v.is_object()) {
        reject_unknown_keys(v, {"new", "base"}, path);
        return {as_estimator(require_key(v, "new", path), path + ".new"),
                as_estimator(require_key(v, "base", path), path + ".base")};
    }
    fail(path, "must be a two-element array or {\"new\":..., \"base\":...}");
}

Scenario parse_scenario(const json& v, const std::string& path,
                        std::uint64_t default_reps,
                        std::uint64_t derived_seed,
                        const std::optional<std::uint64_t>& env_seed,
                        const std::optional<std::uint64_t>& env_reps) {
    if (!v.is_object()) {
        fail(path, "must be an object");
    }
    reject_unknown_keys(v, {"n", "sigma", "mu", "p", "replications", "seed"},
                        path);

    const json& jn = require_key(v, "n", path);
    if (!jn.is_array() || jn.empty()) {
        fail(path + ".n", "must be a nonempty array of sample sizes");
    }
    std::vector<std::uint32_t> n;
    for (std::size_t i = 0; i < jn.size(); ++i) {
        const std::uint64_t ni =
            as_u64(jn[i], path + ".n[" + std::to_string(i) + "]");
        if (ni < 1 || ni > 1'000'000) {
            fail(path + ".n[" + std::to_string(i) + "]",
                 "sample size out of range");
        }
        n.push_back(static_cast<std::uint32_t>(ni));
    }

    const json& js = require_key(v, "sigma", path);
    if (!js.is_array()) {
        fail(path + ".sigma", "must be an array of scales");
    }
    std::vector<double> sigma;
    for (std::size_t i = 0; i < js.size(); ++i) {
        sigma.push_back(
            as_double(js[i], path + ".sigma[" + std::to_string(i) + "]"));
    }

    std::vector<double> mu(n.size(), 0.0);
    if (v.contains("mu")) {
        const json& jm = v["mu"];
        if (!jm.is_array() || jm.size() != n.size()) {
            fail(path + ".mu", "must be an array matching n in length");
        }
        for (std::size_t i = 0; i < jm.size(); ++i) {
            mu[i] = as_double(jm[i], path + ".mu[" + std::to_string(i) + "]");
        }
    }

    const double p = as_double(require_key(v, "p", path), path + ".p");

    std::uint64_t reps = default_reps;
    if (v.contains("replications")) {
        reps = as_u64(v["replications"], path + ".replications");
    }
    if (env_reps) {
        reps = *env_reps;
    }

    std::uint64_t seed = derived_seed;
    if (v.contains("seed")) {
        seed = as_u64(v["seed"], path + ".seed");
    }
    if (env_seed) {
        seed = *env_seed;
    }

    try {
        return Scenario(std::move(n), std::move(mu), std::move(sigma),
                        LinexShape(p), reps, seed);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

void check_compatibility(const Scenario& sc, const EstimatorPair& pair,
                         const std::string& scenario_path,
                         const std::string& pair_path) {
    for (EstimatorId id : {pair.candidate, pair.baseline}) {
        if (uses_residual_stats(id)) {
            for (std::size_t i = 0; i < sc.k(); ++i) {
                if (sc.n()[i] < 2) {
                    fail(pair_path, std::string(to_string(id)) +
                                        " requires every sample size >= 2, "
                                        "but " +
                                        scenario_path + ".n[" +
                                        std::to_string(i) + "] is 1");
                }
            }
        } else if (!sc.all_zero_location()) {
            fail(pair_path, std::string(to_string(id)) +
                                " assumes zero locations, but " +
                                scenario_path + " has a nonzero mu");
        }
    }
}

TableRow make_row(const Scenario& sc,
                  const std::vector<EstimatorPair>& pairs,
                  unsigned threads) {
    // estimators deduplicated so every pair shares one set of samples
    std::vector<EstimatorId> ids;
    auto index_of = [&](EstimatorId id) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] == id) {
                return i;
            }
        }
        ids.push_back(id);
        return ids.size() - 1;
    };
    std::vector<std::pair<std::size_t, std::size_t>> indices;
    indices.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const std::size_t c = index_of(pair.candidate);
        const std::size_t b = index_of(pair.baseline);
        indices.emplace_back(c, b);
    }

    const JointRisk joint = estimate_risks(ids, sc, threads);

    TableRow row;
    row.n = sc.n();
    row.sigma = sc.sigma();
    row.p = sc.shape().p();
    row.replications = sc.replications();
    row.degenerate_count = joint.estimates().front().degenerate_count;
    for (const auto& est : joint.estimates()) {
        row.overflow_count += est.overflow_count;
    }
    row.cells.reserve(pairs.size());
    for (const auto& [c, b] : indices) {
        row.cells.push_back(prri_with_se(joint, c, b));
    }
    return row;
}

}  // namespace

std::optional<OutputFormat> format_from_string(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "md" || name == "markdown") {
        return OutputFormat::Markdown;
    }
    return std::nullopt;
}

std::string pair_name(const EstimatorPair& pair) {
    return std::string(to_string(pair.candidate)) + "_vs_" +
           std::string(to_string(pair.baseline));
}

std::uint64_t TableResult::total_degenerate() const noexcept {
    std::uint64_t total = 0;
    for (const auto& row : rows) {
        total += row.degenerate_count;
    }
    return total;
}

std::uint64_t TableResult::total_overflow() const noexcept {
    std::uint64_t total = 0;
    for (const auto& row : rows) {
        total += row.overflow_count;
    }
    return total;
}

bool TableResult::degenerate_budget_exceeded(double fraction) const noexcept {
    for (const auto& row : rows) {
        if (static_cast<double>(row.degenerate_count) >
            fraction * static_cast<double>(row.replications)) {
            return true;
        }
    }
    return false;
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t limit =
            std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigParseError("line " + std::to_string(line) + ", column " +
                               std::to_string(column) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigParseError("top level must be a JSON object");
    }
    reject_unknown_keys(doc,
                        {"seed", "replications", "output_format",
                         "output_path", "estimator_pairs", "scenarios"},
                        "");

    ExperimentConfig config;

    std::uint64_t top_reps = kDefaultReplications;
    if (doc.contains("replications")) {
        top_reps = as_u64(doc["replications"], "replications");
        if (top_reps < 1) {
            fail("replications", "must be >= 1");
        }
    }
    std::uint64_t top_seed = kDefaultSeed;
    if (doc.contains("seed")) {
        top_seed = as_u64(doc["seed"], "seed");
    }
    if (doc.contains("output_format")) {
        const std::string name =
            as_string(doc["output_format"], "output_format");
        const auto fmt = format_from_string(name);
        if (!fmt) {
            fail("output_format", "expected 'csv' or 'markdown', got '" +
                                      name + "'");
        }
        config.format = *fmt;
    }
    if (doc.contains("output_path")) {
        config.output_path = as_string(doc["output_path"], "output_path");
    }

    const auto env_seed = env_u64("ORDEXP_SEED");
    const auto env_reps = env_u64("ORDEXP_REPS");

    const json& jpairs = require_key(doc, "estimator_pairs", "config");
    if (!jpairs.is_array() || jpairs.empty()) {
        fail("estimator_pairs", "must be a nonempty array");
    }
    for (std::size_t i = 0; i < jpairs.size(); ++i) {
        config.pairs.push_back(parse_pair(
            jpairs[i], "estimator_pairs[" + std::to_string(i) + "]"));
    }

    const json& jscen = require_key(doc, "scenarios", "config");
    if (!jscen.is_array() || jscen.empty()) {
        fail("scenarios", "must be a nonempty array");
    }
    for (std::size_t i = 0; i < jscen.size(); ++i) {
        const std::string path = "scenarios[" + std::to_string(i) + "]";
        config.scenarios.push_back(parse_scenario(
            jscen[i], path, top_reps, derive_seed(top_seed, i), env_seed,
            env_reps));
    }

    for (std::size_t s = 0; s < config.scenarios.size(); ++s) {
        for (std::size_t p = 0; p < config.pairs.size(); ++p) {
            check_compatibility(config.scenarios[s], config.pairs[p],
                                "scenarios[" + std::to_string(s) + "]",
                                "estimator_pairs[" + std::to_string(p) + "]");
        }
    }
    return config;
}

TableResult run_table(int table_id, std::uint64_t replications,
                      std::uint64_t seed, unsigned threads) {
    if (table_id < 1 || table_id > 4) {
        throw std::invalid_argument("table id must be 1, 2, 3 or 4");
    }
    if (replications < 1) {
        throw std::invalid_argument("replication count must be >= 1");
    }
    const bool residual = table_id >= 3;
    const double p = (table_id % 2 == 1) ? 0.5 : -0.5;

    TableResult result;
    if (residual) {
        result.pairs = {
            {EstimatorId::ImprovedBaee, EstimatorId::Baee},
            {EstimatorId::RmleUnknown, EstimatorId::Baee},
            {EstimatorId::ImprovedRmleUnknown, EstimatorId::Baee},
            {EstimatorId::ImprovedBaee, EstimatorId::RmleUnknown},
            {EstimatorId::Baee, EstimatorId::RmleUnknown},
            {EstimatorId::ImprovedRmleUnknown, EstimatorId::RmleUnknown},
        };
    } else {
        result.pairs = {
            {EstimatorId::ImprovedBsee, EstimatorId::Bsee},
            {EstimatorId::RmleKnown, EstimatorId::Bsee},
            {EstimatorId::ImprovedRmleKnown, EstimatorId::Bsee},
            {EstimatorId::ImprovedBsee, EstimatorId::RmleKnown},
            {EstimatorId::Bsee, EstimatorId::RmleKnown},
            {EstimatorId::ImprovedRmleKnown, EstimatorId::RmleKnown},
        };
    }

    std::uint64_t cell = 0;
    for (const auto& [n1, n2] : kGridSampleSizes) {
        for (const auto& [s1, s2] : kGridSigmas) {
            const std::uint64_t cell_seed = derive_seed(
                seed, static_cast<std::uint64_t>(table_id) * 1000 + cell);
            ++cell;
            const Scenario sc = Scenario::zero_location(
                {n1, n2}, {s1, s2}, LinexShape(p), replications, cell_seed);
            result.rows.push_back(make_row(sc, result.pairs, threads));
        }
    }
    return result;
}

TableResult run_config(const ExperimentConfig& config, unsigned threads) {
    TableResult result;
    result.pairs = config.pairs;
    result.rows.reserve(config.scenarios.size());
    for (const auto& sc : config.scenarios) {
        result.rows.push_back(make_row(sc, config.pairs, threads));
    }
    return result;
}

namespace {

std::string render_csv(const TableResult& result) {
    std::size_t max_k = 0;
    for (const auto& row : result.rows) {
        max_k = std::max(max_k, row.n.size());
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < max_k; ++i) {
        out << "n" << (i + 1) << ",";
    }
    for (std::size_t i = 0; i < max_k; ++i) {
        out << "sigma" << (i + 1) << ",";
    }
    out << "pair";
    for (std::size_t i = 0; i < max_k; ++i) {
        out << ",prri_" << (i + 1);
    }
    for (std::size_t i = 0; i < max_k; ++i) {
        out << ",se_" << (i + 1);
    }
    out << "\n";

    for (const auto& row : result.rows) {
        const std::size_t k = row.n.size();
        for (std::size_t p = 0; p < result.pairs.size(); ++p) {
            for (std::size_t i = 0; i < max_k; ++i) {
                if (i < k) {
                    out << row.n[i];
                }
                out << ",";
            }
            for (std::size_t i = 0; i < max_k; ++i) {
                if (i < k) {
                    out << fmt_g(row.sigma[i]);
                }
                out << ",";
            }
            out << pair_name(result.pairs[p]);
            for (std::size_t i = 0; i < max_k; ++i) {
                out << ",";
                if (i < k) {
                    out << fmt_g(row.cells[p].value[i]);
                }
            }
            for (std::size_t i = 0; i < max_k; ++i) {
                out << ",";
                if (i < k) {
                    out << fmt_g(row.cells[p].std_error[i]);
                }
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string tuple_cell(const std::vector<double>& values) {
    std::string s = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            s += ",";
        }
        s += fmt_2f(values[i]);
    }
    s += ")";
    return s;
}

std::string render_markdown(const TableResult& result) {
    std::ostringstream out;
    out << "| (n) | (sigma) |";
    for (const auto& pair : result.pairs) {
        out << " " << pair_name(pair) << " |";
    }
    out << "\n|---|---|";
    for (std::size_t p = 0; p < result.pairs.size(); ++p) {
        out << "---|";
    }
    out << "\n";
    for (const auto& row : result.rows) {
        out << "| (";
        for (std::size_t i = 0; i < row.n.size(); ++i) {
            if (i > 0) {
                out << ",";
            }
            out << row.n[i];
        }
        out << ") | (";
        for (std::size_t i = 0; i < row.sigma.size(); ++i) {
            if (i > 0) {
                out << ",";
            }
            out << fmt_g(row.sigma[i]);
        }
        out << ") |";
        for (const auto& cell : row.cells) {
            out << " " << tuple_cell(cell.value) << " |";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string render(const TableResult& result, OutputFormat format) {
    return format == OutputFormat::Csv ? render_csv(result)
                                       : render_markdown(result);
}

void emit(const TableResult& result, OutputFormat format,
          const std::string& destination) {
    if (result.rows.empty()) {
        throw std::invalid_argument("nothing to emit: no rows");
    }
    const std::string text = render(result, format);
    if (destination.empty() || destination == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream file(destination, std::ios::binary);
    if (!file) {
        throw IoError("cannot open '" + destination + "' for writing");
    }
    file << text;
    file.flush();
    if (!file) {
        throw IoError("failed writing to '" + destination + "'");
    }
}

}  // namespace ordexp
