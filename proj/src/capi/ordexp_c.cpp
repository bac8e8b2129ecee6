#include "ordexp/ordexp.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/estimators.hpp"
#include "core/experiment.hpp"
#include "core/known_location.hpp"
#include "core/loss.hpp"
#include "core/sampling.hpp"
#include "core/unknown_location.hpp"

struct ordexp_known_stats {
    ordexp::KnownLocStats impl;
};

struct ordexp_unknown_stats {
    ordexp::UnknownLocStats impl;
};

struct ordexp_scenario {
    ordexp::Scenario impl;
};

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& what) { t_last_error = what; }

ordexp_status fail(ordexp_status status, const std::string& what) {
    set_error(what);
    return status;
}

/* Maps the core exception hierarchy onto status codes. */
ordexp_status from_current_exception() {
    try {
        throw;
    } catch (const ordexp::DegenerateStatisticError& e) {
        return fail(ORDEXP_ERR_DEGENERATE, e.what());
    } catch (const ordexp::IncompatibleEstimatorError& e) {
        return fail(ORDEXP_ERR_INCOMPATIBLE, e.what());
    } catch (const ordexp::ConfigParseError& e) {
        return fail(ORDEXP_ERR_PARSE, e.what());
    } catch (const ordexp::IoError& e) {
        return fail(ORDEXP_ERR_IO, e.what());
    } catch (const std::domain_error& e) {
        return fail(ORDEXP_ERR_DOMAIN, e.what());
    } catch (const std::out_of_range& e) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ORDEXP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ORDEXP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ORDEXP_ERR_INTERNAL, "unknown error");
    }
}

template <typename Fn>
ordexp_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (...) {
        return from_current_exception();
    }
}

ordexp_status require(bool condition, const char* what) {
    if (!condition) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, what);
    }
    return ORDEXP_OK;
}

std::optional<ordexp::EstimatorId> map_estimator(ordexp_estimator id) {
    switch (id) {
        case ORDEXP_EST_BSEE:
            return ordexp::EstimatorId::Bsee;
        case ORDEXP_EST_IMPROVED_BSEE:
            return ordexp::EstimatorId::ImprovedBsee;
        case ORDEXP_EST_RMLE_KNOWN:
            return ordexp::EstimatorId::RmleKnown;
        case ORDEXP_EST_IMPROVED_RMLE_KNOWN:
            return ordexp::EstimatorId::ImprovedRmleKnown;
        case ORDEXP_EST_BAEE:
            return ordexp::EstimatorId::Baee;
        case ORDEXP_EST_IMPROVED_BAEE:
            return ordexp::EstimatorId::ImprovedBaee;
        case ORDEXP_EST_RMLE_UNKNOWN:
            return ordexp::EstimatorId::RmleUnknown;
        case ORDEXP_EST_IMPROVED_RMLE_UNKNOWN:
            return ordexp::EstimatorId::ImprovedRmleUnknown;
    }
    return std::nullopt;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<std::vector<double>> gather_samples(size_t k,
                                                const size_t* lengths,
                                                const double* const* samples) {
    std::vector<std::vector<double>> data(k);
    for (size_t i = 0; i < k; ++i) {
        if (samples[i] == nullptr) {
            throw std::invalid_argument("samples[" + std::to_string(i) +
                                        "] is NULL");
        }
        data[i].assign(samples[i], samples[i] + lengths[i]);
    }
    return data;
}

}  // namespace

extern "C" {

const char* ordexp_version(void) { return ORDEXP_VERSION_STRING; }

const char* ordexp_status_name(ordexp_status status) {
    switch (status) {
        case ORDEXP_OK:
            return "ok";
        case ORDEXP_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case ORDEXP_ERR_DOMAIN:
            return "domain error";
        case ORDEXP_ERR_DEGENERATE:
            return "degenerate statistic";
        case ORDEXP_ERR_INCOMPATIBLE:
            return "incompatible estimator";
        case ORDEXP_ERR_PARSE:
            return "configuration error";
        case ORDEXP_ERR_IO:
            return "i/o error";
        case ORDEXP_ERR_INFINITE:
            return "infinite result";
        case ORDEXP_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* ordexp_last_error(void) { return t_last_error.c_str(); }

void ordexp_string_free(char* text) { delete[] text; }

ordexp_status ordexp_linex_loss(double p, double estimate, double truth,
                                double* loss, int* saturated) {
    if (auto st = require(loss != nullptr, "loss output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        bool sat = false;
        *loss = ordexp::linex_loss(ordexp::LinexShape(p), estimate, truth,
                                   &sat);
        if (saturated != nullptr) {
            *saturated = sat ? 1 : 0;
        }
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_bsee_coefficient(uint32_t n_i, double p, double* out) {
    if (auto st = require(out != nullptr, "output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        *out = ordexp::bsee_coefficient(n_i, ordexp::LinexShape(p));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_baee_coefficient(uint32_t n_i, double p, double* out) {
    if (auto st = require(out != nullptr, "output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        *out = ordexp::baee_coefficient(n_i, ordexp::LinexShape(p));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_truncation_coefficient_known(uint64_t n_total, double p,
                                                  double* out) {
    if (auto st = require(out != nullptr, "output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        *out = ordexp::truncation_coefficient_known(n_total,
                                                    ordexp::LinexShape(p));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_truncation_coefficient_unknown(uint64_t n_total,
                                                    uint32_t k, double p,
                                                    double* out) {
    if (auto st = require(out != nullptr, "output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        *out = ordexp::truncation_coefficient_unknown(n_total, k,
                                                      ordexp::LinexShape(p));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_known_stats_create(size_t k, const uint32_t* n,
                                        const double* s,
                                        ordexp_known_stats** out) {
    if (auto st = require(out != nullptr && n != nullptr && s != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        *out = new ordexp_known_stats{ordexp::KnownLocStats(
            std::vector<uint32_t>(n, n + k), std::vector<double>(s, s + k))};
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_known_stats_from_samples(size_t k, const size_t* lengths,
                                              const double* const* samples,
                                              ordexp_known_stats** out) {
    if (auto st = require(
            out != nullptr && lengths != nullptr && samples != nullptr,
            "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        *out = new ordexp_known_stats{ordexp::KnownLocStats::from_samples(
            gather_samples(k, lengths, samples))};
        return ORDEXP_OK;
    });
}

void ordexp_known_stats_destroy(ordexp_known_stats* stats) { delete stats; }

ordexp_status ordexp_unknown_stats_create(size_t k, const uint32_t* n,
                                          const double* xmin, const double* t,
                                          ordexp_unknown_stats** out) {
    if (auto st = require(out != nullptr && n != nullptr && xmin != nullptr &&
                              t != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        *out = new ordexp_unknown_stats{ordexp::UnknownLocStats(
            std::vector<uint32_t>(n, n + k), std::vector<double>(xmin, xmin + k),
            std::vector<double>(t, t + k))};
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_unknown_stats_from_samples(size_t k,
                                                const size_t* lengths,
                                                const double* const* samples,
                                                ordexp_unknown_stats** out) {
    if (auto st = require(
            out != nullptr && lengths != nullptr && samples != nullptr,
            "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        *out = new ordexp_unknown_stats{ordexp::UnknownLocStats::from_samples(
            gather_samples(k, lengths, samples))};
        return ORDEXP_OK;
    });
}

void ordexp_unknown_stats_destroy(ordexp_unknown_stats* stats) {
    delete stats;
}

ordexp_status ordexp_estimate_known(const ordexp_known_stats* stats,
                                    ordexp_estimator estimator, double p,
                                    double* out) {
    if (auto st = require(stats != nullptr && out != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    const auto id = map_estimator(estimator);
    if (!id) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, "unknown estimator id");
    }
    return guarded([&] {
        const std::vector<double> values =
            ordexp::evaluate_known(*id, stats->impl, ordexp::LinexShape(p));
        std::memcpy(out, values.data(), values.size() * sizeof(double));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_estimate_unknown(const ordexp_unknown_stats* stats,
                                      ordexp_estimator estimator, double p,
                                      double* out) {
    if (auto st = require(stats != nullptr && out != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    const auto id = map_estimator(estimator);
    if (!id) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, "unknown estimator id");
    }
    return guarded([&] {
        const std::vector<double> values =
            ordexp::evaluate_unknown(*id, stats->impl, ordexp::LinexShape(p));
        std::memcpy(out, values.data(), values.size() * sizeof(double));
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_scenario_create(size_t k, const uint32_t* n,
                                     const double* mu, const double* sigma,
                                     double p, uint64_t replications,
                                     uint64_t seed, ordexp_scenario** out) {
    if (auto st = require(out != nullptr && n != nullptr && sigma != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        std::vector<double> mus =
            mu == nullptr ? std::vector<double>(k, 0.0)
                          : std::vector<double>(mu, mu + k);
        *out = new ordexp_scenario{ordexp::Scenario(
            std::vector<uint32_t>(n, n + k), std::move(mus),
            std::vector<double>(sigma, sigma + k), ordexp::LinexShape(p),
            replications, seed)};
        return ORDEXP_OK;
    });
}

void ordexp_scenario_destroy(ordexp_scenario* scenario) { delete scenario; }

ordexp_status ordexp_estimate_risk(const ordexp_scenario* scenario,
                                   ordexp_estimator estimator,
                                   uint32_t threads, double* mean_loss,
                                   double* std_error,
                                   uint64_t* overflow_count,
                                   uint64_t* degenerate_count) {
    if (auto st = require(scenario != nullptr && mean_loss != nullptr &&
                              std_error != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    const auto id = map_estimator(estimator);
    if (!id) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, "unknown estimator id");
    }
    return guarded([&] {
        const ordexp::RiskEstimate risk =
            ordexp::estimate_risk(*id, scenario->impl, threads);
        std::memcpy(mean_loss, risk.mean_loss.data(),
                    risk.mean_loss.size() * sizeof(double));
        std::memcpy(std_error, risk.std_error.data(),
                    risk.std_error.size() * sizeof(double));
        if (overflow_count != nullptr) {
            *overflow_count = risk.overflow_count;
        }
        if (degenerate_count != nullptr) {
            *degenerate_count = risk.degenerate_count;
        }
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_prri(size_t k, const double* risk_new,
                          const double* risk_base, double* out) {
    if (auto st = require(risk_new != nullptr && risk_base != nullptr &&
                              out != nullptr && k > 0,
                          "NULL pointer argument or empty input")) {
        return st;
    }
    return guarded([&] {
        for (size_t c = 0; c < k; ++c) {
            if (!(risk_base[c] > 0.0)) {
                throw std::domain_error(
                    "PRRI undefined: base risk is zero at component " +
                    std::to_string(c));
            }
            out[c] = 100.0 * (risk_base[c] - risk_new[c]) / risk_base[c];
        }
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_closed_form_bsee_risk(uint32_t n, double p, double c,
                                           double* out) {
    if (auto st = require(out != nullptr, "output pointer is NULL")) {
        return st;
    }
    return guarded([&] {
        *out = ordexp::closed_form_bsee_risk(n, ordexp::LinexShape(p), c);
        if (std::isinf(*out)) {
            return fail(ORDEXP_ERR_INFINITE,
                        "risk is infinite: p*c >= 1 lies outside the moment "
                        "generating function's domain");
        }
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_run_table(uint32_t table_id, uint64_t replications,
                               uint64_t seed, ordexp_format format,
                               uint32_t threads, char** out_text,
                               uint64_t* degenerate_count,
                               uint64_t* overflow_count) {
    if (auto st = require(out_text != nullptr, "output pointer is NULL")) {
        return st;
    }
    if (format != ORDEXP_FORMAT_CSV && format != ORDEXP_FORMAT_MARKDOWN) {
        return fail(ORDEXP_ERR_INVALID_ARGUMENT, "unknown output format");
    }
    return guarded([&] {
        const ordexp::TableResult result = ordexp::run_table(
            static_cast<int>(table_id), replications, seed, threads);
        const ordexp::OutputFormat fmt = format == ORDEXP_FORMAT_CSV
                                             ? ordexp::OutputFormat::Csv
                                             : ordexp::OutputFormat::Markdown;
        *out_text = dup_string(ordexp::render(result, fmt));
        if (degenerate_count != nullptr) {
            *degenerate_count = result.total_degenerate();
        }
        if (overflow_count != nullptr) {
            *overflow_count = result.total_overflow();
        }
        return ORDEXP_OK;
    });
}

ordexp_status ordexp_run_config(const char* config_text, uint32_t threads,
                                char** out_text, char** out_path,
                                uint64_t* degenerate_count,
                                uint64_t* overflow_count,
                                int* degenerate_budget_exceeded) {
    if (auto st = require(config_text != nullptr && out_text != nullptr,
                          "NULL pointer argument")) {
        return st;
    }
    return guarded([&] {
        const ordexp::ExperimentConfig config =
            ordexp::parse_config(config_text);
        const ordexp::TableResult result = ordexp::run_config(config, threads);
        *out_text = dup_string(ordexp::render(result, config.format));
        if (out_path != nullptr) {
            *out_path = (config.output_path && *config.output_path != "-")
                            ? dup_string(*config.output_path)
                            : nullptr;
        }
        if (degenerate_count != nullptr) {
            *degenerate_count = result.total_degenerate();
        }
        if (overflow_count != nullptr) {
            *overflow_count = result.total_overflow();
        }
        if (degenerate_budget_exceeded != nullptr) {
            *degenerate_budget_exceeded =
                result.degenerate_budget_exceeded() ? 1 : 0;
        }
        return ORDEXP_OK;
    });
}

}  // extern "C"
