#include "core/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "core/errors.hpp"
#include "core/kernels.hpp"

namespace ordexp {

namespace {

// Replications are accumulated in fixed-size chunks whose partial sums
// are reduced in chunk order, so totals do not depend on the thread
// count.
constexpr std::uint64_t kChunkSize = 1024;
constexpr int kMaxRedraws = 100;

std::size_t pair_index(std::size_t e, std::size_t f, std::size_t n) {
    // packed upper triangle, e <= f
    return e * n - e * (e - 1) / 2 + (f - e);
}

struct ChunkAccum {
    std::vector<double> sum;    // estimator * component
    std::vector<double> cross;  // pair * component
    std::vector<std::uint64_t> overflow;
    std::uint64_t degenerate = 0;
};

struct Workspace {
    std::vector<double> draws;
    std::vector<double> stat_sum;
    std::vector<double> stat_res;
    std::vector<double> estimates;
    std::vector<double> losses;
    kernels::PavaScratch pava;
};

struct EngineSetup {
    bool need_known = false;
    bool need_unknown = false;
    std::vector<double> coef_sum;  // BSEE multipliers per component
    std::vector<double> coef_res;  // BAEE multipliers per component
    double trunc_known = 0.0;
    double trunc_unknown = 0.0;
};

EngineSetup make_setup(std::span<const EstimatorId> ids,
                       const Scenario& sc) {
    EngineSetup setup;
    for (EstimatorId id : ids) {
        if (uses_residual_stats(id)) {
            setup.need_unknown = true;
        } else {
            setup.need_known = true;
        }
    }
    if (setup.need_known) {
        if (!sc.all_zero_location()) {
            throw IncompatibleEstimatorError(
                "sum-statistic estimators assume zero locations; scenario "
                "has a nonzero location");
        }
        setup.coef_sum.resize(sc.k());
        for (std::size_t i = 0; i < sc.k(); ++i) {
            setup.coef_sum[i] = bsee_coefficient(sc.n()[i], sc.shape());
        }
        setup.trunc_known =
            truncation_coefficient_known(sc.total_n(), sc.shape());
    }
    if (setup.need_unknown) {
        setup.coef_res.resize(sc.k());
        for (std::size_t i = 0; i < sc.k(); ++i) {
            if (sc.n()[i] < 2) {
                throw IncompatibleEstimatorError(
                    "residual-sum estimators need every sample size >= 2");
            }
            setup.coef_res[i] = baee_coefficient(sc.n()[i], sc.shape());
        }
        setup.trunc_unknown = truncation_coefficient_unknown(
            sc.total_n(), static_cast<std::uint32_t>(sc.k()), sc.shape());
    }
    return setup;
}

// Draws one replication into the workspace, redrawing (and counting) the
// probability-zero degenerate outcomes until the needed statistics are
// proper.
void draw_replication(const Scenario& sc, const EngineSetup& setup,
                      std::uint64_t r, ChunkAccum& acc, Workspace& ws) {
    SubStream stream(sc.seed(), r);
    const std::size_t k = sc.k();
    for (int attempt = 0;; ++attempt) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double mu = sc.mu()[i];
            const double sigma = sc.sigma()[i];
            for (std::uint32_t j = 0; j < sc.n()[i]; ++j) {
                ws.draws[off++] = mu + sigma * stream.next_exponential();
            }
        }
        bool ok = true;
        std::size_t o = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const std::span<const double> pop{ws.draws.data() + o,
                                              sc.n()[i]};
            o += sc.n()[i];
            if (setup.need_known) {
                ws.stat_sum[i] = kernels::sum_of(pop);
                if (!(ws.stat_sum[i] > 0.0)) {
                    ok = false;
                }
            }
            if (setup.need_unknown) {
                ws.stat_res[i] = kernels::min_residual_of(pop).t;
                if (!(ws.stat_res[i] > 0.0)) {
                    ok = false;
                }
            }
        }
        if (ok) {
            return;
        }
        ++acc.degenerate;
        if (attempt >= kMaxRedraws) {
            throw std::runtime_error(
                "replication " + std::to_string(r) +
                " still degenerate after " + std::to_string(kMaxRedraws) +
                " redraws");
        }
    }
}

void evaluate_estimators(std::span<const EstimatorId> ids, const Scenario& sc,
                         const EngineSetup& setup, Workspace& ws) {
    const std::size_t k = sc.k();
    for (std::size_t e = 0; e < ids.size(); ++e) {
        const std::span<double> out{ws.estimates.data() + e * k, k};
        switch (ids[e]) {
            case EstimatorId::Bsee:
                kernels::best_equivariant(ws.stat_sum, setup.coef_sum, out);
                break;
            case EstimatorId::ImprovedBsee:
                kernels::improved_equivariant(ws.stat_sum, setup.coef_sum,
                                              setup.trunc_known, out);
                break;
            case EstimatorId::RmleKnown:
                kernels::pooled_isotonic_fit(ws.stat_sum, sc.n(), out,
                                             ws.pava);
                break;
            case EstimatorId::ImprovedRmleKnown:
                kernels::improved_isotonic(ws.stat_sum, sc.n(),
                                           setup.trunc_known, out, ws.pava);
                break;
            case EstimatorId::Baee:
                kernels::best_equivariant(ws.stat_res, setup.coef_res, out);
                break;
            case EstimatorId::ImprovedBaee:
                kernels::improved_equivariant(ws.stat_res, setup.coef_res,
                                              setup.trunc_unknown, out);
                break;
            case EstimatorId::RmleUnknown:
                kernels::pooled_isotonic_fit(ws.stat_res, sc.n(), out,
                                             ws.pava);
                break;
            case EstimatorId::ImprovedRmleUnknown:
                kernels::improved_isotonic(ws.stat_res, sc.n(),
                                           setup.trunc_unknown, out, ws.pava);
                break;
        }
    }
}

void accumulate_losses(std::size_t n_estimators, const Scenario& sc,
                       ChunkAccum& acc, Workspace& ws) {
    const std::size_t k = sc.k();
    const double p = sc.shape().p();
    for (std::size_t e = 0; e < n_estimators; ++e) {
        for (std::size_t c = 0; c < k; ++c) {
            bool sat = false;
            const double loss = detail::linex_loss_unchecked(
                p, ws.estimates[e * k + c], sc.sigma()[c], sat);
            if (sat) {
                ++acc.overflow[e];
            }
            ws.losses[e * k + c] = loss;
            acc.sum[e * k + c] += loss;
        }
    }
    for (std::size_t e = 0; e < n_estimators; ++e) {
        for (std::size_t f = e; f < n_estimators; ++f) {
            const std::size_t pi = pair_index(e, f, n_estimators);
            for (std::size_t c = 0; c < k; ++c) {
                acc.cross[pi * k + c] +=
                    ws.losses[e * k + c] * ws.losses[f * k + c];
            }
        }
    }
}

using PerReplication =
    std::function<void(std::uint64_t, ChunkAccum&, Workspace&)>;

void run_parallel(const Scenario& sc, std::size_t n_estimators,
                  unsigned threads, std::vector<ChunkAccum>& chunks,
                  const PerReplication& per_rep) {
    const std::uint64_t n_reps = sc.replications();
    const std::size_t k = sc.k();
    const std::size_t n_pairs = n_estimators * (n_estimators + 1) / 2;
    const std::uint64_t n_chunks = (n_reps + kChunkSize - 1) / kChunkSize;
    chunks.resize(n_chunks);
    for (auto& ch : chunks) {
        ch.sum.assign(n_estimators * k, 0.0);
        ch.cross.assign(n_pairs * k, 0.0);
        ch.overflow.assign(n_estimators, 0);
        ch.degenerate = 0;
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&] {
        Workspace ws;
        ws.draws.resize(sc.total_n());
        ws.stat_sum.resize(k);
        ws.stat_res.resize(k);
        ws.estimates.resize(n_estimators * k);
        ws.losses.resize(n_estimators * k);
        try {
            for (;;) {
                if (failed.load(std::memory_order_relaxed)) {
                    return;
                }
                const std::uint64_t c = next.fetch_add(1);
                if (c >= n_chunks) {
                    return;
                }
                const std::uint64_t r0 = c * kChunkSize;
                const std::uint64_t r1 =
                    std::min(n_reps, r0 + kChunkSize);
                for (std::uint64_t r = r0; r < r1; ++r) {
                    per_rep(r, chunks[c], ws);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> guard(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    };

    unsigned n_threads =
        threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                     : threads;
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, n_chunks));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

JointRisk package(const Scenario& sc, std::size_t n_estimators,
                  const std::vector<ChunkAccum>& chunks) {
    const std::size_t k = sc.k();
    const std::uint64_t n_reps = sc.replications();
    const std::size_t n_pairs = n_estimators * (n_estimators + 1) / 2;

    std::vector<double> sum(n_estimators * k, 0.0);
    std::vector<double> cross(n_pairs * k, 0.0);
    std::vector<std::uint64_t> overflow(n_estimators, 0);
    std::uint64_t degenerate = 0;
    for (const auto& ch : chunks) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += ch.sum[i];
        }
        for (std::size_t i = 0; i < cross.size(); ++i) {
            cross[i] += ch.cross[i];
        }
        for (std::size_t e = 0; e < n_estimators; ++e) {
            overflow[e] += ch.overflow[e];
        }
        degenerate += ch.degenerate;
    }

    const double n = static_cast<double>(n_reps);
    std::vector<RiskEstimate> estimates(n_estimators);
    for (std::size_t e = 0; e < n_estimators; ++e) {
        auto& est = estimates[e];
        est.mean_loss.resize(k);
        est.std_error.resize(k);
        est.replications = n_reps;
        est.overflow_count = overflow[e];
        est.degenerate_count = degenerate;
        const std::size_t diag = pair_index(e, e, n_estimators);
        for (std::size_t c = 0; c < k; ++c) {
            const double mean = sum[e * k + c] / n;
            est.mean_loss[c] = mean;
            double var = 0.0;
            if (n_reps > 1) {
                var = (cross[diag * k + c] - n * mean * mean) / (n - 1.0);
                var = std::max(0.0, var);
            }
            est.std_error[c] = std::sqrt(var / n);
        }
    }

    std::vector<double> covariance(n_pairs * k, 0.0);
    if (n_reps > 1) {
        for (std::size_t e = 0; e < n_estimators; ++e) {
            for (std::size_t f = e; f < n_estimators; ++f) {
                const std::size_t pi = pair_index(e, f, n_estimators);
                for (std::size_t c = 0; c < k; ++c) {
                    covariance[pi * k + c] =
                        (cross[pi * k + c] -
                         n * estimates[e].mean_loss[c] *
                             estimates[f].mean_loss[c]) /
                        (n - 1.0);
                }
            }
        }
    }
    return JointRisk(std::move(estimates), std::move(covariance), k);
}

}  // namespace

Scenario::Scenario(std::vector<std::uint32_t> n, std::vector<double> mu,
                   std::vector<double> sigma, LinexShape shape,
                   std::uint64_t replications, std::uint64_t seed)
    : n_(std::move(n)),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      shape_(shape),
      replications_(replications),
      seed_(seed),
      total_n_(0) {
    if (n_.size() < 2) {
        throw std::invalid_argument("scenario needs at least two populations");
    }
    if (mu_.size() != n_.size() || sigma_.size() != n_.size()) {
        throw std::invalid_argument(
            "scenario fields n, mu, sigma differ in length");
    }
    for (std::size_t i = 0; i < n_.size(); ++i) {
        if (n_[i] < 1) {
            throw std::invalid_argument("population " + std::to_string(i) +
                                        " has sample size zero");
        }
        if (!std::isfinite(mu_[i])) {
            throw std::invalid_argument("location " + std::to_string(i) +
                                        " is not finite");
        }
        if (!std::isfinite(sigma_[i]) || sigma_[i] <= 0.0) {
            throw std::invalid_argument("scale " + std::to_string(i) +
                                        " must be positive and finite");
        }
        if (i > 0 && sigma_[i] < sigma_[i - 1]) {
            throw std::invalid_argument(
                "scales must be nondecreasing (sigma[" + std::to_string(i) +
                "] < sigma[" + std::to_string(i - 1) + "])");
        }
        total_n_ += n_[i];
    }
    if (replications_ < 1) {
        throw std::invalid_argument("replication count must be >= 1");
    }
}

Scenario Scenario::zero_location(std::vector<std::uint32_t> n,
                                 std::vector<double> sigma, LinexShape shape,
                                 std::uint64_t replications,
                                 std::uint64_t seed) {
    std::vector<double> mu(n.size(), 0.0);
    return Scenario(std::move(n), std::move(mu), std::move(sigma), shape,
                    replications, seed);
}

bool Scenario::all_zero_location() const noexcept {
    for (double m : mu_) {
        if (m != 0.0) {
            return false;
        }
    }
    return true;
}

JointRisk::JointRisk(std::vector<RiskEstimate> estimates,
                     std::vector<double> covariance, std::size_t components)
    : estimates_(std::move(estimates)),
      covariance_(std::move(covariance)),
      components_(components) {}

double JointRisk::loss_covariance(std::size_t e, std::size_t f,
                                  std::size_t component) const {
    if (e >= estimates_.size() || f >= estimates_.size() ||
        component >= components_) {
        throw std::out_of_range("joint risk index out of range");
    }
    const std::size_t lo = std::min(e, f);
    const std::size_t hi = std::max(e, f);
    return covariance_[pair_index(lo, hi, estimates_.size()) * components_ +
                       component];
}

std::vector<double> sample_population(double mu, double sigma,
                                      std::uint32_t n, SubStream& stream) {
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("location must be finite");
    }
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        throw std::invalid_argument("scale must be positive and finite");
    }
    if (n < 1) {
        throw std::invalid_argument("sample size must be >= 1");
    }
    std::vector<double> out(n);
    for (auto& x : out) {
        x = mu + sigma * stream.next_exponential();
    }
    return out;
}

JointRisk estimate_risks(std::span<const EstimatorId> ids,
                         const Scenario& scenario, unsigned threads) {
    if (ids.empty()) {
        throw std::invalid_argument("need at least one estimator");
    }
    const EngineSetup setup = make_setup(ids, scenario);
    std::vector<ChunkAccum> chunks;
    run_parallel(scenario, ids.size(), threads, chunks,
                 [&](std::uint64_t r, ChunkAccum& acc, Workspace& ws) {
                     draw_replication(scenario, setup, r, acc, ws);
                     evaluate_estimators(ids, scenario, setup, ws);
                     accumulate_losses(ids.size(), scenario, acc, ws);
                 });
    return package(scenario, ids.size(), chunks);
}

RiskEstimate estimate_risk(EstimatorId id, const Scenario& scenario,
                           unsigned threads) {
    const EstimatorId ids[] = {id};
    return estimate_risks(ids, scenario, threads).estimates()[0];
}

RiskEstimate estimate_risk_custom(const CustomEstimator& estimator,
                                  const Scenario& scenario,
                                  unsigned threads) {
    if (!estimator) {
        throw std::invalid_argument("estimator function is empty");
    }
    const std::size_t k = scenario.k();
    // custom estimators see the raw draws; only require them usable as
    // both sum and residual statistics so redraw semantics match the
    // built-in families
    EngineSetup setup;
    setup.need_known = scenario.all_zero_location();
    setup.need_unknown = true;
    for (std::uint32_t ni : scenario.n()) {
        if (ni < 2) {
            setup.need_unknown = false;
        }
    }
    std::vector<ChunkAccum> chunks;
    run_parallel(
        scenario, 1, threads,
        chunks, [&](std::uint64_t r, ChunkAccum& acc, Workspace& ws) {
            draw_replication(scenario, setup, r, acc, ws);
            std::vector<std::vector<double>> samples(k);
            std::size_t off = 0;
            for (std::size_t i = 0; i < k; ++i) {
                samples[i].assign(ws.draws.begin() + off,
                                  ws.draws.begin() + off + scenario.n()[i]);
                off += scenario.n()[i];
            }
            const std::vector<double> est = estimator(samples, scenario);
            if (est.size() != k) {
                throw std::invalid_argument(
                    "custom estimator returned wrong component count");
            }
            for (std::size_t c = 0; c < k; ++c) {
                bool sat = false;
                const double loss = linex_loss(scenario.shape(), est[c],
                                               scenario.sigma()[c], &sat);
                if (sat) {
                    ++acc.overflow[0];
                }
                ws.losses[c] = loss;
                acc.sum[c] += loss;
                acc.cross[c] += loss * loss;
            }
        });
    return package(scenario, 1, chunks).estimates()[0];
}

double closed_form_bsee_risk(std::uint32_t n, LinexShape shape, double c) {
    if (n < 1) {
        throw std::invalid_argument("gamma shape must be >= 1");
    }
    if (!std::isfinite(c) || c <= 0.0) {
        throw std::invalid_argument("coefficient must be positive and finite");
    }
    const double p = shape.p();
    const double pc = p * c;
    if (pc >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(-p) * std::pow(1.0 - pc, -static_cast<double>(n)) -
           pc * static_cast<double>(n) + p - 1.0;
}

std::vector<double> prri(const RiskEstimate& risk_new,
                         const RiskEstimate& risk_base) {
    if (risk_new.mean_loss.size() != risk_base.mean_loss.size()) {
        throw std::invalid_argument("PRRI inputs have different dimensions");
    }
    if (risk_new.replications != risk_base.replications) {
        throw std::invalid_argument(
            "PRRI inputs come from different replication structures");
    }
    std::vector<double> out(risk_base.mean_loss.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double base = risk_base.mean_loss[c];
        if (!(base > 0.0)) {
            throw std::domain_error(
                "PRRI undefined: base risk is zero at component " +
                std::to_string(c));
        }
        out[c] = 100.0 * (base - risk_new.mean_loss[c]) / base;
    }
    return out;
}

PrriEstimate prri_with_se(const JointRisk& joint, std::size_t new_index,
                          std::size_t base_index) {
    const auto& ests = joint.estimates();
    if (new_index >= ests.size() || base_index >= ests.size()) {
        throw std::out_of_range("estimator index out of range");
    }
    const auto& a = ests[new_index];
    const auto& b = ests[base_index];
    const double n = static_cast<double>(a.replications);
    PrriEstimate out;
    out.value = prri(a, b);
    out.std_error.resize(joint.components());
    for (std::size_t c = 0; c < joint.components(); ++c) {
        const double mean_a = a.mean_loss[c];
        const double mean_b = b.mean_loss[c];
        const double var_a = a.std_error[c] * a.std_error[c] * n;
        const double var_b = b.std_error[c] * b.std_error[c] * n;
        const double cov = joint.loss_covariance(new_index, base_index, c);
        const double b2 = mean_b * mean_b;
        double var_ratio = var_a / b2 +
                           mean_a * mean_a * var_b / (b2 * b2) -
                           2.0 * mean_a * cov / (b2 * mean_b);
        var_ratio = std::max(0.0, var_ratio / n);
        out.std_error[c] = 100.0 * std::sqrt(var_ratio);
    }
    return out;
}

}  // namespace ordexp
