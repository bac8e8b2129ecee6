// Acceptance suite: drives the CLI end to end for the table grids and the
// core library for the numerical checks. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "core/estimators.hpp"
#include "core/experiment.hpp"
#include "core/known_location.hpp"
#include "core/loss.hpp"
#include "core/sampling.hpp"
#include "core/unknown_location.hpp"
#include "support/oracles.hpp"

#ifndef ORDEXP_CLI_PATH
#error "ORDEXP_CLI_PATH must point at the built binary"
#endif

namespace {

using ordexp::EstimatorId;
using ordexp::LinexShape;
using ordexp::Scenario;

int g_failures = 0;
std::ostringstream g_detail;

void note(const std::string& line) { g_detail << "    " << line << "\n"; }

void report(int criterion, const char* label, bool pass) {
    std::printf("criterion %d (%s): %s\n", criterion, label,
                pass ? "PASS" : "FAIL");
    const std::string detail = g_detail.str();
    if (!detail.empty()) {
        std::fputs(detail.c_str(), stdout);
    }
    g_detail.str("");
    if (!pass) {
        ++g_failures;
    }
}

bool check(bool condition, const std::string& what) {
    note((condition ? "ok:   " : "BAD:  ") + what);
    return condition;
}

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

std::filesystem::path temp_path(const std::string& stem) {
    return std::filesystem::temp_directory_path() /
           (stem + "_" + std::to_string(getpid()));
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(ORDEXP_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// key: (n1, n2, sigma1, sigma2, pair); value: (prri1, prri2)
using CellKey = std::tuple<int, int, double, double, std::string>;
using CellMap = std::map<CellKey, std::pair<double, double>>;

CellMap parse_csv(const std::string& text) {
    CellMap cells;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(fields, field, ',')) {
            f.push_back(field);
        }
        if (f.size() != 9) {
            continue;
        }
        cells[{std::stoi(f[0]), std::stoi(f[1]), std::stod(f[2]),
               std::stod(f[3]), f[4]}] = {std::stod(f[5]), std::stod(f[6])};
    }
    return cells;
}

bool check_cell(const CellMap& cells, int n1, int n2, double s1, double s2,
                const std::string& pair, double want1, double want2,
                double tolerance) {
    const auto it = cells.find({n1, n2, s1, s2, pair});
    if (it == cells.end()) {
        return check(false, "cell (" + std::to_string(n1) + "," +
                                std::to_string(n2) + ") " + pair +
                                " missing from csv");
    }
    const auto [got1, got2] = it->second;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s @ ((%d,%d),(%g,%g)) = (%.2f,%.2f), expected "
                  "(%.2f,%.2f) within %.1f",
                  pair.c_str(), n1, n2, s1, s2, got1, got2, want1, want2,
                  tolerance);
    return check(std::abs(got1 - want1) <= tolerance &&
                     std::abs(got2 - want2) <= tolerance,
                 buf);
}

const std::filesystem::path kTable1Csv = temp_path("ordexp_accept_t1");
const std::filesystem::path kTable3Csv = temp_path("ordexp_accept_t3");

// ---- criterion 1: table 1 anchor cells through the CLI -----------------

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = check(
        run_cli("table --id 1 --reps 50000 --out " + kTable1Csv.string()) ==
            0,
        "table --id 1 --reps 50000 exits zero");
    const double elapsed = seconds_since(start);
    if (pass) {
        const CellMap cells = parse_csv(read_file(kTable1Csv));
        pass &= check_cell(cells, 3, 5, 0.2, 0.5, "improved_bsee_vs_bsee",
                           3.89, 6.21, 1.0);
        pass &= check_cell(cells, 3, 5, 0.2, 1.0, "bsee_vs_rmle_known",
                           24.35, 24.97, 1.0);
    }
    pass &= check(elapsed < 30.0, "runtime " + std::to_string(elapsed) +
                                      "s is under 30s");
    report(1, "table 1 reproduction, known location", pass);
}

// ---- criterion 2: table 3 anchor cells through the CLI -----------------

void criterion_2() {
    bool pass = check(
        run_cli("table --id 3 --reps 50000 --out " + kTable3Csv.string()) ==
            0,
        "table --id 3 --reps 50000 exits zero");
    if (pass) {
        const CellMap cells = parse_csv(read_file(kTable3Csv));
        pass &= check_cell(cells, 3, 5, 0.2, 0.5, "improved_baee_vs_baee",
                           4.35, 6.54, 1.0);
        pass &= check_cell(cells, 3, 5, 0.2, 0.5,
                           "improved_rmle_unknown_vs_rmle_unknown", 1.41,
                           4.62, 1.5);
    }
    report(2, "table 3 reproduction, unknown location", pass);
}

// ---- criterion 3: sign pattern of rmle vs bsee --------------------------

void criterion_3() {
    const CellMap cells = parse_csv(read_file(kTable1Csv));
    bool pass = true;
    const auto it = cells.find({3, 5, 0.2, 1.0, "rmle_known_vs_bsee"});
    if (it == cells.end()) {
        pass = check(false, "cell missing from table 1 csv");
    } else {
        const auto [got1, got2] = it->second;
        pass &= check(got1 < 0.0 && got2 < 0.0,
                      "both components negative: (" + std::to_string(got1) +
                          "," + std::to_string(got2) + ")");
        pass &= check_cell(cells, 3, 5, 0.2, 1.0, "rmle_known_vs_bsee",
                           -32.19, -33.29, 1.5);
    }
    report(3, "sign pattern of rmle-vs-bsee", pass);
}

// ---- criterion 4: analytic oracle ---------------------------------------

void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::uint64_t cell = 0;
    for (const std::uint32_t n : {3u, 5u, 10u, 15u}) {
        for (const double p : {0.5, -0.5}) {
            const LinexShape shape(p);
            const auto sc = Scenario::zero_location(
                {n, n}, {1.0, 1.0}, shape, 200000,
                ordexp::derive_seed(ordexp::kDefaultSeed, 900 + cell++));
            const auto risk = ordexp::estimate_risk(EstimatorId::Bsee, sc);
            const double want = ordexp::closed_form_bsee_risk(
                n, shape, ordexp::bsee_coefficient(n, shape));
            pass &= check(risk.overflow_count == 0, "no saturated losses");
            for (std::size_t c = 0; c < 2; ++c) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "n=%u p=%+.1f comp %zu: |%.7f - %.7f| <= 3se "
                              "(se=%.2g)",
                              n, p, c + 1, risk.mean_loss[c], want,
                              risk.std_error[c]);
                pass &= check(std::abs(risk.mean_loss[c] - want) <=
                                  3.0 * risk.std_error[c],
                              buf);
            }
        }
    }
    const double elapsed = seconds_since(start);
    pass &= check(elapsed < 60.0, "runtime " + std::to_string(elapsed) +
                                      "s is under 60s");
    report(4, "monte carlo matches the closed-form bsee risk", pass);
}

// ---- criterion 5: dominance over the full table grids ------------------

void criterion_5() {
    constexpr std::array<std::pair<std::uint32_t, std::uint32_t>, 4> sizes{
        {{3, 5}, {10, 15}, {8, 5}, {15, 10}}};
    constexpr std::array<std::pair<double, double>, 9> sigmas{{{0.2, 0.5},
                                                               {0.2, 1.0},
                                                               {0.2, 1.5},
                                                               {0.5, 1.0},
                                                               {0.5, 1.5},
                                                               {0.5, 2.0},
                                                               {1.0, 1.5},
                                                               {1.0, 2.0},
                                                               {1.0, 2.5}}};
    int violations = 0;
    int points = 0;
    std::uint64_t cell = 0;
    for (const bool residual : {false, true}) {
        const std::vector<EstimatorId> ids =
            residual ? std::vector<EstimatorId>{EstimatorId::Baee,
                                                EstimatorId::ImprovedBaee,
                                                EstimatorId::RmleUnknown,
                                                EstimatorId::
                                                    ImprovedRmleUnknown}
                     : std::vector<EstimatorId>{EstimatorId::Bsee,
                                                EstimatorId::ImprovedBsee,
                                                EstimatorId::RmleKnown,
                                                EstimatorId::
                                                    ImprovedRmleKnown};
        for (const auto& [n1, n2] : sizes) {
            for (const auto& [s1, s2] : sigmas) {
                const auto sc = Scenario::zero_location(
                    {n1, n2}, {s1, s2}, LinexShape(0.5), 50000,
                    ordexp::derive_seed(ordexp::kDefaultSeed,
                                        5000 + cell++));
                const auto joint = ordexp::estimate_risks(ids, sc);
                ++points;
                // pairs (improved, base): indices (1,0) and (3,2)
                for (const auto& [imp, base] :
                     {std::pair<std::size_t, std::size_t>{1, 0},
                      std::pair<std::size_t, std::size_t>{3, 2}}) {
                    const auto& ei = joint.estimates()[imp];
                    const auto& eb = joint.estimates()[base];
                    for (std::size_t c = 0; c < 2; ++c) {
                        const double n =
                            static_cast<double>(ei.replications);
                        const double var_i =
                            ei.std_error[c] * ei.std_error[c] * n;
                        const double var_b =
                            eb.std_error[c] * eb.std_error[c] * n;
                        const double cov =
                            joint.loss_covariance(imp, base, c);
                        const double se_diff = std::sqrt(
                            std::max(0.0, var_i + var_b - 2.0 * cov) / n);
                        if (ei.mean_loss[c] >
                            eb.mean_loss[c] + 3.0 * se_diff) {
                            ++violations;
                            char buf[200];
                            std::snprintf(
                                buf, sizeof(buf),
                                "violation: %s table (%u,%u)(%g,%g) "
                                "comp %zu: %.6g > %.6g + 3*%.2g",
                                residual ? "residual" : "sum", n1, n2, s1,
                                s2, c + 1, ei.mean_loss[c],
                                eb.mean_loss[c], se_diff);
                            note(buf);
                        }
                    }
                }
            }
        }
    }
    bool pass = check(points == 72, "checked 72 grid points");
    pass &= check(violations == 0,
                  "improved estimators dominate at every point (" +
                      std::to_string(violations) + " violations)");
    report(5, "statistical dominance of the truncation-improved estimators",
           pass);
}

// ---- criterion 6: isotonic fit vs exhaustive window oracle -------------

void criterion_6() {
    std::mt19937_64 gen(606);
    std::uniform_real_distribution<double> value_dist(0.01, 25.0);
    bool pass = true;
    for (std::size_t k = 2; k <= 6; ++k) {
        double worst = 0.0;
        std::uniform_int_distribution<std::uint32_t> n_known(1, 9);
        std::uniform_int_distribution<std::uint32_t> n_unknown(2, 9);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<std::uint32_t> nk(k);
            std::vector<std::uint32_t> nu(k);
            std::vector<double> s(k);
            for (std::size_t i = 0; i < k; ++i) {
                nk[i] = n_known(gen);
                nu[i] = n_unknown(gen);
                s[i] = value_dist(gen);
            }
            const auto fit_known = ordexp::restricted_mle_known(
                ordexp::KnownLocStats(nk, s));
            const auto want_known = oracles::max_min_window_means(s, nk);
            const auto fit_unknown = ordexp::restricted_mle_unknown(
                ordexp::UnknownLocStats(nu, std::vector<double>(k, 0.0),
                                        s));
            const auto want_unknown = oracles::max_min_window_means(s, nu);
            for (std::size_t i = 0; i < k; ++i) {
                worst = std::max(worst, oracles::rel_diff(fit_known[i],
                                                          want_known[i]));
                worst = std::max(
                    worst,
                    oracles::rel_diff(fit_unknown[i], want_unknown[i]));
            }
        }
        pass &= check(worst <= 1e-12,
                      "k=" + std::to_string(k) +
                          ": worst relative deviation " +
                          std::to_string(worst));
    }
    report(6, "isotonic mle equals the max-min window oracle", pass);
}

// ---- criterion 7: squared-error limits at p = 1e-6 ---------------------

void criterion_7() {
    const LinexShape tiny(1e-6);
    bool pass = true;
    double worst = 0.0;
    for (std::uint32_t n = 1; n <= 12; ++n) {
        worst = std::max(worst,
                         std::abs(ordexp::bsee_coefficient(n, tiny) -
                                  1.0 / (n + 1.0)));
    }
    for (std::uint32_t n = 2; n <= 12; ++n) {
        worst = std::max(
            worst, std::abs(ordexp::baee_coefficient(n, tiny) - 1.0 / n));
    }
    for (const std::uint64_t n : {8ull, 25ull, 40ull}) {
        worst = std::max(
            worst, std::abs(ordexp::truncation_coefficient_known(n, tiny) -
                            1.0 / (static_cast<double>(n) + 1.0)));
    }
    for (const auto& [n, k] :
         {std::pair<std::uint64_t, std::uint32_t>{8, 2},
          std::pair<std::uint64_t, std::uint32_t>{25, 3},
          std::pair<std::uint64_t, std::uint32_t>{40, 5}}) {
        worst = std::max(
            worst,
            std::abs(ordexp::truncation_coefficient_unknown(n, k, tiny) -
                     1.0 / (static_cast<double>(n - k) + 1.0)));
    }
    pass &= check(worst < 1e-6, "largest deviation from the limit: " +
                                    std::to_string(worst));
    report(7, "coefficients approach their squared-error limits", pass);
}

// ---- criterion 8: equivariance ------------------------------------------

void criterion_8() {
    std::mt19937_64 gen(808);
    std::uniform_int_distribution<std::size_t> k_dist(2, 5);
    std::uniform_int_distribution<std::uint32_t> n_known(1, 8);
    std::uniform_int_distribution<std::uint32_t> len_dist(2, 6);
    std::uniform_real_distribution<double> s_dist(0.05, 20.0);
    std::uniform_real_distribution<double> x_dist(-5.0, 5.0);
    std::uniform_real_distribution<double> b_dist(-50.0, 50.0);
    std::uniform_real_distribution<double> loga_dist(-4.0, 4.0);
    std::uniform_real_distribution<double> p_dist(-2.0, 2.0);

    double worst_scale = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = k_dist(gen);
        const double a = std::exp(loga_dist(gen));
        double p = p_dist(gen);
        if (std::abs(p) < 0.05) {
            p = 0.05;
        }
        const LinexShape shape(p);
        std::vector<std::uint32_t> n(k);
        std::vector<double> s(k);
        std::vector<double> scaled(k);
        for (std::size_t i = 0; i < k; ++i) {
            n[i] = n_known(gen);
            s[i] = s_dist(gen);
            scaled[i] = a * s[i];
        }
        const ordexp::KnownLocStats stats(n, s);
        const ordexp::KnownLocStats stats_scaled(n, scaled);
        for (const EstimatorId id :
             {EstimatorId::Bsee, EstimatorId::ImprovedBsee,
              EstimatorId::RmleKnown, EstimatorId::ImprovedRmleKnown}) {
            const auto plain = ordexp::evaluate_known(id, stats, shape);
            const auto moved =
                ordexp::evaluate_known(id, stats_scaled, shape);
            for (std::size_t i = 0; i < k; ++i) {
                worst_scale = std::max(
                    worst_scale, oracles::rel_diff(moved[i], a * plain[i]));
            }
        }
    }

    double worst_affine = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = k_dist(gen);
        const double a = std::exp(loga_dist(gen));
        double p = p_dist(gen);
        if (std::abs(p) < 0.05) {
            p = 0.05;
        }
        const LinexShape shape(p);
        std::vector<std::vector<double>> base(k);
        std::vector<std::vector<double>> moved(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint32_t len = len_dist(gen);
            const double b = b_dist(gen);
            for (std::uint32_t j = 0; j < len; ++j) {
                const double x = x_dist(gen);
                base[i].push_back(x);
                moved[i].push_back(a * x + b);
            }
        }
        const auto stats = ordexp::UnknownLocStats::from_samples(base);
        const auto stats_moved =
            ordexp::UnknownLocStats::from_samples(moved);
        if (stats.degenerate() || stats_moved.degenerate()) {
            continue;
        }
        for (const EstimatorId id :
             {EstimatorId::Baee, EstimatorId::ImprovedBaee,
              EstimatorId::RmleUnknown, EstimatorId::ImprovedRmleUnknown}) {
            const auto plain = ordexp::evaluate_unknown(id, stats, shape);
            const auto shifted =
                ordexp::evaluate_unknown(id, stats_moved, shape);
            for (std::size_t i = 0; i < k; ++i) {
                worst_affine = std::max(
                    worst_affine,
                    oracles::rel_diff(shifted[i], a * plain[i]));
            }
        }
    }

    bool pass = check(worst_scale <= 1e-12,
                      "scale equivariance worst deviation " +
                          std::to_string(worst_scale));
    pass &= check(worst_affine <= 1e-12,
                  "affine equivariance worst deviation " +
                      std::to_string(worst_affine));
    report(8, "equivariance of all eight estimators", pass);
}

// ---- criterion 9: byte-identical csv across worker counts --------------

void criterion_9() {
    const auto one = temp_path("ordexp_accept_t1_w1");
    const auto two = temp_path("ordexp_accept_t1_w2");
    bool pass = check(run_cli("table --id 1 --reps 50000 --threads 1 --out " +
                              one.string()) == 0,
                      "single-worker run exits zero");
    pass &= check(run_cli("table --id 1 --reps 50000 --threads 2 --out " +
                          two.string()) == 0,
                  "two-worker run exits zero");
    if (pass) {
        const std::string base = read_file(kTable1Csv);
        const std::string w1 = read_file(one);
        const std::string w2 = read_file(two);
        pass &= check(!base.empty(), "criterion 1 output present");
        pass &= check(base == w1,
                      "default-thread and one-worker bytes identical");
        pass &= check(base == w2,
                      "default-thread and two-worker bytes identical");
    }
    std::filesystem::remove(one);
    std::filesystem::remove(two);
    report(9, "determinism across worker counts", pass);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::filesystem::remove(kTable1Csv);
    std::filesystem::remove(kTable3Csv);
    std::printf("acceptance: %d/9 criteria passed in %.1fs\n",
                9 - g_failures, seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
