#include "core/kernels.hpp"

#include <algorithm>
#include <limits>

namespace ordexp::kernels {

void pooled_isotonic_fit(std::span<const double> num,
                         std::span<const std::uint32_t> den,
                         std::span<double> out, PavaScratch& scratch) {
    const std::size_t k = num.size();
    auto& bnum = scratch.num;
    auto& bden = scratch.den;
    auto& blen = scratch.len;
    bnum.clear();
    bden.clear();
    blen.clear();

    for (std::size_t i = 0; i < k; ++i) {
        bnum.push_back(num[i]);
        bden.push_back(static_cast<double>(den[i]));
        blen.push_back(1);
        // merge while the new block mean violates the ordering
        while (bnum.size() >= 2) {
            const std::size_t m = bnum.size();
            const double cur = bnum[m - 1] / bden[m - 1];
            const double prev = bnum[m - 2] / bden[m - 2];
            if (prev <= cur) {
                break;
            }
            bnum[m - 2] += bnum[m - 1];
            bden[m - 2] += bden[m - 1];
            blen[m - 2] += blen[m - 1];
            bnum.pop_back();
            bden.pop_back();
            blen.pop_back();
        }
    }

    std::size_t pos = 0;
    for (std::size_t b = 0; b < bnum.size(); ++b) {
        const double mean = bnum[b] / bden[b];
        for (std::size_t r = 0; r < blen[b]; ++r) {
            out[pos++] = mean;
        }
    }
}

double clamp_multiplier(std::size_t i, double base,
                        std::span<const double> stat, double trunc) {
    const double si = stat[i];
    if (i == 0) {
        double sum = 0.0;
        for (std::size_t j = 1; j < stat.size(); ++j) {
            sum += stat[j] / si;
        }
        const double hi = trunc * (1.0 + sum);
        return std::clamp(base, trunc, hi);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
        sum += stat[j] / si;
    }
    return std::max(base, trunc * (1.0 + sum));
}

void best_equivariant(std::span<const double> stat,
                      std::span<const double> coef, std::span<double> out) {
    for (std::size_t i = 0; i < stat.size(); ++i) {
        out[i] = coef[i] * stat[i];
    }
}

void improved_equivariant(std::span<const double> stat,
                          std::span<const double> coef, double trunc,
                          std::span<double> out) {
    for (std::size_t i = 0; i < stat.size(); ++i) {
        out[i] = clamp_multiplier(i, coef[i], stat, trunc) * stat[i];
    }
}

void improved_isotonic(std::span<const double> stat,
                       std::span<const std::uint32_t> weights, double trunc,
                       std::span<double> out, PavaScratch& scratch) {
    pooled_isotonic_fit(stat, weights, out, scratch);
    for (std::size_t i = 0; i < stat.size(); ++i) {
        const double base = out[i] / stat[i];
        const double clamped = clamp_multiplier(i, base, stat, trunc);
        // inactive clamp keeps the fitted value untouched (no multiplier
        // round trip)
        if (clamped != base) {
            out[i] = clamped * stat[i];
        }
    }
}

double sum_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s;
}

MinResidual min_residual_of(std::span<const double> xs) {
    double mn = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        mn = std::min(mn, x);
    }
    double t = 0.0;
    for (double x : xs) {
        t += x - mn;
    }
    return {mn, t};
}

}  // namespace ordexp::kernels
