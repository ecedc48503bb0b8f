#include "besovlab/besov.hpp"

#include "besovlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace besovlab {

// ============================================================================
// Parameters
// ============================================================================

BesovParams BesovParams::make(double s, double q, std::optional<double> p_override) {
    BesovParams params;
    params.s = s;
    params.q = q;
    params.p_override = p_override;
    if (!(s > 0.0 && s < 1.0)) {
        throw ValidationError("BesovParams: s must lie in (0,1), got " + std::to_string(s));
    }
    if (!(q >= 1.0)) {  // infinity passes
        throw ValidationError("BesovParams: q must lie in [1, infinity], got " +
                              std::to_string(q));
    }
    const double p = params.p();
    if (!(p > params.n / (params.n + s))) {
        throw ValidationError("BesovParams: p must exceed n/(n+s)");
    }
    params.scaling_invariant = !p_override || *p_override == params.n / s;
    return params;
}

// ============================================================================
// Shared kernel / tail
// ============================================================================

namespace detail {

double difference_kernel(double dist, const BesovParams& params) {
    return std::pow(dist, -(params.q * params.s + params.n));
}

double difference_tail_qpow(double lp_f, double T, const BesovParams& params) {
    // For |h| >= T >= 2 * support radius the shifted copies are disjoint:
    // ||f(.+h) - f||_p^p = 2 ||f||_p^p exactly, and the radial integral of
    // |h|^(-qs-n) over |h| >= T is 2*pi*T^(-qs)/(qs) in the plane.
    const double far = std::pow(2.0, 1.0 / params.p()) * lp_f;
    const double qs = params.q * params.s;
    return std::pow(far, params.q) * 2.0 * std::numbers::pi *
           std::pow(T, -qs) / qs;
}

}  // namespace detail

// ============================================================================
// Difference estimator
// ============================================================================

DifferenceProfile difference_profile(const GridFunction& f, double p,
                                     const OffsetSampler& sampler,
                                     unsigned threads) {
    DifferenceProfile profile;
    profile.p = p;
    profile.outer_radius = sampler.outer_radius;
    profile.lp_f = std::pow(f.spacing() * f.spacing() *
                                detail::abs_pow_sum(f.values, p),
                            1.0 / p);
    profile.tail_exact =
        f.support_radius && sampler.outer_radius >= 2.0 * *f.support_radius;

    const double h = f.spacing();
    for (const auto& level : sampler.levels) {
        DifferenceProfile::Level out;
        out.k = level.k;
        out.weight = level.weight;
        out.terms.resize(level.offsets.size());
        chunked_sum(
            level.offsets.size(),
            [&](std::size_t i) {
                const auto [di, dj] = level.offsets[i];
                DifferenceProfile::Term term;
                term.di = di;
                term.dj = dj;
                term.dist = std::hypot(di, dj) * h;
                term.inner = std::pow(shift_abs_pow_sum(f, di, dj, p), 1.0 / p);
                out.terms[i] = term;
                return 0.0;  // used as a deterministic parallel-for
            },
            threads);
        profile.levels.push_back(std::move(out));
    }
    return profile;
}

double aggregate_difference(const DifferenceProfile& profile,
                            const BesovParams& params, NormTrace* trace) {
    if (params.p() != profile.p) {
        throw ValidationError("aggregate_difference: profile built for p = " +
                              std::to_string(profile.p));
    }
    if (trace) {
        trace->estimator = "difference";
        trace->rows.clear();
        trace->tail_exact = profile.tail_exact;
    }

    if (params.q == kInfinity) {
        double v = std::pow(profile.outer_radius, -params.s) *
                   std::pow(2.0, 1.0 / profile.p) * profile.lp_f;  // far field
        for (const auto& level : profile.levels) {
            double level_v = 0.0;
            for (const auto& t : level.terms) {
                level_v = std::max(level_v, std::pow(t.dist, -params.s) * t.inner);
            }
            if (trace) {
                trace->rows.push_back({level.k, profile.outer_radius * std::exp2(-level.k),
                                       level_v, level_v});
            }
            v = std::max(v, level_v);
        }
        return v;
    }

    double total = 0.0;
    for (const auto& level : profile.levels) {
        double level_sum = 0.0;
        double level_inner_max = 0.0;
        for (const auto& t : level.terms) {
            level_sum += level.weight * detail::difference_kernel(t.dist, params) *
                         std::pow(t.inner, params.q);
            level_inner_max = std::max(level_inner_max, t.inner);
        }
        if (trace) {
            trace->rows.push_back({level.k, profile.outer_radius * std::exp2(-level.k),
                                   level_inner_max, level_sum});
        }
        total += level_sum;
    }
    const double tail =
        detail::difference_tail_qpow(profile.lp_f, profile.outer_radius, params);
    if (trace) trace->tail = tail;
    total += tail;
    return std::pow(total, 1.0 / params.q);
}

static void require_support_for_tail(const GridFunction& f) {
    if (!f.support_radius) {
        throw ValidationError(
            "besov_norm_difference: support_radius undeclared, far-field tail "
            "correction undefined");
    }
    if (*f.support_radius > f.domain.side_length / 4.0) {
        throw ValidationError(
            "besov_norm_difference: support_radius must be <= side_length/4 so "
            "zero extension is exact for sampled differences");
    }
}

double besov_norm_difference(const GridFunction& f, const BesovParams& params,
                             const OffsetSampler& sampler, unsigned threads,
                             NormTrace* trace) {
    require_support_for_tail(f);
    const DifferenceProfile profile =
        difference_profile(f, params.p(), sampler, threads);
    double v = aggregate_difference(profile, params, trace);
    if (trace) {
        trace->warnings = sampler.warnings;
    }
    if (!std::isfinite(v)) {
        throw NumericalError("besov_norm_difference: non-finite result");
    }
    return v;
}

double besov_norm_oracle(const GridFunction& f, const BesovParams& params,
                         std::optional<double> outer_radius) {
    const int n = f.resolution();
    if (n > 32) {
        throw ValidationError("besov_norm_oracle: exhaustive reference is guarded to N <= 32");
    }
    require_support_for_tail(f);
    const double T = outer_radius.value_or(f.domain.side_length / 2.0);
    const double h = f.spacing();
    const double p = params.p();
    const double w_h = h * h;
    const int dmax = std::min(n - 1, static_cast<int>(std::ceil(T / h)));

    const double lp_f =
        std::pow(h * h * detail::abs_pow_sum(f.values, p), 1.0 / p);

    if (params.q == kInfinity) {
        double v = std::pow(T, -params.s) * std::pow(2.0, 1.0 / p) * lp_f;
        for (int di = -dmax; di <= dmax; ++di) {
            for (int dj = -dmax; dj <= dmax; ++dj) {
                if (di == 0 && dj == 0) continue;
                const double dist = std::hypot(di, dj) * h;
                if (dist >= T) continue;
                const double inner =
                    std::pow(shift_abs_pow_sum(f, di, dj, p), 1.0 / p);
                v = std::max(v, std::pow(dist, -params.s) * inner);
            }
        }
        return v;
    }

    double total = 0.0;
    for (int di = -dmax; di <= dmax; ++di) {
        for (int dj = -dmax; dj <= dmax; ++dj) {
            if (di == 0 && dj == 0) continue;
            const double dist = std::hypot(di, dj) * h;
            if (dist >= T) continue;
            const double inner = std::pow(shift_abs_pow_sum(f, di, dj, p), 1.0 / p);
            total += w_h * detail::difference_kernel(dist, params) *
                     std::pow(inner, params.q);
        }
    }
    total += detail::difference_tail_qpow(lp_f, T, params);
    return std::pow(total, 1.0 / params.q);
}

// ============================================================================
// Ball-oscillation characterization
// ============================================================================

std::vector<double> default_oscillation_scales(const Domain& domain) {
    std::vector<double> scales;
    for (double t = domain.side_length / 2.0; t >= 2.0 * domain.spacing();
         t /= 2.0) {
        scales.push_back(t);
    }
    return scales;
}

OscillationProfile oscillation_profile(const GridFunction& f,
                                       const BesovParams& params,
                                       const std::vector<double>& scales,
                                       unsigned threads) {
    const double h = f.spacing();
    const double L = f.domain.side_length;
    if (scales.empty()) {
        throw ValidationError("oscillation_profile: empty scale list");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > h)) {
            throw ValidationError("oscillation_profile: scale " +
                                  std::to_string(scales[i]) +
                                  " at or below grid spacing");
        }
        if (scales[i] > L / 2.0) {
            throw ValidationError("oscillation_profile: scale exceeds side_length/2");
        }
        if (i > 0 && !(scales[i] < scales[i - 1])) {
            throw ValidationError("oscillation_profile: scales must decrease strictly");
        }
    }

    // Ascending pass so every offset's inner sum is computed exactly once:
    // the ball at scale t_(i+1) is the ball at t_i plus one annulus.
    std::vector<double> asc(scales.rbegin(), scales.rend());
    const double p = params.p();
    const int n = f.resolution();
    const double t_max = asc.back();
    const int dmax = std::min(n - 1, static_cast<int>(std::ceil(t_max / h)));

    struct Off {
        int di, dj;
        double dist;
    };
    std::vector<Off> offsets;
    for (int di = -dmax; di <= dmax; ++di) {
        for (int dj = -dmax; dj <= dmax; ++dj) {
            if (di == 0 && dj == 0) continue;
            const double d = std::hypot(di, dj) * h;
            if (d < t_max) offsets.push_back({di, dj, d});
        }
    }
    std::sort(offsets.begin(), offsets.end(),
              [](const Off& a, const Off& b) {
                  return a.dist < b.dist ||
                         (a.dist == b.dist &&
                          std::tie(a.di, a.dj) < std::tie(b.di, b.dj));
              });

    OscillationProfile profile;
    profile.p = p;
    profile.s_hint = params.s;

    double pow_sum = 0.0;          // sum over the current ball of inner p-sums
    std::int64_t count = 1;        // lattice ball population, center included
    std::size_t next = 0;
    for (double t : asc) {
        // Annulus batch [previous t, t): deterministic chunked reduction.
        std::size_t first = next;
        while (next < offsets.size() && offsets[next].dist < t) ++next;
        pow_sum += chunked_sum(
            next - first,
            [&](std::size_t i) {
                const Off& o = offsets[first + i];
                return shift_abs_pow_sum(f, o.di, o.dj, p);
            },
            threads);
        count += static_cast<std::int64_t>(next - first);
        OscillationProfile::Scale sc;
        sc.t = t;
        sc.ball_count = count;
        sc.value = std::pow(pow_sum / static_cast<double>(count), 1.0 / p);
        profile.scales.push_back(sc);
    }
    std::reverse(profile.scales.begin(), profile.scales.end());

    // Reported estimate of the quadrature part below the smallest scale,
    // from the discrete Lipschitz bound; never added to the value.
    if (f.support_radius && params.q != kInfinity) {
        const double t_min = profile.scales.back().t;
        double lip = 0.0;
        lip = std::max((f.values.topRows(n - 1) - f.values.bottomRows(n - 1))
                           .abs()
                           .maxCoeff(),
                       (f.values.leftCols(n - 1) - f.values.rightCols(n - 1))
                           .abs()
                           .maxCoeff()) /
              h;
        const double area =
            std::numbers::pi * std::pow(*f.support_radius + t_min, 2.0);
        const double c = lip * std::pow(area, 1.0 / p);
        const double q = params.q;
        profile.small_t_estimate =
            c * std::pow(t_min, 1.0 - params.s) /
            std::pow(q * (1.0 - params.s), 1.0 / q);
    }
    return profile;
}

double besov_norm_from_oscillation(const OscillationProfile& profile,
                                   const BesovParams& params,
                                   NormTrace* trace) {
    if (profile.scales.size() < 3) {
        throw ValidationError(
            "besov_norm_from_oscillation: need at least 3 scales");
    }
    if (params.p() != profile.p) {
        throw ValidationError("besov_norm_from_oscillation: profile built for p = " +
                              std::to_string(profile.p));
    }
    for (std::size_t i = 1; i < profile.scales.size(); ++i) {
        const double expected = profile.scales[i - 1].t / 2.0;
        if (std::abs(profile.scales[i].t - expected) > 1e-12 * profile.scales[i - 1].t) {
            throw ValidationError(
                "besov_norm_from_oscillation: scales must decrease dyadically");
        }
    }
    if (trace) {
        trace->estimator = "oscillation";
        trace->rows.clear();
        trace->small_t_estimate = profile.small_t_estimate;
    }

    if (params.q == kInfinity) {
        double v = 0.0;
        for (const auto& sc : profile.scales) {
            v = std::max(v, std::pow(sc.t, -params.s) * sc.value);
        }
        return v;
    }

    const double ln2 = std::numbers::ln2;
    double total = 0.0;
    int level = 0;
    for (const auto& sc : profile.scales) {
        const double term =
            std::pow(std::pow(sc.t, -params.s) * sc.value, params.q) * ln2;
        if (trace) trace->rows.push_back({level++, sc.t, sc.value, term});
        total += term;
    }
    // Scales above t_max: oscillation saturates, keep its outermost value.
    const double t_max = profile.scales.front().t;
    const double c = profile.scales.front().value;
    const double qs = params.q * params.s;
    const double tail = std::pow(c, params.q) * std::pow(t_max, -qs) / qs;
    if (trace) trace->tail = tail;
    total += tail;
    return std::pow(total, 1.0 / params.q);
}

// ============================================================================
// Annulus half-sup gradient
// ============================================================================

std::vector<int> default_hajlasz_levels(const Domain& domain) {
    const int k_min =
        -static_cast<int>(std::floor(std::log2(domain.side_length / 2.0))) - 1;
    const int k_max =
        -static_cast<int>(std::floor(std::log2(domain.spacing()))) - 1;
    std::vector<int> levels;
    for (int k = k_min; k <= k_max; ++k) levels.push_back(k);
    return levels;
}

HajlaszGradient hajlasz_halfsup_gradient(const GridFunction& f,
                                         const BesovParams& params,
                                         const std::vector<int>& levels) {
    const int n = f.resolution();
    const double h = f.spacing();
    HajlaszGradient grad;
    grad.s = params.s;

    for (int k : levels) {
        const double lo = std::exp2(-k - 1), hi = std::exp2(-k);
        GridFunction g;
        g.domain = f.domain;
        g.values = ArrayXXd::Zero(n, n);

        const int dmax = std::min(n - 1, static_cast<int>(std::ceil(hi / h)));
        for (int di = -dmax; di <= dmax; ++di) {
            for (int dj = -dmax; dj <= dmax; ++dj) {
                if (di == 0 && dj == 0) continue;
                const double dist = std::hypot(di, dj) * h;
                if (dist < lo || dist >= hi) continue;
                const double w = std::pow(dist, -params.s);

                const int lo_i = std::max(0, -di), lo_j = std::max(0, -dj);
                const int len_i = n - std::abs(di), len_j = n - std::abs(dj);
                g.values.block(lo_i, lo_j, len_i, len_j) =
                    g.values.block(lo_i, lo_j, len_i, len_j)
                        .max((f.values.block(lo_i + di, lo_j + dj, len_i, len_j) -
                              f.values.block(lo_i, lo_j, len_i, len_j))
                                 .abs() *
                             w);
                // Partners outside the box are zero by extension.
                if (std::abs(di) > 0) {
                    const int ci = (di >= 0) ? len_i : 0;
                    g.values.block(ci, 0, std::abs(di), n) =
                        g.values.block(ci, 0, std::abs(di), n)
                            .max(f.values.block(ci, 0, std::abs(di), n).abs() * w);
                }
                if (std::abs(dj) > 0) {
                    const int cj = (dj >= 0) ? len_j : 0;
                    g.values.block(lo_i, cj, len_i, std::abs(dj)) =
                        g.values.block(lo_i, cj, len_i, std::abs(dj))
                            .max(f.values.block(lo_i, cj, len_i, std::abs(dj)).abs() *
                                 w);
                }
            }
        }
        g.values *= 0.5;
        grad.levels.emplace_back(k, std::move(g));
    }
    return grad;
}

double hajlasz_upper_bound(const HajlaszGradient& grad, const BesovParams& params) {
    const double p = params.p();
    if (params.q == kInfinity) {
        double v = 0.0;
        for (const auto& [k, g] : grad.levels) v = std::max(v, lp_norm(g, p));
        return v;
    }
    double total = 0.0;
    for (const auto& [k, g] : grad.levels) {
        total += std::pow(lp_norm(g, p), params.q);
    }
    return std::pow(total, 1.0 / params.q);
}

}  // namespace besovlab
