#include "besovlab/capacity.hpp"

#include "besovlab/rng.hpp"
#include "besovlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

namespace besovlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ============================================================================
// Mask helpers
// ============================================================================

bool mask_connected_8(const MaskXX& mask) {
    const int nx = static_cast<int>(mask.rows());
    const int ny = static_cast<int>(mask.cols());
    int start_x = -1, start_y = -1;
    std::int64_t total = 0;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (mask(i, j)) {
                ++total;
                if (start_x < 0) {
                    start_x = i;
                    start_y = j;
                }
            }
        }
    }
    if (total == 0) return true;
    MaskXX seen = MaskXX::Constant(nx, ny, false);
    std::queue<std::pair<int, int>> frontier;
    frontier.push({start_x, start_y});
    seen(start_x, start_y) = true;
    std::int64_t reached = 1;
    while (!frontier.empty()) {
        const auto [i, j] = frontier.front();
        frontier.pop();
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const int a = i + di, b = j + dj;
                if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
                if (!mask(a, b) || seen(a, b)) continue;
                seen(a, b) = true;
                ++reached;
                frontier.push({a, b});
            }
        }
    }
    return reached == total;
}

double mask_diameter(const Domain& domain, const MaskXX& mask) {
    // The diameter of a finite set is attained on points extreme along some
    // direction; every such point is a row-wise or column-wise index extreme.
    const int nx = static_cast<int>(mask.rows());
    const int ny = static_cast<int>(mask.cols());
    std::vector<Vec2> extremes;
    for (int i = 0; i < nx; ++i) {
        int lo = -1, hi = -1;
        for (int j = 0; j < ny; ++j) {
            if (mask(i, j)) {
                if (lo < 0) lo = j;
                hi = j;
            }
        }
        if (lo >= 0) {
            extremes.push_back(domain.node(i, lo));
            extremes.push_back(domain.node(i, hi));
        }
    }
    for (int j = 0; j < ny; ++j) {
        int lo = -1, hi = -1;
        for (int i = 0; i < nx; ++i) {
            if (mask(i, j)) {
                if (lo < 0) lo = i;
                hi = i;
            }
        }
        if (lo >= 0) {
            extremes.push_back(domain.node(lo, j));
            extremes.push_back(domain.node(hi, j));
        }
    }
    double best = 0.0;
    for (std::size_t a = 0; a < extremes.size(); ++a) {
        for (std::size_t b = a + 1; b < extremes.size(); ++b) {
            best = std::max(best, (extremes[a] - extremes[b]).norm());
        }
    }
    return best;
}

namespace {

/// 1D lower-envelope transform of squared distances (index units);
/// infinite entries are sources that never contribute.
void edt_1d(std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n, 0);
    std::vector<double> z(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (std::isinf(f[q])) continue;
        double s = 0.0;
        while (k >= 0) {
            const int r = v[k];
            s = ((f[q] + double(q) * q) - (f[r] + double(r) * r)) /
                (2.0 * (q - r));
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kInf;
        }
    }
    if (k < 0) return;  // no sources in this line
    // Read the envelope against the original parabola bases; writing into f
    // directly would corrupt bases still referenced by later cells.
    const std::vector<double> base = f;
    int idx = 0;
    for (int q = 0; q < n; ++q) {
        while (z[idx + 1] < q) ++idx;
        const double d = q - v[idx];
        f[q] = d * d + base[v[idx]];
    }
}

}  // namespace

ArrayXXd distance_to_mask(const Domain& domain, const MaskXX& mask) {
    const int n = domain.resolution;
    ArrayXXd sq(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sq(i, j) = mask(i, j) ? 0.0 : kInf;
    }
    std::vector<double> line(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {  // along the second index
        for (int j = 0; j < n; ++j) line[j] = sq(i, j);
        edt_1d(line);
        for (int j = 0; j < n; ++j) sq(i, j) = line[j];
    }
    for (int j = 0; j < n; ++j) {  // along the first index
        for (int i = 0; i < n; ++i) line[i] = sq(i, j);
        edt_1d(line);
        for (int i = 0; i < n; ++i) sq(i, j) = line[i];
    }
    return sq.sqrt() * domain.spacing();
}

// ============================================================================
// Condenser specs
// ============================================================================

CondenserSpec CondenserSpec::make(const Domain& domain, MaskXX e_mask,
                                  MaskXX f_mask, const Vec2& ball_center,
                                  double ball_radius) {
    const int n = domain.resolution;
    if (e_mask.rows() != n || e_mask.cols() != n || f_mask.rows() != n ||
        f_mask.cols() != n) {
        throw ValidationError("condenser masks must be N x N for the domain");
    }
    if (!e_mask.any() || !f_mask.any()) {
        throw ValidationError("condenser masks must both be nonempty");
    }
    if ((e_mask && f_mask).any()) {
        throw ValidationError("condenser masks not disjoint");
    }
    if (!(ball_radius > 0.0) || !std::isfinite(ball_radius)) {
        throw ValidationError("enclosing ball radius must be positive");
    }
    const double half = domain.side_length / 2.0;
    if (std::abs(ball_center(0)) + ball_radius > half ||
        std::abs(ball_center(1)) + ball_radius > half) {
        throw ValidationError("enclosing ball must sit inside the box");
    }

    bool e_in_ball = true, f_in_ball = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double dist = (domain.node(i, j) - ball_center).norm();
            if (e_mask(i, j) && dist > ball_radius) e_in_ball = false;
            if (f_mask(i, j) && dist > ball_radius) f_in_ball = false;
        }
    }
    if (!f_in_ball) {
        throw ValidationError("F mask must lie inside the enclosing ball");
    }

    CondenserSpec spec;
    spec.domain = domain;
    spec.e_mask = std::move(e_mask);
    spec.f_mask = std::move(f_mask);
    spec.ball_center = ball_center;
    spec.ball_radius = ball_radius;
    const double diam_e = mask_diameter(domain, spec.e_mask);
    const double diam_f = mask_diameter(domain, spec.f_mask);
    spec.lambda = std::min(diam_e, diam_f) / ball_radius;
    spec.lambda_claimed = e_in_ball && mask_connected_8(spec.e_mask) &&
                          mask_connected_8(spec.f_mask);
    if (spec.lambda_claimed &&
        !(spec.lambda > 0.0 && spec.lambda <= 1.0)) {
        throw ValidationError(
            "lambda = min(diam E, diam F)/R out of (0, 1] for a connected "
            "in-ball condenser");
    }
    return spec;
}

bool CondenserSpec::compact_support_enforced() const {
    if (support_radius() > domain.side_length / 4.0) return false;
    const int n = domain.resolution;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if ((domain.node(i, j) - ball_center).norm() > ball_radius &&
                !e_mask(i, j)) {
                return false;
            }
        }
    }
    return true;
}

CondenserSpec segment_pair_spec(const Domain& domain, double ball_radius,
                                double lambda, double separation) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ValidationError("segment lambda must lie in (0, 1]");
    }
    if (!(separation > 0.0)) {
        throw ValidationError("segment separation must be positive");
    }
    if (!(separation <= ball_radius)) {
        throw ValidationError("segment separation must not exceed the radius");
    }
    const int n = domain.resolution;
    auto nearest_index = [&](double coord) {
        int best = 0;
        double best_dist = kInf;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(domain.coord(i) - coord);
            if (d < best_dist) {
                best_dist = d;
                best = i;
            }
        }
        return best;
    };
    const int row_f = nearest_index(separation / 2.0);
    const int row_e = nearest_index(-separation / 2.0);
    if (row_f == row_e) {
        throw ValidationError(
            "segment separation resolves to a single grid row; refine the "
            "grid or widen the separation");
    }
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
        if (std::abs(domain.coord(j)) <= lambda * ball_radius / 2.0 + 1e-12) {
            cols.push_back(j);
        }
    }
    if (cols.size() < 2) {
        cols = {n / 2 - 1, n / 2};  // the two central columns (N even)
    }
    MaskXX e = MaskXX::Constant(n, n, false);
    MaskXX f = MaskXX::Constant(n, n, false);
    for (int j : cols) {
        e(j, row_e) = true;  // first index runs along x
        f(j, row_f) = true;
    }
    return CondenserSpec::make(domain, std::move(e), std::move(f), Vec2::Zero(),
                               ball_radius);
}

CondenserSpec annulus_condenser_spec(const Domain& domain, const Vec2& center,
                                     double r, double R) {
    if (!(0.0 < r && r < R)) {
        throw ValidationError("annulus condenser needs 0 < r < R");
    }
    const int n = domain.resolution;
    MaskXX e = MaskXX::Constant(n, n, false);
    MaskXX f = MaskXX::Constant(n, n, false);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double dist = (domain.node(i, j) - center).norm();
            if (dist > R) e(i, j) = true;
            if (dist <= r) f(i, j) = true;
        }
    }
    return CondenserSpec::make(domain, std::move(e), std::move(f), center, R);
}

// ============================================================================
// Solver
// ============================================================================

void SolverConfig::validate() const {
    if (max_iters < 1) throw ValidationError("solver needs max_iters >= 1");
    if (!(step_scale > 0.0)) throw ValidationError("solver step scale must be positive");
    if (!(tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
    if (epsilon < 0.0) throw ValidationError("smoothing epsilon must be >= 0");
}

namespace {

void project_values(ArrayXXd* values, const CondenserSpec& spec) {
    *values = values->min(1.0).max(0.0);
    *values = spec.e_mask.select(ArrayXXd::Zero(values->rows(), values->cols()),
                                 *values);
    *values = spec.f_mask.select(ArrayXXd::Ones(values->rows(), values->cols()),
                                 *values);
}

/// result(i, j) = a(i + di, j + dj), zero outside.
ArrayXXd shifted_zero(const ArrayXXd& a, int di, int dj) {
    const int nx = static_cast<int>(a.rows());
    const int ny = static_cast<int>(a.cols());
    ArrayXXd out = ArrayXXd::Zero(nx, ny);
    const int x0 = std::max(0, -di), x1 = std::min(nx, nx - di);
    const int y0 = std::max(0, -dj), y1 = std::min(ny, ny - dj);
    if (x1 > x0 && y1 > y0) {
        out.block(x0, y0, x1 - x0, y1 - y0) =
            a.block(x0 + di, y0 + dj, x1 - x0, y1 - y0);
    }
    return out;
}

/// Difference u(x + h) - u(x) over the nodes x with both endpoints in the
/// box. Writes the x-block origin and extent so the gradient can scatter
/// back; returns an empty array when the offset clears the box.
ArrayXXd interior_diff(const ArrayXXd& u, int di, int dj, int* x0, int* y0,
                       int* rows, int* cols) {
    const int nx = static_cast<int>(u.rows());
    const int ny = static_cast<int>(u.cols());
    *x0 = std::max(0, -di);
    *y0 = std::max(0, -dj);
    *rows = std::max(0, std::min(nx, nx - di) - *x0);
    *cols = std::max(0, std::min(ny, ny - dj) - *y0);
    if (*rows == 0 || *cols == 0) return ArrayXXd();
    return u.block(*x0 + di, *y0 + dj, *rows, *cols) -
           u.block(*x0, *y0, *rows, *cols);
}

/// |d|^(p-2) d elementwise, optionally smoothed to (d^2 + eps^2)^((p-2)/2) d.
ArrayXXd signed_power(const ArrayXXd& d, double p, double epsilon) {
    if (epsilon == 0.0) {
        if (p == 2.0) return d;
        if (p == 3.0) return d.abs() * d;
        if (p == 4.0) return d.square() * d;
    }
    return (d.square() + epsilon * epsilon).pow((p - 2.0) / 2.0) * d;
}

/// Level profile of the box-interior pair sums: same structure as
/// difference_profile, but pairs leaving the box are dropped instead of
/// zero-extended. The truncated objective is then invariant under
/// u -> 1 - u, so swapping the plates mirrors the problem exactly.
DifferenceProfile interior_profile(const GridFunction& u, double p,
                                   const OffsetSampler& sampler) {
    DifferenceProfile profile;
    profile.p = p;
    profile.outer_radius = sampler.outer_radius;
    const double cell = u.spacing() * u.spacing();
    profile.lp_f = std::pow(cell * detail::abs_pow_sum(u.values, p), 1.0 / p);
    profile.tail_exact = false;
    const double h = u.spacing();
    for (const auto& level : sampler.levels) {
        DifferenceProfile::Level out;
        out.k = level.k;
        out.weight = level.weight;
        out.terms.reserve(level.offsets.size());
        for (const auto& [di, dj] : level.offsets) {
            DifferenceProfile::Term term;
            term.di = di;
            term.dj = dj;
            term.dist = std::hypot(di, dj) * h;
            int x0, y0, rows, cols;
            const ArrayXXd d =
                interior_diff(u.values, di, dj, &x0, &y0, &rows, &cols);
            term.inner =
                d.size() == 0
                    ? 0.0
                    : std::pow(cell * detail::abs_pow_sum(d, p), 1.0 / p);
            out.terms.push_back(term);
        }
        profile.levels.push_back(std::move(out));
    }
    return profile;
}

double objective_qpow(const DifferenceProfile& profile,
                      const BesovParams& params, bool include_tail) {
    double total = 0.0;
    for (const auto& level : profile.levels) {
        double level_sum = 0.0;
        for (const auto& t : level.terms) {
            level_sum += level.weight *
                         detail::difference_kernel(t.dist, params) *
                         std::pow(t.inner, params.q);
        }
        total += level_sum;
    }
    if (include_tail) {
        total += detail::difference_tail_qpow(profile.lp_f,
                                              profile.outer_radius, params);
    }
    return total;
}

ArrayXXd objective_gradient(const ArrayXXd& u, const DifferenceProfile& profile,
                            const BesovParams& params, bool include_tail,
                            double cell, double epsilon) {
    const double p = params.p();
    const double q = params.q;
    ArrayXXd grad = ArrayXXd::Zero(u.rows(), u.cols());
    for (const auto& level : profile.levels) {
        for (const auto& t : level.terms) {
            if (!(t.inner > 0.0)) continue;  // 0 is a valid subgradient
            const double coef = level.weight *
                                detail::difference_kernel(t.dist, params) * q *
                                std::pow(t.inner, q - p) * cell;
            const ArrayXXd d = shifted_zero(u, t.di, t.dj) - u;
            const ArrayXXd phi_d = signed_power(d, p, epsilon);
            grad += coef * (shifted_zero(phi_d, -t.di, -t.dj) - phi_d);
        }
    }
    if (include_tail && profile.lp_f > 0.0) {
        const double unit_tail =
            detail::difference_tail_qpow(1.0, profile.outer_radius, params);
        grad += unit_tail * q * std::pow(profile.lp_f, q - p) * cell *
                signed_power(u, p, epsilon);
    }
    return grad;
}

/// Gradient of the interior-pair objective: scatter each overlap block back
/// to both endpoints instead of rolling through the zero extension.
ArrayXXd objective_gradient_interior(const ArrayXXd& u,
                                     const DifferenceProfile& profile,
                                     const BesovParams& params, double cell,
                                     double epsilon) {
    const double p = params.p();
    const double q = params.q;
    ArrayXXd grad = ArrayXXd::Zero(u.rows(), u.cols());
    for (const auto& level : profile.levels) {
        for (const auto& t : level.terms) {
            if (!(t.inner > 0.0)) continue;
            const double coef = level.weight *
                                detail::difference_kernel(t.dist, params) * q *
                                std::pow(t.inner, q - p) * cell;
            int x0, y0, rows, cols;
            const ArrayXXd d =
                interior_diff(u, t.di, t.dj, &x0, &y0, &rows, &cols);
            if (d.size() == 0) continue;
            const ArrayXXd phi_d = signed_power(d, p, epsilon);
            grad.block(x0 + t.di, y0 + t.dj, rows, cols) += coef * phi_d;
            grad.block(x0, y0, rows, cols) -= coef * phi_d;
        }
    }
    return grad;
}

}  // namespace

SolveResult solve_condenser(const CondenserSpec& spec, const BesovParams& params,
                            const OffsetSampler& sampler, const SolverConfig& cfg,
                            const std::optional<GridFunction>& warm_start) {
    cfg.validate();
    if (std::isinf(params.q)) {
        throw ValidationError("convex solver requires finite q");
    }
    if (params.q < 1.0 || params.p() < 1.0) {
        throw ValidationError("convex solver requires p, q >= 1");
    }

    const Domain& domain = spec.domain;
    const double cell = domain.spacing() * domain.spacing();
    const bool compact = spec.compact_support_enforced();
    const std::optional<double> support =
        compact ? std::optional<double>(spec.support_radius()) : std::nullopt;

    SolveResult result;
    result.tail_included = compact;
    if (!compact) {
        result.warnings.push_back(
            "objective truncated to box-interior pairs at the sampler "
            "radius: the E mask does not enforce compact support, so no "
            "far-field tail is defined");
    }

    ArrayXXd values;
    if (warm_start) {
        if (!(warm_start->domain == domain)) {
            throw ValidationError("warm start lives on a different domain");
        }
        values = warm_start->values;
    } else {
        const ArrayXXd de = distance_to_mask(domain, spec.e_mask);
        const ArrayXXd df = distance_to_mask(domain, spec.f_mask);
        values = de / (de + df);
    }
    project_values(&values, spec);

    GridFunction u{domain, values, support};
    auto build_profile = [&](const GridFunction& g) {
        return compact ? difference_profile(g, params.p(), sampler,
                                            cfg.threads)
                       : interior_profile(g, params.p(), sampler);
    };
    DifferenceProfile profile = build_profile(u);
    double current = objective_qpow(profile, params, compact);
    result.trace.push_back(current);

    ArrayXXd grad;
    bool grad_fresh = false;
    double window_ref = current;
    double scale = cfg.step_scale;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        result.iterations = iter;
        if (!grad_fresh) {
            grad = compact ? objective_gradient(u.values, profile, params,
                                                true, cell, cfg.epsilon)
                           : objective_gradient_interior(u.values, profile,
                                                         params, cell,
                                                         cfg.epsilon);
            grad_fresh = true;
        }
        const double gmax = grad.abs().maxCoeff();
        if (!(gmax > 0.0)) {
            result.converged = true;
            result.warnings.push_back("stationary point: zero subgradient");
            break;
        }
        ArrayXXd cand_values = u.values - (scale / gmax) * grad;
        project_values(&cand_values, spec);
        GridFunction cand{domain, std::move(cand_values), support};
        DifferenceProfile cand_profile = build_profile(cand);
        const double cand_obj = objective_qpow(cand_profile, params, compact);
        if (cand_obj <= current) {
            u = std::move(cand);
            profile = std::move(cand_profile);
            current = cand_obj;
            grad_fresh = false;
            scale *= 1.25;
        } else {
            ++result.rejected_steps;
            scale *= 0.5;  // backtrack; the cached gradient stays valid
        }
        result.trace.push_back(current);
        if (iter % 25 == 0) {
            const double rel =
                (window_ref - current) / std::max(current, 1e-300);
            if (rel < cfg.tolerance) {
                result.converged = true;
                break;
            }
            window_ref = current;
        }
    }

    result.u = std::move(u);
    result.objective = current;
    result.value = std::pow(current, 1.0 / params.q);
    return result;
}

// ============================================================================
// Sweeps
// ============================================================================

CapacityLowerReport verify_capacity_lower(const std::vector<double>& lambdas,
                                          const BesovParams& params,
                                          const Domain& domain,
                                          double ball_radius, double separation,
                                          const OffsetSampler& sampler,
                                          const SolverConfig& cfg) {
    if (lambdas.empty()) {
        throw ValidationError("lambda sweep needs at least one value");
    }
    CapacityLowerReport report;
    std::vector<double> fit_x, fit_y;
    for (double lam : lambdas) {
        const CondenserSpec spec =
            segment_pair_spec(domain, ball_radius, lam, separation);
        const SolveResult res = solve_condenser(spec, params, sampler, cfg);
        CapacityLowerReport::Entry entry;
        entry.lambda_requested = lam;
        entry.lambda = spec.lambda;
        entry.value = res.value;
        entry.iterations = res.iterations;
        entry.converged = res.converged;
        report.entries.push_back(entry);
        if (res.converged) {
            fit_x.push_back(spec.lambda);
            fit_y.push_back(res.value);
        } else {
            ++report.excluded;
            std::ostringstream note;
            note << "lambda " << lam << " unconverged after " << res.iterations
                 << " iterations; excluded from the fit";
            report.notes.push_back(note.str());
        }
    }
    if (fit_x.size() >= 2 &&
        *std::max_element(fit_x.begin(), fit_x.end()) >
            *std::min_element(fit_x.begin(), fit_x.end())) {
        report.slope = fit_loglog_slope(fit_x, fit_y);
    } else {
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.notes.push_back(
            fit_x.size() < 2
                ? "fewer than two converged entries; no fit"
                : "realized lambda values coincide on this grid; no fit");
    }
    report.floor_value = kInf;
    for (std::size_t i = 0; i < fit_y.size(); ++i) {
        report.floor_value = std::min(report.floor_value, fit_y[i]);
    }
    if (fit_y.empty()) report.floor_value = 0.0;
    return report;
}

CapacityUpperReport verify_capacity_upper(const std::vector<double>& ratios,
                                          const BesovParams& params,
                                          const Domain& domain,
                                          const OffsetSampler& sampler,
                                          const SolverConfig& cfg,
                                          int truncation) {
    if (ratios.empty()) {
        throw ValidationError("ratio sweep needs at least one value");
    }
    for (double ratio : ratios) {
        if (!(ratio > 1.0)) {
            throw ValidationError("radius ratios must exceed 1");
        }
    }
    CapacityUpperReport report;
    const double big_r = domain.side_length / 8.0;
    // Center on the node nearest the origin so the smallest F is never empty.
    const Vec2 center = domain.node(domain.resolution / 2, domain.resolution / 2);
    for (double ratio : ratios) {
        const double small_r = big_r / ratio;
        const CondenserSpec spec =
            annulus_condenser_spec(domain, center, small_r, big_r);
        const CondenserFunction construction =
            make_annulus_condenser(center, small_r, big_r, truncation, domain);
        const SolveResult res =
            solve_condenser(spec, params, sampler, cfg, construction.field);
        CapacityUpperReport::Entry entry;
        entry.ratio = ratio;
        entry.solver_value = res.value;
        entry.construction_value = std::pow(res.trace.front(), 1.0 / params.q);
        entry.iterations = res.iterations;
        entry.converged = res.converged;
        report.entries.push_back(entry);
        if (!res.converged) {
            std::ostringstream note;
            note << "ratio " << ratio << " unconverged after " << res.iterations
                 << " iterations";
            report.notes.push_back(note.str());
        }
    }
    return report;
}

// ============================================================================
// Quasiconformality diagnostic
// ============================================================================

namespace {

Vec2 snap_to_node(const Domain& domain, const Vec2& x) {
    auto snap1 = [&](double c) {
        const double half = domain.side_length / 2.0;
        const double spacing = domain.spacing();
        int idx = static_cast<int>(std::floor((c + half) / spacing));
        idx = std::clamp(idx, 0, domain.resolution - 1);
        return domain.coord(idx);
    };
    return {snap1(x(0)), snap1(x(1))};
}

}  // namespace

QcCheckReport qc_check(const Homeomorphism& phi, const BesovParams& params,
                       int probes, std::uint64_t seed, const Domain& domain) {
    QcCheckReport report;
    report.probes = probes;
    report.h_hat_base = quasisymmetry_scan(phi, probes, seed, domain);
    report.h_hat = quasisymmetry_scan(phi, 4 * probes, seed, domain);
    report.census = jacobian_level_census(phi, domain, -16, 16);

    if (report.h_hat >= 2.0 * report.h_hat_base) {
        report.verdict = "distortion-unbounded";
    } else if (report.census.bins() <= 3 && report.h_hat <= 8.0) {
        report.verdict = "bi-Lipschitz-like";
    } else {
        report.verdict = "QC-not-biLipschitz-like";
    }
    report.notes.push_back(
        "thresholds: unbounded iff the scan max doubles from probes to "
        "4*probes; bi-Lipschitz-like iff census bins <= 3 and scan max <= 8 "
        "(heuristics, not theorems)");

    // Two report-only condenser audits: capacity of a source annulus against
    // the capacity of its measured image annulus.
    const double side = domain.side_length;
    const Domain solve_domain = Domain::make(side, 48);
    const double spacing = solve_domain.spacing();
    const double src_r = 1.5 * spacing;
    const double src_cap_r = 6.0 * spacing;
    const OffsetSampler solve_sampler = build_offset_sampler(
        solve_domain, side / 4.0, 5, 24, seed ^ 0x5eedf00dULL);
    SolverConfig solve_cfg;
    solve_cfg.max_iters = 120;
    solve_cfg.tolerance = 1e-5;

    std::mt19937_64 rng(seed ^ 0xa0d17ULL);
    for (int probe = 0; probe < 2; ++probe) {
        QcCheckReport::CondenserProbe audit;
        const Vec2 raw((detail::uniform01(rng) - 0.5) * side / 8.0,
                       (detail::uniform01(rng) - 0.5) * side / 8.0);
        const Vec2 xc = snap_to_node(solve_domain, raw);
        audit.source_center = xc;
        audit.source_r = src_r;
        audit.source_cap_r = src_cap_r;

        double img_r = kInf, img_R = 0.0;
        const Vec2 y_raw = phi.forward(xc);
        for (int a = 0; a < 64; ++a) {
            const double th = (a + 0.5) * (2.0 * std::numbers::pi / 64.0);
            const Vec2 dir(std::cos(th), std::sin(th));
            img_r = std::min(img_r,
                             (phi.forward(xc + src_r * dir) - y_raw).norm());
            img_R = std::max(img_R,
                             (phi.forward(xc + src_cap_r * dir) - y_raw).norm());
        }
        const Vec2 yc = snap_to_node(solve_domain, y_raw);
        const double shift = (yc - y_raw).norm();
        audit.image_r = img_r;
        audit.image_cap_r = img_R + shift;
        audit.image_ratio = img_R / img_r;
        audit.note = "centers snapped to solver nodes";

        try {
            const CondenserSpec src_spec =
                annulus_condenser_spec(solve_domain, xc, src_r, src_cap_r);
            audit.source_value =
                solve_condenser(src_spec, params, solve_sampler, solve_cfg)
                    .value;
            if (yc.norm() + audit.image_cap_r > side / 4.0) {
                audit.skipped = true;
                audit.note = "image annulus leaves the quarter box";
                ++report.skipped_probes;
            } else {
                const CondenserSpec img_spec = annulus_condenser_spec(
                    solve_domain, yc, std::max(img_r, spacing * 1e-6),
                    audit.image_cap_r);
                audit.image_value =
                    solve_condenser(img_spec, params, solve_sampler, solve_cfg)
                        .value;
            }
        } catch (const ValidationError& err) {
            audit.skipped = true;
            audit.note = err.what();
            ++report.skipped_probes;
        }
        report.condenser_probes.push_back(audit);
    }
    return report;
}

}  // namespace besovlab
