#include "besovlab/dichotomy.hpp"

#include "besovlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace besovlab {

namespace detail {

double elliptical_shape_factor(double aspect, const BesovParams& params) {
    if (!(aspect > 0.0) || !std::isfinite(aspect)) {
        throw ValidationError("elliptical shape factor needs a positive finite aspect");
    }
    const double inv_a = 1.0 / aspect;  // shape matrix diag(1/aspect, 1)
    const double det_d = inv_a;
    const double p = params.p();
    if (std::isinf(params.q)) {
        // sup form: sup_h |h|^{-s} A(h)^{1/p} with A(h) = det(D) At(|D^{-1}h|);
        // substituting h = Dw separates the angular maximum of |De_theta|^{-s}.
        const double min_axis = std::min(inv_a, 1.0);
        return std::pow(det_d, 1.0 / p) * std::pow(min_axis, -params.s);
    }
    const double q = params.q;
    const double expo = -(q * params.s + 2.0) / 2.0;
    const int n_theta = 4096;
    double c_theta = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double th = (i + 0.5) * (2.0 * std::numbers::pi / n_theta);
        const double c = std::cos(th), sn = std::sin(th);
        c_theta += std::pow(inv_a * inv_a * c * c + sn * sn, expo);
    }
    c_theta *= 2.0 * std::numbers::pi / n_theta;
    const double qpow_scale =
        std::pow(det_d, 1.0 + q / p) * c_theta / (2.0 * std::numbers::pi);
    return std::pow(qpow_scale, 1.0 / q);
}

}  // namespace detail

namespace {

struct LocalFrame {
    double lam_rad = 0.0;  // stretch along the ray
    double lam_tan = 0.0;  // stretch across it
    double aspect() const { return lam_rad / lam_tan; }
};

Vec2 map_at(const Homeomorphism& phi, const Vec2& x) {
    Vec2 y = phi.forward(x);
    if (!y.allFinite()) {
        throw NumericalError("map sample is not finite");
    }
    return y;
}

LocalFrame local_frame(const Homeomorphism& phi, const Vec2& x) {
    const double delta = 1e-6 * x.norm();
    const Vec2 e1(1.0, 0.0), e2(0.0, 1.0);
    LocalFrame f;
    f.lam_rad =
        (map_at(phi, x + delta * e1) - map_at(phi, x - delta * e1)).norm() /
        (2.0 * delta);
    f.lam_tan =
        (map_at(phi, x + delta * e2) - map_at(phi, x - delta * e2)).norm() /
        (2.0 * delta);
    if (!std::isfinite(f.lam_rad) || !std::isfinite(f.lam_tan) ||
        !(f.lam_rad > 0.0) || !(f.lam_tan > 0.0)) {
        throw NumericalError("degenerate local stretch on the placement ray");
    }
    return f;
}

/// Smallest image displacement over a fan of directions: certified-enough
/// inradius of the image of the r-ball, used as the image tent radius so the
/// pulled-back support stays inside the source ball.
double image_inradius(const Homeomorphism& phi, const Vec2& x, double r) {
    const Vec2 fx = map_at(phi, x);
    const int n_theta = 256;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_theta; ++i) {
        const double th = (i + 0.5) * (2.0 * std::numbers::pi / n_theta);
        const Vec2 probe = x + r * Vec2(std::cos(th), std::sin(th));
        best = std::min(best, (map_at(phi, probe) - fx).norm());
    }
    if (!std::isfinite(best) || !(best > 0.0)) {
        throw NumericalError("image inradius degenerate at a placement center");
    }
    return best;
}

// Octaves between successive placement levels. A tent's per-octave share of
// the seminorm decays like 2^{-qs} away from its own scale, so adjacent
// levels must sit several octaves apart before the cross-level aggregation
// is clean; six octaves keep the leakage between neighbours below 2% even
// at qs = 1, which lets the l^q / l^p mismatch show at small level counts
// instead of only asymptotically.
constexpr int kLevelStride = 6;

/// Centers on the ray (1,0) at |x_j| = 2^{-stride*k-1}, k = 1..m, with
/// images and local frames.
struct RaySetup {
    std::vector<Vec2> xs;
    std::vector<Vec2> ys;
    std::vector<LocalFrame> frames;
};

RaySetup make_ray_setup(const Homeomorphism& phi, int m) {
    RaySetup setup;
    for (int k = 1; k <= m; ++k) {
        const Vec2 x(std::ldexp(1.0, -kLevelStride * k - 1), 0.0);
        setup.xs.push_back(x);
        setup.ys.push_back(map_at(phi, x));
        setup.frames.push_back(local_frame(phi, x));
    }
    return setup;
}

struct Placement {
    double base_scale = 0.0;           // r (dyadic_image) or rho (equal_image)
    std::vector<double> image_radius;  // radial tent radii on the image side
    std::vector<double> sigma;         // pullback tangential semi-axes
};

// Safety margin keeping the per-level linearization honest: pullback
// supports at most 1/64 of the center radius.
constexpr double kLinearizationMargin = 1.0 / 64.0;

/// Equal source balls B(x_j, r); image tents get the measured inradius, so
/// their radii shrink dyadically for a volume-spreading map.
bool try_dyadic_image(const Homeomorphism& phi, const RaySetup& setup,
                      double quarter_width, double r, Placement* out) {
    const std::size_t m = setup.xs.size();
    Placement pl;
    pl.base_scale = r;
    for (std::size_t j = 0; j < m; ++j) {
        if (r > kLinearizationMargin * setup.xs[j].norm()) return false;
        if (setup.xs[j].norm() + r > quarter_width) return false;
        const double rho = image_inradius(phi, setup.xs[j], r);
        if (setup.ys[j].norm() + rho > quarter_width) return false;
        pl.image_radius.push_back(rho);
        pl.sigma.push_back(rho / setup.frames[j].lam_tan);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if ((setup.xs[i] - setup.xs[j]).norm() < 18.0 * r) return false;
            if ((setup.ys[i] - setup.ys[j]).norm() <
                9.0 * (pl.image_radius[i] + pl.image_radius[j])) {
                return false;
            }
        }
    }
    *out = std::move(pl);
    return true;
}

/// Equal image tents of radius rho; pulled-back supports are ellipses whose
/// major semi-axis rho / min(stretch) grows dyadically toward the origin.
bool try_equal_image(const RaySetup& setup, double quarter_width, double rho,
                     Placement* out) {
    const std::size_t m = setup.xs.size();
    Placement pl;
    pl.base_scale = rho;
    std::vector<double> major(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& f = setup.frames[j];
        major[j] = rho / std::min(f.lam_rad, f.lam_tan);
        if (major[j] > kLinearizationMargin * setup.xs[j].norm()) return false;
        if (setup.xs[j].norm() + major[j] > quarter_width) return false;
        if (setup.ys[j].norm() + rho > quarter_width) return false;
        pl.image_radius.push_back(rho);
        pl.sigma.push_back(rho / f.lam_tan);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if ((setup.xs[i] - setup.xs[j]).norm() <
                9.0 * (major[i] + major[j])) {
                return false;
            }
            if ((setup.ys[i] - setup.ys[j]).norm() < 18.0 * rho) return false;
        }
    }
    *out = std::move(pl);
    return true;
}

template <typename TryFn>
bool shrink_to_feasible(double quarter_width, const TryFn& attempt,
                        Placement* out) {
    double scale = quarter_width;
    for (int iter = 0; iter < 200; ++iter) {
        if (attempt(scale, out)) return true;
        scale *= 0.5;
    }
    return false;
}

BumpSpec radial_tent(const Vec2& center, double extent, double amplitude) {
    BumpSpec spec;
    spec.center = center;
    spec.extent = extent;
    spec.profile = [amplitude, extent](double rad) {
        return amplitude * std::max(0.0, 1.0 - rad / extent);
    };
    return spec;
}

struct FamilyNorms {
    double norm_g = 0.0;
    double norm_g_phi = 0.0;
};

/// Image-side sum measured directly; composed side measured through the
/// common-eccentricity elliptical reduction (virtual radial family times the
/// shape factor).
FamilyNorms measure_family(const RaySetup& setup, const Placement& pl,
                           double aspect, const std::vector<double>& amps,
                           const BesovParams& params,
                           const BumpNormConfig& config) {
    const std::size_t m = setup.xs.size();
    std::vector<BumpSpec> image, pullback;
    for (std::size_t j = 0; j < m; ++j) {
        image.push_back(radial_tent(setup.ys[j], pl.image_radius[j], amps[j]));
        const Vec2 virtual_center(aspect * setup.xs[j](0), setup.xs[j](1));
        pullback.push_back(radial_tent(virtual_center, pl.sigma[j], amps[j]));
    }
    FamilyNorms norms;
    norms.norm_g = bump_family_norm(image, params, config).value;
    norms.norm_g_phi = detail::elliptical_shape_factor(aspect, params) *
                       bump_family_norm(pullback, params, config).value;
    return norms;
}

int max_feasible_levels(const Homeomorphism& phi, int requested,
                        double quarter_width) {
    for (int m = requested; m >= 1; --m) {
        RaySetup setup = make_ray_setup(phi, m);
        Placement pl;
        const bool ok_a = shrink_to_feasible(
            quarter_width,
            [&](double r, Placement* out) {
                return try_dyadic_image(phi, setup, quarter_width, r, out);
            },
            &pl);
        const bool ok_b = shrink_to_feasible(
            quarter_width,
            [&](double rho, Placement* out) {
                return try_equal_image(setup, quarter_width, rho, out);
            },
            &pl);
        if (ok_a && ok_b) return m;
    }
    return 0;
}

}  // namespace

DichotomyReport dichotomy_experiment(const Homeomorphism& phi, int levels,
                                     std::vector<double> amplitudes,
                                     const BesovParams& params,
                                     const Domain& domain, std::uint64_t seed,
                                     const BumpNormConfig& config) {
    if (levels < 1 || levels > 6) {
        throw ValidationError("level count must lie in 1..6");
    }
    if (!params.scaling_invariant) {
        throw ValidationError(
            "composition experiment requires the scaling-invariant "
            "integrability index (drop the p override)");
    }
    if (amplitudes.empty()) {
        amplitudes.assign(static_cast<std::size_t>(levels), 1.0);
    }
    if (amplitudes.size() != static_cast<std::size_t>(levels)) {
        throw ValidationError(
            "amplitude list must be empty or have one entry per level");
    }
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
        if (!(amplitudes[j] > 0.0) || !std::isfinite(amplitudes[j])) {
            std::ostringstream msg;
            msg << "amplitude " << j << " must be positive and finite";
            throw ValidationError(msg.str());
        }
    }
    const double quarter_width = domain.side_length / 4.0;

    RaySetup full = make_ray_setup(phi, levels);

    // Uniform eccentricity along the ray; the composed-side reduction needs a
    // single shape matrix for the whole family.
    double log_sum = 0.0;
    for (const auto& f : full.frames) log_sum += std::log(f.aspect());
    const double aspect = std::exp(log_sum / levels);
    for (const auto& f : full.frames) {
        if (std::abs(std::log(f.aspect() / aspect)) > 0.02) {
            throw ValidationError(
                "local aspect varies along the placement ray; the experiment "
                "needs a uniform-eccentricity map");
        }
    }

    // Distinct Jacobian volume bands mark the placements where composition
    // can stretch the level hierarchy; coinciding bands (identity, affine)
    // are a valid control case and only earn a note.
    bool bands_distinct = true;
    {
        std::vector<int> bands;
        for (const auto& x : full.xs) {
            const double jac = std::abs(phi.jacobian_det(x));
            if (!(jac > 0.0) || !std::isfinite(jac)) {
                throw NumericalError("Jacobian degenerate at a placement center");
            }
            bands.push_back(detail::jacobian_level_index(jac));
        }
        std::vector<int> sorted = bands;
        std::sort(sorted.begin(), sorted.end());
        bands_distinct =
            std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }

    DichotomyReport report;
    if (!bands_distinct) {
        report.notes.push_back(
            "volume bands of the placements coincide; the map does not "
            "separate dyadic levels on this ray");
    }
    report.slope_reference =
        std::abs((std::isinf(params.q) ? 0.0 : 1.0 / params.q) -
                 1.0 / params.p());

    for (int m = 1; m <= levels; ++m) {
        RaySetup setup = make_ray_setup(phi, m);
        const std::vector<double> amps(amplitudes.begin(),
                                       amplitudes.begin() + m);

        Placement pa, pb;
        const bool ok_a = shrink_to_feasible(
            quarter_width,
            [&](double r, Placement* out) {
                return try_dyadic_image(phi, setup, quarter_width, r, out);
            },
            &pa);
        const bool ok_b = shrink_to_feasible(
            quarter_width,
            [&](double rho, Placement* out) {
                return try_equal_image(setup, quarter_width, rho, out);
            },
            &pb);
        if (!ok_a || !ok_b) {
            const int feasible = max_feasible_levels(phi, m - 1, quarter_width);
            std::ostringstream msg;
            msg << "placement constraints infeasible at " << m
                << " levels within the domain; maximal feasible level count is "
                << feasible;
            throw ValidationError(msg.str());
        }

        const FamilyNorms na =
            measure_family(setup, pa, aspect, amps, params, config);
        const FamilyNorms nb =
            measure_family(setup, pb, aspect, amps, params, config);

        for (const auto& [family, norms, scale] :
             {std::tuple<const char*, const FamilyNorms&, double>{
                  "dyadic_image", na, pa.base_scale},
              std::tuple<const char*, const FamilyNorms&, double>{
                  "equal_image", nb, pb.base_scale}}) {
            DichotomyRow row;
            row.family = family;
            row.alpha = aspect;
            row.s = params.s;
            row.q = params.q;
            row.p = params.p();
            row.levels = m;
            row.norm_g = norms.norm_g;
            row.norm_g_phi = norms.norm_g_phi;
            row.ratio = norms.norm_g_phi / norms.norm_g;
            row.seed = seed;
            report.rows.push_back(row);
            std::ostringstream note;
            note << "levels=" << m << " " << family
                 << ": base scale=" << scale;
            report.notes.push_back(note.str());
        }
        report.max_ratio.push_back(
            std::max(na.norm_g_phi / na.norm_g, nb.norm_g_phi / nb.norm_g));
    }

    if (levels >= 2) {
        std::vector<double> counts(static_cast<std::size_t>(levels));
        for (int m = 1; m <= levels; ++m) counts[m - 1] = m;
        report.slope = fit_loglog_slope(counts, report.max_ratio);
    } else {
        report.slope = std::numeric_limits<double>::quiet_NaN();
    }
    report.notes.push_back(
        "composed-side seminorms use the per-level affine linearization of "
        "the map (support margin 1/64 keeps the shape error small)");
    return report;
}

}  // namespace besovlab
