#include "besovlab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace besovlab {

namespace {

double tent(double rho, double radius, double amplitude) {
    return amplitude * std::max(0.0, 1.0 - rho / radius);
}

void validate_amplitudes(const std::vector<double>& amplitudes) {
    if (amplitudes.empty()) {
        throw ValidationError("stack: amplitude list is empty");
    }
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
        if (!(amplitudes[j] > 0.0) || !std::isfinite(amplitudes[j])) {
            throw ValidationError("stack: amplitude " + std::to_string(j) +
                                  " must be positive and finite");
        }
    }
}

void check_nine_dilates(const BumpFamily& family) {
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double d = (family.centers[i] - family.centers[j]).norm();
            const double need = 9.0 * (family.radii[i] + family.radii[j]);
            if (d < need) {
                throw ValidationError(
                    "stack: 9-dilated balls of bumps " + std::to_string(i) +
                    " and " + std::to_string(j) + " overlap: centers " +
                    std::to_string(d) + " apart, need " + std::to_string(need));
            }
        }
    }
}

StackResult finish_stack(BumpFamily family, const Domain& domain) {
    StackResult out;
    out.field = sample(family.analytic(), domain, family.support_radius());
    out.family = std::move(family);
    return out;
}

}  // namespace

// ============================================================================
// BumpFamily
// ============================================================================

double BumpFamily::evaluate(const Vec2& y) const {
    double v = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
        v += tent((y - centers[j]).norm(), radii[j], amplitudes[j]);
    }
    return v;
}

AnalyticFn BumpFamily::analytic() const {
    BumpFamily copy = *this;
    return [copy](const Vec2& y) { return copy.evaluate(y); };
}

double BumpFamily::support_radius() const {
    double r = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
        r = std::max(r, centers[j].norm() + radii[j]);
    }
    return r;
}

std::vector<BumpSpec> BumpFamily::bump_specs() const {
    std::vector<BumpSpec> specs(size());
    for (std::size_t j = 0; j < size(); ++j) {
        BumpSpec& spec = specs[j];
        spec.center = centers[j];
        spec.extent = radii[j];
        const double radius = radii[j], amplitude = amplitudes[j];
        spec.profile = [radius, amplitude](double rho) {
            return tent(rho, radius, amplitude);
        };
    }
    return specs;
}

BumpSpec concentric_radial_spec(const BumpFamily& family) {
    if (family.size() == 0) {
        throw ValidationError("concentric_radial_spec: empty family");
    }
    for (std::size_t j = 1; j < family.size(); ++j) {
        if ((family.centers[j] - family.centers[0]).norm() != 0.0) {
            throw ValidationError(
                "concentric_radial_spec: centers differ, family is not concentric");
        }
    }
    BumpSpec spec;
    spec.center = family.centers[0];
    spec.extent = *std::max_element(family.radii.begin(), family.radii.end());
    const std::vector<double> radii = family.radii, amps = family.amplitudes;
    spec.profile = [radii, amps](double rho) {
        double v = 0.0;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            v += tent(rho, radii[j], amps[j]);
        }
        return v;
    };
    return spec;
}

// ============================================================================
// Stack factories
// ============================================================================

StackResult make_dyadic_stack(const std::vector<Vec2>& centers, double R,
                              const std::vector<double>& amplitudes,
                              StackMode mode, const Domain& domain) {
    validate_amplitudes(amplitudes);
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw ValidationError("make_dyadic_stack: base radius must be positive");
    }
    const std::size_t count = amplitudes.size();

    BumpFamily family;
    if (centers.size() == 1 && mode == StackMode::concentric) {
        family.centers.assign(count, centers[0]);
    } else if (centers.size() == count) {
        family.centers = centers;
    } else {
        throw ValidationError("make_dyadic_stack: need one center per amplitude");
    }
    family.amplitudes = amplitudes;
    family.radii.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        family.radii[j] = std::exp2(-static_cast<double>(j)) * R;
    }

    if (mode == StackMode::concentric) {
        for (std::size_t j = 1; j < count; ++j) {
            if ((family.centers[j] - family.centers[0]).norm() != 0.0) {
                throw ValidationError(
                    "make_dyadic_stack: concentric mode needs equal centers");
            }
        }
    } else {
        check_nine_dilates(family);
    }
    return finish_stack(std::move(family), domain);
}

StackResult make_equal_stack(const std::vector<Vec2>& centers, double R,
                             const std::vector<double>& amplitudes,
                             const Domain& domain) {
    validate_amplitudes(amplitudes);
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw ValidationError("make_equal_stack: radius must be positive");
    }
    if (centers.size() != amplitudes.size()) {
        throw ValidationError("make_equal_stack: need one center per amplitude");
    }
    BumpFamily family;
    family.centers = centers;
    family.amplitudes = amplitudes;
    family.radii.assign(centers.size(), R);
    check_nine_dilates(family);
    return finish_stack(std::move(family), domain);
}

// ============================================================================
// Condenser
// ============================================================================

double harmonic_stack_profile(double sigma, int truncation) {
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ValidationError(
            "harmonic_stack_profile: sigma must lie in (0,1]");
    }
    if (truncation < 1) {
        throw ValidationError("harmonic_stack_profile: truncation must be >= 1");
    }
    double v = 0.0;
    for (int j = 0; j < truncation; ++j) {
        const double term = 1.0 - std::exp2(j) * sigma;
        if (term <= 0.0) break;  // later terms only shrink further
        v += term / (j + 1);
    }
    return v;
}

CondenserFunction make_annulus_condenser(const Vec2& x0, double r, double R,
                                         int truncation, const Domain& domain) {
    if (!(r > 0.0) || !(r < R)) {
        throw ValidationError(
            "make_annulus_condenser: need 0 < inner < outer radius");
    }
    if (!(R <= domain.side_length / 4.0)) {
        throw ValidationError(
            "make_annulus_condenser: outer radius must be <= side_length/4");
    }
    if (truncation < 1) {
        throw ValidationError("make_annulus_condenser: truncation must be >= 1");
    }
    const double xi = harmonic_stack_profile(r / R, truncation);

    CondenserFunction cond;
    cond.center = x0;
    cond.inner = r;
    cond.outer = R;
    cond.truncation = truncation;
    const int J = truncation;
    cond.radial = [R, xi, J](double rho) {
        double f = 0.0;
        for (int j = 0; j < J; ++j) {
            const double term = 1.0 - std::exp2(j) * rho / R;
            if (term <= 0.0) break;
            f += term / (j + 1);
        }
        return std::min(1.0, f / xi);
    };
    const auto radial = cond.radial;
    cond.field = sample(
        [x0, radial](const Vec2& y) { return radial((y - x0).norm()); }, domain,
        x0.norm() + R);
    return cond;
}

double concentric_unit_stack_norm(const BesovParams& params, double R,
                                  int truncation) {
    if (truncation < 1) {
        throw ValidationError("concentric_unit_stack_norm: truncation must be >= 1");
    }
    BumpSpec spec;
    spec.center = Vec2::Zero();
    spec.extent = R;
    const int J = truncation;
    spec.profile = [R, J](double rho) {
        double f = 0.0;
        for (int j = 0; j < J; ++j) {
            const double term = 1.0 - std::exp2(j) * rho / R;
            if (term <= 0.0) break;
            f += term / (j + 1);
        }
        return f;
    };
    return bump_family_norm({spec}, params).value;
}

std::vector<std::pair<double, double>> annulus_norm_profile(
    const std::vector<double>& ratios, const BesovParams& params,
    const Domain& domain, int truncation) {
    std::vector<std::pair<double, double>> out;
    const double R = domain.side_length / 4.0;
    for (double ratio : ratios) {
        if (!(ratio > 1.0) || !std::isfinite(ratio)) {
            throw ValidationError("annulus_norm_profile: ratios must exceed 1");
        }
        const CondenserFunction cond =
            make_annulus_condenser(Vec2::Zero(), R / ratio, R, truncation, domain);
        BumpSpec spec;
        spec.center = cond.center;
        spec.extent = cond.outer;
        spec.profile = cond.radial;
        out.emplace_back(ratio, bump_family_norm({spec}, params).value);
    }
    return out;
}

// ============================================================================
// Anisotropic box
// ============================================================================

GridFunction make_anisotropic_box(double A1, double A2, const Domain& domain) {
    if (!(A1 > 0.0) || !(A1 <= A2)) {
        throw ValidationError("make_anisotropic_box: need 0 < A1 <= A2");
    }
    if (!(3.0 * A2 <= domain.side_length / 2.0)) {
        throw ValidationError(
            "make_anisotropic_box: doubled box must fit the domain with margin");
    }
    const double support = 2.0 * std::hypot(A1, A2);
    return sample(
        [A1, A2](const Vec2& y) {
            const double m = std::max(std::abs(y.x()) / A1, std::abs(y.y()) / A2);
            return std::clamp(2.0 - m, 0.0, 1.0);
        },
        domain, support);
}

}  // namespace besovlab
