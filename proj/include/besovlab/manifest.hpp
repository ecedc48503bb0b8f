#pragma once

#include "besovlab/besov.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/homeo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace besovlab {

// ============================================================================
// Experiment manifests: typed, text round-trippable configuration
// ============================================================================

enum class Command { norm, capacity, dichotomy, qc_check, verify_lemmas,
                     psi_profile };

std::string command_name(Command command);
std::optional<Command> parse_command_name(const std::string& name);

/// Named homeomorphism family with enough parameters for every factory.
struct MapSpec {
    std::string family = "identity";  // identity | affine | rotation | shear |
                                      // radial_stretch | eccentric
    double alpha = 2.0;               // radial_stretch exponent
    double rate = 1.0;                // eccentric growth rate
    double slope = 0.5;               // shear
    double angle = 0.0;               // rotation
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;  // affine matrix
    double b1 = 0.0, b2 = 0.0;                          // affine offset

    Homeomorphism build() const;  // throws ValidationError on unknown family
    bool operator==(const MapSpec&) const = default;
};

/// Named test function for the norm command.
struct FunctionSpec {
    std::string shape = "tent";  // tent | bump2 (quartic C^1 bump) | box
    double center_x = 0.0, center_y = 0.0;
    double radius = 1.0;
    double amplitude = 1.0;
    double aspect = 1.0;  // box only: long half-width = radius, short = radius/aspect

    /// Analytic evaluator plus its support radius about the origin.
    std::pair<AnalyticFn, double> build() const;
    bool operator==(const FunctionSpec&) const = default;
};

struct NormSpec {
    FunctionSpec function;
    std::string estimators = "difference,oscillation,hajlasz";
    int sampler_levels = 5;
    int sampler_samples = 32;
    bool operator==(const NormSpec&) const = default;
};

struct CapacitySpec {
    std::string mode = "upper";  // lower | upper
    double ball_radius = 1.0;
    double separation = 0.5;           // lower mode: segment gap
    std::vector<double> lambdas = {0.125, 0.25, 0.5, 1.0};
    std::vector<double> ratios = {2.0, 8.0, 32.0};
    int truncation = 16;
    int max_iters = 400;
    double step_scale = 0.25;
    double tolerance = 1e-6;
    double epsilon = 0.0;
    int sampler_levels = 5;
    int sampler_samples = 32;
    bool operator==(const CapacitySpec&) const = default;
};

struct DichotomySpec {
    MapSpec map{.family = "radial_stretch", .alpha = 2.0};
    int levels = 5;
    std::vector<double> amplitudes;  // empty = all ones
    bool operator==(const DichotomySpec&) const = default;
};

struct QcSpec {
    MapSpec map;
    int probes = 20000;
    bool operator==(const QcSpec&) const = default;
};

struct PsiSpec {
    std::vector<double> ratios = {2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    int truncation = 16;
    bool operator==(const PsiSpec&) const = default;
};

struct LemmaSuiteSpec {
    int levels = 4;      // dyadic stack depth
    int count = 5;       // equal-radius stack size
    int resolution = 32; // capacity mini-solves
    bool operator==(const LemmaSuiteSpec&) const = default;
};

/**
 * Complete experiment description. The text form is INI-style sections with
 * `key = value` lines; parse(print(m)) == m exactly (floats are printed with
 * 17 significant digits). The seed is mandatory in the text form; every
 * other key falls back to these defaults. Unknown sections or keys are
 * rejected with a field-path diagnostic.
 */
struct ExperimentManifest {
    Command command = Command::norm;

    // [params]
    double s = 0.5;
    double q = 2.0;
    std::optional<double> p_override;

    // [domain]
    Domain domain{8.0, 64};

    // [run]
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool sequential = false;
    std::string out_dir = ".";

    // [outputs] (empty = default file names per command)
    std::string csv_path;
    std::string json_path;

    NormSpec norm;
    CapacitySpec capacity;
    DichotomySpec dichotomy;
    QcSpec qc;
    PsiSpec psi;
    LemmaSuiteSpec lemmas;

    bool operator==(const ExperimentManifest&) const = default;

    BesovParams params() const { return BesovParams::make(s, q, p_override); }
};

/// Parses the text form. Structural failures (bad syntax, unknown keys,
/// missing seed) throw ValidationError with a field path; value-level
/// problems are left to validate_manifest.
ExperimentManifest parse_manifest(const std::string& text);

std::string print_manifest(const ExperimentManifest& manifest);

/// All invariant violations as "field.path: message" lines; nothing is
/// executed. Empty means the manifest is runnable.
std::vector<std::string> validate_manifest(const ExperimentManifest& manifest);

// ============================================================================
// Output formatting shared by the runner and tests
// ============================================================================

/// Shortest representation with 17 significant digits (%.17g).
std::string format_double(double value);

/// RFC-4180 field escaping: quotes applied only when the value needs them.
std::string csv_escape(const std::string& field);

/// One CSV line with CRLF terminator.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace besovlab
