// besov-lab: manifest-driven experiment runner for the library.
//
// One experiment per process. Artifacts are CSV (RFC 4180, CRLF, header
// row, 17 significant digits) and JSON; identical manifests re-run with
// --sequential produce byte-identical outputs. Environment variables are
// never consulted.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "besovlab/besov.hpp"
#include "besovlab/bump_norm.hpp"
#include "besovlab/capacity.hpp"
#include "besovlab/constructions.hpp"
#include "besovlab/dichotomy.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/homeo.hpp"
#include "besovlab/manifest.hpp"
#include "besovlab/offset_sampler.hpp"
#include "besovlab/rng.hpp"
#include "besovlab/stats.hpp"
#include "besovlab/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace besovlab;

namespace {

std::string fmt6(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

struct OutputPaths {
    fs::path csv;
    fs::path json_path;
};

OutputPaths resolve_outputs(const ExperimentManifest& m) {
    const std::string base = command_name(m.command);
    fs::path dir(m.out_dir);
    try {
        if (!dir.empty()) fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("cannot create output directory: ") +
                      e.what());
    }
    OutputPaths out;
    out.csv = dir / (m.csv_path.empty() ? base + ".csv" : m.csv_path);
    out.json_path = dir / (m.json_path.empty() ? base + ".json" : m.json_path);
    return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void write_json_file(const fs::path& path, const json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

unsigned effective_threads(const ExperimentManifest& m) {
    return m.sequential ? 1u : m.threads;
}

// ---------------------------------------------------------------------------
// norm
// ---------------------------------------------------------------------------

int run_norm(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    const Domain domain = Domain::make(m.domain.side_length, m.domain.resolution);
    const unsigned threads = effective_threads(m);

    auto [fn, support] = m.norm.function.build();
    const GridFunction f = sample(fn, domain, support);

    bool want_difference = false, want_oscillation = false, want_hajlasz = false;
    {
        std::istringstream stream(m.norm.estimators);
        std::string token;
        while (std::getline(stream, token, ',')) {
            std::string name;
            for (char c : token) {
                if (!std::isspace(static_cast<unsigned char>(c))) name += c;
            }
            if (name == "difference") want_difference = true;
            if (name == "oscillation") want_oscillation = true;
            if (name == "hajlasz") want_hajlasz = true;
        }
    }

    std::optional<double> difference, oscillation, hajlasz;
    if (want_difference) {
        const OffsetSampler sampler = build_offset_sampler(
            domain, domain.side_length / 2.0, m.norm.sampler_levels,
            m.norm.sampler_samples, m.seed);
        difference = besov_norm_difference(f, params, sampler, threads);
    }
    if (want_oscillation) {
        const auto profile = oscillation_profile(
            f, params, default_oscillation_scales(domain), threads);
        oscillation = besov_norm_from_oscillation(profile, params);
    }
    if (want_hajlasz) {
        const auto grad =
            hajlasz_halfsup_gradient(f, params, default_hajlasz_levels(domain));
        hajlasz = hajlasz_upper_bound(grad, params);
    }

    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    std::string csv = csv_line({"shape", "s", "q", "p", "seed", "difference",
                                "oscillation", "hajlasz"});
    csv += csv_line({m.norm.function.shape, format_double(params.s),
                     format_double(params.q), format_double(params.p()),
                     std::to_string(m.seed), cell(difference),
                     cell(oscillation), cell(hajlasz)});
    write_text_file(out.csv, csv);

    json doc;
    doc["command"] = "norm";
    doc["shape"] = m.norm.function.shape;
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["seed"] = m.seed;
    if (difference) doc["difference"] = *difference;
    if (oscillation) doc["oscillation"] = *oscillation;
    if (hajlasz) doc["hajlasz"] = *hajlasz;
    write_json_file(out.json_path, doc);

    std::string line = "norm " + m.norm.function.shape + ":";
    if (difference) line += " difference=" + fmt6(*difference);
    if (oscillation) line += " oscillation=" + fmt6(*oscillation);
    if (hajlasz) line += " hajlasz=" + fmt6(*hajlasz);
    std::cout << line << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

int run_capacity(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    const Domain domain = Domain::make(m.domain.side_length, m.domain.resolution);
    const CapacitySpec& cap = m.capacity;

    SolverConfig cfg;
    cfg.max_iters = cap.max_iters;
    cfg.step_scale = cap.step_scale;
    cfg.tolerance = cap.tolerance;
    cfg.epsilon = cap.epsilon;
    cfg.threads = effective_threads(m);

    const OffsetSampler sampler =
        build_offset_sampler(domain, domain.side_length / 2.0,
                             cap.sampler_levels, cap.sampler_samples, m.seed);

    if (cap.mode == "lower") {
        const CapacityLowerReport report = verify_capacity_lower(
            cap.lambdas, params, domain, cap.ball_radius, cap.separation,
            sampler, cfg);
        std::string csv = csv_line(
            {"lambda_requested", "lambda", "value", "iterations", "converged"});
        json entries = json::array();
        for (const auto& e : report.entries) {
            csv += csv_line({format_double(e.lambda_requested),
                             format_double(e.lambda), format_double(e.value),
                             std::to_string(e.iterations),
                             e.converged ? "true" : "false"});
            entries.push_back({{"lambda_requested", e.lambda_requested},
                               {"lambda", e.lambda},
                               {"value", e.value},
                               {"iterations", e.iterations},
                               {"converged", e.converged}});
            std::cout << "capacity lower lambda=" << fmt6(e.lambda)
                      << ": value=" << fmt6(e.value)
                      << (e.converged ? "" : " (unconverged)") << "\n";
        }
        write_text_file(out.csv, csv);
        json doc;
        doc["command"] = "capacity";
        doc["mode"] = "lower";
        doc["s"] = params.s;
        doc["q"] = params.q;
        doc["p"] = params.p();
        doc["seed"] = m.seed;
        doc["entries"] = entries;
        doc["slope"] = report.slope;
        doc["floor_value"] = report.floor_value;
        doc["excluded"] = report.excluded;
        doc["notes"] = report.notes;
        write_json_file(out.json_path, doc);
        std::cout << "capacity lower: slope=" << fmt6(report.slope)
                  << " floor=" << fmt6(report.floor_value) << "\n";
        return 0;
    }

    const CapacityUpperReport report = verify_capacity_upper(
        cap.ratios, params, domain, sampler, cfg, cap.truncation);
    std::string csv = csv_line(
        {"ratio", "solver_value", "construction_value", "iterations",
         "converged"});
    json entries = json::array();
    for (const auto& e : report.entries) {
        csv += csv_line({format_double(e.ratio), format_double(e.solver_value),
                         format_double(e.construction_value),
                         std::to_string(e.iterations),
                         e.converged ? "true" : "false"});
        entries.push_back({{"ratio", e.ratio},
                           {"solver_value", e.solver_value},
                           {"construction_value", e.construction_value},
                           {"iterations", e.iterations},
                           {"converged", e.converged}});
        std::cout << "capacity upper ratio=" << fmt6(e.ratio)
                  << ": solver=" << fmt6(e.solver_value)
                  << " construction=" << fmt6(e.construction_value) << "\n";
    }
    write_text_file(out.csv, csv);
    json doc;
    doc["command"] = "capacity";
    doc["mode"] = "upper";
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["seed"] = m.seed;
    doc["entries"] = entries;
    doc["notes"] = report.notes;
    write_json_file(out.json_path, doc);
    return 0;
}

// ---------------------------------------------------------------------------
// dichotomy
// ---------------------------------------------------------------------------

int run_dichotomy(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    const Domain domain = Domain::make(m.domain.side_length, m.domain.resolution);
    const Homeomorphism phi = m.dichotomy.map.build();

    BumpNormConfig config;
    config.threads = static_cast<int>(effective_threads(m));
    const DichotomyReport report =
        dichotomy_experiment(phi, m.dichotomy.levels, m.dichotomy.amplitudes,
                             params, domain, m.seed, config);

    std::string csv = csv_line({"family", "alpha", "s", "q", "p", "levels",
                                "norm_g", "norm_g_phi", "ratio", "seed"});
    for (const auto& row : report.rows) {
        csv += csv_line({row.family, format_double(row.alpha),
                         format_double(row.s), format_double(row.q),
                         format_double(row.p), std::to_string(row.levels),
                         format_double(row.norm_g),
                         format_double(row.norm_g_phi),
                         format_double(row.ratio), std::to_string(row.seed)});
        std::cout << "dichotomy " << row.family << " levels=" << row.levels
                  << ": norm=" << fmt6(row.norm_g)
                  << " composed=" << fmt6(row.norm_g_phi)
                  << " ratio=" << fmt6(row.ratio) << "\n";
    }
    write_text_file(out.csv, csv);

    json doc;
    doc["command"] = "dichotomy";
    doc["map"] = phi.label;
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["seed"] = m.seed;
    doc["max_ratio"] = report.max_ratio;
    doc["slope"] = report.slope;
    doc["slope_reference"] = report.slope_reference;
    doc["notes"] = report.notes;
    write_json_file(out.json_path, doc);

    std::cout << "dichotomy " << phi.label << ": slope=" << fmt6(report.slope)
              << " reference=" << fmt6(report.slope_reference) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// qc-check
// ---------------------------------------------------------------------------

int run_qc_check(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    const Domain domain = Domain::make(m.domain.side_length, m.domain.resolution);
    const Homeomorphism phi = m.qc.map.build();

    const QcCheckReport report =
        qc_check(phi, params, m.qc.probes, m.seed, domain);

    std::string csv = csv_line({"band", "nodes", "measure"});
    json bands = json::array();
    for (const auto& entry : report.census.entries) {
        csv += csv_line({std::to_string(entry.k), std::to_string(entry.nodes),
                         format_double(entry.measure)});
        bands.push_back({{"band", entry.k},
                         {"nodes", entry.nodes},
                         {"measure", entry.measure}});
    }
    write_text_file(out.csv, csv);

    json probes = json::array();
    for (const auto& probe : report.condenser_probes) {
        probes.push_back({{"source_center_x", probe.source_center.x()},
                          {"source_center_y", probe.source_center.y()},
                          {"source_r", probe.source_r},
                          {"source_cap_r", probe.source_cap_r},
                          {"image_r", probe.image_r},
                          {"image_cap_r", probe.image_cap_r},
                          {"image_ratio", probe.image_ratio},
                          {"source_value", probe.source_value},
                          {"image_value", probe.image_value},
                          {"skipped", probe.skipped},
                          {"note", probe.note}});
    }

    json doc;
    doc["command"] = "qc-check";
    doc["map"] = phi.label;
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["seed"] = m.seed;
    doc["verdict"] = report.verdict;
    doc["h_hat"] = report.h_hat;
    doc["h_hat_base"] = report.h_hat_base;
    doc["probes"] = report.probes;
    doc["jacobian_bands"] = bands;
    doc["zero_nodes"] = report.census.zero_nodes;
    doc["zero_measure"] = report.census.zero_measure;
    doc["census_warnings"] = report.census.warnings;
    doc["condenser_probes"] = probes;
    doc["skipped_probes"] = report.skipped_probes;
    doc["notes"] = report.notes;
    write_json_file(out.json_path, doc);

    std::cout << "qc-check " << phi.label << ": verdict=" << report.verdict
              << " H_hat=" << fmt6(report.h_hat)
              << " bands=" << report.census.bins() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify-lemmas
// ---------------------------------------------------------------------------

struct SuiteRow {
    std::string suite;
    std::string statistic;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
};

// Concentric dyadic-radius stack: measured seminorm against the l^q size of
// the amplitude vector, across random amplitudes and two outer radii.
void suite_dyadic_stack(const ExperimentManifest& m, const BesovParams& params,
                        const Domain& domain, const BumpNormConfig& config,
                        std::vector<SuiteRow>* rows) {
    std::mt19937_64 rng(m.seed ^ 0x11d5eedULL);
    const int levels = m.lemmas.levels;
    double ratio_min = kInfinity, ratio_max = 0.0, drift_max = 0.0;
    for (int draw = 0; draw < m.lemmas.count; ++draw) {
        std::vector<double> b(static_cast<std::size_t>(levels));
        for (double& value : b) value = 0.5 + 1.5 * detail::uniform01(rng);
        double lq = 0.0;
        if (std::isinf(params.q)) {
            for (double value : b) lq = std::max(lq, value);
        } else {
            for (double value : b) lq += std::pow(value, params.q);
            lq = std::pow(lq, 1.0 / params.q);
        }
        double per_radius[2] = {0.0, 0.0};
        const double radii[2] = {0.5, 1.0};
        for (int i = 0; i < 2; ++i) {
            const StackResult stack = make_dyadic_stack(
                {Vec2::Zero()}, radii[i], b, StackMode::concentric, domain);
            const BumpSpec spec = concentric_radial_spec(stack.family);
            const double norm = bump_family_norm({spec}, params, config).value;
            per_radius[i] = norm / lq;
            ratio_min = std::min(ratio_min, per_radius[i]);
            ratio_max = std::max(ratio_max, per_radius[i]);
        }
        drift_max = std::max(drift_max,
                             std::abs(per_radius[1] / per_radius[0] - 1.0));
    }
    rows->push_back({"dyadic-stack-bracket", "amplitude-spread",
                     ratio_max / ratio_min, 1.0, 5.0,
                     ratio_max / ratio_min <= 5.0});
    rows->push_back({"dyadic-stack-bracket", "scale-drift", drift_max, 0.0,
                     0.3, drift_max <= 0.3});
}

// Disjoint equal-radius family: measured seminorm against the l^p size of
// the amplitude vector (per-bump energies add; tents are scale-free at the
// scaling-invariant index).
void suite_equal_radius(const ExperimentManifest& m, const BesovParams& params,
                        const BumpNormConfig& config,
                        std::vector<SuiteRow>* rows) {
    std::mt19937_64 rng(m.seed ^ 0x2b5eedULL);
    const std::vector<Vec2> centers = {
        Vec2(-1.4, -0.7), Vec2(0.0, -0.7), Vec2(1.4, -0.7),
        Vec2(-1.4, 0.7),  Vec2(0.0, 0.7),  Vec2(1.4, 0.7)};
    const double p = params.p();
    double ratio_min = kInfinity, ratio_max = 0.0, drift_max = 0.0;
    for (int draw = 0; draw < m.lemmas.count; ++draw) {
        std::vector<double> b(centers.size());
        for (double& value : b) value = 0.5 + 1.5 * detail::uniform01(rng);
        double lp = 0.0;
        for (double value : b) lp += std::pow(value, p);
        lp = std::pow(lp, 1.0 / p);
        double per_radius[2] = {0.0, 0.0};
        const double radii[2] = {0.05, 0.07};
        for (int i = 0; i < 2; ++i) {
            BumpFamily family;
            family.centers = centers;
            family.radii.assign(centers.size(), radii[i]);
            family.amplitudes = b;
            const double norm =
                bump_family_norm(family.bump_specs(), params, config).value;
            per_radius[i] = norm / lp;
            ratio_min = std::min(ratio_min, per_radius[i]);
            ratio_max = std::max(ratio_max, per_radius[i]);
        }
        drift_max = std::max(drift_max,
                             std::abs(per_radius[1] / per_radius[0] - 1.0));
    }
    rows->push_back({"equal-radius-bracket", "amplitude-spread",
                     ratio_max / ratio_min, 1.0, 5.0,
                     ratio_max / ratio_min <= 5.0});
    rows->push_back({"equal-radius-bracket", "scale-drift", drift_max, 0.0,
                     0.3, drift_max <= 0.3});
}

// Plate-condenser sweep: capacity stays uniformly positive as the plate
// width shrinks, and its growth in the width is at most lambda^(1/q) up to
// discretization slack.
void suite_plate_capacity(const ExperimentManifest& m,
                          const BesovParams& params, unsigned threads,
                          std::vector<SuiteRow>* rows) {
    const Domain domain =
        Domain::make(m.domain.side_length, m.lemmas.resolution);
    const OffsetSampler sampler = build_offset_sampler(
        domain, domain.side_length / 2.0, 4, 24, m.seed ^ 0xcafeULL);
    SolverConfig cfg;
    cfg.max_iters = 150;
    cfg.tolerance = 1e-5;
    cfg.threads = threads;
    const CapacityLowerReport report = verify_capacity_lower(
        {0.25, 0.5, 1.0}, params, domain, 1.0, 0.5, sampler, cfg);
    const double slope_cap = 1.0 / params.q + 0.3;
    rows->push_back({"plate-capacity-slope", "fitted-slope", report.slope,
                     -kInfinity, slope_cap, report.slope <= slope_cap});
    rows->push_back({"plate-capacity-slope", "floor-value", report.floor_value,
                     0.0, kInfinity, report.floor_value > 0.0});
}

// Annulus condensers: the solver result never exceeds the explicit
// construction it starts from, and both decrease in the radius ratio.
void suite_annulus_comparison(const ExperimentManifest& m,
                              const BesovParams& params, unsigned threads,
                              std::vector<SuiteRow>* rows) {
    const Domain domain =
        Domain::make(m.domain.side_length, m.lemmas.resolution);
    const OffsetSampler sampler = build_offset_sampler(
        domain, domain.side_length / 2.0, 4, 24, m.seed ^ 0xfacadeULL);
    SolverConfig cfg;
    cfg.max_iters = 150;
    cfg.tolerance = 1e-5;
    cfg.threads = threads;
    const CapacityUpperReport report =
        verify_capacity_upper({2.0, 8.0}, params, domain, sampler, cfg, 16);
    double gap = -kInfinity;
    double min_decrease = kInfinity;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        gap = std::max(gap, e.solver_value - e.construction_value);
        if (i + 1 < report.entries.size()) {
            const auto& next = report.entries[i + 1];
            min_decrease = std::min(min_decrease,
                                    e.solver_value - next.solver_value);
            min_decrease =
                std::min(min_decrease,
                         e.construction_value - next.construction_value);
        }
    }
    rows->push_back({"annulus-capacity-comparison", "feasibility-gap", gap,
                     -kInfinity, 1e-12, gap <= 1e-12});
    rows->push_back({"annulus-capacity-comparison", "ratio-monotonicity",
                     min_decrease, 0.0, kInfinity, min_decrease > 0.0});
}

// Anisotropic plates: the seminorm grows with the aspect ratio like
// aspect^(s/2) when the long side is held fixed.
void suite_anisotropy(const ExperimentManifest& m, const BesovParams& params,
                      unsigned threads, std::vector<SuiteRow>* rows) {
    const int resolution = std::max(m.lemmas.resolution, 96);
    const Domain domain = Domain::make(m.domain.side_length, resolution);
    const OffsetSampler sampler = build_offset_sampler(
        domain, domain.side_length / 2.0, 5, 32, m.seed ^ 0xa15eULL);
    const std::vector<double> aspects = {1.0, 2.0, 4.0};
    const double A2 = 0.7;
    std::vector<double> norms;
    for (double aspect : aspects) {
        const GridFunction box = make_anisotropic_box(A2 / aspect, A2, domain);
        norms.push_back(besov_norm_difference(box, params, sampler, threads));
    }
    const double slope = fit_loglog_slope(aspects, norms);
    const double target = params.s / 2.0;
    rows->push_back({"anisotropy-exponent", "fitted-exponent", slope,
                     0.7 * target, 1.3 * target,
                     slope >= 0.7 * target && slope <= 1.3 * target});
}

int run_verify_lemmas(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    if (std::isinf(params.q)) {
        throw ValidationError(
            "verify-lemmas requires finite q (the capacity suites run the "
            "convex solver)");
    }
    const unsigned threads = effective_threads(m);
    const Domain stack_domain =
        Domain::make(m.domain.side_length, m.lemmas.resolution);
    BumpNormConfig config;
    config.threads = static_cast<int>(threads);

    std::vector<SuiteRow> rows;
    suite_dyadic_stack(m, params, stack_domain, config, &rows);
    suite_equal_radius(m, params, config, &rows);
    suite_plate_capacity(m, params, threads, &rows);
    suite_annulus_comparison(m, params, threads, &rows);
    suite_anisotropy(m, params, threads, &rows);

    std::string csv =
        csv_line({"suite", "statistic", "value", "lower", "upper", "status"});
    json entries = json::array();
    int failures = 0;
    for (const auto& row : rows) {
        csv += csv_line({row.suite, row.statistic, format_double(row.value),
                         format_double(row.lower), format_double(row.upper),
                         row.pass ? "pass" : "fail"});
        entries.push_back({{"suite", row.suite},
                           {"statistic", row.statistic},
                           {"value", row.value},
                           {"lower", row.lower},
                           {"upper", row.upper},
                           {"pass", row.pass}});
        if (!row.pass) ++failures;
        std::cout << "verify-lemmas " << row.suite << "/" << row.statistic
                  << ": value=" << fmt6(row.value) << " ["
                  << (row.pass ? "pass" : "fail") << "]\n";
    }
    write_text_file(out.csv, csv);

    json doc;
    doc["command"] = "verify-lemmas";
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["seed"] = m.seed;
    doc["rows"] = entries;
    doc["failures"] = failures;
    write_json_file(out.json_path, doc);

    std::cout << "verify-lemmas: " << (rows.size() - failures) << "/"
              << rows.size() << " checks passed\n";
    return 0;
}

// ---------------------------------------------------------------------------
// psi-profile
// ---------------------------------------------------------------------------

int run_psi_profile(const ExperimentManifest& m, const OutputPaths& out) {
    const BesovParams params = m.params();
    const Domain domain = Domain::make(m.domain.side_length, m.domain.resolution);
    const auto profile =
        annulus_norm_profile(m.psi.ratios, params, domain, m.psi.truncation);

    std::string csv = csv_line({"ratio", "value"});
    json entries = json::array();
    for (const auto& [ratio, value] : profile) {
        csv += csv_line({format_double(ratio), format_double(value)});
        entries.push_back({{"ratio", ratio}, {"value", value}});
        std::cout << "psi-profile ratio=" << fmt6(ratio)
                  << ": value=" << fmt6(value) << "\n";
    }
    write_text_file(out.csv, csv);

    json doc;
    doc["command"] = "psi-profile";
    doc["s"] = params.s;
    doc["q"] = params.q;
    doc["p"] = params.p();
    doc["truncation"] = m.psi.truncation;
    doc["entries"] = entries;
    write_json_file(out.json_path, doc);
    return 0;
}

int dispatch(const ExperimentManifest& m) {
    const OutputPaths out = resolve_outputs(m);
    switch (m.command) {
        case Command::norm: return run_norm(m, out);
        case Command::capacity: return run_capacity(m, out);
        case Command::dichotomy: return run_dichotomy(m, out);
        case Command::qc_check: return run_qc_check(m, out);
        case Command::verify_lemmas: return run_verify_lemmas(m, out);
        case Command::psi_profile: return run_psi_profile(m, out);
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "besov-lab: scaling-invariant smoothness norms, condenser "
        "capacities, and composition experiments on sampled planar "
        "functions"};
    app.require_subcommand(0, 1);

    std::string manifest_path;
    std::uint64_t seed_value = 0;
    int threads_value = 1;
    std::string out_dir_value;
    bool sequential = false;
    bool validate_only = false;

    auto* opt_manifest =
        app.add_option("--manifest", manifest_path, "Manifest file to run");
    auto* opt_seed =
        app.add_option("--seed", seed_value, "Override the manifest seed");
    auto* opt_threads = app.add_option("--threads", threads_value,
                                       "Worker threads for one experiment");
    auto* opt_out_dir =
        app.add_option("--out-dir", out_dir_value, "Directory for artifacts");
    app.add_flag("--sequential", sequential,
                 "Single-threaded bit-reproducible mode");
    app.add_flag("--validate-only", validate_only,
                 "Check the manifest and print diagnostics without running");

    std::vector<CLI::App*> subs;
    for (Command c : {Command::norm, Command::capacity, Command::dichotomy,
                      Command::qc_check, Command::verify_lemmas,
                      Command::psi_profile}) {
        CLI::App* sub =
            app.add_subcommand(command_name(c), "Run the " + command_name(c) +
                                                    " experiment");
        sub->fallthrough(true);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ExperimentManifest manifest;
        if (opt_manifest->count() > 0) {
            std::ifstream in(manifest_path, std::ios::binary);
            if (!in) {
                throw IoError("cannot read manifest '" + manifest_path + "'");
            }
            std::ostringstream buffer;
            buffer << in.rdbuf();
            manifest = parse_manifest(buffer.str());
        }

        const Command commands[] = {Command::norm,       Command::capacity,
                                    Command::dichotomy,  Command::qc_check,
                                    Command::verify_lemmas,
                                    Command::psi_profile};
        bool sub_given = false;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) {
                manifest.command = commands[i];
                sub_given = true;
            }
        }
        if (!sub_given && opt_manifest->count() == 0) {
            std::cerr << app.help() << std::flush;
            return 2;
        }

        if (opt_seed->count() > 0) manifest.seed = seed_value;
        if (opt_threads->count() > 0) {
            if (threads_value < 1) {
                throw ValidationError("--threads must be >= 1");
            }
            manifest.threads = static_cast<unsigned>(threads_value);
        }
        if (opt_out_dir->count() > 0) manifest.out_dir = out_dir_value;
        if (sequential) {
            manifest.sequential = true;
            manifest.threads = 1;
        }

        const std::vector<std::string> diagnostics =
            validate_manifest(manifest);
        if (validate_only) {
            for (const std::string& d : diagnostics) std::cout << d << "\n";
            if (diagnostics.empty()) std::cout << "manifest valid\n";
            return diagnostics.empty() ? 0 : 2;
        }
        if (!diagnostics.empty()) {
            for (const std::string& d : diagnostics) {
                std::cerr << "invalid manifest: " << d << "\n";
            }
            return 2;
        }
        return dispatch(manifest);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
}
