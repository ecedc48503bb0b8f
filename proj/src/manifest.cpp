#include "besovlab/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace besovlab {

// ============================================================================
// Names
// ============================================================================

std::string command_name(Command command) {
    switch (command) {
        case Command::norm: return "norm";
        case Command::capacity: return "capacity";
        case Command::dichotomy: return "dichotomy";
        case Command::qc_check: return "qc-check";
        case Command::verify_lemmas: return "verify-lemmas";
        case Command::psi_profile: return "psi-profile";
    }
    return "norm";
}

std::optional<Command> parse_command_name(const std::string& name) {
    for (Command c : {Command::norm, Command::capacity, Command::dichotomy,
                      Command::qc_check, Command::verify_lemmas,
                      Command::psi_profile}) {
        if (command_name(c) == name) return c;
    }
    return std::nullopt;
}

namespace {

const std::set<std::string> kMapFamilies = {
    "identity", "affine", "rotation", "shear", "radial_stretch", "eccentric"};
const std::set<std::string> kShapes = {"tent", "bump2", "box"};

}  // namespace

// ============================================================================
// Builders
// ============================================================================

Homeomorphism MapSpec::build() const {
    if (family == "identity") return identity_map();
    if (family == "affine") {
        Eigen::Matrix2d a;
        a << a11, a12, a21, a22;
        return affine_map(a, Vec2(b1, b2));
    }
    if (family == "rotation") return rotation_map(angle);
    if (family == "shear") return shear_map(slope);
    if (family == "radial_stretch") return radial_stretch(alpha);
    if (family == "eccentric") return eccentric_scaler(rate);
    throw ValidationError("unknown map family '" + family + "'");
}

std::pair<AnalyticFn, double> FunctionSpec::build() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ValidationError("function radius must be positive");
    }
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw ValidationError("function amplitude must be positive");
    }
    const Vec2 center(center_x, center_y);
    if (shape == "tent") {
        const double r = radius, a = amplitude;
        AnalyticFn f = [center, r, a](const Vec2& x) {
            return a * std::max(0.0, 1.0 - (x - center).norm() / r);
        };
        return {f, center.norm() + radius};
    }
    if (shape == "bump2") {
        const double r = radius, a = amplitude;
        AnalyticFn f = [center, r, a](const Vec2& x) {
            const double t = (x - center).squaredNorm() / (r * r);
            const double base = std::max(0.0, 1.0 - t);
            return a * base * base;
        };
        return {f, center.norm() + radius};
    }
    if (shape == "box") {
        if (!(aspect >= 1.0)) {
            throw ValidationError("box aspect must be >= 1");
        }
        const double a2 = radius, a1 = radius / aspect, amp = amplitude;
        AnalyticFn f = [center, a1, a2, amp](const Vec2& x) {
            const Vec2 y = x - center;
            const double level =
                std::max(std::abs(y(0)) / a1, std::abs(y(1)) / a2);
            return amp * std::clamp(2.0 - level, 0.0, 1.0);
        };
        return {f, center.norm() + 2.0 * std::hypot(a1, a2)};
    }
    throw ValidationError("unknown function shape '" + shape + "'");
}

// ============================================================================
// Text form
// ============================================================================

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string join_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

struct Parser {
    std::string section;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& message) const {
        std::ostringstream msg;
        msg << "manifest line " << line_no << ": " << message;
        throw ValidationError(msg.str());
    }

    std::string path(const std::string& key) const {
        return section.empty() ? key : section + "." + key;
    }

    double number(const std::string& key, const std::string& value) const {
        const char* begin = value.c_str();
        char* end = nullptr;
        const double parsed = std::strtod(begin, &end);
        if (end == begin || *end != '\0') {
            fail(path(key) + ": expected a number, got '" + value + "'");
        }
        return parsed;
    }

    int integer(const std::string& key, const std::string& value) const {
        const double parsed = number(key, value);
        const int as_int = static_cast<int>(parsed);
        if (static_cast<double>(as_int) != parsed) {
            fail(path(key) + ": expected an integer, got '" + value + "'");
        }
        return as_int;
    }

    std::uint64_t unsigned64(const std::string& key,
                             const std::string& value) const {
        const char* begin = value.c_str();
        char* end = nullptr;
        const unsigned long long parsed = std::strtoull(begin, &end, 10);
        if (end == begin || *end != '\0' || value.find('-') != std::string::npos) {
            fail(path(key) + ": expected an unsigned integer, got '" + value +
                 "'");
        }
        return parsed;
    }

    bool boolean(const std::string& key, const std::string& value) const {
        if (value == "true") return true;
        if (value == "false") return false;
        fail(path(key) + ": expected true or false, got '" + value + "'");
    }

    std::vector<double> list(const std::string& key,
                             const std::string& value) const {
        std::vector<double> out;
        std::string token;
        std::istringstream stream(value);
        while (std::getline(stream, token, ',')) {
            out.push_back(number(key, trim(token)));
        }
        if (out.empty()) fail(path(key) + ": expected a comma-separated list");
        return out;
    }
};

void apply_map_key(MapSpec* map, const Parser& parser, const std::string& key,
                   const std::string& value, bool* handled) {
    *handled = true;
    if (key == "family") {
        map->family = value;
    } else if (key == "alpha") {
        map->alpha = parser.number(key, value);
    } else if (key == "rate") {
        map->rate = parser.number(key, value);
    } else if (key == "slope") {
        map->slope = parser.number(key, value);
    } else if (key == "angle") {
        map->angle = parser.number(key, value);
    } else if (key == "a11") {
        map->a11 = parser.number(key, value);
    } else if (key == "a12") {
        map->a12 = parser.number(key, value);
    } else if (key == "a21") {
        map->a21 = parser.number(key, value);
    } else if (key == "a22") {
        map->a22 = parser.number(key, value);
    } else if (key == "b1") {
        map->b1 = parser.number(key, value);
    } else if (key == "b2") {
        map->b2 = parser.number(key, value);
    } else {
        *handled = false;
    }
}

void print_map_spec(std::ostringstream& out, const MapSpec& map) {
    out << "family = " << map.family << "\n";
    out << "alpha = " << format_double(map.alpha) << "\n";
    out << "rate = " << format_double(map.rate) << "\n";
    out << "slope = " << format_double(map.slope) << "\n";
    out << "angle = " << format_double(map.angle) << "\n";
    out << "a11 = " << format_double(map.a11) << "\n";
    out << "a12 = " << format_double(map.a12) << "\n";
    out << "a21 = " << format_double(map.a21) << "\n";
    out << "a22 = " << format_double(map.a22) << "\n";
    out << "b1 = " << format_double(map.b1) << "\n";
    out << "b2 = " << format_double(map.b2) << "\n";
}

}  // namespace

ExperimentManifest parse_manifest(const std::string& text) {
    ExperimentManifest m;
    Parser parser;
    bool seed_seen = false;
    const std::set<std::string> known_sections = {
        "params", "domain",   "run",      "outputs",       "norm",
        "capacity", "dichotomy", "qc-check", "verify-lemmas", "psi-profile"};

    std::istringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        ++parser.line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') parser.fail("unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!known_sections.count(name)) {
                parser.fail("unknown section [" + name + "]");
            }
            parser.section = name;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            parser.fail("expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parser.fail("empty key");

        const std::string& sec = parser.section;
        bool handled = true;
        if (sec.empty()) {
            if (key == "command") {
                const auto cmd = parse_command_name(value);
                if (!cmd) parser.fail("unknown command '" + value + "'");
                m.command = *cmd;
            } else {
                handled = false;
            }
        } else if (sec == "params") {
            if (key == "s") {
                m.s = parser.number(key, value);
            } else if (key == "q") {
                m.q = parser.number(key, value);
            } else if (key == "p_override") {
                m.p_override = parser.number(key, value);
            } else {
                handled = false;
            }
        } else if (sec == "domain") {
            if (key == "side_length") {
                m.domain.side_length = parser.number(key, value);
            } else if (key == "resolution") {
                m.domain.resolution = parser.integer(key, value);
            } else {
                handled = false;
            }
        } else if (sec == "run") {
            if (key == "seed") {
                m.seed = parser.unsigned64(key, value);
                seed_seen = true;
            } else if (key == "threads") {
                const int t = parser.integer(key, value);
                if (t < 1) parser.fail("run.threads: must be >= 1");
                m.threads = static_cast<unsigned>(t);
            } else if (key == "sequential") {
                m.sequential = parser.boolean(key, value);
            } else if (key == "out_dir") {
                m.out_dir = value;
            } else {
                handled = false;
            }
        } else if (sec == "outputs") {
            if (key == "csv") {
                m.csv_path = value;
            } else if (key == "json") {
                m.json_path = value;
            } else {
                handled = false;
            }
        } else if (sec == "norm") {
            if (key == "shape") {
                m.norm.function.shape = value;
            } else if (key == "center_x") {
                m.norm.function.center_x = parser.number(key, value);
            } else if (key == "center_y") {
                m.norm.function.center_y = parser.number(key, value);
            } else if (key == "radius") {
                m.norm.function.radius = parser.number(key, value);
            } else if (key == "amplitude") {
                m.norm.function.amplitude = parser.number(key, value);
            } else if (key == "aspect") {
                m.norm.function.aspect = parser.number(key, value);
            } else if (key == "estimators") {
                m.norm.estimators = value;
            } else if (key == "sampler_levels") {
                m.norm.sampler_levels = parser.integer(key, value);
            } else if (key == "sampler_samples") {
                m.norm.sampler_samples = parser.integer(key, value);
            } else {
                handled = false;
            }
        } else if (sec == "capacity") {
            if (key == "mode") {
                m.capacity.mode = value;
            } else if (key == "ball_radius") {
                m.capacity.ball_radius = parser.number(key, value);
            } else if (key == "separation") {
                m.capacity.separation = parser.number(key, value);
            } else if (key == "lambdas") {
                m.capacity.lambdas = parser.list(key, value);
            } else if (key == "ratios") {
                m.capacity.ratios = parser.list(key, value);
            } else if (key == "truncation") {
                m.capacity.truncation = parser.integer(key, value);
            } else if (key == "max_iters") {
                m.capacity.max_iters = parser.integer(key, value);
            } else if (key == "step_scale") {
                m.capacity.step_scale = parser.number(key, value);
            } else if (key == "tolerance") {
                m.capacity.tolerance = parser.number(key, value);
            } else if (key == "epsilon") {
                m.capacity.epsilon = parser.number(key, value);
            } else if (key == "sampler_levels") {
                m.capacity.sampler_levels = parser.integer(key, value);
            } else if (key == "sampler_samples") {
                m.capacity.sampler_samples = parser.integer(key, value);
            } else {
                handled = false;
            }
        } else if (sec == "dichotomy") {
            bool map_key = false;
            apply_map_key(&m.dichotomy.map, parser, key, value, &map_key);
            if (!map_key) {
                if (key == "levels") {
                    m.dichotomy.levels = parser.integer(key, value);
                } else if (key == "amplitudes") {
                    m.dichotomy.amplitudes = parser.list(key, value);
                } else {
                    handled = false;
                }
            }
        } else if (sec == "qc-check") {
            bool map_key = false;
            apply_map_key(&m.qc.map, parser, key, value, &map_key);
            if (!map_key) {
                if (key == "probes") {
                    m.qc.probes = parser.integer(key, value);
                } else {
                    handled = false;
                }
            }
        } else if (sec == "psi-profile") {
            if (key == "ratios") {
                m.psi.ratios = parser.list(key, value);
            } else if (key == "truncation") {
                m.psi.truncation = parser.integer(key, value);
            } else {
                handled = false;
            }
        } else if (sec == "verify-lemmas") {
            if (key == "levels") {
                m.lemmas.levels = parser.integer(key, value);
            } else if (key == "count") {
                m.lemmas.count = parser.integer(key, value);
            } else if (key == "resolution") {
                m.lemmas.resolution = parser.integer(key, value);
            } else {
                handled = false;
            }
        }
        if (!handled) {
            parser.fail("unknown key '" + parser.path(key) + "'");
        }
    }
    if (!seed_seen) {
        throw ValidationError("manifest: run.seed is mandatory");
    }
    return m;
}

std::string print_manifest(const ExperimentManifest& m) {
    std::ostringstream out;
    out << "command = " << command_name(m.command) << "\n\n";

    out << "[params]\n";
    out << "s = " << format_double(m.s) << "\n";
    out << "q = " << format_double(m.q) << "\n";
    if (m.p_override) {
        out << "p_override = " << format_double(*m.p_override) << "\n";
    }
    out << "\n[domain]\n";
    out << "side_length = " << format_double(m.domain.side_length) << "\n";
    out << "resolution = " << m.domain.resolution << "\n";

    out << "\n[run]\n";
    out << "seed = " << m.seed << "\n";
    out << "threads = " << m.threads << "\n";
    out << "sequential = " << (m.sequential ? "true" : "false") << "\n";
    out << "out_dir = " << m.out_dir << "\n";

    if (!m.csv_path.empty() || !m.json_path.empty()) {
        out << "\n[outputs]\n";
        if (!m.csv_path.empty()) out << "csv = " << m.csv_path << "\n";
        if (!m.json_path.empty()) out << "json = " << m.json_path << "\n";
    }

    out << "\n[norm]\n";
    out << "shape = " << m.norm.function.shape << "\n";
    out << "center_x = " << format_double(m.norm.function.center_x) << "\n";
    out << "center_y = " << format_double(m.norm.function.center_y) << "\n";
    out << "radius = " << format_double(m.norm.function.radius) << "\n";
    out << "amplitude = " << format_double(m.norm.function.amplitude) << "\n";
    out << "aspect = " << format_double(m.norm.function.aspect) << "\n";
    out << "estimators = " << m.norm.estimators << "\n";
    out << "sampler_levels = " << m.norm.sampler_levels << "\n";
    out << "sampler_samples = " << m.norm.sampler_samples << "\n";

    out << "\n[capacity]\n";
    out << "mode = " << m.capacity.mode << "\n";
    out << "ball_radius = " << format_double(m.capacity.ball_radius) << "\n";
    out << "separation = " << format_double(m.capacity.separation) << "\n";
    out << "lambdas = " << join_list(m.capacity.lambdas) << "\n";
    out << "ratios = " << join_list(m.capacity.ratios) << "\n";
    out << "truncation = " << m.capacity.truncation << "\n";
    out << "max_iters = " << m.capacity.max_iters << "\n";
    out << "step_scale = " << format_double(m.capacity.step_scale) << "\n";
    out << "tolerance = " << format_double(m.capacity.tolerance) << "\n";
    out << "epsilon = " << format_double(m.capacity.epsilon) << "\n";
    out << "sampler_levels = " << m.capacity.sampler_levels << "\n";
    out << "sampler_samples = " << m.capacity.sampler_samples << "\n";

    out << "\n[dichotomy]\n";
    print_map_spec(out, m.dichotomy.map);
    out << "levels = " << m.dichotomy.levels << "\n";
    if (!m.dichotomy.amplitudes.empty()) {
        out << "amplitudes = " << join_list(m.dichotomy.amplitudes) << "\n";
    }

    out << "\n[qc-check]\n";
    print_map_spec(out, m.qc.map);
    out << "probes = " << m.qc.probes << "\n";

    out << "\n[psi-profile]\n";
    out << "ratios = " << join_list(m.psi.ratios) << "\n";
    out << "truncation = " << m.psi.truncation << "\n";

    out << "\n[verify-lemmas]\n";
    out << "levels = " << m.lemmas.levels << "\n";
    out << "count = " << m.lemmas.count << "\n";
    out << "resolution = " << m.lemmas.resolution << "\n";
    return out.str();
}

// ============================================================================
// Validation
// ============================================================================

namespace {

void check_map_family(const MapSpec& map, const std::string& prefix,
                      std::vector<std::string>* out) {
    if (!kMapFamilies.count(map.family)) {
        out->push_back(prefix + ".family: unknown map family '" + map.family +
                       "'");
    }
}

}  // namespace

std::vector<std::string> validate_manifest(const ExperimentManifest& m) {
    std::vector<std::string> diags;
    auto add = [&](const std::string& msg) { diags.push_back(msg); };

    if (!(m.s > 0.0 && m.s < 1.0)) add("params.s: s out of (0,1)");
    if (!std::isinf(m.q) && !(m.q >= 1.0)) {
        add("params.q: q must be >= 1 or infinite");
    }
    if (m.p_override) {
        const double floor_p = 2.0 / (2.0 + m.s);
        if (!(*m.p_override > floor_p)) {
            add("params.p_override: p must exceed n/(n+s)");
        }
    }
    if (!(m.domain.side_length > 0.0)) {
        add("domain.side_length: must be positive");
    }
    if (m.domain.resolution < 8 || m.domain.resolution % 2 != 0) {
        add("domain.resolution: must be an even integer >= 8");
    }

    switch (m.command) {
        case Command::norm: {
            const auto& f = m.norm.function;
            if (!kShapes.count(f.shape)) {
                add("norm.shape: unknown function shape '" + f.shape + "'");
            }
            if (!(f.radius > 0.0)) add("norm.radius: must be positive");
            if (!(f.amplitude > 0.0)) add("norm.amplitude: must be positive");
            if (f.shape == "box" && !(f.aspect >= 1.0)) {
                add("norm.aspect: box aspect must be >= 1");
            }
            if (m.norm.sampler_levels < 1) {
                add("norm.sampler_levels: must be >= 1");
            }
            if (m.norm.sampler_samples < 1) {
                add("norm.sampler_samples: must be >= 1");
            }
            std::istringstream stream(m.norm.estimators);
            std::string token;
            while (std::getline(stream, token, ',')) {
                const std::string name = trim(token);
                if (name != "difference" && name != "oscillation" &&
                    name != "hajlasz") {
                    add("norm.estimators: unknown estimator '" + name + "'");
                }
            }
            try {
                const double support = f.build().second;
                if (support > m.domain.side_length / 4.0) {
                    add("norm.function: support radius exceeds side_length/4, "
                        "the far-field tail correction precondition");
                }
            } catch (const ValidationError&) {
                // already diagnosed above
            }
            break;
        }
        case Command::capacity: {
            if (std::isinf(m.q) || !(m.q >= 1.0)) {
                add("capacity: convex solver requires q >= 1 (finite)");
            }
            if (m.capacity.mode != "lower" && m.capacity.mode != "upper") {
                add("capacity.mode: must be 'lower' or 'upper'");
            }
            if (!(m.capacity.ball_radius > 0.0)) {
                add("capacity.ball_radius: must be positive");
            }
            if (!(m.capacity.separation > 0.0)) {
                add("capacity.separation: must be positive");
            }
            for (double lam : m.capacity.lambdas) {
                if (!(lam > 0.0 && lam <= 1.0)) {
                    add("capacity.lambdas: entries must lie in (0, 1]");
                    break;
                }
            }
            for (double ratio : m.capacity.ratios) {
                if (!(ratio > 1.0)) {
                    add("capacity.ratios: entries must exceed 1");
                    break;
                }
            }
            if (m.capacity.truncation < 1) {
                add("capacity.truncation: must be >= 1");
            }
            if (m.capacity.max_iters < 1) {
                add("capacity.max_iters: must be >= 1");
            }
            if (!(m.capacity.step_scale > 0.0)) {
                add("capacity.step_scale: must be positive");
            }
            if (!(m.capacity.tolerance > 0.0)) {
                add("capacity.tolerance: must be positive");
            }
            if (m.capacity.epsilon < 0.0) {
                add("capacity.epsilon: must be >= 0");
            }
            break;
        }
        case Command::dichotomy: {
            check_map_family(m.dichotomy.map, "dichotomy", &diags);
            if (m.dichotomy.levels < 1 || m.dichotomy.levels > 6) {
                add("dichotomy.levels: must lie in 1..6");
            }
            if (!m.dichotomy.amplitudes.empty() &&
                m.dichotomy.amplitudes.size() !=
                    static_cast<std::size_t>(m.dichotomy.levels)) {
                add("dichotomy.amplitudes: need one entry per level or none");
            }
            for (double b : m.dichotomy.amplitudes) {
                if (!(b > 0.0)) {
                    add("dichotomy.amplitudes: entries must be positive");
                    break;
                }
            }
            if (m.p_override) {
                add("dichotomy: requires the scaling-invariant index "
                    "(remove p_override)");
            }
            break;
        }
        case Command::qc_check: {
            check_map_family(m.qc.map, "qc-check", &diags);
            if (m.qc.probes < 1000) {
                add("qc-check.probes: must be >= 1000");
            }
            break;
        }
        case Command::psi_profile: {
            for (double ratio : m.psi.ratios) {
                if (!(ratio > 1.0)) {
                    add("psi-profile.ratios: entries must exceed 1");
                    break;
                }
            }
            if (m.psi.truncation < 1) {
                add("psi-profile.truncation: must be >= 1");
            }
            break;
        }
        case Command::verify_lemmas: {
            if (m.lemmas.levels < 1 || m.lemmas.levels > 6) {
                add("verify-lemmas.levels: must lie in 1..6");
            }
            if (m.lemmas.count < 1 || m.lemmas.count > 8) {
                add("verify-lemmas.count: must lie in 1..8");
            }
            if (m.lemmas.resolution < 16 || m.lemmas.resolution % 2 != 0) {
                add("verify-lemmas.resolution: must be an even integer >= 16");
            }
            break;
        }
    }
    return diags;
}

// ============================================================================
// CSV helpers
// ============================================================================

std::string csv_escape(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ",";
        out += csv_escape(fields[i]);
    }
    out += "\r\n";
    return out;
}

}  // namespace besovlab
