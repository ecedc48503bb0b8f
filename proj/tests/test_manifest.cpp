#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "besovlab/besov.hpp"
#include "besovlab/manifest.hpp"
#include "besovlab/types.hpp"

using namespace besovlab;

namespace {

bool has_diagnostic(const std::vector<std::string>& diags,
                    const std::string& needle) {
    return std::any_of(diags.begin(), diags.end(),
                       [&](const std::string& d) {
                           return d.find(needle) != std::string::npos;
                       });
}

std::vector<ExperimentManifest> manifest_corpus() {
    std::vector<ExperimentManifest> out;

    ExperimentManifest defaults;
    out.push_back(defaults);

    ExperimentManifest norm;
    norm.command = Command::norm;
    norm.s = 0.3;
    norm.q = kInfinity;
    norm.seed = 17;
    norm.norm.function.shape = "bump2";
    norm.norm.function.center_x = 0.25;
    norm.norm.function.radius = 0.5;
    norm.norm.estimators = "difference";
    out.push_back(norm);

    ExperimentManifest overridden;
    overridden.command = Command::norm;
    overridden.p_override = 3.5;
    overridden.seed = 1;
    out.push_back(overridden);

    ExperimentManifest capacity;
    capacity.command = Command::capacity;
    capacity.q = 4.0;
    capacity.seed = 5;
    capacity.capacity.mode = "lower";
    capacity.capacity.lambdas = {0.125, 0.25, 1.0};
    capacity.capacity.epsilon = 1e-4;
    capacity.out_dir = "artifacts";
    capacity.csv_path = "sweep.csv";
    out.push_back(capacity);

    ExperimentManifest dich;
    dich.command = Command::dichotomy;
    dich.seed = 9;
    dich.dichotomy.levels = 4;
    dich.dichotomy.amplitudes = {1.0, 0.5, 0.25, 0.125};
    dich.dichotomy.map.family = "radial_stretch";
    dich.dichotomy.map.alpha = 1.5;
    dich.sequential = true;
    out.push_back(dich);

    ExperimentManifest qc;
    qc.command = Command::qc_check;
    qc.seed = 11;
    qc.qc.map.family = "affine";
    qc.qc.map.a11 = 1.5;
    qc.qc.map.a22 = 1.5;
    qc.qc.probes = 4000;
    qc.json_path = "verdict.json";
    out.push_back(qc);

    ExperimentManifest lemmas;
    lemmas.command = Command::verify_lemmas;
    lemmas.seed = 13;
    lemmas.lemmas.levels = 3;
    lemmas.lemmas.count = 2;
    lemmas.lemmas.resolution = 24;
    lemmas.threads = 4;
    out.push_back(lemmas);

    ExperimentManifest psi;
    psi.command = Command::psi_profile;
    psi.seed = 15;
    psi.psi.ratios = {2.0, 3.0, 5.5};
    psi.psi.truncation = 12;
    out.push_back(psi);

    return out;
}

}  // namespace

TEST_CASE("manifests round-trip through their text form losslessly") {
    for (const ExperimentManifest& m : manifest_corpus()) {
        const std::string text = print_manifest(m);
        const ExperimentManifest back = parse_manifest(text);
        CAPTURE(text);
        CHECK(back == m);
        // and the text form itself is a fixed point
        CHECK(print_manifest(back) == text);
    }
}

TEST_CASE("seed is mandatory in the text form") {
    CHECK_THROWS_AS(parse_manifest("command = norm\n"), ValidationError);
    CHECK_NOTHROW(parse_manifest("command = norm\n[run]\nseed = 3\n"));
}

TEST_CASE("unknown keys and sections carry their field path") {
    CHECK_THROWS_WITH_AS(
        parse_manifest("[run]\nseed = 1\nbogus_key = 2\n"),
        doctest::Contains("bogus_key"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_manifest("[made-up-section]\n"),
                         doctest::Contains("made-up-section"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_manifest("[params]\ns = banana\n[run]\nseed=1\n"),
                         doctest::Contains("params.s"), ValidationError);
}

TEST_CASE("comments and blank lines are ignored") {
    const ExperimentManifest m = parse_manifest(
        "# a comment\n\ncommand = psi-profile\n\n[run]\nseed = 4\n"
        "; another comment style\n[params]\ns = 0.4\n");
    CHECK(m.command == Command::psi_profile);
    CHECK(m.seed == 4);
    CHECK(m.s == doctest::Approx(0.4));
}

TEST_CASE("validation diagnostics use the documented wording") {
    ExperimentManifest m;
    m.s = 1.5;
    CHECK(has_diagnostic(validate_manifest(m), "s out of (0,1)"));

    ExperimentManifest cap;
    cap.command = Command::capacity;
    cap.q = 0.5;
    CHECK(has_diagnostic(validate_manifest(cap),
                         "convex solver requires q >= 1"));

    ExperimentManifest inf_cap;
    inf_cap.command = Command::capacity;
    inf_cap.q = kInfinity;
    CHECK(has_diagnostic(validate_manifest(inf_cap),
                         "convex solver requires q >= 1"));

    ExperimentManifest wide;
    wide.command = Command::norm;
    wide.norm.function.radius = 3.0;  // support 3 > side/4 = 2
    CHECK(has_diagnostic(validate_manifest(wide), "tail"));

    ExperimentManifest deep;
    deep.command = Command::dichotomy;
    deep.dichotomy.levels = 7;
    CHECK(has_diagnostic(validate_manifest(deep), "dichotomy.levels"));

    ExperimentManifest probes;
    probes.command = Command::qc_check;
    probes.qc.probes = 500;
    CHECK(has_diagnostic(validate_manifest(probes), "qc-check.probes"));

    ExperimentManifest odd;
    odd.domain.resolution = 31;
    CHECK(has_diagnostic(validate_manifest(odd), "domain.resolution"));

    // a default manifest is clean
    CHECK(validate_manifest(ExperimentManifest{}).empty());
}

TEST_CASE("map and function specs build what they promise") {
    MapSpec stretch;
    stretch.family = "radial_stretch";
    stretch.alpha = 2.0;
    const Homeomorphism phi = stretch.build();
    const Vec2 x(0.5, 0.0);
    CHECK(phi.forward(x).x() == doctest::Approx(0.25).epsilon(1e-12));

    MapSpec unknown;
    unknown.family = "banana";
    CHECK_THROWS_AS(unknown.build(), ValidationError);

    FunctionSpec tent;
    tent.shape = "tent";
    tent.radius = 2.0;
    auto [fn, support] = tent.build();
    CHECK(fn(Vec2::Zero()) == doctest::Approx(1.0));
    CHECK(fn(Vec2(2.0, 0.0)) == doctest::Approx(0.0));
    CHECK(support == doctest::Approx(2.0));

    FunctionSpec box;
    box.shape = "box";
    box.radius = 1.0;
    box.aspect = 4.0;
    auto [box_fn, box_support] = box.build();
    CHECK(box_fn(Vec2::Zero()) == doctest::Approx(1.0));
    CHECK(box_support ==
          doctest::Approx(2.0 * std::hypot(0.25, 1.0)).epsilon(1e-12));

    FunctionSpec bad;
    bad.shape = "tent";
    bad.radius = -1.0;
    CHECK_THROWS_AS(bad.build(), ValidationError);
}

TEST_CASE("csv helpers follow RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv_line({"a", "b,c"}) == "a,\"b,c\"\r\n");
}

TEST_CASE("doubles print with 17 significant digits and parse back") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    for (double v : {1.0 / 3.0, 6.02e23, -7.25, 1e-300}) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
    CHECK(format_double(kInfinity) == "inf");
}
