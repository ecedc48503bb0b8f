#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_scratch;

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out_file = g_scratch / (tag + ".out");
    const fs::path err_file = g_scratch / (tag + ".err");
    const std::string command = "'" + g_binary + "' " + args + " > '" +
                                out_file.string() + "' 2> '" +
                                err_file.string() + "'";
    const int raw = std::system(command.c_str());
    RunResult result;
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const std::string kNormManifest =
    "command = norm\n"
    "[domain]\n"
    "resolution = 32\n"
    "[run]\n"
    "seed = 7\n"
    "[norm]\n"
    "sampler_levels = 4\n"
    "sampler_samples = 16\n";

}  // namespace

TEST_CASE("no arguments prints usage and fails validation") {
    const RunResult r = run_cli("", "noargs");
    CHECK(r.status == 2);
}

TEST_CASE("--help exits cleanly") {
    const RunResult r = run_cli("--help", "help");
    CHECK(r.status == 0);
    CHECK(r.out.find("--manifest") != std::string::npos);
}

TEST_CASE("a missing manifest file maps to the i/o exit code") {
    const RunResult r =
        run_cli("--manifest /nonexistent/besovlab.manifest", "missing");
    CHECK(r.status == 4);
}

TEST_CASE("a malformed manifest maps to the validation exit code") {
    const fs::path manifest = g_scratch / "bad.manifest";
    write_file(manifest, "[run]\nseed = 1\nbogus = 2\n");
    const RunResult r =
        run_cli("--manifest '" + manifest.string() + "'", "malformed");
    CHECK(r.status == 2);
    CHECK(r.err.find("bogus") != std::string::npos);
}

TEST_CASE("validate-only reports diagnostics without running") {
    const fs::path manifest = g_scratch / "invalid_s.manifest";
    write_file(manifest,
               "command = norm\n[params]\ns = 1.5\n[run]\nseed = 1\n");
    const RunResult bad = run_cli(
        "--manifest '" + manifest.string() + "' --validate-only", "vbad");
    CHECK(bad.status == 2);
    CHECK(bad.out.find("s out of (0,1)") != std::string::npos);

    const fs::path good = g_scratch / "valid.manifest";
    write_file(good, kNormManifest);
    const RunResult ok =
        run_cli("--manifest '" + good.string() + "' --validate-only", "vgood");
    CHECK(ok.status == 0);
    CHECK(ok.out.find("manifest valid") != std::string::npos);
}

TEST_CASE("the norm command emits a header row and all three estimators") {
    const fs::path manifest = g_scratch / "norm.manifest";
    write_file(manifest, kNormManifest);
    const fs::path dir = g_scratch / "norm_run";
    const RunResult r = run_cli("--manifest '" + manifest.string() +
                                    "' --out-dir '" + dir.string() + "'",
                                "norm");
    REQUIRE(r.status == 0);
    const std::string csv = slurp(dir / "norm.csv");
    REQUIRE(!csv.empty());
    const std::string header =
        "shape,s,q,p,seed,difference,oscillation,hajlasz\r\n";
    CHECK(csv.substr(0, header.size()) == header);
    // one data row, CRLF-terminated, with no empty estimator cells
    const std::string body = csv.substr(header.size());
    CHECK(body.find("tent,") == 0);
    CHECK(body.find(",,") == std::string::npos);
    CHECK(body.substr(body.size() - 2) == "\r\n");
    CHECK(fs::exists(dir / "norm.json"));
    CHECK(r.out.find("difference=") != std::string::npos);
}

TEST_CASE("the subcommand overrides the manifest command") {
    const fs::path manifest = g_scratch / "psi.manifest";
    write_file(manifest,
               "command = norm\n[domain]\nresolution = 32\n[run]\nseed = 3\n"
               "[norm]\nsampler_levels = 4\nsampler_samples = 16\n"
               "[psi-profile]\nratios = 2,4\ntruncation = 8\n");
    const fs::path dir = g_scratch / "override_run";
    const RunResult r = run_cli("psi-profile --manifest '" +
                                    manifest.string() + "' --out-dir '" +
                                    dir.string() + "'",
                                "override");
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "psi-profile.csv"));
    CHECK(!fs::exists(dir / "norm.csv"));
}

TEST_CASE("psi-profile values decrease and reruns are byte-identical") {
    const fs::path manifest = g_scratch / "psi2.manifest";
    write_file(manifest,
               "command = psi-profile\n[domain]\nresolution = 16\n"
               "[run]\nseed = 3\n[psi-profile]\nratios = 2,4,8\n"
               "truncation = 8\n");
    const fs::path dir_a = g_scratch / "psi_a";
    const fs::path dir_b = g_scratch / "psi_b";
    const RunResult a = run_cli("--manifest '" + manifest.string() +
                                    "' --sequential --out-dir '" +
                                    dir_a.string() + "'",
                                "psi_a");
    const RunResult b = run_cli("--manifest '" + manifest.string() +
                                    "' --sequential --out-dir '" +
                                    dir_b.string() + "'",
                                "psi_b");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(slurp(dir_a / "psi-profile.csv") == slurp(dir_b / "psi-profile.csv"));
    CHECK(slurp(dir_a / "psi-profile.json") ==
          slurp(dir_b / "psi-profile.json"));
    CHECK(a.out == b.out);

    // strictly decreasing values across the three ratios
    std::istringstream csv(slurp(dir_a / "psi-profile.csv"));
    std::string line;
    std::getline(csv, line);  // header
    double prev = 0.0;
    int rows = 0;
    while (std::getline(csv, line)) {
        if (line.size() < 2) continue;
        const auto comma = line.find(',');
        const double value = std::strtod(line.c_str() + comma + 1, nullptr);
        if (rows > 0) CHECK(value < prev);
        prev = value;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("the seed override changes stochastic artifacts") {
    const fs::path manifest = g_scratch / "seed.manifest";
    write_file(manifest, kNormManifest);
    const fs::path dir_a = g_scratch / "seed_a";
    const fs::path dir_b = g_scratch / "seed_b";
    const RunResult a = run_cli("--manifest '" + manifest.string() +
                                    "' --seed 1 --out-dir '" +
                                    dir_a.string() + "'",
                                "seed_a");
    const RunResult b = run_cli("--manifest '" + manifest.string() +
                                    "' --seed 2 --out-dir '" +
                                    dir_b.string() + "'",
                                "seed_b");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(slurp(dir_a / "norm.csv") != slurp(dir_b / "norm.csv"));
}

int run_all(char** argv) {
    doctest::Context context;
    context.applyCommandLine(1, argv);
    return context.run();
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <besov-lab binary>\n");
        return 1;
    }
    g_binary = argv[1];
    g_scratch = fs::temp_directory_path() / "besovlab_cli_tests";
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);
    return run_all(argv);
}
