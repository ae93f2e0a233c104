// serialization and end-to-end binary checks. The binary under test comes in
// through HYBRIDBATH_CLI_PATH; every spawned run lands in its own temp
// directory so reruns can be compared byte for byte.
#include <catch2/catch_amalgamated.hpp>

#include "hybridbath/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

using namespace hybridbath;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("hybridbath_" + tag + "_" + std::to_string(rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const std::string exe = HYBRIDBATH_CLI_PATH;
    const fs::path so = fs::temp_directory_path() / ("hb_out_" + std::to_string(++counter));
    const fs::path se = fs::temp_directory_path() / ("hb_err_" + std::to_string(counter));
    std::string cmd;
    if (!env_prefix.empty()) cmd += env_prefix + " ";
    cmd += "\"" + exe + "\" " + args + " > " + so.string() + " 2> " + se.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(so.string());
    r.err = read_text_file(se.string());
    fs::remove(so);
    fs::remove(se);
    return r;
}

// resonant single-qubit run small enough for fast end-to-end checks
std::string mini_config(const std::string& outdir, double horizon = 2.0) {
    return std::string("{\n"
                       "  \"model\": \"single_qubit\",\n"
                       "  \"grid\": {\"horizon\": ") +
           format_number(horizon) +
           ", \"dt\": 0.001},\n"
           "  \"outputs\": {\"directory\": \"" +
           outdir + "\"}\n}\n";
}

} // namespace

TEST_CASE("numbers and checksums serialize deterministically", "[cli]") {
    CHECK(format_number(0.001) == "0.001");
    CHECK(format_number(-2.5) == "-2.5");
    for (double v : {1.0 / 3.0, 0.1, 1e-17, -2.5e300, 12345.678901234567}) {
        const std::string s = format_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    // published FNV-1a 64 reference values
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("csv tables round-trip through text exactly", "[cli]") {
    CsvTable t;
    t.comments = {"hybridbath trajectory v1", "model=test"};
    t.columns = {"t", "re_F", "im_F", "extra"};
    t.rows = {{0.0, 1.0 / 3.0, -0.25, 1e-17}, {0.5, 0.1, 2.5e300, -4.0}};
    const std::string text = csv_to_string(t);
    CHECK(text.find("# hybridbath trajectory v1\n") == 0);
    CHECK(text.find("\r") == std::string::npos);

    const CsvTable back = parse_csv(text);
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.comments == t.comments);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.rows[i].size(); ++j)
            CHECK(back.rows[i][j] == t.rows[i][j]);
    // reserialization is byte-stable
    CHECK(csv_to_string(back) == text);
}

TEST_CASE("csv parsing is strict", "[cli]") {
    CHECK_THROWS_AS(parse_csv("# only a comment\n"), config_error);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), config_error);
    CHECK_THROWS_AS(parse_csv("a,b\n1,fish\n"), config_error);
}

TEST_CASE("svg rendering is a pure function of the csv text", "[cli]") {
    CsvTable t;
    t.comments = {"hybridbath coefficients v1"};
    t.columns = {"t", "re_F", "im_F", "aux"};
    for (int i = 0; i <= 50; ++i)
        t.rows.push_back({0.1 * i, std::sin(0.3 * i), std::cos(0.3 * i), 0.01 * i * i});
    const std::string text = csv_to_string(t);
    const std::string svg1 = svg_from_csv(parse_csv(text));
    const std::string svg2 = svg_from_csv(parse_csv(text));
    CHECK(svg1 == svg2);
    CHECK(svg1.rfind("<svg ", 0) == 0);
    CHECK(svg1.find("</svg>") != std::string::npos);
    // re_/im_ pairs fold into one magnitude series, plain columns stay
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg1.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        ++pos;
    }
    CHECK(polylines == 2);
    CHECK(svg1.find("|F|") != std::string::npos);
    CHECK(svg1.find("aux") != std::string::npos);
}

TEST_CASE("run writes the full artifact set and a trailing manifest", "[cli]") {
    TempDir tmp("run");
    const std::string outdir = tmp.file("out");
    write_text_file(tmp.file("cfg.json"), mini_config(outdir));
    const auto res = run_cli("run " + tmp.file("cfg.json"));
    CAPTURE(res.err);
    REQUIRE(res.code == 0);
    CHECK(res.out.find("wrote " + outdir) != std::string::npos);

    for (const char* name :
         {"trajectory.csv", "coefficients.csv", "plot.svg", "coefficients.svg", "manifest.json"})
        CHECK(fs::exists(fs::path(outdir) / name));

    const std::string traj = read_text_file(outdir + "/trajectory.csv");
    CHECK(traj.rfind("# hybridbath trajectory v1\n", 0) == 0);
    const std::string coeff = read_text_file(outdir + "/coefficients.csv");
    CHECK(coeff.rfind("# hybridbath coefficients v1\n", 0) == 0);

    // manifest checksums match the files on disk
    const auto manifest = nlohmann::json::parse(read_text_file(outdir + "/manifest.json"));
    CHECK(manifest.at("tool").get<std::string>() == kToolVersion);
    CHECK(manifest.at("artifacts").at("trajectory.csv").get<std::string>() == fnv1a64_hex(traj));
    CHECK(manifest.at("artifacts").at("plot.svg").get<std::string>() ==
          fnv1a64_hex(read_text_file(outdir + "/plot.svg")));
    CHECK(manifest.at("diagnostics").at("approximation").get<std::string>() == "exact");
    CHECK(manifest.at("config").at("model").get<std::string>() == "single_qubit");
}

TEST_CASE("identical configs rerun to byte-identical artifacts", "[cli]") {
    TempDir tmp("rerun");
    const std::string outdir = tmp.file("out");
    write_text_file(tmp.file("cfg.json"), mini_config(outdir));
    REQUIRE(run_cli("run " + tmp.file("cfg.json")).code == 0);
    const std::string traj1 = read_text_file(outdir + "/trajectory.csv");
    const std::string coeff1 = read_text_file(outdir + "/coefficients.csv");
    const std::string svg1 = read_text_file(outdir + "/plot.svg");
    REQUIRE(run_cli("run " + tmp.file("cfg.json")).code == 0);
    CHECK(read_text_file(outdir + "/trajectory.csv") == traj1);
    CHECK(read_text_file(outdir + "/coefficients.csv") == coeff1);
    CHECK(read_text_file(outdir + "/plot.svg") == svg1);
}

TEST_CASE("the output directory override replaces the configured one", "[cli]") {
    TempDir tmp("outdir");
    const std::string configured = tmp.file("configured");
    const std::string forced = tmp.file("forced");
    write_text_file(tmp.file("cfg.json"), mini_config(configured));
    const auto res =
        run_cli("run " + tmp.file("cfg.json"), "HYBRIDBATH_OUTDIR=" + forced);
    REQUIRE(res.code == 0);
    CHECK(fs::exists(fs::path(forced) / "manifest.json"));
    CHECK_FALSE(fs::exists(configured));
}

TEST_CASE("schema violations exit 2 with the offending field", "[cli]") {
    TempDir tmp("schema");
    SECTION("missing grid.dt") {
        write_text_file(tmp.file("cfg.json"),
                        "{\"model\": \"single_qubit\", \"grid\": {\"horizon\": 1.0}}");
        const auto res = run_cli("run " + tmp.file("cfg.json"));
        CHECK(res.code == 2);
        CHECK(res.err.find("\"error\":\"config\"") != std::string::npos);
        CHECK(res.err.find("grid.dt") != std::string::npos);
    }
    SECTION("unknown top-level field") {
        write_text_file(tmp.file("cfg.json"),
                        "{\"model\": \"single_qubit\", \"grid\": {\"horizon\": 1.0, \"dt\": 0.01}, "
                        "\"turbo\": true}");
        const auto res = run_cli("run " + tmp.file("cfg.json"));
        CHECK(res.code == 2);
        CHECK(res.err.find("turbo") != std::string::npos);
    }
    SECTION("invalid json") {
        write_text_file(tmp.file("cfg.json"), "{\"model\": ");
        const auto res = run_cli("run " + tmp.file("cfg.json"));
        CHECK(res.code == 2);
    }
    SECTION("missing file") {
        const auto res = run_cli("run " + tmp.file("nope.json"));
        CHECK(res.code == 2);
    }
    SECTION("missing subcommand") {
        CHECK(run_cli("").code != 0);
    }
}

TEST_CASE("a singular run exits 3 and leaves no manifest behind", "[cli]") {
    TempDir tmp("singular");
    const std::string outdir = tmp.file("out");
    const std::string cfg =
        "{\n"
        "  \"model\": \"single_qubit\",\n"
        "  \"parameters\": {\"kernels\": {\n"
        "    \"b\": {\"type\": \"single_mode\", \"lambda\": 0.5, \"omega\": 1.0},\n"
        "    \"f\": {\"type\": \"single_mode\", \"lambda\": 0.5, \"omega\": 1.0}}},\n"
        "  \"grid\": {\"horizon\": 3.0, \"dt\": 0.001},\n"
        "  \"outputs\": {\"directory\": \"" + outdir + "\"}\n}\n";
    write_text_file(tmp.file("cfg.json"), cfg);
    const auto res = run_cli("run " + tmp.file("cfg.json"));
    CHECK(res.code == 3);
    CHECK(res.err.find("\"error\":\"singularity\"") != std::string::npos);
    CHECK(res.err.find("\"when\"") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(outdir) / "manifest.json"));
}

TEST_CASE("verify accepts the resonant law and rejects tightened tolerances", "[cli]") {
    TempDir tmp("verify");
    const std::string outdir = tmp.file("out");
    write_text_file(tmp.file("cfg.json"), mini_config(outdir));
    REQUIRE(run_cli("run " + tmp.file("cfg.json")).code == 0);
    const std::string traj = outdir + "/trajectory.csv";

    CHECK(run_cli("verify " + traj + " --law cosine --lambda 0.2 --omega 1.0 --tol 1e-6").code ==
          0);
    const auto tight =
        run_cli("verify " + traj + " --law cosine --lambda 0.2 --omega 1.0 --tol 1e-13");
    CHECK(tight.code == 1);
    CHECK(tight.err.find("\"error\":\"tolerance\"") != std::string::npos);

    CHECK(run_cli("verify " + traj + " --law sine --lambda 0.2 --omega 1.0 --tol 1e-6").code == 2);
    const auto wrong_file = run_cli("verify " + outdir +
                                    "/coefficients.csv --law cosine --lambda 0.2 --omega 1.0 "
                                    "--tol 1e-6");
    CHECK(wrong_file.code == 2);
    CHECK(wrong_file.err.find("missing column") != std::string::npos);
}

TEST_CASE("oracle comparison passes the exact model and flags approximations", "[cli]") {
    TempDir tmp("oracle");
    const std::string outdir = tmp.file("out");
    write_text_file(tmp.file("cfg.json"), mini_config(outdir));
    const auto ok = run_cli("oracle-compare " + tmp.file("cfg.json") + " --tol 1e-4");
    CAPTURE(ok.err);
    REQUIRE(ok.code == 0);
    CHECK(ok.out.find("max trace distance") != std::string::npos);
    const std::string cmp = read_text_file(outdir + "/compare.csv");
    CHECK(cmp.rfind("# hybridbath oracle-compare v1\n", 0) == 0);

    // zeroth-order dephasing sits far from the exact reference
    const std::string dcfg =
        "{\n"
        "  \"model\": \"dephasing_qubit\",\n"
        "  \"grid\": {\"horizon\": 2.0, \"dt\": 0.01},\n"
        "  \"outputs\": {\"directory\": \"" + tmp.file("dout") + "\"}\n}\n";
    write_text_file(tmp.file("dcfg.json"), dcfg);
    const auto far = run_cli("oracle-compare " + tmp.file("dcfg.json") + " --tol 1e-6");
    CHECK(far.code == 1);
    CHECK(far.err.find("\"error\":\"tolerance\"") != std::string::npos);

    // decaying kernels have no finite-mode oracle
    const std::string ocfg =
        "{\n"
        "  \"model\": \"single_qubit\",\n"
        "  \"parameters\": {\"kernels\": {\"b\": {\"type\": \"ou\", \"Gamma\": 1.0, "
        "\"gamma\": 0.5, \"phi\": 0.0}}},\n"
        "  \"grid\": {\"horizon\": 1.0, \"dt\": 0.01},\n"
        "  \"outputs\": {\"directory\": \"" + tmp.file("oout") + "\"}\n}\n";
    write_text_file(tmp.file("ocfg.json"), ocfg);
    CHECK(run_cli("oracle-compare " + tmp.file("ocfg.json")).code == 2);
}

TEST_CASE("sweep isolates failures per value and writes a summary", "[cli]") {
    TempDir tmp("sweep");
    const std::string outdir = tmp.file("out");
    write_text_file(tmp.file("cfg.json"), mini_config(outdir));

    SECTION("clean sweep") {
        const auto res = run_cli("sweep " + tmp.file("cfg.json") + " --knob c_f --values 0.5,1");
        REQUIRE(res.code == 0);
        CHECK(res.out.find("c_f = 0.5: ok") != std::string::npos);
        CHECK(res.out.find("c_f = 1: ok") != std::string::npos);
        for (const char* sub : {"c_f_0.5", "c_f_1"})
            CHECK(fs::exists(fs::path(outdir) / sub / "manifest.json"));
        const std::string summary = read_text_file(outdir + "/summary.csv");
        CHECK(summary.rfind("# hybridbath sweep-summary v1\n", 0) == 0);
        const CsvTable table = parse_csv(summary);
        REQUIRE(table.rows.size() == 2);
        CHECK(table.columns ==
              std::vector<std::string>{"value", "pop_0", "pop_1", "coherence_01"});
    }
    SECTION("one value blows up, the rest survive") {
        const auto res = run_cli("sweep " + tmp.file("cfg.json") + " --knob c_f --values 1,50");
        CHECK(res.code == 3);
        CHECK(res.out.find("c_f = 1: ok") != std::string::npos);
        CHECK(res.out.find("c_f = 50: failed") != std::string::npos);
        const CsvTable table = parse_csv(read_text_file(outdir + "/summary.csv"));
        CHECK(table.rows.size() == 1);
    }
    SECTION("bad knob and empty values") {
        CHECK(run_cli("sweep " + tmp.file("cfg.json") + " --knob tilt --values 1").code == 2);
        CHECK(run_cli("sweep " + tmp.file("cfg.json") + " --knob c_f --values ''").code == 2);
    }
}
