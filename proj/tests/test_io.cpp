#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qread/cli.hpp"
#include "qread/io.hpp"

using namespace qread;
using Catch::Approx;

namespace {

KeyValues demo_config() {
    KeyValues kv;
    kv["code.family"] = "rs";
    kv["code.n"] = "255";
    kv["code.k"] = "25";
    kv["cells.kappa0"] = "0.1";
    kv["cells.kappa1"] = "0.95";
    kv["receiver.kind"] = "dolinar";
    kv["receiver.efficiency"] = "0.9";
    kv["grid.start"] = "1";
    kv["grid.stop"] = "4";
    kv["grid.points"] = "4";
    kv["trials"] = "1000";
    kv["seed"] = "99";
    return kv;
}

std::filesystem::path test_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "qread_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("key=value parsing", "[io]") {
    std::istringstream in(
        "# comment\n"
        "  code.family = rs \n"
        "\n"
        "trials=5\n");
    const auto kv = parse_kv_text(in);
    CHECK(kv.at("code.family") == "rs");
    CHECK(kv.at("trials") == "5");

    std::istringstream dup("a=1\na=2\n");
    CHECK_THROWS_AS(parse_kv_text(dup), std::invalid_argument);
    std::istringstream noeq("just words\n");
    CHECK_THROWS_AS(parse_kv_text(noeq), std::invalid_argument);
    CHECK_THROWS_AS(parse_kv_file("/nonexistent/config"), std::runtime_error);
}

TEST_CASE("config resolution materializes defaults and builds the experiment",
          "[io]") {
    const auto rc = resolve_config(demo_config());
    CHECK(rc.code_b == 1);
    CHECK(rc.metric == "info-bit");
    CHECK(rc.baseline == "min");
    CHECK(rc.efficiency == 0.9);
    CHECK(rc.rounds == 2);

    const auto cfg = build_experiment(rc);
    CHECK(cfg.code->name() == "RS[255,25]");
    CHECK(cfg.code->cell_length() == 2040);
    CHECK(cfg.receiver.kind == ReceiverKind::Dolinar);
    CHECK(cfg.receiver.dolinar.eta_det == Approx(0.1));
    CHECK(cfg.receiver.dolinar.rounds == 2);
    CHECK(cfg.n_bar_grid == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(cfg.seed == 99);
}

TEST_CASE("config errors name the offending key", "[io]") {
    const auto expect_mentions = [](KeyValues kv, const std::string& needle) {
        try {
            resolve_config(kv);
            FAIL("expected resolve_config to throw for " + needle);
        } catch (const std::invalid_argument& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    auto kv = demo_config();
    kv["cells.kappa0"] = "1.2";
    expect_mentions(kv, "cells.kappa0");

    kv = demo_config();
    kv.erase("seed");
    expect_mentions(kv, "seed");

    kv = demo_config();
    kv["bogus.key"] = "1";
    expect_mentions(kv, "bogus.key");

    kv = demo_config();
    kv["code.delta"] = "7";
    expect_mentions(kv, "code.delta");

    kv = demo_config();
    kv["metric"] = "nibble";
    expect_mentions(kv, "metric");

    kv = demo_config();
    kv["code.n"] = "100";
    CHECK_THROWS_AS(build_code(resolve_config(kv)), std::invalid_argument);
    kv["code.n"] = "255";
    kv["trials"] = "0";
    expect_mentions(kv, "trials");
}

TEST_CASE("QREAD_SEED overrides the configured seed", "[io]") {
    setenv("QREAD_SEED", "123456789", 1);
    const auto rc = resolve_config(demo_config());
    unsetenv("QREAD_SEED");
    CHECK(rc.seed == 123456789);
    const auto rc2 = resolve_config(demo_config());
    CHECK(rc2.seed == 99);
}

TEST_CASE("manifest round-trips through text and hashes stably", "[io]") {
    const auto rc = resolve_config(demo_config());
    std::ostringstream out;
    write_manifest(out, rc);
    std::istringstream in(out.str());
    const auto kv = parse_kv_text(in);
    const auto rc2 = resolve_config(kv);
    CHECK(materialize(rc) == materialize(rc2));
    CHECK(manifest_hash(materialize(rc)) == manifest_hash(materialize(rc2)));

    auto tweaked = materialize(rc);
    tweaked["seed"] = "100";
    CHECK(manifest_hash(tweaked) != manifest_hash(materialize(rc)));
    CHECK(manifest_hash_hex(materialize(rc)).rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("curve CSV round-trips exactly", "[io]") {
    std::vector<CurvePoint> curve;
    CurvePoint a;
    a.n_bar = 0.1;
    a.p_hat = 1.0 / 3.0;
    a.ci_low = 1e-17;
    a.ci_high = 0.99999999999999989;
    a.errors = 333333333333ull;
    a.trials = 999999999999ull;
    curve.push_back(a);
    CurvePoint b;
    b.n_bar = 2.5000000000000004;
    b.p_hat = 0;
    b.ci_low = 0;
    b.ci_high = 3.6993498206985714e-05;
    b.errors = 0;
    b.trials = 100000;
    curve.push_back(b);

    std::ostringstream out;
    emit_curve_csv(out, curve);
    std::istringstream in(out.str());
    const auto parsed = parse_curve_csv(in);
    REQUIRE(parsed.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(parsed[i].n_bar == curve[i].n_bar);
        CHECK(parsed[i].p_hat == curve[i].p_hat);
        CHECK(parsed[i].ci_low == curve[i].ci_low);
        CHECK(parsed[i].ci_high == curve[i].ci_high);
        CHECK(parsed[i].errors == curve[i].errors);
        CHECK(parsed[i].trials == curve[i].trials);
    }

    std::ostringstream empty;
    emit_curve_csv(empty, {});
    CHECK(empty.str() == std::string(kCurveCsvHeader) + "\n");
    std::istringstream bad("wrong,header\n");
    CHECK_THROWS_AS(parse_curve_csv(bad), std::invalid_argument);
}

TEST_CASE("threshold JSON carries the verdict and context", "[io]") {
    const auto rc = resolve_config(demo_config());
    ThresholdReport none;
    none.baseline = BaselineKind::MinOfBoth;
    none.note = "coded curve never drops below the baseline within the grid";
    const auto j = threshold_json(none, rc, "RS[255,25]", 25.0 * 8 / 2040.0);
    CHECK(j["threshold"].is_null());
    CHECK(j["baseline"] == "min");
    CHECK(j["metric"] == "info-bit");
    CHECK(j["code"] == "RS[255,25]");
    CHECK_FALSE(j["reason"].get<std::string>().empty());
    CHECK(j["manifest_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    ThresholdReport found;
    found.baseline = BaselineKind::OptimalSqueezed;
    found.threshold_n_bar = 3.25;
    CurvePoint pt;
    pt.n_bar = 3.0;
    found.bracket_low = pt;
    const auto j2 = threshold_json(found, rc, "X", 0.1);
    CHECK(j2["threshold"].get<double>() == Approx(3.25));
    CHECK(j2["bracket_low"]["n_bar"].get<double>() == Approx(3.0));
    CHECK(j2["bracket_high"].is_null());
}

TEST_CASE("CLI: baseline and cell-error emit expected CSV", "[io][cli]") {
    const auto dir = test_dir();
    const auto base_csv = (dir / "baseline.csv").string();
    REQUIRE(cli::run({"baseline", "--kappa0", "0.1", "--kappa1", "0.95", "--grid",
                      "0:10:101", "--out", base_csv}) == 0);
    std::istringstream in(slurp(base_csv));
    std::string header;
    std::getline(in, header);
    CHECK(header == "n_bar,p_c,p_s");
    int rows = 0;
    for (std::string line; std::getline(in, line);) rows += !line.empty();
    CHECK(rows == 101);

    const auto cell_csv = (dir / "cell.csv").string();
    REQUIRE(cli::run({"cell-error", "--kappa0", "0.1", "--kappa1", "0.95", "--grid",
                      "1:4:4", "--trials", "20000", "--seed", "3", "--out",
                      cell_csv}) == 0);
    std::istringstream cin(slurp(cell_csv));
    std::getline(cin, header);
    CHECK(header == "n_bar,receiver,p_analytic,p_mc,ci_low,ci_high,errors,trials");
    int both = 0;
    for (std::string line; std::getline(cin, line);) {
        if (line.find("heterodyne") != std::string::npos) ++both;
        if (line.find("dolinar") != std::string::npos) ++both;
        // Monte Carlo must sit on top of the analytic value.
        std::stringstream row(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(row, col, ',')) cols.push_back(col);
        REQUIRE(cols.size() == 8);
        const double analytic = std::stod(cols[2]);
        const double mc = std::stod(cols[3]);
        const double trials = std::stod(cols[7]);
        const double se = std::sqrt(analytic * (1 - analytic) / trials);
        REQUIRE(std::abs(mc - analytic) < 5 * se + 1e-12);
    }
    CHECK(both == 8);
}

TEST_CASE("CLI: codec-test verifies capability and signals failure modes",
          "[io][cli]") {
    CHECK(cli::run({"codec-test", "--family", "bch", "--delta", "7", "--seed",
                    "11"}) == 0);
    CHECK(cli::run({"codec-test", "--family", "rm", "--r", "1", "--m", "3"}) == 0);
    CHECK(cli::run({"codec-test", "--family", "rs", "--n", "15", "--k", "9",
                    "--patterns", "200"}) == 0);
    // Validation failures exit 1.
    CHECK(cli::run({"codec-test", "--family", "rs", "--n", "100", "--k", "9"}) == 1);
    CHECK(cli::run({"codec-test"}) == 1);
}

TEST_CASE("CLI: curve replays byte-identically from its manifest", "[io][cli]") {
    const auto dir = test_dir();
    const auto cfg_path = (dir / "run.cfg").string();
    {
        std::ofstream cfg(cfg_path);
        cfg << "code.family=bch\ncode.n=15\ncode.delta=7\n"
            << "cells.kappa0=0.1\ncells.kappa1=0.95\n"
            << "receiver.kind=dolinar\n"
            << "grid.start=1\ngrid.stop=3\ngrid.points=3\n"
            << "trials=4000\nseed=77\n";
    }
    const auto csv1 = (dir / "c1.csv").string();
    const auto csv2 = (dir / "c2.csv").string();
    const auto manifest = (dir / "c1.manifest").string();
    REQUIRE(cli::run({"curve", "--config", cfg_path, "--out", csv1,
                      "--manifest-out", manifest, "--workers", "1"}) == 0);
    REQUIRE(cli::run({"curve", "--config", manifest, "--out", csv2, "--workers",
                      "8"}) == 0);
    CHECK(slurp(csv1) == slurp(csv2));

    // Flag overrides beat file keys and land in the stored manifest.
    const auto csv3 = (dir / "c3.csv").string();
    const auto manifest3 = (dir / "c3.manifest").string();
    REQUIRE(cli::run({"curve", "--config", cfg_path, "--seed", "78", "--out", csv3,
                      "--manifest-out", manifest3}) == 0);
    CHECK(slurp(csv3) != slurp(csv1));
    const auto kv3 = parse_kv_file(manifest3);
    CHECK(kv3.at("seed") == "78");

    // I/O failures exit 2, validation failures exit 1.
    CHECK(cli::run({"curve", "--config", cfg_path, "--out",
                    "/nonexistent/dir/x.csv"}) == 2);
    CHECK(cli::run({"curve", "--config", cfg_path, "--kappa0", "1.5", "--out",
                    csv3}) == 1);
}

TEST_CASE("CLI: threshold writes a JSON verdict", "[io][cli]") {
    const auto dir = test_dir();
    const auto json_path = (dir / "thr.json").string();
    REQUIRE(cli::run({"threshold", "--code-family", "rm", "--code-r", "0",
                      "--code-m", "3", "--kappa0", "0.1", "--kappa1", "0.95",
                      "--receiver", "heterodyne", "--grid", "6:14:5", "--trials",
                      "20000", "--seed", "9", "--json", json_path}) == 0);
    const auto j = nlohmann::json::parse(slurp(json_path));
    CHECK(j.contains("threshold"));
    CHECK(j["baseline"] == "min");
    CHECK(j["code"] == "RM(0,3)");
    CHECK(j["manifest_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}
