#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("orbitvol_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter;
};
int TempDir::counter = 0;

fs::path write_config(const TempDir& dir, const json& cfg) {
    const fs::path p = dir.path / "config.json";
    std::ofstream(p) << cfg.dump(2) << "\n";
    return p;
}

int run_cli(const std::string& tail) {
    const std::string cmd = std::string(ORBITVOL_CLI_PATH) + " " + tail;
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    return json::parse(is);
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json small_sampler() { return {{"lines", 20}, {"m", 9}, {"seed", 3}}; }

json box_region(int n, double lo, double hi, int count) {
    return {{"lo", std::vector<double>(n, lo)},
            {"hi", std::vector<double>(n, hi)},
            {"counts", std::vector<int>(n, count)}};
}

}  // namespace

TEST_CASE("analyze: cosh is strictly convex and consistent") {
    TempDir dir;
    const auto cfg = write_config(dir, {{"potential", {{"kind", "separable_cosh"}, {"n", 2}}},
                                        {"region", box_region(2, -2, 2, 5)},
                                        {"sampler", small_sampler()}});
    CHECK(run_cli("analyze --config " + cfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    const json rep = read_json(dir.path / "analyze.json");
    CHECK(rep.at("consistency").get<bool>());
    CHECK(rep.at("ricci").at("verdict") == "NegativeDefinite");
    CHECK(rep.at("convexity").at("logVol").at("verdict") == "StrictlyConvex");
    CHECK(rep.contains("library_version"));
    CHECK(rep.contains("config_digest"));
}

TEST_CASE("analyze: flat is affine, fubini-study strictly concave") {
    TempDir dir;
    const auto flat = write_config(dir, {{"potential", {{"kind", "flat"}, {"n", 2}}},
                                         {"region", box_region(2, -2, 2, 5)},
                                         {"sampler", small_sampler()}});
    CHECK(run_cli("analyze --config " + flat.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    json rep = read_json(dir.path / "analyze.json");
    CHECK(rep.at("ricci").at("verdict") == "Zero");
    CHECK(rep.at("convexity").at("logVol").at("verdict") == "Affine");
    CHECK(rep.at("consistency").get<bool>());

    const auto fscfg =
        write_config(dir, {{"potential", {{"kind", "fubini_study"}, {"n", 1}, {"lambda", 1.0}}},
                           {"region", box_region(1, -2, 2, 9)},
                           {"sampler", small_sampler()}});
    CHECK(run_cli("analyze --config " + fscfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    rep = read_json(dir.path / "analyze.json");
    CHECK(rep.at("ricci").at("verdict") == "PositiveDefinite");
    CHECK(rep.at("convexity").at("negLogVol").at("verdict") == "StrictlyConvex");
    CHECK(rep.at("consistency").get<bool>());
}

TEST_CASE("critical: fubini-study has the unique maximum at the origin") {
    TempDir dir;
    const auto cfg =
        write_config(dir, {{"potential", {{"kind", "fubini_study"}, {"n", 2}, {"lambda", 1.0}}},
                           {"optimizer", {{"starts", {{"count", 4}, {"seed", 7}}}}}});
    CHECK(run_cli("critical --config " + cfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    const json rep = read_json(dir.path / "critical.json");
    CHECK(rep.at("outcome") == "unique_maximum");
    for (double xi : rep.at("x_star")) CHECK(std::abs(xi) < 1e-7);
    for (double mi : rep.at("moment_map")) CHECK(mi == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("critical: structured outcomes for cosh and flat") {
    TempDir dir;
    const auto cosh = write_config(
        dir, {{"potential", {{"kind", "separable_cosh"}, {"n", 2}}},
              {"optimizer", {{"starts", json::array({{0.5, -0.3}, {-0.2, 0.4}})}}}});
    CHECK(run_cli("critical --config " + cosh.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    CHECK(read_json(dir.path / "critical.json").at("outcome") == "no_interior_maximum");

    const auto flat = write_config(
        dir, {{"potential", {{"kind", "flat"}, {"n", 1}}},
              {"optimizer", {{"starts", json::array({{-1.0}, {1.0}})}}}});
    CHECK(run_cli("critical --config " + flat.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    CHECK(read_json(dir.path / "critical.json").at("outcome") == "every_orbit_critical");
}

TEST_CASE("critical: exit 4 when uniqueness fails on a positive-ricci region") {
    TempDir dir;
    // Flat region classifies Zero -> exit stays 0; force the 4 path with a
    // potential whose region classifies PositiveDefinite but starts too few
    // iterations to converge.
    const auto cfg = write_config(
        dir, {{"potential", {{"kind", "fubini_study"}, {"n", 1}, {"lambda", 1.0}}},
              {"region", box_region(1, -2, 2, 5)},
              {"optimizer",
               {{"max_iter", 0}, {"starts", json::array({{0.9}, {-0.9}})}}}});
    CHECK(run_cli("critical --config " + cfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 4);
}

TEST_CASE("profile: csv shape and content") {
    TempDir dir;
    const auto cfg = write_config(
        dir, {{"potential", {{"kind", "flat"}, {"n", 2}}},
              {"functional", "logVol"},
              {"segment",
               {{"x0", {0.0, 0.0}}, {"d", {1.0, 0.0}}, {"t_min", -1.0}, {"t_max", 1.0}, {"m", 7}}}});
    CHECK(run_cli("profile --config " + cfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    const std::string csv = read_file(dir.path / "profile.csv");
    CHECK(csv.rfind("t,value,second_difference\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 rows
}

TEST_CASE("su2: summary fields") {
    TempDir dir;
    const auto cfg = write_config(
        dir, {{"su2",
               {{"lambda", 1.0}, {"t_range", {-1.0, 1.0}}, {"points", 9},
                {"resolutions", {8, 8, 16}}}}});
    CHECK(run_cli("su2 --config " + cfg.string() + " --out " + dir.path.string() + " --quiet") ==
          0);
    const json rep = read_json(dir.path / "su2_summary.json");
    CHECK(rep.at("argmax_t") == doctest::Approx(0.0));
    CHECK(std::abs(rep.at("defect_at_argmax").get<double>()) < 1e-9);
    CHECK(rep.at("convexity_verdict") == "StrictlyConvex");
    const std::string csv = read_file(dir.path / "su2_profile.csv");
    CHECK(csv.rfind("t,vol_J,vol,defect,second_diff_neg_log_volJ\n", 0) == 0);
}

TEST_CASE("lassalle: frobenius profile is convex") {
    TempDir dir;
    const auto cfg = write_config(
        dir, {{"function", "frobenius_log"},
              {"su2", {{"points", 9}, {"resolutions", {6, 6, 12}}, {"t_range", {-1.0, 1.0}}}}});
    CHECK(run_cli("lassalle --config " + cfg.string() + " --out " + dir.path.string() +
                  " --quiet") == 0);
    const json rep = read_json(dir.path / "lassalle.json");
    CHECK(rep.at("function") == "frobenius_log");
    const std::string verdict = rep.at("report").at("verdict");
    CHECK((verdict == "StrictlyConvex" || verdict == "Convex"));
}

TEST_CASE("config errors exit with code 2") {
    TempDir dir;
    const auto unknown = write_config(dir, {{"potential", {{"kind", "flat"}, {"n", 1}}},
                                            {"region", box_region(1, -1, 1, 3)},
                                            {"surprise", true}});
    CHECK(run_cli("analyze --config " + unknown.string() + " --out " + dir.path.string() +
                  " --quiet 2>/dev/null") == 2);

    const auto badkind = write_config(dir, {{"potential", {{"kind", "hyperbolic"}, {"n", 1}}},
                                            {"region", box_region(1, -1, 1, 3)}});
    CHECK(run_cli("analyze --config " + badkind.string() + " --out " + dir.path.string() +
                  " --quiet 2>/dev/null") == 2);

    CHECK(run_cli("analyze --config " + (dir.path / "missing.json").string() + " --out " +
                  dir.path.string() + " --quiet 2>/dev/null") == 2);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    TempDir a, b;
    const json cfg = {{"potential", {{"kind", "fubini_study"}, {"n", 2}, {"lambda", 1.0}}},
                      {"region", box_region(2, -2, 2, 5)},
                      {"sampler", small_sampler()}};
    const auto ca = write_config(a, cfg);
    const auto cb = write_config(b, cfg);
    CHECK(run_cli("analyze --config " + ca.string() + " --out " + a.path.string() + " --quiet") ==
          0);
    CHECK(run_cli("analyze --config " + cb.string() + " --out " + b.path.string() + " --quiet") ==
          0);
    CHECK(read_file(a.path / "analyze.json") == read_file(b.path / "analyze.json"));
}
