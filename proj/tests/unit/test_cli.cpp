#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "tilediff/grid_io.hpp"
#include "tilediff/manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "tilediff_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_config(const std::string& name, const json& doc) {
    const auto path = workdir() / name;
    std::ofstream(path) << doc.dump(2);
    return path;
}

int run(const std::string& args) {
    const std::string cmd = std::string(TILEDIFF_CLI) + " " + args + " >" + (workdir() / "stdout.txt").string() +
                            " 2>" + (workdir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json small_run() {
    return {{"input", {{"fixture", "smooth"}, {"shape", {4, 16, 16}}}},
            {"levels", 2},
            {"seed", 3},
            {"backend", {{"kind", "gmm"}, {"gmm", {{"components", 3}}}}}};
}

} // namespace

TEST_CASE("generate writes grids, views and a manifest") {
    const auto out = workdir() / "gen";
    REQUIRE(run("--config " + write_config("gen.json", small_run()).string() + " --output " + out.string() +
                " generate") == 0);
    CHECK(fs::exists(out / "level_0.rgf"));
    CHECK(fs::exists(out / "level_1.rgf"));
    CHECK(fs::exists(out / "manifest.json"));
    const auto manifest = json::parse(slurp(out / "manifest.json"));
    REQUIRE(manifest["levels"].size() == 2);
    CHECK(manifest["levels"][0]["nfe"] == 9);
    CHECK(manifest["levels"][1]["nfe"] == 49);
    const auto final_grid = tilediff::read_rgf(out / "level_1.rgf");
    CHECK(final_grid.shape() == tilediff::Shape{4, 64, 64});
}

TEST_CASE("thread count changes neither outputs nor manifest") {
    const auto cfg = write_config("threads.json", small_run()).string();
    const auto a = workdir() / "t1";
    const auto b = workdir() / "t4";
    REQUIRE(run("--config " + cfg + " --threads 1 --output " + a.string() + " generate") == 0);
    REQUIRE(run("--config " + cfg + " --threads 4 --output " + b.string() + " generate") == 0);
    CHECK(slurp(a / "level_1.rgf") == slurp(b / "level_1.rgf"));
    const auto ma = json::parse(slurp(a / "manifest.json"));
    const auto mb = json::parse(slurp(b / "manifest.json"));
    CHECK(ma["runtime"]["threads"] == 1);
    CHECK(mb["runtime"]["threads"] == 4);
    CHECK(tilediff::strip_runtime(ma) == tilediff::strip_runtime(mb));
}

TEST_CASE("seed override changes the output") {
    const auto cfg = write_config("seed.json", small_run()).string();
    const auto a = workdir() / "s5";
    REQUIRE(run("--config " + cfg + " --seed 5 --output " + a.string() + " generate") == 0);
    CHECK(json::parse(slurp(a / "manifest.json"))["config"]["seed"] == 5);
    CHECK(slurp(a / "level_1.rgf") != slurp(workdir() / "gen" / "level_1.rgf"));
}

TEST_CASE("masks and inspect") {
    const auto out = workdir() / "masks";
    REQUIRE(run("--config " + write_config("masks.json", small_run()).string() + " --output " + out.string() +
                " masks") == 0);
    CHECK(fs::exists(out / "masks.rgf"));
    const auto sum = tilediff::read_rgf(out / "weight_sum.rgf");
    for (float v : sum.values()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));
    REQUIRE(run("inspect " + (out / "masks.rgf").string()) == 0);
    const auto report = json::parse(slurp(workdir() / "stdout.txt"));
    CHECK(report.is_array());
}

TEST_CASE("exit codes by error kind") {
    CHECK(run("--config " + write_config("bad.json", {{"lamda", 0.5}}).string() + " generate") == 2);
    CHECK(slurp(workdir() / "stderr.txt").find("/lamda") != std::string::npos);
    CHECK(run("--config " + (workdir() / "missing.json").string() + " generate") == 3);
    std::ofstream(workdir() / "broken.json") << "{ not json";
    CHECK(run("--config " + (workdir() / "broken.json").string() + " generate") == 2);
    CHECK(run("inspect " + (workdir() / "missing.rgf").string()) == 3);
    json bridge = small_run();
    bridge["backend"] = {{"kind", "bridge"}, {"bridge", {{"address", "tcp://127.0.0.1:1"}, {"timeout_ms", 500}}}};
    CHECK(run("--config " + write_config("bridge.json", bridge).string() + " --output " +
              (workdir() / "b").string() + " generate") == 4);
    CHECK(slurp(workdir() / "stderr.txt").find("protocol") != std::string::npos);
    CHECK(run("no-such-command") != 0);
}
