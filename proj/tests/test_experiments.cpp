#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualdiv/experiments.hpp"

using namespace dualdiv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "dualdiv_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("estimate experiment writes the MLE for the KLm divergence") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Estimate;
    cfg.model_name = "exponential";
    cfg.gamma = 0.0;
    cfg.theta_T = {1.5};
    cfg.n = 200;
    cfg.seed = 99;
    cfg.out_dir = fresh_dir("estimate").string();
    RunOutputs outs = run(cfg);

    // The printed estimate equals 1 / sample mean of the same seeded sample.
    auto model = cfg.build_model();
    Mat sample = model.sample(vec1(1.5), cfg.n, cfg.seed);
    double want = 1.0 / sample.row(0).mean();
    CHECK(outs.metrics.at("theta_hat_0") == Catch::Approx(want).margin(1e-6));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "estimate.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "manifest.json"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::GlrEcdf;
    cfg.sizes = {150};
    cfg.reps = 40;
    cfg.seed = 7;
    cfg.out_dir = fresh_dir("det_a").string();
    run(cfg);
    std::string a = slurp(fs::path(cfg.out_dir) / "glr_ecdf_n150.csv");

    cfg.out_dir = fresh_dir("det_b").string();
    run(cfg);
    std::string b = slurp(fs::path(cfg.out_dir) / "glr_ecdf_n150.csv");
    CHECK(a == b);

    // Header row present; numeric fields parse back exactly.
    CHECK(a.rfind("statistic,ecdf,limit_cdf", 0) == 0);
    std::istringstream lines(a);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    double v0 = std::stod(line.substr(0, line.find(',')));
    CHECK(format_double(v0) == line.substr(0, line.find(',')));
}

TEST_CASE("manifest round trip reproduces the run") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::DualChi2Ecdf;
    cfg.sizes = {120};
    cfg.reps = 25;
    cfg.seed = 31;
    cfg.out_dir = fresh_dir("manifest_a").string();
    run(cfg);
    std::string first = slurp(fs::path(cfg.out_dir) / "dualchi2_ecdf_n120.csv");

    nlohmann::json manifest;
    {
        std::ifstream in(fs::path(cfg.out_dir) / "manifest.json");
        in >> manifest;
    }
    ExperimentConfig again = config_from_json(manifest);
    again.out_dir = fresh_dir("manifest_b").string();
    run(again);
    std::string second = slurp(fs::path(again.out_dir) / "dualchi2_ecdf_n120.csv");
    CHECK(first == second);
}

TEST_CASE("plot script references produced files and rejects empty dirs") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::GlrEcdf;
    cfg.sizes = {100};
    cfg.reps = 10;
    cfg.seed = 3;
    cfg.out_dir = fresh_dir("plots").string();
    run(cfg);
    std::string script_path = emit_plot_script(cfg.out_dir);
    std::string script = slurp(script_path);
    CHECK(script.find("glr_ecdf_n100.csv") != std::string::npos);
    CHECK(script.find("with steps") != std::string::npos);

    fs::path empty = fresh_dir("empty");
    CHECK_THROWS_AS(emit_plot_script(empty.string()), std::runtime_error);
}

TEST_CASE("power curve files carry empirical and approximate columns") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::PowerCurve;
    cfg.model_name = "exponential";
    cfg.theta0 = {1.0};
    cfg.gamma = 0.0;
    cfg.sizes = {60};
    cfg.reps = 30;
    cfg.grid_lo = 0.5;
    cfg.grid_hi = 2.0;
    cfg.grid_step = 0.5;
    cfg.seed = 11;
    cfg.out_dir = fresh_dir("power").string();
    run(cfg);
    std::string csv = slurp(fs::path(cfg.out_dir) / "power_curve_n60.csv");
    CHECK(csv.rfind("theta_T,empirical_power,approx_power", 0) == 0);
    // grid 0.5, 1.0, 1.5, 2.0 -> header + 4 rows
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 5);
}

TEST_CASE("config validation rejects malformed inputs") {
    ExperimentConfig cfg;
    cfg.reps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.reps = 10;
    cfg.level = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.level = 0.05;
    cfg.kind = ExperimentKind::Estimate;
    cfg.model_name = "exponential";
    cfg.theta_T = {-2.0};  // outside the rate box
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("json config round trip preserves fields") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::PowerCurve;
    cfg.model_name = "exponential";
    cfg.gamma = 0.5;
    cfg.theta0 = {1.0};
    cfg.sizes = {50, 100};
    cfg.reps = 77;
    cfg.seed = 4242;
    cfg.level = 0.1;
    cfg.power_target = 0.85;
    ExperimentConfig back = config_from_json(to_json(cfg));
    CHECK(back.kind == cfg.kind);
    CHECK(back.model_name == cfg.model_name);
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.sizes == cfg.sizes);
    CHECK(back.reps == cfg.reps);
    CHECK(back.seed == cfg.seed);
    CHECK(back.level == cfg.level);
    REQUIRE(back.power_target.has_value());
    CHECK(*back.power_target == 0.85);
}
