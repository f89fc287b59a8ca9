#pragma once

// Batch experiment harness: simulation designs behind the CLI subcommands
// (ECDF comparisons for the mixture statistics, power curves, single-run
// estimate/test/plan reports), CSV emission, the run manifest, and the plot
// script generator. Identical config + seed produces byte-identical output.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualdiv/ecdf.hpp"
#include "dualdiv/infer.hpp"

namespace dualdiv {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;

enum class ExperimentKind {
    Estimate,
    SimpleTest,
    CompositeTest,
    PowerPlan,
    PowerCurve,
    GlrEcdf,
    DualChi2Ecdf,
    ConfidenceRegion,
    MixtureTest
};

inline std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Estimate: return "estimate";
        case ExperimentKind::SimpleTest: return "test-simple";
        case ExperimentKind::CompositeTest: return "test-composite";
        case ExperimentKind::PowerPlan: return "power-plan";
        case ExperimentKind::PowerCurve: return "power-curve";
        case ExperimentKind::GlrEcdf: return "glr-ecdf";
        case ExperimentKind::DualChi2Ecdf: return "dualchi2-ecdf";
        case ExperimentKind::ConfidenceRegion: return "confreg";
        case ExperimentKind::MixtureTest: return "mixture-test";
    }
    return "unknown";
}

inline ExperimentKind kind_from_name(const std::string& s) {
    for (ExperimentKind k :
         {ExperimentKind::Estimate, ExperimentKind::SimpleTest, ExperimentKind::CompositeTest,
          ExperimentKind::PowerPlan, ExperimentKind::PowerCurve, ExperimentKind::GlrEcdf,
          ExperimentKind::DualChi2Ecdf, ExperimentKind::ConfidenceRegion,
          ExperimentKind::MixtureTest})
        if (kind_name(k) == s) return k;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

struct MixtureConfig {
    ParametricModel::NormalComponent p0{0.0, 1.0};
    ParametricModel::NormalComponent p1{0.5, 1.0};
    Interval weight_box{-0.5, 1.5};
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Estimate;
    std::string model_name = "gaussian_mean";
    Interval mean_box{-1e6, 1e6};
    Interval rate_box{1e-6, 1e6};
    int model_dim = 2;
    MixtureConfig mixture;
    double gamma = 0.0;
    std::vector<double> theta_T{0.0};
    std::vector<double> theta0{0.0};
    std::vector<std::pair<int, double>> constraint_pins;
    std::vector<int> sizes{1000};
    int n = 1000;
    int reps = 1000;
    double level = 0.05;
    std::uint64_t seed = 20080222;
    std::string out_dir = "out";
    double grid_lo = 0.2, grid_hi = 3.0, grid_step = 0.1;
    std::optional<double> power_target;
    double confreg_grid_lo = 0.0, confreg_grid_hi = 1.0, confreg_grid_step = 0.05;

    void validate() const {
        if (reps < 1) throw std::invalid_argument("config: replications must be >= 1");
        if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("config: level in (0,1)");
        if (n < 1) throw std::invalid_argument("config: n must be >= 1");
        for (int s : sizes)
            if (s < 1) throw std::invalid_argument("config: sizes must be >= 1");
        // theta_T is a sampling truth only for the single-truth experiments;
        // the curve and ECDF designs draw it from their own grids.
        bool uses_theta_T = kind == ExperimentKind::Estimate || kind == ExperimentKind::SimpleTest ||
                            kind == ExperimentKind::CompositeTest ||
                            kind == ExperimentKind::PowerPlan;
        if (uses_theta_T) {
            ParametricModel m = build_model();
            for (std::size_t i = 0; i < theta_T.size() && i < m.param_box().size(); ++i)
                if (!m.param_box()[i].contains(theta_T[i]))
                    throw std::invalid_argument("config: theta_T outside the model parameter box");
        }
    }

    ParametricModel build_model() const {
        if (model_name == "gaussian_mean") return ParametricModel::gaussian_mean(mean_box);
        if (model_name == "exponential") return ParametricModel::exponential_rate(rate_box);
        if (model_name == "gaussian_mean_vector")
            return ParametricModel::gaussian_mean_vector(model_dim, mean_box);
        if (model_name == "two_mixture")
            return ParametricModel::two_mixture_known(mixture.p0, mixture.p1);
        throw std::invalid_argument("config: unknown model name " + model_name);
    }

    MixtureExtendedModel build_mixture() const {
        return MixtureExtendedModel::two_known(mixture.p0, mixture.p1, mixture.weight_box);
    }

    Vec theta_T_vec() const {
        Vec v(static_cast<int>(theta_T.size()));
        for (std::size_t i = 0; i < theta_T.size(); ++i) v[static_cast<int>(i)] = theta_T[i];
        return v;
    }
    Vec theta0_vec() const {
        Vec v(static_cast<int>(theta0.size()));
        for (std::size_t i = 0; i < theta0.size(); ++i) v[static_cast<int>(i)] = theta0[i];
        return v;
    }
};

// ---- JSON round trip ----

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = kind_name(c.kind);
    j["model"] = {{"name", c.model_name}};
    if (c.model_name == "gaussian_mean" || c.model_name == "gaussian_mean_vector")
        j["model"]["mean_box"] = {c.mean_box.lo, c.mean_box.hi};
    if (c.model_name == "exponential") j["model"]["rate_box"] = {c.rate_box.lo, c.rate_box.hi};
    if (c.model_name == "gaussian_mean_vector") j["model"]["dim"] = c.model_dim;
    j["divergence"] = {{"family", "power"}, {"gamma", c.gamma}};
    j["mixture"] = {{"p0", {{"mean", c.mixture.p0.mean}, {"sd", c.mixture.p0.sd}}},
                    {"p1", {{"mean", c.mixture.p1.mean}, {"sd", c.mixture.p1.sd}}},
                    {"weight_box", {c.mixture.weight_box.lo, c.mixture.weight_box.hi}}};
    j["theta_T"] = c.theta_T;
    j["theta0"] = c.theta0;
    if (!c.constraint_pins.empty()) {
        nlohmann::json pins = nlohmann::json::array();
        for (auto& p : c.constraint_pins) pins.push_back({p.first, p.second});
        j["constraint"] = {{"pin", pins}};
    }
    j["sizes"] = c.sizes;
    j["n"] = c.n;
    j["reps"] = c.reps;
    j["level"] = c.level;
    j["seed"] = c.seed;
    j["grid"] = {{"lo", c.grid_lo}, {"hi", c.grid_hi}, {"step", c.grid_step}};
    j["confreg_grid"] = {{"lo", c.confreg_grid_lo}, {"hi", c.confreg_grid_hi}, {"step", c.confreg_grid_step}};
    if (c.power_target) j["power"] = {{"target", *c.power_target}};
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("experiment")) c.kind = kind_from_name(j.at("experiment").get<std::string>());
    if (j.contains("model")) {
        const auto& m = j.at("model");
        c.model_name = m.value("name", c.model_name);
        if (m.contains("mean_box"))
            c.mean_box = {m["mean_box"][0].get<double>(), m["mean_box"][1].get<double>()};
        if (m.contains("rate_box"))
            c.rate_box = {m["rate_box"][0].get<double>(), m["rate_box"][1].get<double>()};
        if (m.contains("dim")) c.model_dim = m["dim"].get<int>();
    }
    if (j.contains("divergence")) c.gamma = j.at("divergence").value("gamma", 0.0);
    if (j.contains("mixture")) {
        const auto& m = j.at("mixture");
        if (m.contains("p0")) c.mixture.p0 = {m["p0"].value("mean", 0.0), m["p0"].value("sd", 1.0)};
        if (m.contains("p1")) c.mixture.p1 = {m["p1"].value("mean", 0.5), m["p1"].value("sd", 1.0)};
        if (m.contains("weight_box"))
            c.mixture.weight_box = {m["weight_box"][0].get<double>(), m["weight_box"][1].get<double>()};
    }
    if (j.contains("theta_T")) c.theta_T = j.at("theta_T").get<std::vector<double>>();
    if (j.contains("theta0")) c.theta0 = j.at("theta0").get<std::vector<double>>();
    if (j.contains("constraint") && j["constraint"].contains("pin")) {
        c.constraint_pins.clear();
        for (const auto& p : j["constraint"]["pin"])
            c.constraint_pins.emplace_back(p[0].get<int>(), p[1].get<double>());
    }
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("reps")) c.reps = j.at("reps").get<int>();
    if (j.contains("level")) c.level = j.at("level").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("grid")) {
        c.grid_lo = j["grid"].value("lo", c.grid_lo);
        c.grid_hi = j["grid"].value("hi", c.grid_hi);
        c.grid_step = j["grid"].value("step", c.grid_step);
    }
    if (j.contains("confreg_grid")) {
        c.confreg_grid_lo = j["confreg_grid"].value("lo", c.confreg_grid_lo);
        c.confreg_grid_hi = j["confreg_grid"].value("hi", c.confreg_grid_hi);
        c.confreg_grid_step = j["confreg_grid"].value("step", c.confreg_grid_step);
    }
    if (j.contains("power") && j["power"].contains("target"))
        c.power_target = j["power"]["target"].get<double>();
    return c;
}

namespace detail {

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }
    void num_row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_double(cells[i]);
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

inline ReferenceCdf half_chi2_reference() {
    // 0.5 * dirac_0 + 0.5 * chi2_1
    return ReferenceCdf{
        [](double x) { return x < 0.0 ? 0.0 : 0.5 + 0.5 * chi2_cdf(1, x); },
        [](double x) { return x <= 0.0 ? 0.0 : 0.5 + 0.5 * chi2_cdf(1, x); }};
}

inline ReferenceCdf chi2_reference(int dof) {
    return ReferenceCdf{[dof](double x) { return chi2_cdf(dof, x); }, nullptr};
}

inline double mass_at_zero(const std::vector<double>& stats) {
    int z = 0;
    for (double s : stats)
        if (s <= 1e-9) ++z;
    return static_cast<double>(z) / static_cast<double>(stats.size());
}

inline std::vector<double> theta_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double t = lo; t <= hi + 1e-12; t += step) g.push_back(t);
    return g;
}

}  // namespace detail

struct RunOutputs {
    std::vector<std::string> files;
    std::map<std::string, double> metrics;  // summary values also written to disk
};

inline void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    nlohmann::json j = to_json(cfg);
    j["version"] = kVersion;
    j["csv_schema"] = kCsvSchemaVersion;
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << "\n";
}

inline RunOutputs run(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    RunOutputs outs;
    auto record = [&](const fs::path& p) { outs.files.push_back(p.string()); };

    switch (cfg.kind) {
        case ExperimentKind::Estimate: {
            ParametricModel model = cfg.build_model();
            DivergenceSpec spec = DivergenceSpec::power(cfg.gamma);
            DualObjective dual(model, spec);
            Mat sample = model.sample(cfg.theta_T_vec(), cfg.n, cfg.seed);
            EstimateResult est = min_dual_estimate(dual, sample, {});
            detail::CsvWriter csv(dir / "estimate.csv", "field,value");
            for (int i = 0; i < est.estimate.size(); ++i)
                csv.row({"theta_hat_" + std::to_string(i), format_double(est.estimate[i])});
            for (int i = 0; i < est.companion_alpha.size(); ++i)
                csv.row({"alpha_hat_" + std::to_string(i), format_double(est.companion_alpha[i])});
            csv.row({"objective_value", format_double(est.objective_value)});
            csv.row({"converged", est.report.converged ? "1" : "0"});
            csv.row({"n", std::to_string(cfg.n)});
            record(dir / "estimate.csv");
            outs.metrics["theta_hat_0"] = est.estimate[0];
            break;
        }
        case ExperimentKind::SimpleTest:
        case ExperimentKind::CompositeTest:
        case ExperimentKind::MixtureTest: {
            TestReport rep;
            if (cfg.kind == ExperimentKind::SimpleTest) {
                ParametricModel model = cfg.build_model();
                DualObjective dual(model, DivergenceSpec::power(cfg.gamma));
                Mat sample = model.sample(cfg.theta_T_vec(), cfg.n, cfg.seed);
                rep = simple_test(dual, cfg.theta0_vec(), sample, cfg.level);
            } else if (cfg.kind == ExperimentKind::CompositeTest) {
                ParametricModel model = cfg.build_model();
                DualObjective dual(model, DivergenceSpec::power(cfg.gamma));
                ConstraintSpec constraint =
                    ConstraintSpec::pin_coordinates(model.param_box(), cfg.constraint_pins);
                Mat sample = model.sample(cfg.theta_T_vec(), cfg.n, cfg.seed);
                rep = composite_test(dual, constraint, sample, cfg.level);
            } else {
                MixtureExtendedModel ext = cfg.build_mixture();
                Mat sample =
                    ext.probability_model().sample(cfg.theta_T_vec(), cfg.n, cfg.seed);
                rep = mixture_component_test(ext, 1, sample, cfg.level);
            }
            detail::CsvWriter csv(dir / "test.csv",
                                  "statistic,dof,critical_value,p_value,reject,level");
            csv.row({format_double(rep.statistic), std::to_string(rep.dof),
                     format_double(rep.critical_value), format_double(rep.p_value),
                     rep.reject ? "1" : "0", format_double(rep.level)});
            record(dir / "test.csv");
            outs.metrics["statistic"] = rep.statistic;
            outs.metrics["reject"] = rep.reject ? 1.0 : 0.0;
            break;
        }
        case ExperimentKind::PowerPlan: {
            ParametricModel model = cfg.build_model();
            DualObjective dual(model, DivergenceSpec::power(cfg.gamma));
            Vec th0 = cfg.theta0_vec(), tt = cfg.theta_T_vec();
            double D = dual.population_objective(th0, tt, tt);
            double sigma = std::sqrt(sigma2_simple(dual, th0, tt));
            PowerPlan plan = power_plan(D, sigma, model.param_dim(), cfg.level,
                                        static_cast<double>(cfg.n), cfg.power_target,
                                        dual.spec().second_at_one());
            detail::CsvWriter csv(dir / "plan.csv", "field,value");
            csv.row({"divergence", format_double(plan.divergence)});
            csv.row({"sigma", format_double(plan.sigma)});
            csv.row({"dof", std::to_string(plan.dof)});
            csv.row({"level", format_double(plan.level)});
            csv.row({"approx_power_at_n", plan.approx_power ? format_double(*plan.approx_power) : ""});
            csv.row({"target_power", plan.target_power ? format_double(*plan.target_power) : ""});
            csv.row({"n0", format_double(plan.n0)});
            csv.row({"n_star", std::to_string(plan.n_star)});
            csv.row({"status", plan.status == PlanStatus::Ok ? "ok" : "planning_impossible"});
            record(dir / "plan.csv");
            if (plan.approx_power) outs.metrics["approx_power"] = *plan.approx_power;
            outs.metrics["n_star"] = static_cast<double>(plan.n_star);
            break;
        }
        case ExperimentKind::PowerCurve: {
            ParametricModel model = cfg.build_model();
            DivergenceSpec spec = DivergenceSpec::power(cfg.gamma);
            Vec th0 = cfg.theta0_vec();
            std::vector<double> grid = detail::theta_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_step);
            for (int nn : cfg.sizes) {
                detail::CsvWriter csv(dir / ("power_curve_n" + std::to_string(nn) + ".csv"),
                                      "theta_T,empirical_power,approx_power");
                for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                    Vec tt = vec1(grid[gi]);
                    DualObjective dual(model, spec);
                    double D = dual.population_objective(th0, tt, tt);
                    double approx = cfg.level;
                    if (std::fabs(grid[gi] - th0[0]) > 1e-12) {
                        double sigma = std::sqrt(sigma2_simple(dual, th0, tt));
                        approx = approx_power_at(D, sigma, model.param_dim(), cfg.level,
                                                 static_cast<double>(nn), spec.second_at_one());
                    }
                    std::vector<int> rejects(static_cast<std::size_t>(cfg.reps), 0);
                    parallel_for(cfg.reps, [&](std::int64_t rep) {
                        DualObjective rep_dual(model, spec);
                        Mat sample = model.sample(
                            tt, nn, cfg.seed + static_cast<std::uint64_t>(rep) +
                                        1000003ULL * static_cast<std::uint64_t>(gi));
                        TestReport tr = simple_test(rep_dual, th0, sample, cfg.level);
                        rejects[static_cast<std::size_t>(rep)] = tr.reject ? 1 : 0;
                    });
                    double emp = 0.0;
                    for (int rj : rejects) emp += rj;
                    emp /= cfg.reps;
                    csv.num_row(std::vector<double>{grid[gi], emp, approx});
                }
                record(dir / ("power_curve_n" + std::to_string(nn) + ".csv"));
            }
            break;
        }
        case ExperimentKind::GlrEcdf:
        case ExperimentKind::DualChi2Ecdf: {
            MixtureExtendedModel ext = cfg.build_mixture();
            const ParametricModel& pm = ext.probability_model();
            Vec th0 = vec1(0.0);
            detail::CsvWriter summary(dir / "summary.csv", "experiment,n,ks,mass_at_zero");
            for (int nn : cfg.sizes) {
                std::vector<double> stats(static_cast<std::size_t>(cfg.reps), 0.0);
                parallel_for(cfg.reps, [&](std::int64_t rep) {
                    Mat sample = pm.sample(th0, nn, cfg.seed + static_cast<std::uint64_t>(rep));
                    if (cfg.kind == ExperimentKind::GlrEcdf) {
                        stats[static_cast<std::size_t>(rep)] = glr_statistic(pm, th0, sample);
                    } else {
                        auto res = mixture_dual_chi2(ext, th0, sample);
                        stats[static_cast<std::size_t>(rep)] = 2.0 * nn * res.sup_value;
                    }
                });
                std::vector<double> sorted = stats;
                std::sort(sorted.begin(), sorted.end());
                ReferenceCdf ref = cfg.kind == ExperimentKind::GlrEcdf
                                       ? detail::half_chi2_reference()
                                       : detail::chi2_reference(1);
                std::string base = cfg.kind == ExperimentKind::GlrEcdf ? "glr_ecdf_n"
                                                                       : "dualchi2_ecdf_n";
                detail::CsvWriter csv(dir / (base + std::to_string(nn) + ".csv"),
                                      "statistic,ecdf,limit_cdf");
                for (std::size_t i = 0; i < sorted.size(); ++i)
                    csv.num_row(std::vector<double>{sorted[i],
                                                (static_cast<double>(i) + 1.0) / cfg.reps,
                                                ref.at(sorted[i])});
                record(dir / (base + std::to_string(nn) + ".csv"));
                double ks = EcdfSummary(sorted).ks_distance_to(ref);
                double mz = detail::mass_at_zero(sorted);
                summary.row({kind_name(cfg.kind), std::to_string(nn), format_double(ks),
                             cfg.kind == ExperimentKind::GlrEcdf ? format_double(mz) : ""});
                outs.metrics["ks_n" + std::to_string(nn)] = ks;
                if (cfg.kind == ExperimentKind::GlrEcdf)
                    outs.metrics["mass_at_zero_n" + std::to_string(nn)] = mz;
            }
            record(dir / "summary.csv");
            break;
        }
        case ExperimentKind::ConfidenceRegion: {
            MixtureExtendedModel ext = cfg.build_mixture();
            const ParametricModel& pm = ext.probability_model();
            Vec tt = cfg.theta_T_vec();
            std::vector<double> grid = detail::theta_grid(cfg.confreg_grid_lo, cfg.confreg_grid_hi,
                                                          cfg.confreg_grid_step);
            if (cfg.reps == 1) {
                Mat sample = pm.sample(tt, cfg.n, cfg.seed);
                ConfidenceRegion region = confidence_region(ext, sample, cfg.level, grid);
                detail::CsvWriter csv(dir / "confreg.csv", "theta,statistic,in_region");
                for (std::size_t i = 0; i < grid.size(); ++i)
                    csv.num_row(std::vector<double>{region.grid[i], region.statistics[i],
                                                region.inside[i] ? 1.0 : 0.0});
                record(dir / "confreg.csv");
                outs.metrics["hull_lo"] = region.hull_lo;
                outs.metrics["hull_hi"] = region.hull_hi;
            } else {
                std::vector<int> covered(static_cast<std::size_t>(cfg.reps), 0);
                parallel_for(cfg.reps, [&](std::int64_t rep) {
                    Mat sample = pm.sample(tt, cfg.n, cfg.seed + static_cast<std::uint64_t>(rep));
                    auto res = mixture_dual_chi2(ext, tt, sample);
                    double stat = res.feasible ? 2.0 * cfg.n * res.sup_value : kInf;
                    covered[static_cast<std::size_t>(rep)] =
                        stat <= chi2_quantile(ext.cr_dof(), 1.0 - cfg.level) ? 1 : 0;
                });
                detail::CsvWriter csv(dir / "confreg_coverage.csv", "rep,covered");
                double cov = 0.0;
                for (std::size_t i = 0; i < covered.size(); ++i) {
                    csv.num_row(std::vector<double>{static_cast<double>(i),
                                                static_cast<double>(covered[i])});
                    cov += covered[i];
                }
                cov /= cfg.reps;
                record(dir / "confreg_coverage.csv");
                outs.metrics["coverage"] = cov;
            }
            break;
        }
    }

    write_manifest(cfg, dir);
    record(dir / "manifest.json");
    return outs;
}

/// Writes a self-contained gnuplot script rendering ECDF overlays and power
/// curves from the CSVs in the output directory. The CSVs stay the source of
/// truth; missing inputs are an error.
inline std::string emit_plot_script(const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    if (!fs::exists(dir)) throw std::runtime_error("emit_plot_script: no such directory " + out_dir);
    std::vector<std::string> ecdf_files, power_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("glr_ecdf_n", 0) == 0 || name.rfind("dualchi2_ecdf_n", 0) == 0)
            ecdf_files.push_back(name);
        else if (name.rfind("power_curve_n", 0) == 0)
            power_files.push_back(name);
    }
    if (ecdf_files.empty() && power_files.empty())
        throw std::runtime_error("emit_plot_script: no plottable CSVs in " + out_dir +
                                 " (expected glr_ecdf_n*.csv, dualchi2_ecdf_n*.csv or power_curve_n*.csv)");
    std::sort(ecdf_files.begin(), ecdf_files.end());
    std::sort(power_files.begin(), power_files.end());

    fs::path script = dir / "plot.gp";
    std::ofstream out(script);
    out << "# Generated by dualdiv " << kVersion << "; run with: gnuplot plot.gp\n";
    out << "set datafile separator comma\n";
    out << "set key bottom right\n";
    out << "set terminal pngcairo size 800,600\n";
    for (const auto& f : ecdf_files) {
        std::string png = f.substr(0, f.size() - 4) + ".png";
        out << "set output '" << png << "'\n";
        out << "set title 'Empirical distribution vs limit law (" << f << ")'\n";
        out << "plot '" << f << "' using 1:2 with steps lw 2 title 'empirical', \\\n"
            << "     '" << f << "' using 1:3 with lines lw 2 title 'limit'\n";
    }
    for (const auto& f : power_files) {
        std::string png = f.substr(0, f.size() - 4) + ".png";
        out << "set output '" << png << "'\n";
        out << "set title 'Power function and its approximation (" << f << ")'\n";
        out << "plot '" << f << "' using 1:2 with linespoints lw 2 title 'empirical', \\\n"
            << "     '" << f << "' using 1:3 with lines dashtype 2 lw 2 title 'approximation'\n";
    }
    return script.string();
}

}  // namespace dualdiv
