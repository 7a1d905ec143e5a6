// otproc command-line interface: simulation studies, model fitting,
// trajectory prediction and pairwise optimal transports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/io.hpp"

namespace {

using namespace otproc;

std::vector<double> parse_times(const std::string& spec) {
    std::vector<double> times;
    if (spec.rfind("grid:", 0) == 0) {
        std::size_t g = std::stoul(spec.substr(5));
        if (g < 2) throw ConfigError("--times grid size must be >= 2");
        return grid::points(g);
    }
    std::stringstream ss(spec);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            times.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw ConfigError("--times: invalid time '" + field + "'");
        }
    }
    if (times.empty()) throw ConfigError("--times: no times given");
    return times;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::int64_t seed_override, std::int64_t reps_override,
                 std::int64_t threads_override) {
    SimConfig config = sim_config_from_json_file(config_path);
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
    if (reps_override > 0) config.reps = static_cast<std::size_t>(reps_override);
    if (threads_override >= 0) config.threads = static_cast<std::size_t>(threads_override);
    ImseResult result = run_study(config);
    std::filesystem::create_directories(out_dir);
    write_imse_csv(out_dir + "/imse.csv", result);
    write_imse_json(out_dir + "/imse.json", result);
    std::printf("imse_mean=%.6g imse_sd=%.6g failures=%zu wall=%.1fs\n", result.mean, result.sd,
                result.failures, result.wall_seconds);
    std::printf("wrote %s/imse.csv and %s/imse.json\n", out_dir.c_str(), out_dir.c_str());
    return 0;
}

struct FitOptions {
    std::string input, schema_path, mode = "dense", out_dir;
    double kappa = 1.0;
    double norm_t0 = 0.0;
    double bandwidth = 0.0;
    std::string link = "arctan";
    std::string kernel = "epanechnikov";
    std::size_t ncomp = 0;
    std::size_t grid = 101;
    std::size_t time_grid = 51;
    double ridge = 1e-8;
};

int run_fit(const FitOptions& opt) {
    PanelSchema schema = PanelSchema::from_json_file(opt.schema_path);
    IngestedPanel ingested = ingest_panel(opt.input, schema, opt.grid);
    const Panel& panel = ingested.panel;

    double total_obs = 0.0;
    for (const Subject& s : panel.subjects) total_obs += static_cast<double>(s.observations.size());
    const double mean_obs = total_obs / static_cast<double>(panel.subjects.size());
    const double h = opt.bandwidth > 0.0 ? opt.bandwidth
                                         : default_bandwidth(panel.subjects.size(), mean_obs);

    CenteringConfig centering;
    centering.grid_size = opt.grid;
    centering.kernel = kernel_from_name(opt.kernel);
    if (panel.design == Design::random) centering.bandwidth = h;
    CenteredPanel centered = center_panel(panel, centering);

    if (opt.mode == "dense") {
        DenseConfig config{opt.kappa, h, kernel_from_name(opt.kernel), opt.time_grid, opt.ncomp};
        FittedDenseModel model = fit_dense(centered.transports, config);
        save_dense_model(opt.out_dir, model, &centered);
    } else if (opt.mode == "sparse") {
        SparseConfig config{opt.norm_t0,   LinkFunction::from_name(opt.link),
                            h,             kernel_from_name(opt.kernel),
                            opt.time_grid, opt.ncomp,
                            opt.ridge};
        FittedSparseModel model = fit_sparse(centered.transports, config);
        save_sparse_model(opt.out_dir, model, &centered);
    } else {
        throw ConfigError("--mode must be dense or sparse");
    }
    std::printf("model written to %s (design=%s, subjects=%zu)\n", opt.out_dir.c_str(),
                design_name(panel.design).c_str(), panel.subjects.size());
    return 0;
}

int run_predict(const std::string& model_dir, const std::string& subject,
                const std::string& times_spec, const std::string& out_dir) {
    std::vector<double> times = parse_times(times_spec);
    std::filesystem::create_directories(out_dir);
    const std::string mode = model_mode(model_dir);

    std::function<TransportMap(double)> predict_at;
    std::optional<FittedDenseModel> dense;
    std::optional<FittedSparseModel> sparse;
    if (mode == "dense") {
        dense = load_dense_model(model_dir);
        predict_at = [&](double t) { return predict_dense(*dense, subject, t); };
    } else {
        sparse = load_sparse_model(model_dir);
        predict_at = [&](double t) { return predict_sparse(*sparse, subject, t); };
    }

    for (std::size_t i = 0; i < times.size(); ++i) {
        TransportMap map = predict_at(times[i]);
        std::string path = out_dir + "/predict_" + subject + "_" + std::to_string(i) + ".csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        out << "# time=" << times[i] << '\n';
        write_transport_csv(out, map);
        std::printf("%s\n", path.c_str());
    }
    return 0;
}

int run_ot(const std::string& from_path, const std::string& to_path, double p,
           const std::string& out_path) {
    GridMeasure from = read_quantile_csv(from_path);
    GridMeasure to = read_quantile_csv(to_path);
    TransportMap map = optimal_transport(from, to);
    double distance = wasserstein_distance(from, to, p);
    if (out_path.empty()) {
        write_transport_csv(std::cout, map);
        std::printf("# d_W,%g = %.17g\n", p, distance);
    } else {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot open '" + out_path + "' for writing");
        write_transport_csv(out, map);
        std::printf("d_W,%g = %.17g\n", p, distance);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"otproc: optimal-transport modeling of distribution-valued processes"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out = "out";
    std::int64_t sim_seed = -1, sim_reps = -1, sim_threads = -1;
    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
    simulate->add_option("--config", sim_config, "JSON study configuration")->required();
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_option("--seed", sim_seed, "override the seed");
    simulate->add_option("--reps", sim_reps, "override the replication count");
    simulate->add_option("--threads", sim_threads, "override the thread count");

    // fit
    FitOptions fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a transport process model to panel data");
    fit_cmd->add_option("--input", fit.input, "panel CSV")->required();
    fit_cmd->add_option("--schema", fit.schema_path, "panel schema JSON")->required();
    fit_cmd->add_option("--mode", fit.mode, "dense or sparse");
    fit_cmd->add_option("--out", fit.out_dir, "model output directory")->required();
    fit_cmd->add_option("--kappa", fit.kappa, "baseline norm for the dense pipeline");
    fit_cmd->add_option("--norm-t0", fit.norm_t0, "pre-fixed ||T_0||_1 for the sparse pipeline");
    fit_cmd->add_option("--bandwidth", fit.bandwidth, "smoothing bandwidth (default: plug-in rule)");
    fit_cmd->add_option("--link", fit.link, "link: arctan, algebraic or logistic");
    fit_cmd->add_option("--kernel", fit.kernel, "kernel: epanechnikov, uniform or triweight");
    fit_cmd->add_option("--ncomp", fit.ncomp, "number of components (default: 95% rule)");
    fit_cmd->add_option("--grid", fit.grid, "quantile grid size M");
    fit_cmd->add_option("--time-grid", fit.time_grid, "time grid size G");
    fit_cmd->add_option("--ridge", fit.ridge, "ridge for near-singular subject covariances");

    // predict
    std::string pred_model, pred_subject, pred_times, pred_out = ".";
    CLI::App* predict = app.add_subcommand("predict", "predict transports from a fitted model");
    predict->add_option("--model", pred_model, "model directory")->required();
    predict->add_option("--subject", pred_subject, "subject id")->required();
    predict->add_option("--times", pred_times, "comma list of times or grid:G")->required();
    predict->add_option("--out", pred_out, "output directory");

    // ot
    std::string ot_from, ot_to, ot_out;
    double ot_p = 2.0;
    CLI::App* ot = app.add_subcommand("ot", "optimal transport between two quantile CSVs");
    ot->add_option("--from", ot_from, "source quantile CSV")->required();
    ot->add_option("--to", ot_to, "target quantile CSV")->required();
    ot->add_option("-p", ot_p, "Wasserstein order (1 or 2)");
    ot->add_option("--out", ot_out, "transport CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (simulate->parsed())
            return run_simulate(sim_config, sim_out, sim_seed, sim_reps, sim_threads);
        if (fit_cmd->parsed()) return run_fit(fit);
        if (predict->parsed()) return run_predict(pred_model, pred_subject, pred_times, pred_out);
        if (ot->parsed()) return run_ot(ot_from, ot_to, ot_p, ot_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const otproc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
