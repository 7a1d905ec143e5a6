#include "otproc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"

namespace otproc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp_now() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? "" : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError("row " + std::to_string(row) + ": invalid number '" + text +
                         "' in column " + column);
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::string& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw ParseError("'" + path + "': missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': invalid JSON: " + e.what());
    }
    return j;
}

}  // namespace

PanelSchema PanelSchema::from_json_file(const std::string& path) {
    json j = read_json_file(path);
    PanelSchema schema;
    for (const auto& [key, value] : j.items()) {
        if (key == "format") {
            std::string f = value.get<std::string>();
            if (f == "long_samples")
                schema.format = Format::long_samples;
            else if (f == "long_quantiles")
                schema.format = Format::long_quantiles;
            else
                throw ConfigError("schema: unknown format '" + f + "'");
        } else if (key == "subject_column") {
            schema.subject_column = value.get<std::string>();
        } else if (key == "time_column") {
            schema.time_column = value.get<std::string>();
        } else if (key == "value_column") {
            schema.value_column = value.get<std::string>();
        } else if (key == "level_column") {
            schema.level_column = value.get<std::string>();
        } else if (key == "support") {
            if (!value.is_array() || value.size() != 2)
                throw ConfigError("schema: support must be [min, max]");
            schema.support_min = value[0].get<double>();
            schema.support_max = value[1].get<double>();
        } else if (key == "design") {
            schema.design = design_from_name(value.get<std::string>());
        } else {
            throw ConfigError("schema: unknown key '" + key + "'");
        }
    }
    schema.validate();
    return schema;
}

void PanelSchema::validate() const {
    if (!(support_max > support_min))
        throw ConfigError("schema: support max must exceed support min");
    std::vector<std::string> names{subject_column, time_column, value_column};
    if (format == Format::long_quantiles) names.push_back(level_column);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw ConfigError("schema: column names must be distinct");
}

IngestedPanel ingest_panel(const std::string& csv_path, const PanelSchema& schema,
                           std::size_t grid_size) {
    schema.validate();
    if (grid_size < 2) throw InvalidParameterError("ingest_panel: grid size must be >= 2");
    auto lines = read_lines(csv_path);
    if (lines.empty()) throw ParseError("'" + csv_path + "': empty file");
    auto header = split_csv(lines[0]);
    const std::size_t subject_col = column_index(header, schema.subject_column, csv_path);
    const std::size_t time_col = column_index(header, schema.time_column, csv_path);
    const std::size_t value_col = column_index(header, schema.value_column, csv_path);
    const bool quantiles = schema.format == PanelSchema::Format::long_quantiles;
    const std::size_t level_col =
        quantiles ? column_index(header, schema.level_column, csv_path) : 0;

    struct Entry {
        std::size_t row;
        double level;
        double value;
    };
    std::vector<std::string> subject_order;
    std::map<std::string, std::map<double, std::vector<Entry>>> grouped;

    const double span = schema.support_max - schema.support_min;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        auto fields = split_csv(lines[r]);
        const std::size_t row = r + 1;
        std::size_t needed = std::max({subject_col, time_col, value_col,
                                       quantiles ? level_col : std::size_t{0}});
        if (fields.size() <= needed)
            throw ParseError("row " + std::to_string(row) + ": too few columns");
        const std::string& subject = fields[subject_col];
        if (subject.empty())
            throw ParseError("row " + std::to_string(row) + ": empty subject id");
        double time = parse_double(fields[time_col], row, schema.time_column);
        double value = parse_double(fields[value_col], row, schema.value_column);
        if (value < schema.support_min || value > schema.support_max)
            throw DomainError("row " + std::to_string(row) + ": value " + fmt(value) +
                              " outside the declared support [" + fmt(schema.support_min) + ", " +
                              fmt(schema.support_max) + "]");
        double level = quantiles ? parse_double(fields[level_col], row, schema.level_column) : 0.0;
        if (grouped.find(subject) == grouped.end()) subject_order.push_back(subject);
        grouped[subject][time].push_back(Entry{row, level, (value - schema.support_min) / span});
    }
    if (subject_order.empty()) throw ParseError("'" + csv_path + "': no data rows");

    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -std::numeric_limits<double>::infinity();
    for (const auto& [subject, by_time] : grouped)
        for (const auto& [time, entries] : by_time) {
            tmin = std::min(tmin, time);
            tmax = std::max(tmax, time);
        }
    AffineMap time_map{tmin, tmax > tmin ? tmax - tmin : 1.0};

    IngestedPanel out;
    out.time_map = time_map;
    out.value_map = AffineMap{schema.support_min, span};
    out.grid_size = grid_size;
    for (const std::string& id : subject_order) {
        Subject s;
        s.id = id;
        for (auto& [time, entries] : grouped[id]) {
            Observation obs;
            obs.time = time_map.apply(time);
            if (!quantiles) {
                std::vector<double> samples;
                samples.reserve(entries.size());
                for (const Entry& e : entries) samples.push_back(e.value);
                obs.payload = empirical_quantile(samples, grid_size);
            } else {
                if (entries.size() != grid_size)
                    throw ParseError("subject '" + id + "' at time " + fmt(time) + ": expected " +
                                     std::to_string(grid_size) + " quantile rows, found " +
                                     std::to_string(entries.size()));
                std::stable_sort(entries.begin(), entries.end(),
                                 [](const Entry& a, const Entry& b) { return a.level < b.level; });
                std::vector<double> q(grid_size);
                for (std::size_t j = 0; j < grid_size; ++j) {
                    const Entry& e = entries[j];
                    if (j > 0 && e.level == entries[j - 1].level)
                        throw ParseError("row " + std::to_string(e.row) +
                                         ": duplicate (subject, time, level)");
                    if (std::fabs(e.level - grid::point(j, grid_size)) > 1e-9)
                        throw ParseError("row " + std::to_string(e.row) + ": level " +
                                         fmt(e.level) + " does not match the equispaced grid");
                    if (j > 0 && e.value < q[j - 1])
                        throw ParseError("row " + std::to_string(e.row) +
                                         ": quantile value decreases in level");
                    q[j] = e.value;
                }
                obs.payload = GridMeasure(std::move(q));
            }
            s.observations.push_back(std::move(obs));
        }
        out.panel.subjects.push_back(std::move(s));
    }

    if (schema.design.has_value()) {
        out.panel.design = *schema.design;
    } else {
        bool fixed = true;
        std::vector<double> reference;
        for (std::size_t i = 0; i < out.panel.subjects.size() && fixed; ++i) {
            std::vector<double> times;
            for (const Observation& o : out.panel.subjects[i].observations)
                times.push_back(o.time);
            std::sort(times.begin(), times.end());
            if (i == 0)
                reference = times;
            else
                fixed = times == reference;
        }
        out.panel.design = fixed ? Design::fixed : Design::random;
    }
    out.panel.validate();
    return out;
}

void export_panel(const std::string& csv_path, const Panel& measures) {
    std::ofstream out = open_out(csv_path);
    out << "subject,time,level,value\n";
    for (const Subject& s : measures.subjects) {
        for (const Observation& o : s.observations) {
            const GridMeasure* mu = std::get_if<GridMeasure>(&o.payload);
            if (mu == nullptr)
                throw InvalidInputError("export_panel: payloads must be GridMeasure");
            const std::size_t m = mu->grid_size();
            for (std::size_t j = 0; j < m; ++j)
                out << s.id << ',' << fmt(o.time) << ',' << fmt(grid::point(j, m)) << ','
                    << fmt(mu->qvals()[j]) << '\n';
        }
    }
}

void write_imse_csv(const std::string& path, const ImseResult& result) {
    std::ofstream out = open_out(path);
    out << "n,N,m,design,reps,imse_mean,imse_sd,failures,seed\n";
    out << result.config.n << ',' << result.config.N << ',' << result.config.m << ','
        << design_name(result.config.design) << ',' << result.config.reps << ','
        << fmt(result.mean) << ',' << fmt(result.sd) << ',' << result.failures << ','
        << result.config.seed << '\n';
}

namespace {

json sim_config_to_json(const SimConfig& c) {
    return json{{"n", c.n},
                {"N", c.N},
                {"m", c.m},
                {"reps", c.reps},
                {"design", design_name(c.design)},
                {"k_gen", c.k_gen},
                {"link", c.link.name()},
                {"kappa", c.kappa},
                {"bandwidth", c.bandwidth},
                {"kernel", kernel_name(c.kernel)},
                {"quantile_grid", c.quantile_grid},
                {"time_grid", c.time_grid},
                {"n_components", c.n_components},
                {"seed", c.seed},
                {"baseline_norm", c.baseline_norm},
                {"eval_points", c.eval_points},
                {"threads", c.threads}};
}

}  // namespace

void write_imse_json(const std::string& path, const ImseResult& result) {
    json j;
    j["config"] = sim_config_to_json(result.config);
    j["rng_algorithm"] = result.rng_algorithm;
    j["imse_mean"] = result.mean;
    j["imse_sd"] = result.sd;
    j["failures"] = result.failures;
    json reps = json::array();
    for (double v : result.per_rep) {
        if (std::isfinite(v))
            reps.push_back(v);
        else
            reps.push_back(nullptr);
    }
    j["per_rep"] = reps;
    j["wall_seconds"] = result.wall_seconds;
    j["created_at"] = timestamp_now();
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

SimConfig sim_config_from_json_file(const std::string& path) {
    json j = read_json_file(path);
    SimConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "n") c.n = value.get<std::size_t>();
        else if (key == "N") c.N = value.get<std::size_t>();
        else if (key == "m") c.m = value.get<std::size_t>();
        else if (key == "reps") c.reps = value.get<std::size_t>();
        else if (key == "design") c.design = design_from_name(value.get<std::string>());
        else if (key == "k_gen") c.k_gen = value.get<std::size_t>();
        else if (key == "link") c.link = LinkFunction::from_name(value.get<std::string>());
        else if (key == "kappa") c.kappa = value.get<double>();
        else if (key == "bandwidth") c.bandwidth = value.get<double>();
        else if (key == "kernel") c.kernel = kernel_from_name(value.get<std::string>());
        else if (key == "quantile_grid") c.quantile_grid = value.get<std::size_t>();
        else if (key == "time_grid") c.time_grid = value.get<std::size_t>();
        else if (key == "n_components") c.n_components = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "baseline_norm") c.baseline_norm = value.get<double>();
        else if (key == "eval_points") c.eval_points = value.get<std::size_t>();
        else if (key == "threads") c.threads = value.get<std::size_t>();
        else throw ConfigError("simulation config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

namespace {

void write_eigenfunctions_csv(const std::string& path, const EigenSystem& eig) {
    std::ofstream out = open_out(path);
    out << "t";
    for (std::size_t k = 0; k < eig.count(); ++k) out << ",phi" << (k + 1);
    out << '\n';
    for (std::size_t j = 0; j < eig.grid_size; ++j) {
        out << fmt(grid::point(j, eig.grid_size));
        for (std::size_t k = 0; k < eig.count(); ++k)
            out << ',' << fmt(eig.functions(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(j)));
        out << '\n';
    }
}

EigenSystem read_eigenfunctions_csv(const std::string& path, std::vector<double> eigenvalues,
                                    double ortho_residual) {
    auto lines = read_lines(path);
    if (lines.size() < 3) throw ParseError("'" + path + "': too few rows");
    auto header = split_csv(lines[0]);
    const std::size_t count = header.size() - 1;
    const std::size_t G = lines.size() - 1;
    EigenSystem eig;
    eig.grid_size = G;
    eig.eigenvalues = std::move(eigenvalues);
    if (eig.eigenvalues.size() != count)
        throw ParseError("'" + path + "': eigenfunction count differs from the manifest");
    eig.functions.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(G));
    for (std::size_t j = 0; j < G; ++j) {
        auto fields = split_csv(lines[j + 1]);
        if (fields.size() != count + 1)
            throw ParseError("'" + path + "': row " + std::to_string(j + 2) + " malformed");
        for (std::size_t k = 0; k < count; ++k)
            eig.functions(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                parse_double(fields[k + 1], j + 2, header[k + 1]);
    }
    eig.ortho_residual = ortho_residual;
    return eig;
}

void write_covariance_csv(const std::string& path, const CovarianceSurface& surface) {
    std::ofstream out = open_out(path);
    const std::size_t G = surface.grid_size();
    out << "t";
    for (std::size_t j = 0; j < G; ++j) out << ",c" << j;
    out << '\n';
    for (std::size_t i = 0; i < G; ++i) {
        out << fmt(grid::point(i, G));
        for (std::size_t j = 0; j < G; ++j)
            out << ',' << fmt(surface.values()(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)));
        out << '\n';
    }
}

CovarianceSurface read_covariance_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.size() < 3) throw ParseError("'" + path + "': too few rows");
    const std::size_t G = lines.size() - 1;
    Eigen::MatrixXd values(G, G);
    for (std::size_t i = 0; i < G; ++i) {
        auto fields = split_csv(lines[i + 1]);
        if (fields.size() != G + 1)
            throw ParseError("'" + path + "': row " + std::to_string(i + 2) + " malformed");
        for (std::size_t j = 0; j < G; ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_double(fields[j + 1], i + 2, "c" + std::to_string(j));
    }
    return CovarianceSurface(std::move(values));
}

void write_scores_csv(const std::string& path,
                      const std::vector<std::pair<std::string, const std::vector<double>*>>& rows) {
    std::ofstream out = open_out(path);
    std::size_t J = rows.empty() ? 0 : rows.front().second->size();
    out << "subject";
    for (std::size_t k = 0; k < J; ++k) out << ",s" << (k + 1);
    out << '\n';
    for (const auto& [id, scores] : rows) {
        out << id;
        for (double v : *scores) out << ',' << fmt(v);
        out << '\n';
    }
}

std::map<std::string, std::vector<double>> read_scores_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw ParseError("'" + path + "': empty file");
    std::map<std::string, std::vector<double>> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        auto fields = split_csv(lines[r]);
        std::vector<double> scores;
        for (std::size_t k = 1; k < fields.size(); ++k)
            scores.push_back(parse_double(fields[k], r + 1, "s" + std::to_string(k)));
        out[fields[0]] = std::move(scores);
    }
    return out;
}

void write_baseline_row(std::ofstream& out, const std::string& id, const std::string& branch,
                        const TransportMap& map) {
    out << id << ',' << branch;
    for (double v : map.tvals()) out << ',' << fmt(v);
    out << '\n';
}

std::map<std::string, std::map<std::string, TransportMap>> read_baselines_csv(
    const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw ParseError("'" + path + "': empty file");
    std::map<std::string, std::map<std::string, TransportMap>> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        auto fields = split_csv(lines[r]);
        if (fields.size() < 4)
            throw ParseError("'" + path + "': row " + std::to_string(r + 1) + " malformed");
        std::vector<double> tvals;
        for (std::size_t k = 2; k < fields.size(); ++k)
            tvals.push_back(parse_double(fields[k], r + 1, "v" + std::to_string(k - 2)));
        out[fields[0]].emplace(fields[1], TransportMap(std::move(tvals)));
    }
    return out;
}

void write_sign_mass_csv(const std::string& path,
                         const std::vector<std::tuple<std::string, double, int, double>>& rows) {
    std::ofstream out = open_out(path);
    out << "subject,time,sign,mass\n";
    for (const auto& [id, time, sign, mass] : rows)
        out << id << ',' << fmt(time) << ',' << sign << ',' << fmt(mass) << '\n';
}

void write_barycenter_csv(const std::string& path, const CenteredPanel& centered) {
    std::ofstream out = open_out(path);
    if (centered.barycenter_path.empty()) return;
    const std::size_t m = centered.barycenter_path.front().grid_size();
    out << "time";
    for (std::size_t j = 0; j < m; ++j) out << ",q" << j;
    out << '\n';
    for (std::size_t i = 0; i < centered.barycenter_times.size(); ++i) {
        out << fmt(centered.barycenter_times[i]);
        for (double v : centered.barycenter_path[i].qvals()) out << ',' << fmt(v);
        out << '\n';
    }
}

}  // namespace

void save_dense_model(const std::string& dir, const FittedDenseModel& model,
                      const CenteredPanel* centered) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["mode"] = "dense";
    manifest["created_at"] = timestamp_now();
    manifest["kappa"] = model.config.kappa;
    manifest["bandwidth_used"] = model.bandwidth_used;
    manifest["time_grid"] = model.eig.grid_size;
    manifest["n_scores"] = model.n_scores;
    manifest["eigenvalues"] = model.eig.eigenvalues;
    manifest["ortho_residual"] = model.eig.ortho_residual;
    manifest["config"] = {{"kappa", model.config.kappa},
                          {"bandwidth", model.config.bandwidth},
                          {"kernel", kernel_name(model.config.kernel)},
                          {"time_grid", model.config.time_grid},
                          {"n_components", model.config.n_components}};
    json subjects = json::array();
    std::vector<std::pair<std::string, const std::vector<double>*>> score_rows;
    std::vector<std::tuple<std::string, double, int, double>> sign_rows;
    for (const DenseSubjectFit& s : model.subjects) {
        subjects.push_back({{"id", s.id},
                            {"n_plus", s.n_plus},
                            {"n_minus", s.n_minus},
                            {"positive_set_empty", s.positive_set_empty},
                            {"kappa_plus", s.kappa_plus},
                            {"kappa_minus", s.kappa_minus}});
        score_rows.emplace_back(s.id, &s.scores);
        for (std::size_t j = 0; j < s.times.size(); ++j) {
            double signed_norm = s.scaled_values[j] * model.config.kappa;
            int sign = signed_norm > 0 ? 1 : (signed_norm < 0 ? -1 : 0);
            sign_rows.emplace_back(s.id, s.times[j], sign, std::fabs(signed_norm));
        }
    }
    manifest["subjects"] = subjects;
    open_out(dir + "/manifest.json") << manifest.dump(2) << '\n';

    write_eigenfunctions_csv(dir + "/eigenfunctions.csv", model.eig);
    write_covariance_csv(dir + "/covariance.csv", model.surface);
    write_scores_csv(dir + "/scores.csv", score_rows);
    write_sign_mass_csv(dir + "/signmass.csv", sign_rows);
    std::ofstream base = open_out(dir + "/baselines.csv");
    base << "subject,branch,values...\n";
    for (const DenseSubjectFit& s : model.subjects) {
        write_baseline_row(base, s.id, "plus", s.baseline_plus);
        write_baseline_row(base, s.id, "minus", s.baseline_minus);
    }
    base.close();
    if (centered != nullptr) write_barycenter_csv(dir + "/barycenter.csv", *centered);
}

FittedDenseModel load_dense_model(const std::string& dir) {
    json manifest = read_json_file(dir + "/manifest.json");
    if (manifest.at("mode").get<std::string>() != "dense")
        throw ConfigError("'" + dir + "' does not contain a dense model");
    DenseConfig config;
    const json& cj = manifest.at("config");
    config.kappa = cj.at("kappa").get<double>();
    config.bandwidth = cj.at("bandwidth").get<double>();
    config.kernel = kernel_from_name(cj.at("kernel").get<std::string>());
    config.time_grid = cj.at("time_grid").get<std::size_t>();
    config.n_components = cj.at("n_components").get<std::size_t>();

    EigenSystem eig = read_eigenfunctions_csv(
        dir + "/eigenfunctions.csv", manifest.at("eigenvalues").get<std::vector<double>>(),
        manifest.at("ortho_residual").get<double>());
    CovarianceSurface surface = read_covariance_csv(dir + "/covariance.csv");
    auto scores = read_scores_csv(dir + "/scores.csv");
    auto baselines = read_baselines_csv(dir + "/baselines.csv");

    std::vector<DenseSubjectFit> subjects;
    for (const json& sj : manifest.at("subjects")) {
        DenseSubjectFit fit;
        fit.id = sj.at("id").get<std::string>();
        fit.n_plus = sj.at("n_plus").get<std::size_t>();
        fit.n_minus = sj.at("n_minus").get<std::size_t>();
        fit.positive_set_empty = sj.at("positive_set_empty").get<bool>();
        fit.kappa_plus = sj.at("kappa_plus").get<double>();
        fit.kappa_minus = sj.at("kappa_minus").get<double>();
        fit.scores = scores.at(fit.id);
        fit.baseline_plus = baselines.at(fit.id).at("plus");
        fit.baseline_minus = baselines.at(fit.id).at("minus");
        subjects.push_back(std::move(fit));
    }
    return FittedDenseModel{config,
                            manifest.at("bandwidth_used").get<double>(),
                            std::move(surface),
                            std::move(eig),
                            manifest.at("n_scores").get<std::size_t>(),
                            std::move(subjects)};
}

void save_sparse_model(const std::string& dir, const FittedSparseModel& model,
                       const CenteredPanel* centered) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["mode"] = "sparse";
    manifest["created_at"] = timestamp_now();
    manifest["norm_t0"] = model.norm_t0;
    manifest["bandwidth_used"] = model.bandwidth_used;
    manifest["time_grid"] = model.eig.grid_size;
    manifest["n_scores"] = model.n_scores;
    manifest["eigenvalues"] = model.eig.eigenvalues;
    manifest["ortho_residual"] = model.eig.ortho_residual;
    manifest["config"] = {{"norm_t0", model.config.norm_t0},
                          {"link", model.config.link.name()},
                          {"bandwidth", model.config.bandwidth},
                          {"kernel", kernel_name(model.config.kernel)},
                          {"time_grid", model.config.time_grid},
                          {"n_components", model.config.n_components},
                          {"ridge", model.config.ridge}};
    json subjects = json::array();
    std::vector<std::pair<std::string, const std::vector<double>*>> score_rows;
    std::vector<std::tuple<std::string, double, int, double>> sign_rows;
    for (const SparseSubjectFit& s : model.subjects) {
        subjects.push_back({{"id", s.id},
                            {"negative_branch", s.negative_branch},
                            {"baseline_norm_raw", s.baseline_norm_raw},
                            {"norm_used", s.norm_used}});
        score_rows.emplace_back(s.id, &s.scores);
        for (std::size_t j = 0; j < s.times.size(); ++j) {
            double signed_norm = s.uhat[j] * model.norm_t0;
            int sign = signed_norm > 0 ? 1 : (signed_norm < 0 ? -1 : 0);
            sign_rows.emplace_back(s.id, s.times[j], sign, std::fabs(signed_norm));
        }
    }
    manifest["subjects"] = subjects;
    open_out(dir + "/manifest.json") << manifest.dump(2) << '\n';

    write_eigenfunctions_csv(dir + "/eigenfunctions.csv", model.eig);
    write_covariance_csv(dir + "/covariance.csv", model.surface);
    write_scores_csv(dir + "/scores.csv", score_rows);
    write_sign_mass_csv(dir + "/signmass.csv", sign_rows);
    std::ofstream base = open_out(dir + "/baselines.csv");
    base << "subject,branch,values...\n";
    for (const SparseSubjectFit& s : model.subjects)
        write_baseline_row(base, s.id, s.negative_branch ? "minus" : "plus", s.baseline);
    base.close();
    if (centered != nullptr) write_barycenter_csv(dir + "/barycenter.csv", *centered);
}

FittedSparseModel load_sparse_model(const std::string& dir) {
    json manifest = read_json_file(dir + "/manifest.json");
    if (manifest.at("mode").get<std::string>() != "sparse")
        throw ConfigError("'" + dir + "' does not contain a sparse model");
    SparseConfig config;
    const json& cj = manifest.at("config");
    config.norm_t0 = cj.at("norm_t0").get<double>();
    config.link = LinkFunction::from_name(cj.at("link").get<std::string>());
    config.bandwidth = cj.at("bandwidth").get<double>();
    config.kernel = kernel_from_name(cj.at("kernel").get<std::string>());
    config.time_grid = cj.at("time_grid").get<std::size_t>();
    config.n_components = cj.at("n_components").get<std::size_t>();
    config.ridge = cj.at("ridge").get<double>();

    EigenSystem eig = read_eigenfunctions_csv(
        dir + "/eigenfunctions.csv", manifest.at("eigenvalues").get<std::vector<double>>(),
        manifest.at("ortho_residual").get<double>());
    CovarianceSurface surface = read_covariance_csv(dir + "/covariance.csv");
    auto scores = read_scores_csv(dir + "/scores.csv");
    auto baselines = read_baselines_csv(dir + "/baselines.csv");

    std::vector<SparseSubjectFit> subjects;
    for (const json& sj : manifest.at("subjects")) {
        SparseSubjectFit fit;
        fit.id = sj.at("id").get<std::string>();
        fit.negative_branch = sj.at("negative_branch").get<bool>();
        fit.baseline_norm_raw = sj.at("baseline_norm_raw").get<double>();
        fit.norm_used = sj.at("norm_used").get<double>();
        fit.scores = scores.at(fit.id);
        fit.baseline = baselines.at(fit.id).at(fit.negative_branch ? "minus" : "plus");
        subjects.push_back(std::move(fit));
    }
    return FittedSparseModel{config,
                             manifest.at("bandwidth_used").get<double>(),
                             manifest.at("norm_t0").get<double>(),
                             std::move(surface),
                             std::move(eig),
                             manifest.at("n_scores").get<std::size_t>(),
                             std::move(subjects)};
}

std::string model_mode(const std::string& dir) {
    json manifest = read_json_file(dir + "/manifest.json");
    return manifest.at("mode").get<std::string>();
}

GridMeasure read_quantile_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.size() < 3) throw ParseError("'" + path + "': too few rows");
    auto header = split_csv(lines[0]);
    const std::size_t level_col = column_index(header, "level", path);
    const std::size_t value_col = column_index(header, "value", path);
    std::vector<std::pair<double, double>> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        auto fields = split_csv(lines[r]);
        if (fields.size() <= std::max(level_col, value_col))
            throw ParseError("'" + path + "': row " + std::to_string(r + 1) + " malformed");
        rows.emplace_back(parse_double(fields[level_col], r + 1, "level"),
                          parse_double(fields[value_col], r + 1, "value"));
    }
    std::sort(rows.begin(), rows.end());
    const std::size_t m = rows.size();
    std::vector<double> q(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (std::fabs(rows[j].first - grid::point(j, m)) > 1e-9)
            throw ParseError("'" + path + "': levels do not form an equispaced grid");
        q[j] = rows[j].second;
    }
    return GridMeasure(std::move(q));
}

void write_quantile_csv(const std::string& path, const GridMeasure& measure) {
    std::ofstream out = open_out(path);
    out << "level,value\n";
    for (std::size_t j = 0; j < measure.grid_size(); ++j)
        out << fmt(grid::point(j, measure.grid_size())) << ',' << fmt(measure.qvals()[j]) << '\n';
}

void write_transport_csv(std::ostream& os, const TransportMap& map) {
    os << "u,T(u)\n";
    for (std::size_t j = 0; j < map.grid_size(); ++j)
        os << fmt(grid::point(j, map.grid_size())) << ',' << fmt(map.tvals()[j]) << '\n';
}

}  // namespace otproc
