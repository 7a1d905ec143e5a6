#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "otproc/dense_model.hpp"
#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/io.hpp"
#include "otproc/rng.hpp"
#include "otproc/simulation.hpp"

using namespace otproc;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("otproc_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ingest_panel: long samples with the documented toy example") {
    TempDir dir;
    write_file(dir.file("panel.csv"),
               "subject,time,value\n"
               "s1,0.5,0\n"
               "s1,0.5,1\n");
    PanelSchema schema;
    IngestedPanel got = ingest_panel(dir.file("panel.csv"), schema, 3);
    REQUIRE(got.panel.subjects.size() == 1);
    const GridMeasure& mu = std::get<GridMeasure>(got.panel.subjects[0].observations[0].payload);
    CHECK(mu.qvals() == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("ingest_panel: time and support rescaling are recorded") {
    TempDir dir;
    write_file(dir.file("panel.csv"),
               "subject,time,value\n"
               "s1,1983,20\n"
               "s1,1983,60\n"
               "s1,2018,100\n"
               "s2,1983,40\n"
               "s2,2000,80\n");
    PanelSchema schema;
    schema.support_min = 0.0;
    schema.support_max = 110.0;
    IngestedPanel got = ingest_panel(dir.file("panel.csv"), schema, 5);
    CHECK(got.time_map.offset == 1983.0);
    CHECK(got.time_map.scale == 2018.0 - 1983.0);
    CHECK(got.value_map.scale == 110.0);
    CHECK(got.panel.subjects[0].observations[0].time == 0.0);
    CHECK(got.panel.subjects[0].observations[1].time == 1.0);
    CHECK(got.panel.design == Design::random);  // differing time sets
}

TEST_CASE("ingest_panel: parse errors carry row numbers") {
    TempDir dir;
    PanelSchema schema;
    schema.format = PanelSchema::Format::long_quantiles;

    write_file(dir.file("bad_monotone.csv"),
               "subject,time,level,value\n"
               "s1,0.5,0,0.0\n"
               "s1,0.5,0.5,0.8\n"
               "s1,0.5,1,0.6\n");
    CHECK_THROWS_WITH_AS(ingest_panel(dir.file("bad_monotone.csv"), schema, 3),
                         doctest::Contains("row 4"), ParseError);

    write_file(dir.file("dup.csv"),
               "subject,time,level,value\n"
               "s1,0.5,0,0.0\n"
               "s1,0.5,0.5,0.5\n"
               "s1,0.5,0.5,0.6\n");
    CHECK_THROWS_AS(ingest_panel(dir.file("dup.csv"), schema, 3), ParseError);

    write_file(dir.file("missing.csv"), "subject,when,value\ns1,0.5,0.2\n");
    CHECK_THROWS_AS(ingest_panel(dir.file("missing.csv"), PanelSchema{}, 3), ParseError);

    write_file(dir.file("oob.csv"), "subject,time,value\ns1,0.5,1.7\n");
    CHECK_THROWS_AS(ingest_panel(dir.file("oob.csv"), PanelSchema{}, 3), DomainError);
}

TEST_CASE("export/ingest round trip reproduces quantile values bit-exactly") {
    Rng rng(8);
    Panel panel;
    panel.design = Design::fixed;
    for (int i = 0; i < 3; ++i) {
        Subject s;
        s.id = "subj" + std::to_string(i);
        for (double t : {0.0, 0.5, 1.0}) {
            std::vector<double> samples(23);
            for (double& x : samples) x = rng.uniform();
            s.observations.push_back(Observation{t, empirical_quantile(samples, 17)});
        }
        panel.subjects.push_back(std::move(s));
    }
    TempDir dir;
    export_panel(dir.file("export.csv"), panel);

    PanelSchema schema;
    schema.format = PanelSchema::Format::long_quantiles;
    IngestedPanel got = ingest_panel(dir.file("export.csv"), schema, 17);
    REQUIRE(got.panel.subjects.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& original = std::get<GridMeasure>(panel.subjects[i].observations[j].payload);
            const auto& loaded = std::get<GridMeasure>(got.panel.subjects[i].observations[j].payload);
            CHECK(original.qvals() == loaded.qvals());
        }
    CHECK(got.panel.design == Design::fixed);
}

TEST_CASE("dense model save/load round trip preserves predictions") {
    Rng rng(15);
    std::vector<TransportSeries> panel(4);
    std::vector<double> base(21);
    for (std::size_t j = 0; j < 21; ++j) base[j] = std::pow(grid::point(j, 21), 0.5);
    TransportMap t0 = TransportMap::sanitized(base);
    for (std::size_t i = 0; i < 4; ++i) {
        panel[i].id = "s" + std::to_string(i + 1);
        for (int j = 0; j < 5; ++j) {
            panel[i].times.push_back(rng.uniform());
            panel[i].transports.push_back(scalar_mult(0.3 + 0.1 * rng.uniform(), t0));
        }
    }
    DenseConfig config{0.2, 0.3, {}, 11, 2};
    FittedDenseModel model = fit_dense(panel, config);

    TempDir dir;
    save_dense_model(dir.file("model"), model, nullptr);
    CHECK(model_mode(dir.file("model")) == "dense");
    FittedDenseModel loaded = load_dense_model(dir.file("model"));
    CHECK(loaded.n_scores == model.n_scores);
    for (const TransportSeries& s : panel)
        for (double t : {0.1, 0.6, 0.95}) {
            TransportMap a = predict_dense(model, s.id, t);
            TransportMap b = predict_dense(loaded, s.id, t);
            CHECK(transport_distance(a, b, 1.0) < 1e-12);
        }

    // Manifest echoes the configuration.
    nlohmann::json manifest;
    std::ifstream in(dir.file("model") + "/manifest.json");
    in >> manifest;
    CHECK(manifest.at("mode") == "dense");
    CHECK(manifest.at("config").at("kappa").get<double>() == 0.2);
    CHECK(manifest.at("config").at("time_grid").get<std::size_t>() == 11);
    CHECK(manifest.contains("created_at"));

    // Eigenfunction file has G rows and orthonormality is recomputable.
    std::ifstream ef(dir.file("model") + "/eigenfunctions.csv");
    std::string line;
    std::getline(ef, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(ef, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 11);
    auto w = grid::trapezoid_weights(11);
    for (std::size_t a = 1; a < rows[0].size(); ++a)
        for (std::size_t b = a; b < rows[0].size(); ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 11; ++j) dot += rows[j][a] * rows[j][b] * w[j];
            CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-6);
        }
}

TEST_CASE("sign-and-mass table: all-identity panel exports zeros") {
    std::vector<TransportSeries> panel(2);
    for (std::size_t i = 0; i < 2; ++i) {
        panel[i].id = "s" + std::to_string(i + 1);
        panel[i].times = {0.25, 0.5, 0.75};
        panel[i].transports.assign(3, TransportMap::identity(21));
    }
    FittedDenseModel model = fit_dense(panel, DenseConfig{1.0, 0.4, {}, 11, 0});
    TempDir dir;
    save_dense_model(dir.file("model"), model, nullptr);
    std::ifstream in(dir.file("model") + "/signmass.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "subject,time,sign,mass");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string subject, time, sign, mass;
        std::getline(ss, subject, ',');
        std::getline(ss, time, ',');
        std::getline(ss, sign, ',');
        std::getline(ss, mass, ',');
        CHECK(sign == "0");
        CHECK(std::stod(mass) == 0.0);
    }
    CHECK(rows == 6);
}

TEST_CASE("imse result writers: deterministic CSV, config JSON round trip") {
    SimConfig config;
    config.n = 8;
    config.N = 3;
    config.m = 5;
    config.reps = 2;
    config.quantile_grid = 21;
    config.time_grid = 11;
    config.eval_points = 11;
    config.seed = 99;
    config.threads = 1;
    ImseResult result = run_study(config);

    TempDir dir;
    write_imse_csv(dir.file("a.csv"), result);
    write_imse_csv(dir.file("b.csv"), result);
    CHECK(read_file(dir.file("a.csv")) == read_file(dir.file("b.csv")));
    CHECK(read_file(dir.file("a.csv")).rfind("n,N,m,design,reps,imse_mean,imse_sd,failures,seed",
                                             0) == 0);
    write_imse_json(dir.file("a.json"), result);

    // Config JSON round trip.
    nlohmann::json cj{{"n", 8},          {"N", 3},          {"m", 5},
                      {"reps", 2},       {"design", "fixed"}, {"seed", 99},
                      {"quantile_grid", 21}, {"time_grid", 11}, {"kappa", 0.7}};
    write_file(dir.file("config.json"), cj.dump());
    SimConfig loaded = sim_config_from_json_file(dir.file("config.json"));
    CHECK(loaded.n == 8);
    CHECK(loaded.design == Design::fixed);
    CHECK(loaded.kappa == 0.7);
    // Unknown keys are rejected.
    write_file(dir.file("bad.json"), R"({"n": 8, "bogus": 1})");
    CHECK_THROWS_AS(sim_config_from_json_file(dir.file("bad.json")), ConfigError);
}

TEST_CASE("quantile csv round trip and transport csv shape") {
    std::vector<double> q{0.0, 0.2, 0.45, 0.8, 1.0};
    GridMeasure mu(q);
    TempDir dir;
    write_quantile_csv(dir.file("q.csv"), mu);
    GridMeasure back = read_quantile_csv(dir.file("q.csv"));
    CHECK(back.qvals() == q);

    std::stringstream ss;
    write_transport_csv(ss, TransportMap::identity(3));
    CHECK(ss.str() == "u,T(u)\n0,0\n0.5,0.5\n1,1\n");
}

TEST_CASE("panel schema validation") {
    PanelSchema schema;
    schema.support_min = 1.0;
    schema.support_max = 0.0;
    CHECK_THROWS_AS(schema.validate(), ConfigError);
    PanelSchema dup;
    dup.subject_column = "x";
    dup.time_column = "x";
    CHECK_THROWS_AS(dup.validate(), ConfigError);
}
