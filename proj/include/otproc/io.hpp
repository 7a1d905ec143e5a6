#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otproc/dense_model.hpp"
#include "otproc/frechet.hpp"
#include "otproc/panel.hpp"
#include "otproc/simulation.hpp"
#include "otproc/sparse_model.hpp"

namespace otproc {

// Schema for long-format panel CSVs.
//   long_samples:   subject,time,value rows; one row per raw sample.
//   long_quantiles: subject,time,level,value rows; levels must form the
//                   equispaced grid j/(M-1).
struct PanelSchema {
    enum class Format { long_samples, long_quantiles };

    Format format = Format::long_samples;
    std::string subject_column = "subject";
    std::string time_column = "time";
    std::string value_column = "value";
    std::string level_column = "level";
    double support_min = 0.0;  // observation support, affinely rescaled to [0,1]
    double support_max = 1.0;
    std::optional<Design> design;  // auto-detected when absent

    static PanelSchema from_json_file(const std::string& path);
    void validate() const;
};

// Affine map original -> rescaled: y = (x - offset) / scale.
struct AffineMap {
    double offset = 0.0;
    double scale = 1.0;
    double apply(double x) const { return (x - offset) / scale; }
    double restore(double y) const { return offset + scale * y; }
};

struct IngestedPanel {
    Panel panel;
    AffineMap time_map;
    AffineMap value_map;
    std::size_t grid_size = 0;
};

IngestedPanel ingest_panel(const std::string& csv_path, const PanelSchema& schema,
                           std::size_t grid_size);

// Long-quantiles export of a measure-valued panel; round-trips bit-exactly
// through ingest_panel with a long_quantiles schema.
void export_panel(const std::string& csv_path, const Panel& measures);

// Simulation results (spec'd CSV columns) and the JSON config sidecar.
void write_imse_csv(const std::string& path, const ImseResult& result);
void write_imse_json(const std::string& path, const ImseResult& result);
SimConfig sim_config_from_json_file(const std::string& path);

// Model directories: manifest.json plus CSV matrices (eigenfunctions, scores,
// baselines, covariance surface, per-observation sign/mass table).
void save_dense_model(const std::string& dir, const FittedDenseModel& model,
                      const CenteredPanel* centered = nullptr);
FittedDenseModel load_dense_model(const std::string& dir);

void save_sparse_model(const std::string& dir, const FittedSparseModel& model,
                       const CenteredPanel* centered = nullptr);
FittedSparseModel load_sparse_model(const std::string& dir);

// Detects the model kind from a manifest.
std::string model_mode(const std::string& dir);

// Single-measure quantile CSV (columns level,value on the equispaced grid).
GridMeasure read_quantile_csv(const std::string& path);
void write_quantile_csv(const std::string& path, const GridMeasure& measure);

void write_transport_csv(std::ostream& os, const TransportMap& map);

}  // namespace otproc
