#pragma once

#include <string>
#include <variant>
#include <vector>

#include "otproc/grid_measure.hpp"
#include "otproc/transport_map.hpp"

namespace otproc {

enum class Design { fixed, random };

Design design_from_name(const std::string& name);
std::string design_name(Design design);

// An observation payload: raw samples, a quantile-grid measure, or a transport.
using Payload = std::variant<std::vector<double>, GridMeasure, TransportMap>;

struct Observation {
    double time = 0.0;
    Payload payload;
};

struct Subject {
    std::string id;
    std::vector<Observation> observations;
};

struct Panel {
    std::vector<Subject> subjects;
    Design design = Design::fixed;

    // Checks: non-empty subjects with observations, times in [0,1] and
    // distinct within each subject.
    void validate() const;
};

// Converts every payload to a GridMeasure on a common grid (raw samples via
// empirical_quantile, transports via the isometry).
Panel to_measure_panel(const Panel& panel, std::size_t grid_size);

// Flat per-subject view of a transport-valued panel.
struct TransportSeries {
    std::string id;
    std::vector<double> times;
    std::vector<TransportMap> transports;
};

// Requires every payload to be a TransportMap.
std::vector<TransportSeries> as_transport_series(const Panel& panel);

}  // namespace otproc
