#include "otproc/panel.hpp"

#include <algorithm>
#include <cmath>

#include "otproc/errors.hpp"

namespace otproc {

Design design_from_name(const std::string& name) {
    if (name == "fixed") return Design::fixed;
    if (name == "random") return Design::random;
    throw ConfigError("unknown design '" + name + "' (expected fixed or random)");
}

std::string design_name(Design design) {
    return design == Design::fixed ? "fixed" : "random";
}

void Panel::validate() const {
    if (subjects.empty()) throw InvalidInputError("panel has no subjects");
    for (const Subject& s : subjects) {
        if (s.observations.empty())
            throw InvalidInputError("subject '" + s.id + "' has no observations");
        std::vector<double> times;
        times.reserve(s.observations.size());
        for (const Observation& o : s.observations) {
            if (!std::isfinite(o.time) || o.time < 0.0 || o.time > 1.0)
                throw InvalidInputError("subject '" + s.id + "' has a time outside [0,1]");
            times.push_back(o.time);
        }
        std::sort(times.begin(), times.end());
        if (std::adjacent_find(times.begin(), times.end()) != times.end())
            throw InvalidInputError("subject '" + s.id + "' has duplicate observation times");
    }
}

Panel to_measure_panel(const Panel& panel, std::size_t grid_size) {
    panel.validate();
    Panel out;
    out.design = panel.design;
    out.subjects.reserve(panel.subjects.size());
    for (const Subject& s : panel.subjects) {
        Subject converted{s.id, {}};
        converted.observations.reserve(s.observations.size());
        for (const Observation& o : s.observations) {
            GridMeasure measure = std::visit(
                [&](const auto& payload) -> GridMeasure {
                    using T = std::decay_t<decltype(payload)>;
                    if constexpr (std::is_same_v<T, std::vector<double>>) {
                        return empirical_quantile(payload, grid_size);
                    } else if constexpr (std::is_same_v<T, GridMeasure>) {
                        return payload;
                    } else {
                        return transport_to_measure(payload);
                    }
                },
                o.payload);
            if (measure.grid_size() != grid_size)
                throw IncompatibleGridError("subject '" + s.id +
                                            "' payload grid size differs from the panel grid");
            converted.observations.push_back(Observation{o.time, std::move(measure)});
        }
        out.subjects.push_back(std::move(converted));
    }
    return out;
}

std::vector<TransportSeries> as_transport_series(const Panel& panel) {
    panel.validate();
    std::vector<TransportSeries> out;
    out.reserve(panel.subjects.size());
    for (const Subject& s : panel.subjects) {
        TransportSeries series;
        series.id = s.id;
        for (const Observation& o : s.observations) {
            const TransportMap* map = std::get_if<TransportMap>(&o.payload);
            if (map == nullptr)
                throw InvalidInputError("subject '" + s.id + "' has a non-transport payload");
            series.times.push_back(o.time);
            series.transports.push_back(*map);
        }
        out.push_back(std::move(series));
    }
    return out;
}

}  // namespace otproc
