#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/crops.hpp"
#include "gazekit/fixation.hpp"
#include "gazekit/kar.hpp"
#include "gazekit/metrics.hpp"
#include "gazekit/saliency.hpp"
#include "gazekit/types.hpp"

namespace gazekit {

inline constexpr int kSchemaVersion = 1;

struct RenderSettings {
    std::optional<double> sigma;  // unset: derived from the geometry
    double truncation_radius = 4.0;
    bool exact = false;

    friend bool operator==(const RenderSettings&, const RenderSettings&) = default;
};

struct WindowSettings {
    std::string preset = "cub";
    std::array<int, 3> k{2, 3, 4};  // large, medium, small
    int stride = 0;                 // 0: per-window default stride
    double nms_iou = 0.25;
    std::optional<Size2> resize_to;  // unset: half the image size
    std::vector<WindowSpec> custom;  // when non-empty, replaces the preset

    std::vector<WindowSpec> specs() const;
    friend bool operator==(const WindowSettings&, const WindowSettings&) = default;
};

struct KarSettings {
    std::vector<double> percents = kDefaultKarPercents;
    TrainConfig train;

    friend bool operator==(const KarSettings&, const KarSettings&) = default;
};

struct MetricSettings {
    double epsilon = kMetricEpsilon;
    int negatives = 1000;             // uniform draws when no negative set is given
    std::string ig_baseline = "center";  // "center" or a PNG path

    friend bool operator==(const MetricSettings&, const MetricSettings&) = default;
};

struct PipelineConfig {
    Geometry geometry;
    IvtConfig ivt;  // ivt.geometry mirrors geometry
    RenderSettings render;
    WindowSettings windows;
    KarSettings kar;
    MetricSettings metrics;
    std::uint64_t seed = 7;
    int workers = 1;

    /// Sets the seed everywhere randomness is drawn.
    void set_seed(std::uint64_t s);
    RenderConfig render_config(Size2 output_size) const;
    void validate() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

nlohmann::json geometry_to_json(const Geometry& g);
Geometry geometry_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

/// Accepts either a full pipeline config or a bare geometry object.
PipelineConfig load_config(const std::filesystem::path& path);
Geometry load_geometry(const std::filesystem::path& path);

}  // namespace gazekit
