#include "gazekit/config.hpp"

#include "gazekit/error.hpp"
#include "gazekit/io.hpp"

namespace gazekit {
using nlohmann::json;

std::vector<WindowSpec> WindowSettings::specs() const {
    if (!custom.empty()) return custom;
    return window_preset(preset, k[0], k[1], k[2], stride);
}

void PipelineConfig::set_seed(std::uint64_t s) {
    seed = s;
    kar.train.seed = s;
}

RenderConfig PipelineConfig::render_config(Size2 output_size) const {
    RenderConfig rc;
    rc.sigma = render.sigma ? *render.sigma : sigma_from_geometry(geometry);
    rc.display_resolution = {geometry.screen_resolution_x, geometry.screen_resolution_y};
    rc.output_size = output_size;
    rc.truncation_radius = render.truncation_radius;
    rc.exact = render.exact;
    return rc;
}

void PipelineConfig::validate() const {
    geometry.validate();
    ivt.validate();
    kar.train.validate();
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (!(metrics.epsilon > 0.0)) throw ConfigError("metric epsilon must be positive");
    if (metrics.negatives < 1) throw ConfigError("negative sample count must be >= 1");
    if (!(windows.nms_iou >= 0.0 && windows.nms_iou <= 1.0)) throw ConfigError("nms_iou must lie in [0, 1]");
    (void)windows.specs();  // resolves the preset name
}

json geometry_to_json(const Geometry& g) {
    return json{{"viewing_distance_mm", g.viewing_distance_mm},
                {"screen_width_mm", g.screen_width_mm},
                {"screen_resolution_x", g.screen_resolution_x},
                {"screen_resolution_y", g.screen_resolution_y},
                {"foveal_angle_deg", g.foveal_angle_deg}};
}

Geometry geometry_from_json(const json& j) {
    Geometry g;
    g.viewing_distance_mm = j.value("viewing_distance_mm", g.viewing_distance_mm);
    g.screen_width_mm = j.value("screen_width_mm", g.screen_width_mm);
    g.screen_resolution_x = j.value("screen_resolution_x", g.screen_resolution_x);
    g.screen_resolution_y = j.value("screen_resolution_y", g.screen_resolution_y);
    g.foveal_angle_deg = j.value("foveal_angle_deg", g.foveal_angle_deg);
    g.validate();
    return g;
}

namespace {

json size_json(Size2 s) { return json::array({s.width, s.height}); }

Size2 size_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

json config_to_json(const PipelineConfig& c) {
    json custom = json::array();
    for (const auto& s : c.windows.custom) {
        custom.push_back({{"w", s.width}, {"h", s.height}, {"stride", s.stride}, {"scale", scale_name(s.scale)},
                          {"k", s.k}});
    }
    json windows{{"preset", c.windows.preset},
                 {"k", c.windows.k},
                 {"stride", c.windows.stride},
                 {"nms_iou", c.windows.nms_iou},
                 {"resize_to", c.windows.resize_to ? size_json(*c.windows.resize_to) : json(nullptr)},
                 {"custom", custom}};
    const auto& t = c.kar.train;
    return json{
        {"schema_version", kSchemaVersion},
        {"geometry", geometry_to_json(c.geometry)},
        {"ivt",
         {{"velocity_threshold_deg_s", c.ivt.velocity_threshold_deg_s},
          {"min_fixation_duration_ms", c.ivt.min_fixation_duration_ms},
          {"merge_max_gap_ms", c.ivt.merge_max_gap_ms},
          {"merge_max_angle_deg", c.ivt.merge_max_angle_deg}}},
        {"render",
         {{"sigma", c.render.sigma ? json(*c.render.sigma) : json(nullptr)},
          {"truncation_radius", c.render.truncation_radius},
          {"exact", c.render.exact}}},
        {"windows", windows},
        {"kar",
         {{"percents", c.kar.percents},
          {"train",
           {{"epochs", t.epochs},
            {"learning_rate", t.learning_rate},
            {"lr_decay_factor", t.lr_decay_factor},
            {"lr_decay_every", t.lr_decay_every},
            {"batch_size", t.batch_size},
            {"seed", t.seed},
            {"feature_dim", t.feature_dim}}}}},
        {"metrics",
         {{"epsilon", c.metrics.epsilon}, {"negatives", c.metrics.negatives}, {"ig_baseline", c.metrics.ig_baseline}}},
        {"seed", c.seed},
        {"workers", c.workers}};
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
            throw SchemaError("config schema_version " + j.at("schema_version").dump() + " is not supported");
        }
        if (j.contains("geometry")) c.geometry = geometry_from_json(j.at("geometry"));
        if (j.contains("ivt")) {
            const auto& v = j.at("ivt");
            c.ivt.velocity_threshold_deg_s = v.value("velocity_threshold_deg_s", c.ivt.velocity_threshold_deg_s);
            c.ivt.min_fixation_duration_ms = v.value("min_fixation_duration_ms", c.ivt.min_fixation_duration_ms);
            c.ivt.merge_max_gap_ms = v.value("merge_max_gap_ms", c.ivt.merge_max_gap_ms);
            c.ivt.merge_max_angle_deg = v.value("merge_max_angle_deg", c.ivt.merge_max_angle_deg);
        }
        c.ivt.geometry = c.geometry;
        if (j.contains("render")) {
            const auto& r = j.at("render");
            if (r.contains("sigma") && !r.at("sigma").is_null()) c.render.sigma = r.at("sigma").get<double>();
            c.render.truncation_radius = r.value("truncation_radius", c.render.truncation_radius);
            c.render.exact = r.value("exact", c.render.exact);
        }
        if (j.contains("windows")) {
            const auto& w = j.at("windows");
            c.windows.preset = w.value("preset", c.windows.preset);
            if (w.contains("k")) c.windows.k = w.at("k").get<std::array<int, 3>>();
            c.windows.stride = w.value("stride", c.windows.stride);
            c.windows.nms_iou = w.value("nms_iou", c.windows.nms_iou);
            if (w.contains("resize_to") && !w.at("resize_to").is_null()) c.windows.resize_to = size_from(w.at("resize_to"));
            if (w.contains("custom")) {
                for (const auto& s : w.at("custom")) {
                    c.windows.custom.push_back({s.at("w").get<int>(), s.at("h").get<int>(), s.at("stride").get<int>(),
                                                parse_scale(s.at("scale").get<std::string>()), s.at("k").get<int>()});
                }
            }
        }
        if (j.contains("kar")) {
            const auto& k = j.at("kar");
            if (k.contains("percents")) c.kar.percents = k.at("percents").get<std::vector<double>>();
            if (k.contains("train")) {
                const auto& t = k.at("train");
                auto& tc = c.kar.train;
                tc.epochs = t.value("epochs", tc.epochs);
                tc.learning_rate = t.value("learning_rate", tc.learning_rate);
                tc.lr_decay_factor = t.value("lr_decay_factor", tc.lr_decay_factor);
                tc.lr_decay_every = t.value("lr_decay_every", tc.lr_decay_every);
                tc.batch_size = t.value("batch_size", tc.batch_size);
                tc.seed = t.value("seed", tc.seed);
                tc.feature_dim = t.value("feature_dim", tc.feature_dim);
            }
        }
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            c.metrics.epsilon = m.value("epsilon", c.metrics.epsilon);
            c.metrics.negatives = m.value("negatives", c.metrics.negatives);
            c.metrics.ig_baseline = m.value("ig_baseline", c.metrics.ig_baseline);
        }
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const auto j = load_json(path);
    if (!j.contains("geometry") && j.contains("viewing_distance_mm")) {
        PipelineConfig c;
        c.geometry = geometry_from_json(j);
        c.ivt.geometry = c.geometry;
        return c;
    }
    return config_from_json(j);
}

Geometry load_geometry(const std::filesystem::path& path) { return load_config(path).geometry; }

}  // namespace gazekit
