#include "gazekit/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazekit/error.hpp"

namespace gazekit {

void Geometry::validate() const {
    if (!(viewing_distance_mm > 0.0) || !(screen_width_mm > 0.0) || screen_resolution_x <= 0 ||
        screen_resolution_y <= 0 || !(foveal_angle_deg >= 0.0)) {
        throw ConfigError("geometry: distances and resolutions must be positive, foveal angle >= 0");
    }
}

SaliencyMap::SaliencyMap(int width, int height)
    : width_(width), height_(height),
      values_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0.0) {
    if (width <= 0 || height <= 0) throw ShapeError("saliency map dimensions must be positive");
}

SaliencyMap::SaliencyMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) throw ShapeError("saliency map dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(width) * height) {
        throw ShapeError("saliency map value count does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("saliency values must be finite and >= 0");
    }
}

double SaliencyMap::max_value() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double SaliencyMap::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

bool SaliencyMap::is_all_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

RasterImage::RasterImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width <= 0 || height <= 0) throw ShapeError("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw ShapeError("image must have 1 or 3 channels");
    values_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<double> values)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
    if (width <= 0 || height <= 0) throw ShapeError("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw ShapeError("image must have 1 or 3 channels");
    if (values_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw ShapeError("image value count does not match its dimensions");
    }
}

void DatasetManifest::validate() const {
    if (num_classes <= 0) throw SchemaError("manifest: num_classes must be positive");
    if (num_parts < 0 || num_attributes < 0) throw SchemaError("manifest: negative part/attribute count");
    for (int a = 0; a < num_attributes; ++a) {
        auto it = attribute_to_part.find(a);
        if (it == attribute_to_part.end()) {
            throw SchemaError("manifest: attribute " + std::to_string(a) + " has no part mapping");
        }
        if (it->second < 0 || it->second >= num_parts) {
            throw SchemaError("manifest: attribute " + std::to_string(a) + " maps to invalid part " +
                              std::to_string(it->second));
        }
    }
    for (const auto& [attr, part] : attribute_to_part) {
        if (attr < 0 || attr >= num_attributes) {
            throw SchemaError("manifest: mapping references unknown attribute " + std::to_string(attr));
        }
    }
    for (const auto& img : images) {
        if (img.label < 0 || img.label >= num_classes) {
            throw SchemaError("manifest: image " + img.id + " has label outside [0, num_classes)");
        }
        for (const auto& pc : img.part_centers) {
            if (pc.part < 0 || pc.part >= num_parts) {
                throw SchemaError("manifest: image " + img.id + " has part index " + std::to_string(pc.part) +
                                  " outside [0, num_parts)");
            }
        }
        if (img.attributes && static_cast<int>(img.attributes->size()) != num_attributes) {
            throw SchemaError("manifest: image " + img.id + " attribute vector length " +
                              std::to_string(img.attributes->size()) + " != " + std::to_string(num_attributes));
        }
        if (img.split && *img.split != "train" && *img.split != "test") {
            throw SchemaError("manifest: image " + img.id + " split must be 'train' or 'test'");
        }
    }
}

}  // namespace gazekit
