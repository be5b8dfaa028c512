#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gazekit {

struct Size2 {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size2&, const Size2&) = default;
};

/// One raw eye-tracker sample. Timestamps are microseconds since session start.
struct GazeSample {
    std::int64_t timestamp_us = 0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;
};

/// A detected fixation: center in pixels, duration in milliseconds.
struct Fixation {
    double x = 0.0;
    double y = 0.0;
    double duration_ms = 0.0;

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

/// Viewing geometry of the eye-tracker display.
struct Geometry {
    double viewing_distance_mm = 600.0;
    double screen_width_mm = 530.0;
    int screen_resolution_x = 1920;
    int screen_resolution_y = 1080;
    double foveal_angle_deg = 2.0;

    /// Millimeters covered by one display pixel (square pixels assumed).
    double mm_per_pixel() const { return screen_width_mm / screen_resolution_x; }
    void validate() const;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Dense row-major attention field. Values are non-negative and kept
/// unnormalized; normalization happens at export or metric ingestion.
class SaliencyMap {
public:
    SaliencyMap() = default;
    SaliencyMap(int width, int height);
    SaliencyMap(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    Size2 size() const { return {width_, height_}; }
    std::size_t pixel_count() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double at(int x, int y) const { return values_[index(x, y)]; }
    double& at(int x, int y) { return values_[index(x, y)]; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double max_value() const;
    double sum() const;
    bool is_all_zero() const;

    friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Image with 1 or 3 interleaved channels, values in [0, 1].
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, double fill = 0.0);
    RasterImage(int width, int height, int channels, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    Size2 size() const { return {width_, height_}; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double at(int x, int y, int c = 0) const { return values_[index(x, y, c)]; }
    double& at(int x, int y, int c = 0) { return values_[index(x, y, c)]; }
    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> values_;
};

struct LabeledImage {
    RasterImage image;
    int label = 0;
};

struct PartCenter {
    int part = 0;
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PartCenter&, const PartCenter&) = default;
};

struct ImageRecord {
    std::string id;
    std::string path;
    int width = 0;
    int height = 0;
    int label = 0;
    std::vector<PartCenter> part_centers;
    std::optional<std::vector<std::uint8_t>> attributes;
    // Per-image fixation CSV, relative to the manifest's fixation directory.
    std::optional<std::string> fixations;
    // "train" or "test"; unset records are split deterministically by kar-run.
    std::optional<std::string> split;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct DatasetManifest {
    std::vector<ImageRecord> images;
    int num_classes = 0;
    int num_parts = 0;
    int num_attributes = 0;
    std::map<int, int> attribute_to_part;

    /// Throws SchemaError when labels, part indices, attribute vectors or the
    /// attribute-to-part mapping violate the manifest's declared counts.
    void validate() const;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

}  // namespace gazekit
