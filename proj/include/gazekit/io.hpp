#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/types.hpp"

namespace gazekit {

/// Column names for a gaze CSV. An empty `valid` column name means validity is
/// inferred from coordinate finiteness alone.
struct GazeCsvSchema {
    std::string timestamp = "timestamp_us";
    std::string x = "x_px";
    std::string y = "y_px";
    std::string valid = "valid";
};

// Gaze samples. Rows with non-finite coordinates are kept with valid=false.
// Timestamps must strictly increase (SchemaError otherwise).
std::vector<GazeSample> parse_gaze_csv(std::istream& in, const GazeCsvSchema& schema = {});
std::vector<GazeSample> load_gaze_csv(const std::filesystem::path& path, const GazeCsvSchema& schema = {});
void write_gaze_csv(const std::vector<GazeSample>& samples, const std::filesystem::path& path);

std::vector<Fixation> parse_fixation_csv(std::istream& in);
std::vector<Fixation> load_fixation_csv(const std::filesystem::path& path);
std::string format_fixation_csv(const std::vector<Fixation>& fixations);
void write_fixation_csv(const std::vector<Fixation>& fixations, const std::filesystem::path& path);

/// round(value / max * (2^depth - 1)); an all-zero map quantizes to zeros.
std::vector<std::uint16_t> quantize_saliency(const SaliencyMap& map, int depth);

void write_saliency_image(const SaliencyMap& map, const std::filesystem::path& path, int depth = 8);

/// Raw pixel intensities as reals. Multi-channel files are rejected with
/// FormatError unless `luma` is set, in which case Rec. 601 luma is used.
SaliencyMap read_saliency_image(const std::filesystem::path& path, bool luma = false);

/// Colour or grayscale image scaled to [0, 1]; alpha is dropped.
RasterImage read_raster_image(const std::filesystem::path& path);
void write_raster_image(const RasterImage& image, const std::filesystem::path& path);

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

nlohmann::json load_json(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never observe a
/// partially written file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gazekit
