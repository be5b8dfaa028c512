#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

enum class ScaleTag { large, medium, small };

std::string_view scale_name(ScaleTag tag);
ScaleTag parse_scale(std::string_view name);

struct WindowSpec {
    int width = 0;
    int height = 0;
    int stride = 1;
    ScaleTag scale = ScaleTag::small;
    int k = 0;

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// max(1, round(min(w, h) / 8)).
int default_stride(int width, int height);

struct CropBox {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    double score = 0.0;  // mean saliency inside the box
    ScaleTag scale = ScaleTag::small;

    long long area() const { return static_cast<long long>(width) * height; }
    friend bool operator==(const CropBox&, const CropBox&) = default;
};

struct CropPlan {
    std::string image_id;
    std::vector<CropBox> boxes;
    Size2 resize_to;
    bool degenerate = false;  // every window scored zero; order is the tie-break order
};

/// Summed-area table with a zero border row/column, so any window sum is
/// four lookups.
class IntegralImage {
public:
    explicit IntegralImage(const SaliencyMap& map);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Sum over the inclusive rectangle [0..x] x [0..y].
    double at(int x, int y) const { return table_[static_cast<std::size_t>(y + 1) * stride_ + (x + 1)]; }
    double window_sum(int x, int y, int w, int h) const;

private:
    int width_;
    int height_;
    std::size_t stride_;
    std::vector<double> table_;
};

/// Top-left coordinates visited along one axis: 0, s, 2s, ... plus a final
/// position flush with the edge when the stride does not land on it.
std::vector<int> window_positions(int extent, int window, int stride);

/// One box per reachable window position, in row-major order.
std::vector<CropBox> score_windows(const SaliencyMap& map, const WindowSpec& spec);
std::vector<CropBox> score_windows(const IntegralImage& table, const WindowSpec& spec);

double iou(const CropBox& a, const CropBox& b);

/// Greedy NMS over candidates ordered by score (descending), then row, then
/// column; equal keys keep their input order. A candidate is dropped when its
/// IoU with any kept box exceeds nms_iou. Returns at most k boxes.
std::vector<CropBox> select_topk(std::span<const CropBox> candidates, int k, double nms_iou);

/// Pools candidates of all specs sharing a scale tag, selects that scale's k
/// with NMS, and concatenates scales (large, medium, small) before a stable
/// sort by score.
CropPlan plan_crops(const SaliencyMap& map, std::span<const WindowSpec> specs, Size2 resize_to, double nms_iou,
                    std::string image_id = {});

/// Window tables for the two datasets; stride 0 selects default_stride.
/// Names: "cub", "cub-corrected" (large windows read as 246x269 / 269x246)
/// and "cxr".
std::vector<WindowSpec> window_preset(std::string_view name, int k_large, int k_medium, int k_small, int stride = 0);

struct LabeledCrop {
    RasterImage image;
    int label = 0;
    CropBox box;
};

/// Crops every plan box and bilinearly resizes it to plan.resize_to. Crops
/// inherit the source label.
std::vector<LabeledCrop> extract_and_resize(const LabeledImage& source, const CropPlan& plan);

}  // namespace gazekit
