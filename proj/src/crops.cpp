#include "gazekit/crops.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gazekit/error.hpp"
#include "gazekit/saliency.hpp"

namespace gazekit {

std::string_view scale_name(ScaleTag tag) {
    switch (tag) {
        case ScaleTag::large:
            return "large";
        case ScaleTag::medium:
            return "medium";
        case ScaleTag::small:
            return "small";
    }
    return "unknown";
}

ScaleTag parse_scale(std::string_view name) {
    if (name == "large") return ScaleTag::large;
    if (name == "medium") return ScaleTag::medium;
    if (name == "small") return ScaleTag::small;
    throw ConfigError("unknown scale tag '" + std::string(name) + "'");
}

int default_stride(int width, int height) {
    return std::max(1, static_cast<int>(std::lround(std::min(width, height) / 8.0)));
}

IntegralImage::IntegralImage(const SaliencyMap& map)
    : width_(map.width()), height_(map.height()), stride_(static_cast<std::size_t>(map.width()) + 1) {
    if (map.empty()) throw ShapeError("integral image of an empty map");
    table_.assign(stride_ * (static_cast<std::size_t>(height_) + 1), 0.0);
    for (int y = 0; y < height_; ++y) {
        double row = 0.0;
        const double* above = table_.data() + static_cast<std::size_t>(y) * stride_;
        double* cur = table_.data() + static_cast<std::size_t>(y + 1) * stride_;
        for (int x = 0; x < width_; ++x) {
            row += map.at(x, y);
            cur[x + 1] = above[x + 1] + row;
        }
    }
}

double IntegralImage::window_sum(int x, int y, int w, int h) const {
    const auto idx = [this](int cx, int cy) { return static_cast<std::size_t>(cy) * stride_ + cx; };
    return table_[idx(x + w, y + h)] - table_[idx(x, y + h)] - table_[idx(x + w, y)] + table_[idx(x, y)];
}

std::vector<int> window_positions(int extent, int window, int stride) {
    std::vector<int> out;
    const int last = extent - window;
    for (int p = 0; p <= last; p += stride) out.push_back(p);
    if (out.back() != last) out.push_back(last);
    return out;
}

namespace {

void check_spec(const WindowSpec& spec, int width, int height) {
    if (spec.width <= 0 || spec.height <= 0) throw ConfigError("window dimensions must be positive");
    if (spec.stride < 1) throw ConfigError("window stride must be >= 1");
    if (spec.k < 0) throw ConfigError("window k must be >= 0");
    if (spec.width > width || spec.height > height) {
        throw ConfigError("window " + std::to_string(spec.width) + "x" + std::to_string(spec.height) +
                          " larger than map " + std::to_string(width) + "x" + std::to_string(height));
    }
}

bool ranks_before(const CropBox& a, const CropBox& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

}  // namespace

std::vector<CropBox> score_windows(const IntegralImage& table, const WindowSpec& spec) {
    check_spec(spec, table.width(), table.height());
    const auto xs = window_positions(table.width(), spec.width, spec.stride);
    const auto ys = window_positions(table.height(), spec.height, spec.stride);
    const double area = static_cast<double>(spec.width) * spec.height;
    std::vector<CropBox> out;
    out.reserve(xs.size() * ys.size());
    for (int y : ys) {
        for (int x : xs) {
            const double sum = table.window_sum(x, y, spec.width, spec.height);
            // Cancellation in the four-corner formula can leave a tiny negative.
            out.push_back({x, y, spec.width, spec.height, std::max(0.0, sum) / area, spec.scale});
        }
    }
    return out;
}

std::vector<CropBox> score_windows(const SaliencyMap& map, const WindowSpec& spec) {
    check_spec(spec, map.width(), map.height());
    return score_windows(IntegralImage(map), spec);
}

double iou(const CropBox& a, const CropBox& b) {
    const long long ix = std::max(0, std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x));
    const long long iy = std::max(0, std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y));
    const long long inter = ix * iy;
    const long long uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<CropBox> select_topk(std::span<const CropBox> candidates, int k, double nms_iou) {
    std::vector<CropBox> kept;
    if (k <= 0) return kept;
    std::vector<CropBox> order(candidates.begin(), candidates.end());
    std::stable_sort(order.begin(), order.end(), ranks_before);
    for (const auto& box : order) {
        const bool suppressed =
            std::any_of(kept.begin(), kept.end(), [&](const CropBox& k2) { return iou(box, k2) > nms_iou; });
        if (suppressed) continue;
        kept.push_back(box);
        if (static_cast<int>(kept.size()) == k) break;
    }
    return kept;
}

CropPlan plan_crops(const SaliencyMap& map, std::span<const WindowSpec> specs, Size2 resize_to, double nms_iou,
                    std::string image_id) {
    if (specs.empty()) throw ConfigError("plan_crops needs at least one window spec");
    if (resize_to.width <= 0 || resize_to.height <= 0) throw ConfigError("resize target must be positive");
    if (!(nms_iou >= 0.0 && nms_iou <= 1.0)) throw ConfigError("NMS IoU threshold must lie in [0, 1]");
    for (const auto& s : specs) check_spec(s, map.width(), map.height());

    const IntegralImage table(map);
    CropPlan plan;
    plan.image_id = std::move(image_id);
    plan.resize_to = resize_to;
    plan.degenerate = map.is_all_zero();

    for (ScaleTag tag : {ScaleTag::large, ScaleTag::medium, ScaleTag::small}) {
        std::vector<CropBox> pool;
        int k = -1;
        for (const auto& s : specs) {
            if (s.scale != tag) continue;
            if (k >= 0 && s.k != k) {
                throw ConfigError("window specs of scale '" + std::string(scale_name(tag)) + "' disagree on k");
            }
            k = s.k;
            auto scored = score_windows(table, s);
            pool.insert(pool.end(), scored.begin(), scored.end());
        }
        if (k < 0) continue;
        auto chosen = select_topk(pool, k, nms_iou);
        plan.boxes.insert(plan.boxes.end(), chosen.begin(), chosen.end());
    }
    std::stable_sort(plan.boxes.begin(), plan.boxes.end(),
                     [](const CropBox& a, const CropBox& b) { return a.score > b.score; });
    return plan;
}

std::vector<WindowSpec> window_preset(std::string_view name, int k_large, int k_medium, int k_small, int stride) {
    using Sizes = std::vector<std::array<int, 2>>;
    Sizes small;
    Sizes medium;
    Sizes large;
    if (name == "cub" || name == "cub-corrected") {
        small = {{123, 134}, {134, 123}, {123, 123}, {134, 134}};
        medium = {{174, 190}, {190, 174}, {174, 174}, {190, 190}};
        large = name == "cub" ? Sizes{{246, 264}, {269, 246}} : Sizes{{246, 269}, {269, 246}};
    } else if (name == "cxr") {
        small = {{87, 95}, {95, 87}, {95, 95}, {87, 87}};
        medium = {{123, 135}, {135, 123}, {123, 123}, {135, 135}};
        large = {{180, 190}, {190, 180}};
    } else {
        throw ConfigError("unknown window preset '" + std::string(name) + "' (expected cub, cub-corrected or cxr)");
    }
    std::vector<WindowSpec> out;
    auto add = [&](const Sizes& sizes, ScaleTag tag, int k) {
        for (const auto& [w, h] : sizes) out.push_back({w, h, stride > 0 ? stride : default_stride(w, h), tag, k});
    };
    add(large, ScaleTag::large, k_large);
    add(medium, ScaleTag::medium, k_medium);
    add(small, ScaleTag::small, k_small);
    return out;
}

std::vector<LabeledCrop> extract_and_resize(const LabeledImage& source, const CropPlan& plan) {
    const auto& img = source.image;
    std::vector<LabeledCrop> out;
    out.reserve(plan.boxes.size());
    for (const auto& box : plan.boxes) {
        if (box.x < 0 || box.y < 0 || box.width <= 0 || box.height <= 0 || box.x + box.width > img.width() ||
            box.y + box.height > img.height()) {
            throw BoundsError("crop box (" + std::to_string(box.x) + "," + std::to_string(box.y) + "," +
                              std::to_string(box.width) + "x" + std::to_string(box.height) +
                              ") outside image " + std::to_string(img.width()) + "x" +
                              std::to_string(img.height()));
        }
        RasterImage crop(box.width, box.height, img.channels());
        for (int y = 0; y < box.height; ++y) {
            for (int x = 0; x < box.width; ++x) {
                for (int c = 0; c < img.channels(); ++c) crop.at(x, y, c) = img.at(box.x + x, box.y + y, c);
            }
        }
        out.push_back({resize_bilinear(crop, plan.resize_to), source.label, box});
    }
    return out;
}

}  // namespace gazekit
