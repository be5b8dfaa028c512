#include "gazekit/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazekit/error.hpp"
#include "gazekit/kernels.hpp"

namespace gazekit {

double sigma_from_geometry(const Geometry& geometry) {
    const double angle = geometry.foveal_angle_deg * std::numbers::pi / 180.0;
    return std::tan(angle) * geometry.viewing_distance_mm * (geometry.screen_resolution_x / geometry.screen_width_mm);
}

void RenderConfig::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("render: sigma must be positive");
    if (!(truncation_radius >= 3.0)) throw ConfigError("render: truncation radius must be >= 3 sigma");
    if (display_resolution.width <= 0 || display_resolution.height <= 0 || output_size.width <= 0 ||
        output_size.height <= 0) {
        throw ConfigError("render: display and output sizes must be positive");
    }
}

namespace {

void splat(std::span<double> grid, int width, int height, const Fixation& f, const RenderConfig& cfg,
           std::vector<double>& gx) {
    const double inv2s2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    const double radius = cfg.truncation_radius * cfg.sigma;

    int x_lo = 0;
    int x_hi = width - 1;
    int y_lo = 0;
    int y_hi = height - 1;
    if (!cfg.exact) {
        x_lo = std::max(x_lo, static_cast<int>(std::ceil(f.x - radius)));
        x_hi = std::min(x_hi, static_cast<int>(std::floor(f.x + radius)));
        y_lo = std::max(y_lo, static_cast<int>(std::ceil(f.y - radius)));
        y_hi = std::min(y_hi, static_cast<int>(std::floor(f.y + radius)));
    }
    if (x_lo > x_hi || y_lo > y_hi) return;

    gx.resize(static_cast<std::size_t>(width));
    for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - f.x;
        gx[x] = std::exp(-dx * dx * inv2s2);
    }

    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y - f.y;
        int row_lo = x_lo;
        int row_hi = x_hi;
        if (!cfg.exact) {
            const double rem = radius * radius - dy * dy;
            if (rem < 0.0) continue;
            const double half = std::sqrt(rem);
            row_lo = std::max(x_lo, static_cast<int>(std::ceil(f.x - half)));
            row_hi = std::min(x_hi, static_cast<int>(std::floor(f.x + half)));
            if (row_lo > row_hi) continue;
        }
        const double weight = f.duration_ms * std::exp(-dy * dy * inv2s2);
        auto row = grid.subspan(static_cast<std::size_t>(y) * width + row_lo, row_hi - row_lo + 1);
        kernels::axpy(weight, std::span<const double>(gx).subspan(row_lo, row.size()), row);
    }
}

struct Tap {
    int i0;
    int i1;
    double frac;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
    std::vector<Tap> taps(dst);
    const double ratio = static_cast<double>(src) / dst;
    for (int o = 0; o < dst; ++o) {
        double s = (o + 0.5) * ratio - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, src - 1);
        taps[o] = {i0, i1, s - i0};
    }
    return taps;
}

// Resamples an interleaved grid with `channels` values per pixel.
std::vector<double> resample(std::span<const double> src, int sw, int sh, int channels, int dw, int dh) {
    const auto tx = bilinear_taps(sw, dw);
    const auto ty = bilinear_taps(sh, dh);
    std::vector<double> out(static_cast<std::size_t>(dw) * dh * channels);
    for (int y = 0; y < dh; ++y) {
        const auto& vy = ty[y];
        const auto* r0 = src.data() + static_cast<std::size_t>(vy.i0) * sw * channels;
        const auto* r1 = src.data() + static_cast<std::size_t>(vy.i1) * sw * channels;
        for (int x = 0; x < dw; ++x) {
            const auto& vx = tx[x];
            for (int c = 0; c < channels; ++c) {
                const double a = r0[vx.i0 * channels + c] * (1.0 - vx.frac) + r0[vx.i1 * channels + c] * vx.frac;
                const double b = r1[vx.i0 * channels + c] * (1.0 - vx.frac) + r1[vx.i1 * channels + c] * vx.frac;
                out[(static_cast<std::size_t>(y) * dw + x) * channels + c] = a * (1.0 - vy.frac) + b * vy.frac;
            }
        }
    }
    return out;
}

}  // namespace

SaliencyMap render_saliency(std::span<const Fixation> fixations, const RenderConfig& config) {
    config.validate();
    const int w = config.display_resolution.width;
    const int h = config.display_resolution.height;
    SaliencyMap display(w, h);
    std::vector<double> gx;
    for (const auto& f : fixations) {
        if (!(f.duration_ms > 0.0) || !std::isfinite(f.x) || !std::isfinite(f.y)) {
            throw DomainError("render: fixations need finite coordinates and positive duration");
        }
        splat(display.values(), w, h, f, config, gx);
    }
    if (config.output_size == config.display_resolution) return display;
    return resize_bilinear(display, config.output_size);
}

SaliencyMap resize_bilinear(const SaliencyMap& map, Size2 size) {
    if (map.empty()) throw ShapeError("cannot resize an empty saliency map");
    if (size.width <= 0 || size.height <= 0) throw ShapeError("resize target must be positive");
    if (size == map.size()) return map;
    return SaliencyMap(size.width, size.height,
                       resample(map.values(), map.width(), map.height(), 1, size.width, size.height));
}

RasterImage resize_bilinear(const RasterImage& image, Size2 size) {
    if (size.width <= 0 || size.height <= 0) throw ShapeError("resize target must be positive");
    if (size == image.size()) return image;
    return RasterImage(size.width, size.height, image.channels(),
                       resample(image.values(), image.width(), image.height(), image.channels(), size.width,
                                size.height));
}

AttentionOutput apply_attention(const RasterImage& image, const SaliencyMap& map) {
    if (image.size() != map.size()) {
        throw ShapeError("attention map " + std::to_string(map.width()) + "x" + std::to_string(map.height()) +
                         " does not match image " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()));
    }
    const double max = map.max_value();
    if (max <= 0.0) {
        return {RasterImage(image.width(), image.height(), image.channels(), 0.0), true};
    }
    std::vector<double> weight(map.values().begin(), map.values().end());
    kernels::scale(1.0 / max, weight);
    // A uniform map must reproduce the input exactly.
    for (auto& w : weight) w = std::min(w, 1.0);
    for (std::size_t i = 0; i < weight.size(); ++i) {
        if (map.values()[i] == max) weight[i] = 1.0;
    }

    const int channels = image.channels();
    std::vector<double> out(image.values().size());
    if (channels == 1) {
        kernels::mul(image.values(), weight, out);
    } else {
        std::vector<double> expanded(out.size());
        for (std::size_t i = 0; i < weight.size(); ++i) {
            for (int c = 0; c < channels; ++c) expanded[i * channels + c] = weight[i];
        }
        kernels::mul(image.values(), expanded, out);
    }
    return {RasterImage(image.width(), image.height(), channels, std::move(out)), false};
}

}  // namespace gazekit
