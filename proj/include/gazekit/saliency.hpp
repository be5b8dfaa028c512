#pragma once

#include <span>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

/// Gaussian width in display pixels covered by the foveal angle at the
/// viewing distance: tan(angle) * distance * (resolution_x / width_mm).
/// Unrounded; 600 mm / 2 deg / 530 mm / 1920 px gives ~75.9.
double sigma_from_geometry(const Geometry& geometry);

struct RenderConfig {
    double sigma = 75.0;               // display pixels
    Size2 display_resolution{1920, 1080};
    Size2 output_size{1920, 1080};
    double truncation_radius = 4.0;    // multiples of sigma, >= 3
    bool exact = false;                // evaluate every Gaussian over the whole grid

    void validate() const;
};

/// Duration-weighted sum of isotropic Gaussians evaluated on the display grid,
/// bilinearly resampled to output_size. Fixation coordinates are display
/// pixels (pixel index = coordinate). The result is unnormalized; an empty
/// fixation list yields an all-zero map.
SaliencyMap render_saliency(std::span<const Fixation> fixations, const RenderConfig& config);

/// Bilinear resampling with pixel-center alignment and edge clamping.
SaliencyMap resize_bilinear(const SaliencyMap& map, Size2 size);
RasterImage resize_bilinear(const RasterImage& image, Size2 size);

struct AttentionOutput {
    RasterImage image;
    bool zero_map = false;  // map had no positive value; image is all zero
};

/// Multiplies every channel by the max-normalized map (image ⊙ A).
AttentionOutput apply_attention(const RasterImage& image, const SaliencyMap& map);

}  // namespace gazekit
