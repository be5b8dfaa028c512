#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

/// Velocity-threshold (I-VT) classifier parameters. Defaults follow the
/// common Tobii I-VT filter settings.
struct IvtConfig {
    double velocity_threshold_deg_s = 30.0;
    double min_fixation_duration_ms = 60.0;
    double merge_max_gap_ms = 75.0;
    double merge_max_angle_deg = 0.5;
    Geometry geometry;

    void validate() const;

    friend bool operator==(const IvtConfig&, const IvtConfig&) = default;
};

/// Visual angle (degrees) subtended by a pixel displacement at the viewing
/// distance: atan(|d| * mm_per_pixel / distance).
double pixels_to_degrees(double dx, double dy, const Geometry& geometry);

/// Per-sample angular velocity in deg/s. Uses the neighbours on both sides
/// when both are valid, otherwise a one-sided difference. Invalid samples
/// (and valid samples with no valid neighbour) have no velocity.
std::vector<std::optional<double>> sample_velocities(std::span<const GazeSample> samples, const Geometry& geometry);

/// True for samples whose velocity is defined and below the threshold.
std::vector<bool> classify_fixation_samples(std::span<const GazeSample> samples, const IvtConfig& config);

/// Detects fixations. Runs of below-threshold samples become candidates;
/// neighbouring candidates within merge_max_gap and merge_max_angle are
/// merged; survivors shorter than min_fixation_duration are dropped.
/// Fewer than two valid samples yields an empty list.
std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, const IvtConfig& config);

}  // namespace gazekit
