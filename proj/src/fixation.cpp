#include "gazekit/fixation.hpp"

#include <cmath>
#include <numbers>

#include "gazekit/error.hpp"

namespace gazekit {

void IvtConfig::validate() const {
    if (!(velocity_threshold_deg_s > 0.0) || !(min_fixation_duration_ms > 0.0) || !(merge_max_gap_ms > 0.0) ||
        !(merge_max_angle_deg > 0.0)) {
        throw ConfigError("I-VT thresholds must all be positive");
    }
    geometry.validate();
}

double pixels_to_degrees(double dx, double dy, const Geometry& geometry) {
    const double mm = std::hypot(dx, dy) * geometry.mm_per_pixel();
    return std::atan(mm / geometry.viewing_distance_mm) * 180.0 / std::numbers::pi;
}

std::vector<std::optional<double>> sample_velocities(std::span<const GazeSample> samples, const Geometry& geometry) {
    const std::size_t n = samples.size();
    std::vector<std::optional<double>> v(n);
    auto rate = [&](std::size_t a, std::size_t b) {
        const double dt_s = static_cast<double>(samples[b].timestamp_us - samples[a].timestamp_us) * 1e-6;
        return pixels_to_degrees(samples[b].x - samples[a].x, samples[b].y - samples[a].y, geometry) / dt_s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!samples[i].valid) continue;
        const bool prev = i > 0 && samples[i - 1].valid;
        const bool next = i + 1 < n && samples[i + 1].valid;
        if (prev && next) {
            v[i] = rate(i - 1, i + 1);
        } else if (next) {
            v[i] = rate(i, i + 1);
        } else if (prev) {
            v[i] = rate(i - 1, i);
        }
    }
    return v;
}

std::vector<bool> classify_fixation_samples(std::span<const GazeSample> samples, const IvtConfig& config) {
    const auto v = sample_velocities(samples, config.geometry);
    std::vector<bool> out(samples.size(), false);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] && *v[i] < config.velocity_threshold_deg_s;
    return out;
}

namespace {

struct Candidate {
    std::int64_t start_us;
    std::int64_t end_us;
    double sum_x = 0.0;
    double sum_y = 0.0;
    std::size_t count = 0;

    double cx() const { return sum_x / count; }
    double cy() const { return sum_y / count; }
};

}  // namespace

std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, const IvtConfig& config) {
    config.validate();
    std::size_t valid = 0;
    for (const auto& s : samples) valid += s.valid ? 1 : 0;
    if (valid < 2) return {};

    const auto is_fix = classify_fixation_samples(samples, config);

    std::vector<Candidate> candidates;
    bool open = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!is_fix[i]) {
            open = false;
            continue;
        }
        if (!open) {
            candidates.push_back({samples[i].timestamp_us, samples[i].timestamp_us});
            open = true;
        }
        auto& c = candidates.back();
        c.end_us = samples[i].timestamp_us;
        c.sum_x += samples[i].x;
        c.sum_y += samples[i].y;
        ++c.count;
    }

    std::vector<Candidate> merged;
    for (const auto& c : candidates) {
        if (!merged.empty()) {
            auto& last = merged.back();
            const double gap_ms = static_cast<double>(c.start_us - last.end_us) / 1000.0;
            const double angle = pixels_to_degrees(c.cx() - last.cx(), c.cy() - last.cy(), config.geometry);
            if (gap_ms <= config.merge_max_gap_ms && angle <= config.merge_max_angle_deg) {
                last.end_us = c.end_us;
                last.sum_x += c.sum_x;
                last.sum_y += c.sum_y;
                last.count += c.count;
                continue;
            }
        }
        merged.push_back(c);
    }

    std::vector<Fixation> out;
    for (const auto& c : merged) {
        const double duration_ms = static_cast<double>(c.end_us - c.start_us) / 1000.0;
        if (duration_ms < config.min_fixation_duration_ms) continue;
        out.push_back({c.cx(), c.cy(), duration_ms});
    }
    return out;
}

}  // namespace gazekit
