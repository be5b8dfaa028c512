#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

inline constexpr double kMetricEpsilon = 1e-7;

/// A saliency map normalized to sum to one.
class DistributionMap {
public:
    DistributionMap(int width, int height, std::vector<double> probabilities);

    /// Sum-normalizes a map; an all-zero map has no distribution (DomainError).
    static DistributionMap from(const SaliencyMap& map);

    int width() const { return width_; }
    int height() const { return height_; }
    Size2 size() const { return {width_, height_}; }
    double at(int x, int y) const { return p_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> probabilities() const { return p_; }

private:
    int width_;
    int height_;
    std::vector<double> p_;
};

struct PixelLocation {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelLocation&, const PixelLocation&) = default;
};

using FixationSet = std::vector<PixelLocation>;

/// Rounds fixation centers to the nearest pixel and drops those outside the map.
FixationSet fixation_set(std::span<const Fixation> fixations, Size2 bounds);

/// Uniformly drawn pixel locations, reproducible from the seed.
FixationSet sample_uniform_locations(Size2 bounds, std::size_t count, std::uint64_t seed);

/// Isotropic Gaussian centered on the map with sigma = min(w, h) / 4,
/// sum-normalized.
DistributionMap center_prior(Size2 size);

/// KL(reference || candidate) in nats: sum G * ln(eps + G / (eps + P)).
double kl_divergence(const DistributionMap& reference, const DistributionMap& candidate,
                     double eps = kMetricEpsilon);

/// Pearson correlation of the flattened maps. Constant maps throw DomainError.
double pearson_cc(const SaliencyMap& a, const SaliencyMap& b);
double pearson_cc(std::span<const double> a, std::span<const double> b);

/// Histogram intersection: sum of elementwise minima over the larger total
/// mass (1 up to rounding), so SIM(X, X) is exactly 1.
double sim(const DistributionMap& reference, const DistributionMap& candidate);

/// Ranks starting at 1; ties share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman correlation (Pearson on average ranks).
double rank_correlation(const SaliencyMap& a, const SaliencyMap& b);

/// ROC AUC of candidate values at positive versus negative locations via the
/// rank-sum formula; ties count one half.
double shuffled_auc(const SaliencyMap& candidate, std::span<const PixelLocation> positives,
                    std::span<const PixelLocation> negatives);

/// Mean log2 likelihood gain over the baseline at fixated pixels (bits).
double information_gain(const DistributionMap& candidate, const DistributionMap& baseline,
                        std::span<const PixelLocation> positives, double eps = kMetricEpsilon);

struct MetricReport {
    std::optional<double> kl_d;
    std::optional<double> cc;
    std::optional<double> sim;
    std::optional<double> rank_co;
    std::optional<double> sauc;
    std::optional<double> ig;
    std::map<std::string, std::string> errors;  // metric key -> reason it is missing
};

struct CompareInputs {
    std::optional<FixationSet> positives;
    std::optional<FixationSet> negatives;
    std::optional<DistributionMap> baseline;  // center prior when unset
    double epsilon = kMetricEpsilon;
};

/// Evaluates all six metrics; a failing metric is recorded in `errors`
/// without aborting the others. sAUC needs positives and negatives, IG needs
/// positives.
MetricReport compare_all(const SaliencyMap& candidate, const SaliencyMap& reference, const CompareInputs& inputs);

}  // namespace gazekit
