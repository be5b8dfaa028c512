#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

using AttributeVector = std::vector<std::uint8_t>;

struct ComparisonVector {
    std::vector<std::int64_t> counts;  // pairs in which attribute j differs
    std::int64_t pair_count = 0;
};

/// Compares every image of class A with every image of class B and counts,
/// per attribute, the pairs whose binary values differ.
ComparisonVector comparison_vector(std::span<const AttributeVector> class_a, std::span<const AttributeVector> class_b);

struct DiscriminativePart {
    int part = 0;
    bool degenerate = false;  // every part sum is zero
    std::vector<std::int64_t> part_sums;
};

/// Groups comparison counts by body part and returns the part with the
/// largest sum (ties to the smaller index). num_parts <= 0 infers the count
/// from the mapping.
DiscriminativePart discriminative_part(const ComparisonVector& vector, const std::map<int, int>& attribute_to_part,
                                       int num_parts = 0);

struct PartAttention {
    std::map<int, double> duration_ms;  // only parts with at least one fixation
    std::map<int, int> fixation_count;

    double total_duration() const;
};

/// Assigns each fixation to the Euclidean-nearest listed part center (ties to
/// the smaller part index) and sums durations per part.
PartAttention assign_fixations(std::span<const Fixation> fixations, std::span<const PartCenter> part_centers);

struct HitRateInput {
    PartAttention attention;
    int ground_truth_part = 0;
};

struct HitRateReport {
    std::map<int, double> hit_rate_at_k;
    std::map<int, int> focused_parts_histogram;  // number of fixated parts -> images
    std::size_t images = 0;
};

/// Fixated parts ranked by duration sum (descending, ties to the smaller
/// index); an image hits at k when its ground-truth part is among the first k.
HitRateReport hit_rate(std::span<const HitRateInput> per_image, std::span<const int> ks);

struct PairResult {
    int class_a = 0;
    int class_b = 0;
    DiscriminativePart part;
};

struct AttributeAnalysis {
    std::vector<PairResult> per_pair;
    HitRateReport hits;
    std::size_t skipped_images = 0;  // no visible part or no fixation
};

using FixationLoader = std::function<std::vector<Fixation>(const ImageRecord&)>;

/// Full analysis over a manifest: ground-truth part per class pair, attached
/// to every image of both classes, then hit rates at k = 1..num_parts.
AttributeAnalysis analyze_attributes(const DatasetManifest& manifest, std::span<const std::pair<int, int>> pairs,
                                     const FixationLoader& load_fixations);

}  // namespace gazekit
