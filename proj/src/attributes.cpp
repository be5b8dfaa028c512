#include "gazekit/attributes.hpp"

#include <algorithm>
#include <numeric>

#include "gazekit/error.hpp"

namespace gazekit {

ComparisonVector comparison_vector(std::span<const AttributeVector> class_a, std::span<const AttributeVector> class_b) {
    if (class_a.empty() || class_b.empty()) throw DomainError("comparison needs images in both classes");
    const std::size_t n = class_a.front().size();
    auto check = [n](const AttributeVector& v) {
        if (v.size() != n) throw SchemaError("attribute vectors differ in length");
    };
    std::for_each(class_a.begin(), class_a.end(), check);
    std::for_each(class_b.begin(), class_b.end(), check);

    ComparisonVector out{std::vector<std::int64_t>(n, 0),
                         static_cast<std::int64_t>(class_a.size()) * static_cast<std::int64_t>(class_b.size())};
    // Per attribute, differing pairs = ones_a * zeros_b + zeros_a * ones_b.
    for (std::size_t j = 0; j < n; ++j) {
        std::int64_t ones_a = 0;
        std::int64_t ones_b = 0;
        for (const auto& v : class_a) ones_a += v[j] ? 1 : 0;
        for (const auto& v : class_b) ones_b += v[j] ? 1 : 0;
        const std::int64_t zeros_a = static_cast<std::int64_t>(class_a.size()) - ones_a;
        const std::int64_t zeros_b = static_cast<std::int64_t>(class_b.size()) - ones_b;
        out.counts[j] = ones_a * zeros_b + zeros_a * ones_b;
    }
    return out;
}

DiscriminativePart discriminative_part(const ComparisonVector& vector, const std::map<int, int>& attribute_to_part,
                                       int num_parts) {
    if (num_parts <= 0) {
        for (const auto& [a, p] : attribute_to_part) num_parts = std::max(num_parts, p + 1);
    }
    if (num_parts <= 0) throw SchemaError("no body parts in attribute mapping");
    DiscriminativePart out;
    out.part_sums.assign(num_parts, 0);
    for (std::size_t j = 0; j < vector.counts.size(); ++j) {
        auto it = attribute_to_part.find(static_cast<int>(j));
        if (it == attribute_to_part.end()) {
            throw SchemaError("attribute " + std::to_string(j) + " has no part mapping");
        }
        if (it->second < 0 || it->second >= num_parts) throw SchemaError("attribute mapped outside part range");
        out.part_sums[it->second] += vector.counts[j];
    }
    const auto best = std::max_element(out.part_sums.begin(), out.part_sums.end());
    out.part = static_cast<int>(best - out.part_sums.begin());
    out.degenerate = *best == 0;
    return out;
}

double PartAttention::total_duration() const {
    double t = 0.0;
    for (const auto& [p, d] : duration_ms) t += d;
    return t;
}

PartAttention assign_fixations(std::span<const Fixation> fixations, std::span<const PartCenter> part_centers) {
    if (part_centers.empty()) throw DomainError("fixation assignment needs at least one part center");
    PartAttention out;
    for (const auto& f : fixations) {
        const PartCenter* best = nullptr;
        double best_d2 = 0.0;
        for (const auto& pc : part_centers) {
            const double d2 = (f.x - pc.x) * (f.x - pc.x) + (f.y - pc.y) * (f.y - pc.y);
            if (!best || d2 < best_d2 || (d2 == best_d2 && pc.part < best->part)) {
                best = &pc;
                best_d2 = d2;
            }
        }
        out.duration_ms[best->part] += f.duration_ms;
        out.fixation_count[best->part] += 1;
    }
    return out;
}

HitRateReport hit_rate(std::span<const HitRateInput> per_image, std::span<const int> ks) {
    if (per_image.empty()) throw DomainError("hit rate needs at least one image");
    HitRateReport report;
    report.images = per_image.size();
    std::map<int, std::size_t> hits;
    for (int k : ks) {
        if (k < 1) throw DomainError("hit rate k must be >= 1");
        hits[k] = 0;
    }
    for (const auto& img : per_image) {
        if (img.attention.duration_ms.empty()) throw DomainError("every image needs at least one fixated part");
        std::vector<std::pair<int, double>> ranked(img.attention.duration_ms.begin(), img.attention.duration_ms.end());
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        const auto pos = std::find_if(ranked.begin(), ranked.end(),
                                      [&](const auto& e) { return e.first == img.ground_truth_part; });
        const auto rank = pos == ranked.end() ? std::ptrdiff_t{-1} : pos - ranked.begin();
        for (auto& [k, count] : hits) {
            if (rank >= 0 && rank < k) ++count;
        }
        report.focused_parts_histogram[static_cast<int>(ranked.size())] += 1;
    }
    for (const auto& [k, count] : hits) {
        report.hit_rate_at_k[k] = static_cast<double>(count) / static_cast<double>(per_image.size());
    }
    return report;
}

AttributeAnalysis analyze_attributes(const DatasetManifest& manifest, std::span<const std::pair<int, int>> pairs,
                                     const FixationLoader& load_fixations) {
    manifest.validate();
    if (pairs.empty()) throw DomainError("attribute analysis needs at least one class pair");
    AttributeAnalysis out;
    std::vector<HitRateInput> inputs;

    auto members = [&](int label) {
        std::vector<const ImageRecord*> recs;
        for (const auto& img : manifest.images) {
            if (img.label == label) recs.push_back(&img);
        }
        return recs;
    };
    auto attributes_of = [](const std::vector<const ImageRecord*>& recs) {
        std::vector<AttributeVector> v;
        for (const auto* r : recs) {
            if (!r->attributes) throw SchemaError("image " + r->id + " lacks an attribute vector");
            v.push_back(*r->attributes);
        }
        return v;
    };

    for (const auto& [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= manifest.num_classes || b >= manifest.num_classes) {
            throw SchemaError("class pair (" + std::to_string(a) + "," + std::to_string(b) + ") outside manifest");
        }
        const auto recs_a = members(a);
        const auto recs_b = members(b);
        const auto cv = comparison_vector(attributes_of(recs_a), attributes_of(recs_b));
        const auto part = discriminative_part(cv, manifest.attribute_to_part, manifest.num_parts);
        out.per_pair.push_back({a, b, part});

        for (const auto* group : {&recs_a, &recs_b}) {
            for (const auto* rec : *group) {
                if (rec->part_centers.empty()) {
                    ++out.skipped_images;
                    continue;
                }
                const auto fixations = load_fixations(*rec);
                auto attention = assign_fixations(fixations, rec->part_centers);
                if (attention.duration_ms.empty()) {
                    ++out.skipped_images;
                    continue;
                }
                inputs.push_back({std::move(attention), part.part});
            }
        }
    }
    if (!inputs.empty()) {
        std::vector<int> ks(std::max(1, manifest.num_parts));
        std::iota(ks.begin(), ks.end(), 1);
        out.hits = hit_rate(inputs, ks);
    }
    return out;
}

}  // namespace gazekit
