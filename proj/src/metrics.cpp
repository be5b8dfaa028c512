#include "gazekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gazekit/error.hpp"
#include "gazekit/kernels.hpp"

namespace gazekit {

namespace {

void require_same(Size2 a, Size2 b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string(what) + ": map sizes differ (" + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height) + ")");
    }
}

void require_in_bounds(std::span<const PixelLocation> locs, Size2 size, const char* what) {
    for (const auto& p : locs) {
        if (p.x < 0 || p.y < 0 || p.x >= size.width || p.y >= size.height) {
            throw BoundsError(std::string(what) + ": location (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                              ") outside map");
        }
    }
}

}  // namespace

DistributionMap::DistributionMap(int width, int height, std::vector<double> probabilities)
    : width_(width), height_(height), p_(std::move(probabilities)) {
    if (width <= 0 || height <= 0 || p_.size() != static_cast<std::size_t>(width) * height) {
        throw ShapeError("distribution size does not match its dimensions");
    }
    double total = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("probabilities must be finite and >= 0");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");
}

DistributionMap DistributionMap::from(const SaliencyMap& map) {
    if (map.empty()) throw ShapeError("distribution of an empty map");
    const double total = map.sum();
    if (!(total > 0.0)) throw DomainError("cannot normalize an all-zero saliency map");
    std::vector<double> p(map.values().begin(), map.values().end());
    for (auto& v : p) v /= total;
    return DistributionMap(map.width(), map.height(), std::move(p));
}

FixationSet fixation_set(std::span<const Fixation> fixations, Size2 bounds) {
    FixationSet out;
    for (const auto& f : fixations) {
        const long x = std::lround(f.x);
        const long y = std::lround(f.y);
        if (x < 0 || y < 0 || x >= bounds.width || y >= bounds.height) continue;
        out.push_back({static_cast<int>(x), static_cast<int>(y)});
    }
    return out;
}

FixationSet sample_uniform_locations(Size2 bounds, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FixationSet out(count);
    // Raw engine output keeps the draw identical across standard libraries.
    for (auto& p : out) {
        p.x = static_cast<int>(rng() % static_cast<std::uint64_t>(bounds.width));
        p.y = static_cast<int>(rng() % static_cast<std::uint64_t>(bounds.height));
    }
    return out;
}

DistributionMap center_prior(Size2 size) {
    SaliencyMap m(size.width, size.height);
    const double sigma = std::min(size.width, size.height) / 4.0;
    const double cx = (size.width - 1) / 2.0;
    const double cy = (size.height - 1) / 2.0;
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            m.at(x, y) = std::exp(-d2 / (2.0 * sigma * sigma));
        }
    }
    return DistributionMap::from(m);
}

double kl_divergence(const DistributionMap& reference, const DistributionMap& candidate, double eps) {
    require_same(reference.size(), candidate.size(), "KL divergence");
    const auto g = reference.probabilities();
    const auto p = candidate.probabilities();
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) total += g[i] * std::log(eps + g[i] / (eps + p[i]));
    return total;
}

double pearson_cc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("correlation inputs differ in length");
    if (a.size() < 2) throw DomainError("correlation needs at least two values");
    const double n = static_cast<double>(a.size());
    const double ma = kernels::sum(a) / n;
    const double mb = kernels::sum(b) / n;
    std::vector<double> ca(a.begin(), a.end());
    std::vector<double> cb(b.begin(), b.end());
    for (auto& v : ca) v -= ma;
    for (auto& v : cb) v -= mb;
    const double saa = kernels::dot(ca, ca);
    const double sbb = kernels::dot(cb, cb);
    if (saa == 0.0 || sbb == 0.0) throw DomainError("correlation undefined for a constant map");
    const double r = kernels::dot(ca, cb) / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

double pearson_cc(const SaliencyMap& a, const SaliencyMap& b) {
    require_same(a.size(), b.size(), "CC");
    return pearson_cc(a.values(), b.values());
}

double sim(const DistributionMap& reference, const DistributionMap& candidate) {
    require_same(reference.size(), candidate.size(), "SIM");
    const double overlap = kernels::min_sum(reference.probabilities(), candidate.probabilities());
    const double mass = std::max(kernels::sum(reference.probabilities()), kernels::sum(candidate.probabilities()));
    return std::clamp(overlap / mass, 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 (0-based) share rank mean of (i+1)..j
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

double rank_correlation(const SaliencyMap& a, const SaliencyMap& b) {
    require_same(a.size(), b.size(), "rank correlation");
    return pearson_cc(average_ranks(a.values()), average_ranks(b.values()));
}

double shuffled_auc(const SaliencyMap& candidate, std::span<const PixelLocation> positives,
                    std::span<const PixelLocation> negatives) {
    if (positives.empty() || negatives.empty()) throw DomainError("sAUC needs non-empty positive and negative sets");
    require_in_bounds(positives, candidate.size(), "sAUC positives");
    require_in_bounds(negatives, candidate.size(), "sAUC negatives");
    std::vector<double> scores;
    scores.reserve(positives.size() + negatives.size());
    for (const auto& p : positives) scores.push_back(candidate.at(p.x, p.y));
    for (const auto& p : negatives) scores.push_back(candidate.at(p.x, p.y));
    const auto ranks = average_ranks(scores);
    // Twice the rank sum is an integer, so the statistic below is exact.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < positives.size(); ++i) rank_sum += ranks[i];
    const double np = static_cast<double>(positives.size());
    const double nn = static_cast<double>(negatives.size());
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

double information_gain(const DistributionMap& candidate, const DistributionMap& baseline,
                        std::span<const PixelLocation> positives, double eps) {
    require_same(candidate.size(), baseline.size(), "information gain");
    if (positives.empty()) throw DomainError("information gain needs at least one fixation");
    require_in_bounds(positives, candidate.size(), "information gain");
    double total = 0.0;
    for (const auto& f : positives) {
        total += std::log2(candidate.at(f.x, f.y) + eps) - std::log2(baseline.at(f.x, f.y) + eps);
    }
    return total / static_cast<double>(positives.size());
}

MetricReport compare_all(const SaliencyMap& candidate, const SaliencyMap& reference, const CompareInputs& inputs) {
    MetricReport r;
    auto attempt = [&r](const char* key, std::optional<double>& slot, auto&& fn) {
        try {
            slot = fn();
        } catch (const Error& e) {
            r.errors[key] = e.code() + ": " + e.what();
        }
    };
    std::optional<DistributionMap> g;
    std::optional<DistributionMap> p;
    try {
        g = DistributionMap::from(reference);
    } catch (const Error&) {
    }
    try {
        p = DistributionMap::from(candidate);
    } catch (const Error&) {
    }
    auto need = [](const std::optional<DistributionMap>& d, const char* which) -> const DistributionMap& {
        if (!d) throw DomainError(std::string(which) + " map cannot be sum-normalized (all zero)");
        return *d;
    };

    attempt("kl_d", r.kl_d, [&] { return kl_divergence(need(g, "reference"), need(p, "candidate"), inputs.epsilon); });
    attempt("cc", r.cc, [&] { return pearson_cc(candidate, reference); });
    attempt("sim", r.sim, [&] { return sim(need(g, "reference"), need(p, "candidate")); });
    attempt("rank_co", r.rank_co, [&] { return rank_correlation(candidate, reference); });
    attempt("sauc", r.sauc, [&] {
        if (!inputs.positives || !inputs.negatives) throw DomainError("sAUC needs fixations and negatives");
        return shuffled_auc(candidate, *inputs.positives, *inputs.negatives);
    });
    attempt("ig", r.ig, [&] {
        if (!inputs.positives) throw DomainError("IG needs fixations");
        const auto base = inputs.baseline ? *inputs.baseline : center_prior(candidate.size());
        return information_gain(need(p, "candidate"), base, *inputs.positives, inputs.epsilon);
    });
    return r;
}

}  // namespace gazekit
