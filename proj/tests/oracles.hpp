#pragma once

// Brute-force reference implementations used only by the tests. None of them
// call into the library beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "gazekit/attributes.hpp"
#include "gazekit/crops.hpp"
#include "gazekit/metrics.hpp"
#include "gazekit/types.hpp"

namespace oracle {

using namespace gazekit;

inline std::vector<int> positions(int extent, int window, int stride) {
    std::vector<int> out;
    for (int p = 0; p + window <= extent; p += stride) out.push_back(p);
    if (out.empty() || out.back() + window != extent) out.push_back(extent - window);
    return out;
}

inline double naive_sum(const SaliencyMap& m, int x0, int y0, int w, int h) {
    double s = 0.0;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) s += m.at(x, y);
    }
    return s;
}

inline std::vector<CropBox> enumerate(const SaliencyMap& m, const WindowSpec& spec) {
    std::vector<CropBox> out;
    for (int y : positions(m.height(), spec.height, spec.stride)) {
        for (int x : positions(m.width(), spec.width, spec.stride)) {
            const double mean = naive_sum(m, x, y, spec.width, spec.height) /
                                (static_cast<double>(spec.width) * spec.height);
            out.push_back({x, y, spec.width, spec.height, mean, spec.scale});
        }
    }
    return out;
}

inline double box_iou(const CropBox& a, const CropBox& b) {
    long long inter = 0;
    for (int y = std::max(a.y, b.y); y < std::min(a.y + a.height, b.y + b.height); ++y) {
        for (int x = std::max(a.x, b.x); x < std::min(a.x + a.width, b.x + b.width); ++x) ++inter;
    }
    const long long uni = static_cast<long long>(a.width) * a.height + static_cast<long long>(b.width) * b.height - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Candidate order: score descending, then row, then column, then insertion.
inline std::vector<CropBox> greedy_nms(std::vector<CropBox> boxes, int k, double thr) {
    std::vector<std::size_t> idx(boxes.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = boxes[i];
        const auto& b = boxes[j];
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return i < j;
    });
    std::vector<CropBox> kept;
    for (std::size_t i : idx) {
        if (static_cast<int>(kept.size()) >= k) break;
        bool ok = true;
        for (const auto& q : kept) ok = ok && box_iou(boxes[i], q) <= thr;
        if (ok) kept.push_back(boxes[i]);
    }
    return kept;
}

inline std::vector<CropBox> plan(const SaliencyMap& m, const std::vector<WindowSpec>& specs, double thr) {
    std::vector<CropBox> all;
    for (ScaleTag tag : {ScaleTag::large, ScaleTag::medium, ScaleTag::small}) {
        std::vector<CropBox> pool;
        int k = 0;
        for (const auto& s : specs) {
            if (s.scale != tag) continue;
            k = s.k;
            for (const auto& b : enumerate(m, s)) pool.push_back(b);
        }
        for (const auto& b : greedy_nms(pool, k, thr)) all.push_back(b);
    }
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (all[i].score != all[j].score) return all[i].score > all[j].score;
        return i < j;
    });
    std::vector<CropBox> out;
    for (std::size_t i : idx) out.push_back(all[i]);
    return out;
}

// Indices of the kept pixels: rank every pixel by (value desc, index asc).
inline std::vector<std::uint8_t> keep(const SaliencyMap& m, double percent) {
    const std::size_t n = m.pixel_count();
    const auto count = static_cast<std::size_t>(std::floor(percent * static_cast<double>(n) / 100.0 + 0.5));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto v = m.values();
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
    std::vector<std::uint8_t> kept(n, 0);
    for (std::size_t i = 0; i < count; ++i) kept[idx[i]] = 1;
    return kept;
}

inline double sauc_pairs(const SaliencyMap& c, const std::vector<PixelLocation>& pos,
                         const std::vector<PixelLocation>& neg) {
    double credit = 0.0;
    for (const auto& p : pos) {
        for (const auto& q : neg) {
            const double a = c.at(p.x, p.y);
            const double b = c.at(q.x, q.y);
            if (a > b) credit += 1.0;
            else if (a == b) credit += 0.5;
        }
    }
    return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    long double ma = 0;
    long double mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    long double sab = 0;
    long double saa = 0;
    long double sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return static_cast<double>(sab / std::sqrt(saa * sbb));
}

// Ranks by counting: rank = 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0;
        double equal = 0;
        for (double w : v) {
            if (w < v[i]) less += 1;
            else if (w == v[i]) equal += 1;
        }
        r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
}

inline std::vector<std::int64_t> differing_pairs(const std::vector<AttributeVector>& a,
                                                 const std::vector<AttributeVector>& b) {
    std::vector<std::int64_t> counts(a.front().size(), 0);
    for (const auto& x : a) {
        for (const auto& y : b) {
            for (std::size_t j = 0; j < x.size(); ++j) counts[j] += x[j] != y[j] ? 1 : 0;
        }
    }
    return counts;
}

inline int best_part(const std::vector<std::int64_t>& counts, const std::map<int, int>& attr_to_part, int parts) {
    std::vector<std::int64_t> sums(parts, 0);
    for (std::size_t j = 0; j < counts.size(); ++j) sums[attr_to_part.at(static_cast<int>(j))] += counts[j];
    int best = 0;
    for (int p = 1; p < parts; ++p) {
        if (sums[p] > sums[best]) best = p;
    }
    return best;
}

inline std::map<int, double> part_durations(const std::vector<Fixation>& fix, const std::vector<PartCenter>& centers) {
    std::map<int, double> out;
    for (const auto& f : fix) {
        int best = -1;
        double best_d = 0;
        for (const auto& c : centers) {
            const double d = (f.x - c.x) * (f.x - c.x) + (f.y - c.y) * (f.y - c.y);
            if (best < 0 || d < best_d || (d == best_d && c.part < best)) {
                best = c.part;
                best_d = d;
            }
        }
        out[best] += f.duration_ms;
    }
    return out;
}

// An image hits at k when fewer than k fixated parts outrank the ground truth.
inline bool hits(const std::map<int, double>& durations, int truth, int k) {
    auto it = durations.find(truth);
    if (it == durations.end()) return false;
    int ahead = 0;
    for (const auto& [p, d] : durations) {
        if (d > it->second || (d == it->second && p < truth)) ++ahead;
    }
    return ahead < k;
}

inline double gaussian_sum(const std::vector<Fixation>& fix, double sigma, double x, double y) {
    double s = 0.0;
    for (const auto& f : fix) {
        const double d2 = (x - f.x) * (x - f.x) + (y - f.y) * (y - f.y);
        s += f.duration_ms * std::exp(-d2 / (2.0 * sigma * sigma));
    }
    return s;
}

inline SaliencyMap random_integer_map(std::mt19937_64& rng, int w, int h, int levels) {
    std::uniform_int_distribution<int> d(0, levels - 1);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = d(rng);
    return SaliencyMap(w, h, std::move(v));
}

inline SaliencyMap random_real_map(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = d(rng);
    return SaliencyMap(w, h, std::move(v));
}

}  // namespace oracle
