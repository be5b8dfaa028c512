#include "gazekit/kar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "gazekit/error.hpp"
#include "gazekit/kernels.hpp"

namespace gazekit {

// ---- masks --------------------------------------------------------------

std::size_t KeepMask::kept_count() const {
    return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), std::uint8_t{1}));
}

std::size_t keep_count(double percent, std::size_t pixels) {
    const double exact = percent * static_cast<double>(pixels) / 100.0;
    return std::min(pixels, static_cast<std::size_t>(std::floor(exact + 0.5)));
}

KeepMask keep_mask(const SaliencyMap& map, double percent) {
    if (map.empty()) throw ShapeError("keep mask of an empty map");
    if (!(percent > 0.0 && percent <= 100.0)) {
        throw DomainError("keep percent must lie in (0, 100], got " + std::to_string(percent));
    }
    const std::size_t n = map.pixel_count();
    const std::size_t count = keep_count(percent, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto values = map.values();
    auto by_rank = [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), by_rank);

    KeepMask mask{map.width(), map.height(), std::vector<std::uint8_t>(n, 0), percent};
    for (std::size_t i = 0; i < count; ++i) mask.kept[order[i]] = 1;
    return mask;
}

RasterImage apply_mask(const RasterImage& image, const KeepMask& mask) {
    if (image.width() != mask.width || image.height() != mask.height) {
        throw ShapeError("mask " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                         " does not match image " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()));
    }
    RasterImage out(image.width(), image.height(), image.channels(), 0.0);
    const int c = image.channels();
    auto src = image.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < mask.kept.size(); ++i) {
        if (!mask.kept[i]) continue;
        for (int k = 0; k < c; ++k) dst[i * c + k] = src[i * c + k];
    }
    return out;
}

// ---- classifier ---------------------------------------------------------

void TrainConfig::validate() const {
    if (epochs <= 0 || !(learning_rate > 0.0) || !(lr_decay_factor > 0.0) || lr_decay_every <= 0 ||
        batch_size <= 0 || feature_dim <= 0) {
        throw ConfigError("training config values must all be positive");
    }
}

double TrainConfig::learning_rate_at(int epoch) const {
    return learning_rate * std::pow(lr_decay_factor, epoch / lr_decay_every);
}

ToyClassifier::ToyClassifier(ToyMode mode, Size2 input_size, int channels, int feature_dim, int num_classes)
    : mode_(mode), input_size_(input_size), channels_(channels), d_o_(feature_dim),
      d_g_(mode == ToyMode::fusion ? feature_dim : 0), classes_(num_classes),
      inputs_(static_cast<std::size_t>(input_size.width) * input_size.height * channels) {
    if (input_size.width <= 0 || input_size.height <= 0) throw ShapeError("classifier input size must be positive");
    if (channels != 1 && channels != 3) throw ShapeError("classifier input must have 1 or 3 channels");
    if (feature_dim <= 0) throw ConfigError("feature dimension must be positive");
    if (num_classes < 2) throw TrainingError("classifier needs at least two classes");
    params_.assign(layout().total, 0.0);
}

ToyClassifier::Layout ToyClassifier::layout() const {
    Layout l{};
    const std::size_t p = inputs_;
    l.w_o = 0;
    l.b_o = l.w_o + static_cast<std::size_t>(d_o_) * p;
    l.w_g = l.b_o + d_o_;
    l.b_g = l.w_g + static_cast<std::size_t>(d_g_) * p;
    l.w_h = l.b_g + d_g_;
    l.b_h = l.w_h + static_cast<std::size_t>(classes_) * (d_o_ + d_g_);
    l.total = l.b_h + classes_;
    return l;
}

void ToyClassifier::initialize(std::mt19937_64& rng) {
    const auto l = layout();
    std::fill(params_.begin(), params_.end(), 0.0);
    std::normal_distribution<double> in_dist(0.0, 1.0 / std::sqrt(static_cast<double>(inputs_)));
    for (std::size_t i = l.w_o; i < l.b_o; ++i) params_[i] = in_dist(rng);
    for (std::size_t i = l.w_g; i < l.b_g; ++i) params_[i] = in_dist(rng);
    std::normal_distribution<double> head_dist(0.0, 1.0 / std::sqrt(static_cast<double>(d_o_ + d_g_)));
    for (std::size_t i = l.w_h; i < l.b_h; ++i) params_[i] = head_dist(rng);
}

void ToyClassifier::check_example(const TrainingExample& ex) const {
    if (ex.image.size() != input_size_ || ex.image.channels() != channels_) {
        throw ShapeError("example shape does not match classifier input " + std::to_string(input_size_.width) +
                         "x" + std::to_string(input_size_.height) + "x" + std::to_string(channels_));
    }
    if (mode_ == ToyMode::fusion) {
        if (!ex.companion) throw ShapeError("fusion mode requires an attention-weighted companion image");
        if (ex.companion->size() != input_size_ || ex.companion->channels() != channels_) {
            throw ShapeError("companion image shape does not match classifier input");
        }
    } else if (ex.companion) {
        throw ShapeError("baseline mode does not take companion images");
    }
}

void ToyClassifier::features(const TrainingExample& ex, std::vector<double>& h) const {
    const auto l = layout();
    const std::span<const double> p(params_);
    h.resize(static_cast<std::size_t>(d_o_ + d_g_));
    for (int j = 0; j < d_o_; ++j) {
        h[j] = kernels::dot(p.subspan(l.w_o + j * inputs_, inputs_), ex.image.values()) + p[l.b_o + j];
    }
    for (int j = 0; j < d_g_; ++j) {
        h[d_o_ + j] = kernels::dot(p.subspan(l.w_g + j * inputs_, inputs_), ex.companion->values()) + p[l.b_g + j];
    }
}

std::vector<double> ToyClassifier::logits(const TrainingExample& ex) const {
    check_example(ex);
    const auto l = layout();
    const std::span<const double> p(params_);
    const std::size_t d = static_cast<std::size_t>(d_o_ + d_g_);
    std::vector<double> h;
    features(ex, h);
    std::vector<double> z(classes_);
    for (int c = 0; c < classes_; ++c) z[c] = kernels::dot(p.subspan(l.w_h + c * d, d), h) + p[l.b_h + c];
    return z;
}

int ToyClassifier::predict(const TrainingExample& ex) const {
    const auto z = logits(ex);
    // max_element returns the first maximum, i.e. the smallest class index.
    return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

namespace {

// Softmax in place; returns log-sum-exp.
double softmax(std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (auto& v : z) {
        v = std::exp(v - m);
        s += v;
    }
    for (auto& v : z) v /= s;
    return m + std::log(s);
}

}  // namespace

double ToyClassifier::loss_and_gradient(std::span<const TrainingExample> batch, std::span<double> grad) const {
    std::vector<std::size_t> all(batch.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return loss_and_gradient(batch, all, grad);
}

double ToyClassifier::loss_and_gradient(std::span<const TrainingExample> data, std::span<const std::size_t> indices,
                                        std::span<double> grad) const {
    if (indices.empty()) throw DomainError("empty batch");
    if (grad.size() != params_.size()) throw ShapeError("gradient buffer size does not match parameters");
    const auto l = layout();
    const std::span<const double> p(params_);
    const std::size_t d = static_cast<std::size_t>(d_o_ + d_g_);
    std::fill(grad.begin(), grad.end(), 0.0);

    std::vector<double> h;
    std::vector<double> z(classes_);
    std::vector<double> dh(d);
    double total = 0.0;
    for (std::size_t idx : indices) {
        const auto& ex = data[idx];
        check_example(ex);
        if (ex.label < 0 || ex.label >= classes_) throw DomainError("label outside classifier range");
        features(ex, h);
        for (int c = 0; c < classes_; ++c) z[c] = kernels::dot(p.subspan(l.w_h + c * d, d), h) + p[l.b_h + c];
        const double zy = z[ex.label];
        const double lse = softmax(z);
        total += lse - zy;

        z[ex.label] -= 1.0;  // dz = softmax - onehot
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int c = 0; c < classes_; ++c) {
            kernels::axpy(z[c], h, grad.subspan(l.w_h + c * d, d));
            grad[l.b_h + c] += z[c];
            kernels::axpy(z[c], p.subspan(l.w_h + c * d, d), dh);
        }
        for (int j = 0; j < d_o_; ++j) {
            kernels::axpy(dh[j], ex.image.values(), grad.subspan(l.w_o + j * inputs_, inputs_));
            grad[l.b_o + j] += dh[j];
        }
        for (int j = 0; j < d_g_; ++j) {
            kernels::axpy(dh[d_o_ + j], ex.companion->values(), grad.subspan(l.w_g + j * inputs_, inputs_));
            grad[l.b_g + j] += dh[d_o_ + j];
        }
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    kernels::scale(inv, grad);
    return total * inv;
}

double ToyClassifier::loss(std::span<const TrainingExample> batch) const {
    if (batch.empty()) throw DomainError("empty batch");
    double total = 0.0;
    for (const auto& ex : batch) {
        auto z = logits(ex);
        const double zy = z.at(ex.label);
        total += softmax(z) - zy;
    }
    return total / static_cast<double>(batch.size());
}

ToyClassifier train_toy(std::span<const TrainingExample> train, const TrainConfig& config, ToyMode mode) {
    config.validate();
    if (train.empty()) throw TrainingError("empty training set");
    int max_label = -1;
    std::vector<int> seen;
    for (const auto& ex : train) {
        if (ex.label < 0) throw TrainingError("negative class label");
        max_label = std::max(max_label, ex.label);
        if (std::find(seen.begin(), seen.end(), ex.label) == seen.end()) seen.push_back(ex.label);
    }
    if (seen.size() < 2) throw TrainingError("training set contains a single class");

    const auto& first = train.front().image;
    ToyClassifier model(mode, first.size(), first.channels(), config.feature_dim, max_label + 1);
    std::mt19937_64 rng(config.seed);
    model.initialize(rng);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(model.parameters().size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double lr = config.learning_rate_at(epoch);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            const double l = model.loss_and_gradient(train, batch, grad);
            epoch_loss += l * static_cast<double>(end - start);
            kernels::axpy(-lr, grad, model.parameters());
        }
        if (!std::isfinite(epoch_loss)) throw DivergenceError("training loss is not finite", epoch + 1);
    }
    return model;
}

double evaluate(const ToyClassifier& model, std::span<const TrainingExample> test) {
    if (test.empty()) throw DomainError("cannot evaluate on an empty test set");
    std::size_t correct = 0;
    for (const auto& ex : test) correct += model.predict(ex) == ex.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

// ---- curves -------------------------------------------------------------

double curve_auc(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("AUC needs at least two points");
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double dx = (points[i].first - points[i - 1].first) / 100.0;
        if (!(dx > 0.0)) throw DomainError("AUC percents must strictly increase");
        area += dx * (points[i].second + points[i - 1].second) / 2.0;
    }
    return area / ((points.back().first - points.front().first) / 100.0);
}

namespace {

std::vector<TrainingExample> masked_set(std::span<const LabeledImage> images, std::span<const SaliencyMap> maps,
                                        double percent) {
    std::vector<TrainingExample> out;
    out.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        out.push_back({apply_mask(images[i].image, keep_mask(maps[i], percent)), images[i].label, std::nullopt});
    }
    return out;
}

KarPoint run_point(const KarDataset& data, double percent, const TrainConfig& config) {
    KarPoint point{percent, 0.0, std::nullopt};
    try {
        const auto train = masked_set(data.train, data.train_maps, percent);
        const auto test = masked_set(data.test, data.test_maps, percent);
        const auto model = train_toy(train, config, ToyMode::baseline);
        point.accuracy = evaluate(model, test);
    } catch (const Error& e) {
        point.error = e.code() + ": " + e.what();
    } catch (const std::exception& e) {
        point.error = std::string("internal: ") + e.what();
    }
    return point;
}

}  // namespace

KarCurve kar_run(const KarDataset& data, std::span<const double> percents, const TrainConfig& config, int workers) {
    config.validate();
    if (data.train.size() != data.train_maps.size() || data.test.size() != data.test_maps.size()) {
        throw SchemaError("KAR needs exactly one saliency map per image");
    }
    if (data.train.empty() || data.test.empty()) throw DomainError("KAR needs non-empty train and test sets");
    if (percents.empty()) throw DomainError("KAR needs at least one percent");
    for (std::size_t i = 0; i < percents.size(); ++i) {
        if (!(percents[i] > 0.0 && percents[i] <= 100.0)) throw DomainError("KAR percents must lie in (0, 100]");
        if (i > 0 && !(percents[i] > percents[i - 1])) throw DomainError("KAR percents must strictly increase");
    }

    KarCurve curve;
    curve.points.resize(percents.size());
    const int threads = std::clamp(workers, 1, static_cast<int>(percents.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < percents.size(); ++i) curve.points[i] = run_point(data, percents[i], config);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < percents.size(); i = next++) {
                    curve.points[i] = run_point(data, percents[i], config);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<std::pair<double, double>> ok;
    for (const auto& p : curve.points) {
        if (!p.error) ok.emplace_back(p.percent, p.accuracy);
    }
    if (ok.size() >= 2) {
        curve.auc = curve_auc(ok);
    } else if (ok.size() == 1) {
        curve.auc = ok.front().second;
    }
    return curve;
}

}  // namespace gazekit
