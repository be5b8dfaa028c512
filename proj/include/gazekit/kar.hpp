#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gazekit/types.hpp"

namespace gazekit {

/// Insertion percentages of the keep-and-retrain sweep.
inline const std::vector<double> kDefaultKarPercents{5, 10, 15, 20, 25, 30, 50, 70, 90};

struct KeepMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> kept;  // row-major, 1 = keep
    double percent = 0.0;

    std::size_t kept_count() const;
};

/// round(percent / 100 * N), half-up.
std::size_t keep_count(double percent, std::size_t pixels);

/// Keeps the top-ranked pixels of the map; equal values rank by row-major
/// index (smaller first). percent must lie in (0, 100].
KeepMask keep_mask(const SaliencyMap& map, double percent);

/// Kept pixels are copied across all channels, the rest zeroed.
RasterImage apply_mask(const RasterImage& image, const KeepMask& mask);

struct TrainConfig {
    int epochs = 30;
    double learning_rate = 0.05;
    double lr_decay_factor = 0.1;
    int lr_decay_every = 20;
    int batch_size = 16;
    std::uint64_t seed = 7;
    int feature_dim = 8;  // per-branch feature width

    void validate() const;
    double learning_rate_at(int epoch) const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class ToyMode { baseline, fusion };

struct TrainingExample {
    RasterImage image;
    int label = 0;
    std::optional<RasterImage> companion;  // attention-weighted copy, fusion mode only
};

/// Per-branch linear feature stage followed by a softmax head over the
/// concatenated features. In baseline mode the attention branch is absent.
///
/// Parameters live in one flat vector, laid out as
///   [W_o (D_o x P) | b_o (D_o) | W_g (D_g x P) | b_g (D_g) | W_h (C x (D_o+D_g)) | b_h (C)]
/// where P is the flattened input length.
class ToyClassifier {
public:
    ToyClassifier(ToyMode mode, Size2 input_size, int channels, int feature_dim, int num_classes);

    ToyMode mode() const { return mode_; }
    Size2 input_size() const { return input_size_; }
    int channels() const { return channels_; }
    int image_features() const { return d_o_; }
    int attention_features() const { return d_g_; }
    int num_classes() const { return classes_; }
    std::size_t input_length() const { return inputs_; }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Gaussian init scaled by 1/sqrt(fan_in); biases zero.
    void initialize(std::mt19937_64& rng);

    std::vector<double> logits(const TrainingExample& example) const;
    int predict(const TrainingExample& example) const;

    /// Mean cross-entropy over the batch; writes d(loss)/d(params) into grad.
    double loss_and_gradient(std::span<const TrainingExample> batch, std::span<double> grad) const;
    /// Same, over the examples data[indices[i]].
    double loss_and_gradient(std::span<const TrainingExample> data, std::span<const std::size_t> indices,
                             std::span<double> grad) const;
    double loss(std::span<const TrainingExample> batch) const;

private:
    struct Layout {
        std::size_t w_o, b_o, w_g, b_g, w_h, b_h, total;
    };
    Layout layout() const;
    void check_example(const TrainingExample& example) const;
    void features(const TrainingExample& example, std::vector<double>& h) const;

    ToyMode mode_;
    Size2 input_size_;
    int channels_;
    int d_o_;
    int d_g_;
    int classes_;
    std::size_t inputs_;
    std::vector<double> params_;
};

/// Mini-batch gradient descent on cross-entropy with step-decay learning
/// rate. Deterministic given config.seed. Throws TrainingError for fewer than
/// two classes and DivergenceError when the epoch loss stops being finite.
ToyClassifier train_toy(std::span<const TrainingExample> train, const TrainConfig& config, ToyMode mode);

/// Fraction of argmax-correct predictions (ties go to the smaller class).
double evaluate(const ToyClassifier& model, std::span<const TrainingExample> test);

struct KarPoint {
    double percent = 0.0;
    double accuracy = 0.0;
    std::optional<std::string> error;  // set when training at this percent failed
};

struct KarCurve {
    std::vector<KarPoint> points;
    double auc = 0.0;
};

/// Trapezoidal area over x = percent / 100, divided by the covered x range so
/// a constant curve integrates to its value.
double curve_auc(std::span<const std::pair<double, double>> points);

struct KarDataset {
    std::vector<LabeledImage> train;
    std::vector<LabeledImage> test;
    std::vector<SaliencyMap> train_maps;
    std::vector<SaliencyMap> test_maps;
};

/// For each percent: mask every train and test image with its own map,
/// retrain a fresh baseline classifier and record test accuracy. Failed
/// points are recorded with an error and left out of the AUC. Percents are
/// evaluated on up to `workers` threads; results do not depend on scheduling.
KarCurve kar_run(const KarDataset& data, std::span<const double> percents, const TrainConfig& config,
                 int workers = 1);

}  // namespace gazekit
