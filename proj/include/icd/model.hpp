#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icd/coarsen.hpp"
#include "icd/eigen_types.hpp"
#include "icd/graph.hpp"
#include "icd/nn.hpp"
#include "icd/partition.hpp"
#include "icd/structure.hpp"

namespace icd {

// ICD-M uses the modularity matrix as features and the binary indicator in
// the clustering term; ICD-C uses the normalized adjacency and the
// degree-weighted indicator.
enum class Variant { Modularity, Ncut };
enum class ValidationMetric { Nmi, Modularity };

const char* to_string(Variant v);
const char* to_string(ValidationMetric m);
Variant parse_variant(const std::string& s);
ValidationMetric parse_validation_metric(const std::string& s);

// Clamp applied to discriminator outputs before taking logs.
inline constexpr double kProbabilityClamp = 1e-7;

struct TrainConfig {
  Variant variant = Variant::Modularity;
  double alpha = 1.0;
  double beta = 1.0;
  int samples_per_epoch = 20;  // p
  int updates_per_sample = 1;  // m
  int epochs = 30;             // n
  double lr_generator = 5e-4;
  double lr_discriminator = 5e-4;
  // First entry is the feature dimension L, last the embedding dimension k.
  std::vector<int> generator_widths{256, 128, 64};
  // First entry must equal k, last must be 1.
  std::vector<int> discriminator_widths{64, 32, 16, 1};
  ValidationMetric validation = ValidationMetric::Nmi;
  int kmeans_restarts = 10;
  bool constant_features = false;
  std::uint64_t seed = 1;

  int feature_dim() const { return generator_widths.front(); }
  int embedding_dim() const { return generator_widths.back(); }
  void validate() const;
};

// Key/value text form ("key = value" per line, '#' comments). Unknown keys
// throw FormatError.
std::string format_config(const TrainConfig& cfg);
TrainConfig parse_config(const std::string& text, TrainConfig base = {});
void apply_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value);

// Generator G: a GCN stack shared by the feature encoder and the
// label-induced encoder. Both read the same weight objects.
class Generator {
 public:
  Generator() = default;
  Generator(const std::vector<int>& widths, nn::Rng& rng);

  std::vector<nn::GcnLayer>& layers() { return layers_; }
  const std::vector<nn::GcnLayer>& layers() const { return layers_; }
  std::vector<MatrixXd*> parameters();

  MatrixXd encode(const nn::Propagation& prop, const MatrixXd& z,
                  std::vector<nn::LayerCache>* caches = nullptr) const;
  // Adds dL/dW for every layer into `grads` (sized on first use).
  void backward(const nn::Propagation& prop, const std::vector<nn::LayerCache>& caches,
                const MatrixXd& grad_embedding, std::vector<MatrixXd>& grads) const;

 private:
  std::vector<nn::GcnLayer> layers_;
};

// Discriminator D: ReLU hidden layers and a sigmoid output, one probability
// per embedding row.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const std::vector<int>& widths, nn::Rng& rng);

  std::vector<nn::DenseLayer>& layers() { return layers_; }
  const std::vector<nn::DenseLayer>& layers() const { return layers_; }
  std::vector<MatrixXd*> parameters();  // W0, b0, W1, b1, ...

  VectorXd forward(const MatrixXd& s, std::vector<nn::LayerCache>* caches = nullptr) const;
  // Back-propagates dL/dy. Parameter gradients are added into `grads`
  // when it is non-null; returns dL/dS.
  MatrixXd backward(const std::vector<nn::LayerCache>& caches, const VectorXd& grad_output,
                    std::vector<MatrixXd>* grads) const;

 private:
  std::vector<nn::DenseLayer> layers_;
};

// tanh(U U^T).
template <typename Derived>
MatrixXd decode(const Eigen::MatrixBase<Derived>& u) {
  return (u * u.transpose()).array().tanh().matrix();
}

// Losses over discriminator outputs y (already sigmoid). Gradients with
// respect to y are zero where the clamp is active.
double loss_d(const VectorXd& y_embedding, const VectorXd& y_label_induced);
double loss_al(const VectorXd& y_embedding);
VectorXd loss_al_grad(const VectorXd& y_embedding);
void loss_d_grad(const VectorXd& y_embedding, const VectorXd& y_label_induced,
                 VectorXd& grad_embedding, VectorXd& grad_label_induced);

// ||tanh(U U^T) - X||_F^2.
double loss_fr(const MatrixXd& u, const MatrixXd& x);
// -tr(H^T tanh(U U^T) H).
double loss_cr(const MatrixXd& u, const MatrixXd& h);

// alpha * loss_fr + beta * loss_cr and its gradient in U, given the
// precomputed H H^T.
double reconstruction_terms(const MatrixXd& u, const MatrixXd& x, const MatrixXd& hht,
                            double alpha, double beta, MatrixXd* grad_u);

// Everything one training graph contributes, computed once per graph.
struct TrainingSample {
  Index num_nodes = 0;
  MatrixXd features;  // Z
  MatrixXd target;    // dense X (Q or M)
  MatrixXd hht;       // H H^T for the variant's indicator
  nn::Propagation graph_prop;
  nn::Propagation label_prop;
};

TrainingSample prepare_sample(const Graph& g, const Partition& labels, const TrainConfig& cfg);

// Structural features for inference: X for the variant, then Z.
FeatureMatrix graph_features(const Graph& g, Variant variant, Index L, bool constant = false);

struct LossValues {
  double d = 0.0;
  double al = 0.0;
  double fr = 0.0;
  double cr = 0.0;
  double g = 0.0;
};

class IcdModel {
 public:
  IcdModel() = default;
  IcdModel(const TrainConfig& cfg, nn::Rng& rng);

  const TrainConfig& config() const { return config_; }
  Generator& generator() { return generator_; }
  const Generator& generator() const { return generator_; }
  Discriminator& discriminator() { return discriminator_; }
  const Discriminator& discriminator() const { return discriminator_; }

  // Feature encoder output U and label-induced encoder output U(g).
  MatrixXd embed(const TrainingSample& s) const;
  MatrixXd embed_label_induced(const TrainingSample& s) const;

  // Losses at the current parameters.
  LossValues losses(const TrainingSample& s) const;

  // dL_D / d(delta_D) with the generator held fixed.
  double discriminator_gradient(const TrainingSample& s, std::vector<MatrixXd>& grads) const;
  // dL_G / d(delta_G) with the discriminator held fixed.
  double generator_gradient(const TrainingSample& s, std::vector<MatrixXd>& grads) const;
  // dL_D / d(delta_G) through both encoders; the two branch gradients sum.
  double discriminator_loss_generator_gradient(const TrainingSample& s,
                                               std::vector<MatrixXd>& grads) const;

 private:
  TrainConfig config_;
  Generator generator_;
  Discriminator discriminator_;
};

struct Checkpoint {
  IcdModel model;
  double best_score = 0.0;
  int best_epoch = 0;  // 0 = parameters at initialization
};

// Byte layout: magic "ICDCKPT\0", uint32 version, uint32 length + config
// text, uint32 layer count, then per layer: uint32 length + name,
// uint64 rows, uint64 cols, row-major little-endian float64 values.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct InferenceTiming {
  double features_s = 0.0;
  double propagation_s = 0.0;
  double clustering_s = 0.0;
  double total() const { return features_s + propagation_s + clustering_s; }
};

struct InferenceResult {
  MatrixXd embedding;
  Partition partition;
  InferenceTiming timing;
};

// Online path: features, one pass of the feature encoder, k-means.
InferenceResult infer(const IcdModel& model, const Graph& g, int k, std::uint64_t seed = 0);
inline InferenceResult infer(const Checkpoint& ckpt, const Graph& g, int k,
                             std::uint64_t seed = 0) {
  return infer(ckpt.model, g, k, seed);
}

struct LabeledExample {
  Graph graph;
  std::optional<Partition> labels;
  int communities = 0;  // K for clustering; 0 means take it from `labels`

  int k() const;
};

struct EpochReport {
  int epoch = 0;
  double validation_score = 0.0;
  LossValues mean_losses;  // d and g, averaged over the epoch's updates
  bool improved = false;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochReport> history;  // history[0] is the initialization
};

using EpochCallback = std::function<void(const EpochReport&, const IcdModel&)>;

// Offline training: per epoch, p graphs drawn with replacement from the
// training set, m alternating discriminator/generator updates each, then
// validation with the feature encoder and k-means. Keeps the parameters with
// the best mean validation score, counting the initialization as epoch 0.
// Training graphs need labels; validation graphs need them for NMI.
TrainResult train(const std::vector<LabeledExample>& training,
                  const std::vector<LabeledExample>& validation, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Mean validation score of `model` over `validation`.
double validation_score(const IcdModel& model, const std::vector<LabeledExample>& validation,
                        std::uint64_t seed);

}  // namespace icd
