#include "icd/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "icd/errors.hpp"
#include "icd/kmeans.hpp"
#include "icd/metrics.hpp"
#include "icd/text.hpp"

namespace icd {

const char* to_string(Variant v) { return v == Variant::Modularity ? "icd-m" : "icd-c"; }

const char* to_string(ValidationMetric m) {
  return m == ValidationMetric::Nmi ? "nmi" : "modularity";
}

Variant parse_variant(const std::string& s) {
  if (s == "icd-m" || s == "m" || s == "modularity") return Variant::Modularity;
  if (s == "icd-c" || s == "c" || s == "ncut") return Variant::Ncut;
  throw InputError("unknown variant '" + s + "' (expected icd-m or icd-c)");
}

ValidationMetric parse_validation_metric(const std::string& s) {
  if (s == "nmi") return ValidationMetric::Nmi;
  if (s == "modularity") return ValidationMetric::Modularity;
  throw InputError("unknown validation metric '" + s + "'");
}

void TrainConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0) throw InputError("alpha and beta must be non-negative");
  if (samples_per_epoch < 1 || updates_per_sample < 1 || epochs < 1) {
    throw InputError("p, m and n must all be at least 1");
  }
  if (lr_generator <= 0.0 || lr_discriminator <= 0.0) {
    throw InputError("learning rates must be positive");
  }
  if (generator_widths.size() < 2) throw InputError("generator needs at least one layer");
  if (discriminator_widths.size() < 2) throw InputError("discriminator needs at least one layer");
  for (int w : generator_widths) {
    if (w < 1) throw InputError("layer widths must be positive");
  }
  for (int w : discriminator_widths) {
    if (w < 1) throw InputError("layer widths must be positive");
  }
  if (discriminator_widths.front() != embedding_dim()) {
    throw InputError("discriminator input width must equal the embedding dimension");
  }
  if (discriminator_widths.back() != 1) throw InputError("discriminator must end in width 1");
  if (kmeans_restarts < 1) throw InputError("k-means restarts must be at least 1");
}

std::string format_config(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "variant = " << to_string(cfg.variant) << '\n'
      << "alpha = " << format_double(cfg.alpha) << '\n'
      << "beta = " << format_double(cfg.beta) << '\n'
      << "p = " << cfg.samples_per_epoch << '\n'
      << "m = " << cfg.updates_per_sample << '\n'
      << "n = " << cfg.epochs << '\n'
      << "lr_g = " << format_double(cfg.lr_generator) << '\n'
      << "lr_d = " << format_double(cfg.lr_discriminator) << '\n'
      << "generator_widths = " << join_ints(cfg.generator_widths) << '\n'
      << "discriminator_widths = " << join_ints(cfg.discriminator_widths) << '\n'
      << "validation = " << to_string(cfg.validation) << '\n'
      << "kmeans_restarts = " << cfg.kmeans_restarts << '\n'
      << "constant_features = " << (cfg.constant_features ? "true" : "false") << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

void apply_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(value);
  } else if (key == "beta") {
    cfg.beta = parse_double(value);
  } else if (key == "p") {
    cfg.samples_per_epoch = static_cast<int>(parse_int(value));
  } else if (key == "m") {
    cfg.updates_per_sample = static_cast<int>(parse_int(value));
  } else if (key == "n") {
    cfg.epochs = static_cast<int>(parse_int(value));
  } else if (key == "lr_g") {
    cfg.lr_generator = parse_double(value);
  } else if (key == "lr_d") {
    cfg.lr_discriminator = parse_double(value);
  } else if (key == "generator_widths") {
    cfg.generator_widths = parse_ints(value);
  } else if (key == "discriminator_widths") {
    cfg.discriminator_widths = parse_ints(value);
  } else if (key == "validation") {
    cfg.validation = parse_validation_metric(value);
  } else if (key == "kmeans_restarts") {
    cfg.kmeans_restarts = static_cast<int>(parse_int(value));
  } else if (key == "constant_features") {
    cfg.constant_features = parse_bool(value);
  } else if (key == "seed") {
    cfg.seed = parse_uint(value);
  } else {
    throw FormatError("unknown config key '" + key + "'");
  }
}

TrainConfig parse_config(const std::string& text, TrainConfig base) {
  for (const auto& [key, value] : parse_key_values(text)) apply_config_entry(base, key, value);
  return base;
}

// ---------------------------------------------------------------------------

Generator::Generator(const std::vector<int>& widths, nn::Rng& rng) {
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers_.push_back({nn::xavier_init(widths[l], widths[l + 1], rng)});
  }
}

std::vector<MatrixXd*> Generator::parameters() {
  std::vector<MatrixXd*> out;
  for (auto& layer : layers_) out.push_back(&layer.weight);
  return out;
}

MatrixXd Generator::encode(const nn::Propagation& prop, const MatrixXd& z,
                           std::vector<nn::LayerCache>* caches) const {
  if (layers_.empty()) throw StateError("generator has no layers");
  if (z.cols() != layers_.front().weight.rows()) {
    throw InputError("feature width " + std::to_string(z.cols()) + " does not match L = " +
                     std::to_string(layers_.front().weight.rows()));
  }
  if (caches != nullptr) caches->assign(layers_.size(), {});
  MatrixXd f = z;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    f = layers_[l].forward(prop, f, caches != nullptr ? &(*caches)[l] : nullptr);
  }
  return f;
}

void Generator::backward(const nn::Propagation& prop, const std::vector<nn::LayerCache>& caches,
                         const MatrixXd& grad_embedding, std::vector<MatrixXd>& grads) const {
  if (caches.size() != layers_.size()) throw StateError("generator backward without forward");
  grads.resize(layers_.size());
  MatrixXd upstream = grad_embedding;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    upstream = layers_[l].backward(prop, caches[l], upstream, grads[l]);
  }
}

Discriminator::Discriminator(const std::vector<int>& widths, nn::Rng& rng) {
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    nn::DenseLayer layer;
    layer.weight = nn::xavier_init(widths[l], widths[l + 1], rng);
    layer.bias = MatrixXd::Zero(1, widths[l + 1]);
    layer.activation = l + 2 == widths.size() ? nn::Activation::Sigmoid : nn::Activation::Relu;
    layers_.push_back(std::move(layer));
  }
}

std::vector<MatrixXd*> Discriminator::parameters() {
  std::vector<MatrixXd*> out;
  for (auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

VectorXd Discriminator::forward(const MatrixXd& s, std::vector<nn::LayerCache>* caches) const {
  if (caches != nullptr) caches->assign(layers_.size(), {});
  MatrixXd p = s;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    p = layers_[l].forward(p, caches != nullptr ? &(*caches)[l] : nullptr);
  }
  return p.col(0);
}

MatrixXd Discriminator::backward(const std::vector<nn::LayerCache>& caches,
                                 const VectorXd& grad_output, std::vector<MatrixXd>* grads) const {
  if (caches.size() != layers_.size()) throw StateError("discriminator backward without forward");
  std::vector<MatrixXd> scratch;
  std::vector<MatrixXd>& acc = grads != nullptr ? *grads : scratch;
  acc.resize(2 * layers_.size());
  MatrixXd upstream = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    upstream = layers_[l].backward(caches[l], upstream, acc[2 * l], acc[2 * l + 1]);
  }
  return upstream;
}

// ---------------------------------------------------------------------------

namespace {

double clamp_probability(double y) {
  return std::clamp(y, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

bool clamped(double y) { return y < kProbabilityClamp || y > 1.0 - kProbabilityClamp; }

}  // namespace

double loss_d(const VectorXd& y_embedding, const VectorXd& y_label_induced) {
  if (y_embedding.size() != y_label_induced.size()) {
    throw InputError("discriminator outputs differ in length");
  }
  double total = 0.0;
  for (Index i = 0; i < y_embedding.size(); ++i) {
    total += std::log(1.0 - clamp_probability(y_embedding[i]));
    total += std::log(clamp_probability(y_label_induced[i]));
  }
  return -total / static_cast<double>(y_embedding.size());
}

void loss_d_grad(const VectorXd& y_embedding, const VectorXd& y_label_induced,
                 VectorXd& grad_embedding, VectorXd& grad_label_induced) {
  const double n = static_cast<double>(y_embedding.size());
  grad_embedding.resize(y_embedding.size());
  grad_label_induced.resize(y_label_induced.size());
  for (Index i = 0; i < y_embedding.size(); ++i) {
    const double a = y_embedding[i], b = y_label_induced[i];
    grad_embedding[i] = clamped(a) ? 0.0 : 1.0 / ((1.0 - a) * n);
    grad_label_induced[i] = clamped(b) ? 0.0 : -1.0 / (b * n);
  }
}

double loss_al(const VectorXd& y_embedding) {
  double total = 0.0;
  for (Index i = 0; i < y_embedding.size(); ++i) total += std::log(clamp_probability(y_embedding[i]));
  return -total / static_cast<double>(y_embedding.size());
}

VectorXd loss_al_grad(const VectorXd& y_embedding) {
  const double n = static_cast<double>(y_embedding.size());
  VectorXd g(y_embedding.size());
  for (Index i = 0; i < y_embedding.size(); ++i) {
    g[i] = clamped(y_embedding[i]) ? 0.0 : -1.0 / (y_embedding[i] * n);
  }
  return g;
}

double loss_fr(const MatrixXd& u, const MatrixXd& x) {
  if (x.rows() != u.rows() || x.cols() != u.rows()) throw InputError("FR target must be N x N");
  return (decode(u) - x).squaredNorm();
}

double loss_cr(const MatrixXd& u, const MatrixXd& h) {
  if (h.rows() != u.rows()) throw InputError("indicator rows must match embedding rows");
  return -(h.transpose() * decode(u) * h).trace();
}

double reconstruction_terms(const MatrixXd& u, const MatrixXd& x, const MatrixXd& hht,
                            double alpha, double beta, MatrixXd* grad_u) {
  const MatrixXd xt = decode(u);
  const MatrixXd diff = xt - x;
  const double value = alpha * diff.squaredNorm() - beta * xt.cwiseProduct(hht).sum();
  if (grad_u != nullptr) {
    const MatrixXd d_xt = 2.0 * alpha * diff - beta * hht;
    const MatrixXd d_s = (d_xt.array() * (1.0 - xt.array().square())).matrix();
    *grad_u = (d_s + d_s.transpose()) * u;
  }
  return value;
}

FeatureMatrix graph_features(const Graph& g, Variant variant, Index L, bool constant) {
  if (constant) return constant_features(g.num_nodes(), L);
  const StructMatrix x = variant == Variant::Modularity ? modularity_matrix(g) : norm_adj(g);
  return extract_features(g, x, L);
}

TrainingSample prepare_sample(const Graph& g, const Partition& labels, const TrainConfig& cfg) {
  if (labels.num_nodes() != g.num_nodes()) throw InputError("labels do not cover the graph");
  TrainingSample s;
  s.num_nodes = g.num_nodes();
  StructMatrix x = cfg.variant == Variant::Modularity ? modularity_matrix(g) : norm_adj(g);
  s.features = cfg.constant_features ? constant_features(g.num_nodes(), cfg.feature_dim()).values
                                     : extract_features(g, x, cfg.feature_dim()).values;
  s.target = x.to_dense();
  const MatrixXd h = indicator(labels, cfg.variant == Variant::Modularity
                                           ? IndicatorKind::ModularityH
                                           : IndicatorKind::NcutH,
                               &g);
  s.hht = h * h.transpose();
  s.graph_prop = nn::Propagation::from_graph(g);
  s.label_prop = nn::Propagation::from_labels(LabelInducedGraph(labels));
  return s;
}

// ---------------------------------------------------------------------------

IcdModel::IcdModel(const TrainConfig& cfg, nn::Rng& rng) : config_(cfg) {
  cfg.validate();
  generator_ = Generator(cfg.generator_widths, rng);
  discriminator_ = Discriminator(cfg.discriminator_widths, rng);
}

MatrixXd IcdModel::embed(const TrainingSample& s) const {
  return generator_.encode(s.graph_prop, s.features);
}

MatrixXd IcdModel::embed_label_induced(const TrainingSample& s) const {
  return generator_.encode(s.label_prop, s.features);
}

LossValues IcdModel::losses(const TrainingSample& s) const {
  const MatrixXd u = embed(s);
  const MatrixXd ug = embed_label_induced(s);
  const VectorXd y = discriminator_.forward(u);
  const VectorXd yg = discriminator_.forward(ug);
  LossValues out;
  out.d = loss_d(y, yg);
  out.al = loss_al(y);
  const MatrixXd xt = decode(u);
  out.fr = (xt - s.target).squaredNorm();
  out.cr = -xt.cwiseProduct(s.hht).sum();
  out.g = out.al + config_.alpha * out.fr + config_.beta * out.cr;
  return out;
}

double IcdModel::discriminator_gradient(const TrainingSample& s,
                                        std::vector<MatrixXd>& grads) const {
  const MatrixXd u = embed(s);
  const MatrixXd ug = embed_label_induced(s);
  std::vector<nn::LayerCache> cache_u, cache_g;
  const VectorXd y = discriminator_.forward(u, &cache_u);
  const VectorXd yg = discriminator_.forward(ug, &cache_g);
  VectorXd grad_y, grad_yg;
  loss_d_grad(y, yg, grad_y, grad_yg);
  grads.clear();
  discriminator_.backward(cache_u, grad_y, &grads);
  discriminator_.backward(cache_g, grad_yg, &grads);
  return loss_d(y, yg);
}

double IcdModel::generator_gradient(const TrainingSample& s, std::vector<MatrixXd>& grads) const {
  std::vector<nn::LayerCache> gen_cache, disc_cache;
  const MatrixXd u = generator_.encode(s.graph_prop, s.features, &gen_cache);
  const VectorXd y = discriminator_.forward(u, &disc_cache);
  MatrixXd grad_u = discriminator_.backward(disc_cache, loss_al_grad(y), nullptr);
  MatrixXd grad_rec;
  const double rec =
      reconstruction_terms(u, s.target, s.hht, config_.alpha, config_.beta, &grad_rec);
  grad_u += grad_rec;
  grads.clear();
  generator_.backward(s.graph_prop, gen_cache, grad_u, grads);
  return loss_al(y) + rec;
}

double IcdModel::discriminator_loss_generator_gradient(const TrainingSample& s,
                                                       std::vector<MatrixXd>& grads) const {
  std::vector<nn::LayerCache> cache_u, cache_g, disc_u, disc_g;
  const MatrixXd u = generator_.encode(s.graph_prop, s.features, &cache_u);
  const MatrixXd ug = generator_.encode(s.label_prop, s.features, &cache_g);
  const VectorXd y = discriminator_.forward(u, &disc_u);
  const VectorXd yg = discriminator_.forward(ug, &disc_g);
  VectorXd grad_y, grad_yg;
  loss_d_grad(y, yg, grad_y, grad_yg);
  grads.clear();
  generator_.backward(s.graph_prop, cache_u, discriminator_.backward(disc_u, grad_y, nullptr),
                      grads);
  generator_.backward(s.label_prop, cache_g, discriminator_.backward(disc_g, grad_yg, nullptr),
                      grads);
  return loss_d(y, yg);
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

InferenceResult infer(const IcdModel& model, const Graph& g, int k, std::uint64_t seed) {
  if (k < 1 || k > g.num_nodes()) {
    throw InputError("K = " + std::to_string(k) + " must lie in [1, N = " +
                     std::to_string(g.num_nodes()) + "]");
  }
  const TrainConfig& cfg = model.config();
  InferenceResult result;

  auto start = Clock::now();
  const FeatureMatrix z =
      graph_features(g, cfg.variant, cfg.feature_dim(), cfg.constant_features);
  result.timing.features_s = seconds_since(start);

  start = Clock::now();
  const nn::Propagation prop = nn::Propagation::from_graph(g);
  result.embedding = model.generator().encode(prop, z.values);
  result.timing.propagation_s = seconds_since(start);

  start = Clock::now();
  KMeansOptions options;
  options.restarts = cfg.kmeans_restarts;
  options.seed = seed;
  result.partition = kmeans(result.embedding, k, options).labels;
  result.timing.clustering_s = seconds_since(start);
  return result;
}

int LabeledExample::k() const {
  if (communities > 0) return communities;
  if (labels) return labels->num_communities();
  throw InputError("graph has neither labels nor a community count");
}

double validation_score(const IcdModel& model, const std::vector<LabeledExample>& validation,
                        std::uint64_t seed) {
  if (validation.empty()) throw InputError("validation set is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const auto& ex = validation[i];
    const auto res = infer(model, ex.graph, ex.k(), seed + i);
    if (model.config().validation == ValidationMetric::Nmi) {
      if (!ex.labels) throw InputError("NMI validation needs labeled validation graphs");
      total += nmi(*ex.labels, res.partition);
    } else {
      total += modularity_score(ex.graph, res.partition);
    }
  }
  return total / static_cast<double>(validation.size());
}

TrainResult train(const std::vector<LabeledExample>& training,
                  const std::vector<LabeledExample>& validation, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (training.empty()) throw InputError("training set is empty");
  if (validation.empty()) throw InputError("validation set is empty");
  for (const auto& ex : training) {
    if (!ex.labels) throw InputError("every training graph needs labels");
  }

  nn::Rng rng(cfg.seed);
  IcdModel model(cfg, rng);
  const std::uint64_t validation_seed = cfg.seed * 0x9E3779B97F4A7C15ULL + 17;

  TrainResult result;
  EpochReport init;
  init.validation_score = validation_score(model, validation, validation_seed);
  init.improved = true;
  result.history.push_back(init);
  result.checkpoint = {model, init.validation_score, 0};
  if (on_epoch) on_epoch(init, model);

  std::vector<std::optional<TrainingSample>> samples(training.size());
  nn::Adam opt_g(cfg.lr_generator), opt_d(cfg.lr_discriminator);
  std::uniform_int_distribution<std::size_t> pick(0, training.size() - 1);
  std::vector<MatrixXd> grads;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochReport report;
    report.epoch = epoch;
    int updates = 0;
    for (int draw = 0; draw < cfg.samples_per_epoch; ++draw) {
      const std::size_t idx = pick(rng);
      if (!samples[idx]) {
        samples[idx] = prepare_sample(training[idx].graph, *training[idx].labels, cfg);
      }
      const TrainingSample& s = *samples[idx];
      for (int u = 0; u < cfg.updates_per_sample; ++u) {
        const double ld = model.discriminator_gradient(s, grads);
        if (!std::isfinite(ld)) {
          throw TrainingDivergedError(
              "discriminator loss is not finite at epoch " + std::to_string(epoch), epoch);
        }
        opt_d.step(model.discriminator().parameters(), grads);
        const double lg = model.generator_gradient(s, grads);
        if (!std::isfinite(lg)) {
          throw TrainingDivergedError(
              "generator loss is not finite at epoch " + std::to_string(epoch), epoch);
        }
        opt_g.step(model.generator().parameters(), grads);
        report.mean_losses.d += ld;
        report.mean_losses.g += lg;
        ++updates;
      }
    }
    report.mean_losses.d /= updates;
    report.mean_losses.g /= updates;
    report.validation_score = validation_score(model, validation, validation_seed);
    if (report.validation_score > result.checkpoint.best_score) {
      result.checkpoint = {model, report.validation_score, epoch};
      report.improved = true;
    }
    result.history.push_back(report);
    if (on_epoch) on_epoch(report, model);
  }
  return result;
}

}  // namespace icd
