#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icd/graph.hpp"
#include "icd/model.hpp"
#include "icd/partition.hpp"
#include "icd/synthgen.hpp"

namespace icd {

enum class SplitTag { Train, Validation, Test };

const char* to_string(SplitTag t);
SplitTag parse_split_tag(const std::string& s);

struct DatasetEntry {
  std::filesystem::path graph_path;  // relative to the manifest directory
  Index num_nodes = 0;
  Index num_edges = 0;
  int communities = 0;  // 0 when unknown
  SplitTag split = SplitTag::Train;
};

// Half-open index range into the entry list.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Graph collection split by position: first 80% train, next 10%
// validation, last 10% test.
class DatasetSplit {
 public:
  DatasetSplit() = default;
  // Tags entries by position and remembers `root` for resolving paths.
  static DatasetSplit by_position(std::vector<DatasetEntry> entries,
                                  std::filesystem::path root = {});

  const std::vector<DatasetEntry>& entries() const { return entries_; }
  const std::filesystem::path& root() const { return root_; }
  IndexRange train() const { return train_; }
  IndexRange validation() const { return validation_; }
  IndexRange test() const { return test_; }

  std::filesystem::path graph_path(std::size_t i) const;
  // Ground-truth labels shipped with the graph.
  std::filesystem::path truth_labels_path(std::size_t i) const;
  // Labels synthesized by a baseline for training.
  std::filesystem::path pseudo_labels_path(std::size_t i) const;

 private:
  std::vector<DatasetEntry> entries_;
  std::filesystem::path root_;
  IndexRange train_, validation_, test_;
};

// Boundaries {train_end, validation_end} of an 80/10/10 split of `count`.
std::pair<std::size_t, std::size_t> split_boundaries(std::size_t count);

// Manifest: one "path N |E| K split" line per graph, '#' comments.
// Tags are recomputed from position on load; a stored tag that disagrees
// throws FormatError.
void write_manifest(std::ostream& out, const DatasetSplit& split);
void write_manifest(const std::filesystem::path& path, const DatasetSplit& split);
DatasetSplit read_manifest(std::istream& in, std::filesystem::path root = {});
DatasetSplit read_manifest(const std::filesystem::path& path);

// Writes graph_%04d.edges and graph_%04d.labels files plus manifest.txt.
DatasetSplit write_dataset(const std::filesystem::path& dir,
                           const std::vector<LabeledGraph>& graphs);
// Builds a split over the *.edges files already present in `dir`, sorted by
// name, and writes manifest.txt.
DatasetSplit index_dataset(const std::filesystem::path& dir);

enum class LabelSource { Truth, Pseudo };

// Loads graphs of `range`, attaching labels from `source` when the file
// exists.
std::vector<LabeledExample> load_examples(const DatasetSplit& split, IndexRange range,
                                          LabelSource source);

enum class QualityKind { Nmi, Accuracy, Modularity, Ncut };

const char* to_string(QualityKind k);

// Trade-off score: normalized quality times normalized efficiency
// (E_m - E) / E_m. Quality is Q for NMI/AC, (Q + 1) / 2 for modularity and
// (Q_m - Q) / Q_m for NCut (q_max is ignored for the other kinds).
// Throws DegenerateError when E_m (or Q_m for NCut) is zero, InputError when
// E > E_m or an NCut exceeds Q_m.
double tos(double q, QualityKind kind, double e, double e_max, double q_max = 0.0);

// Spectral baseline: K eigenvectors of L with the smallest eigenvalues,
// rows clustered by k-means. Throws CapabilityError above `max_nodes`.
inline constexpr Index kSpectralMaxNodes = 6000;
Partition baseline_spectral(const Graph& g, int k, std::uint64_t seed = 0,
                            Index max_nodes = kSpectralMaxNodes);

// Agglomerative modularity maximization down to exactly K communities.
// Non-adjacent pairs may merge once no adjacent merge is better.
// Throws DegenerateError when e = 0, InputError unless 1 <= K <= N.
Partition baseline_greedy_modularity(const Graph& g, int k);

struct MethodOutput {
  Partition partition;
  double runtime_s = 0.0;
  std::optional<InferenceTiming> timing;  // Feat/Prop/Clus breakdown
};

struct Method {
  std::string name;
  std::function<MethodOutput(const Graph&, int k)> run;
};

Method icd_method(std::shared_ptr<const Checkpoint> ckpt, std::string name = "icd",
                  std::uint64_t seed = 0);
Method spectral_method(std::uint64_t seed = 0);
Method greedy_method();

struct GraphMetrics {
  std::size_t entry = 0;  // index into the split
  Index num_nodes = 0;
  Index num_edges = 0;
  int communities = 0;
  std::optional<double> nmi;
  std::optional<double> accuracy;
  double modularity = 0.0;
  std::optional<double> ncut;  // absent when a community has zero volume
  double runtime_s = 0.0;
  std::optional<InferenceTiming> timing;
};

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, 0 for fewer than 2
};

// Mean and stdev of the present values.
Summary summarize(const std::vector<std::optional<double>>& values);

struct MethodRecord {
  std::string method;
  std::vector<GraphMetrics> rows;

  Summary nmi() const;
  Summary accuracy() const;
  Summary modularity() const;
  Summary ncut() const;
  Summary runtime() const;
  Summary features_time() const;
  Summary propagation_time() const;
  Summary clustering_time() const;
  bool has_labels() const;
  bool has_timing() const;
};

// Mean quality and runtime of one method, the TOS input.
struct MethodSummaryRow {
  std::string method;
  std::optional<double> nmi;
  std::optional<double> accuracy;
  std::optional<double> modularity;
  std::optional<double> ncut;
  double runtime_s = 0.0;
};

struct TosRow {
  std::string method;
  QualityKind metric = QualityKind::Nmi;
  double quality = 0.0;
  double runtime_s = 0.0;
  double score = 0.0;
};

// TOS for every method and every metric present, normalizing by the
// maxima over `rows`. Metrics whose maximum is zero (all runtimes, or every
// NCut) produce no rows.
std::vector<TosRow> tos_table(const std::vector<MethodSummaryRow>& rows);

struct EvalOptions {
  int workers = 1;
  // Defaults to the manifest K of each graph; overrides when > 0.
  int communities = 0;
};

struct EvalReport {
  std::vector<MethodRecord> records;
  std::vector<TosRow> tos;
  std::vector<std::string> warnings;

  std::vector<MethodSummaryRow> summary_rows() const;
};

// Runs every method on the test graphs only. Test labels come from the
// ground-truth files, never from pseudo labels. Graphs fan out over
// `workers` threads; results are ordered by graph.
EvalReport run_eval(const DatasetSplit& split, const std::vector<Method>& methods,
                    const EvalOptions& options = {});

// CSV emission with 6 significant digits. Label columns are omitted when no
// test graph carries labels.
void write_per_graph_csv(std::ostream& out, const EvalReport& report);
void write_summary_csv(std::ostream& out, const EvalReport& report);
void write_summary_csv(std::ostream& out, const std::vector<MethodSummaryRow>& rows);
void write_tos_csv(std::ostream& out, const std::vector<TosRow>& rows);
// per_graph.csv, summary.csv and tos.csv under `dir`.
void write_eval(const std::filesystem::path& dir, const EvalReport& report);

struct GradientCheckRow {
  Variant variant = Variant::Modularity;
  std::string target;  // which loss against which parameters
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
};

// Finite-difference check of the analytic gradients on a random 8-node
// two-community graph: L_D in the discriminator, L_G in the generator and
// L_D in the generator through both encoders, for both variants.
std::vector<GradientCheckRow> gradient_self_test(std::uint64_t seed = 0);

// Reads summary.csv back (method plus the *_mean columns).
std::vector<MethodSummaryRow> read_summary_csv(std::istream& in);

}  // namespace icd
