#include "icd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "icd/errors.hpp"
#include "icd/kmeans.hpp"
#include "icd/metrics.hpp"
#include "icd/structure.hpp"
#include "icd/text.hpp"

namespace icd {

namespace fs = std::filesystem;

const char* to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Train: return "train";
    case SplitTag::Validation: return "val";
    case SplitTag::Test: return "test";
  }
  return "?";
}

SplitTag parse_split_tag(const std::string& s) {
  if (s == "train") return SplitTag::Train;
  if (s == "val") return SplitTag::Validation;
  if (s == "test") return SplitTag::Test;
  throw FormatError("unknown split tag '" + s + "'");
}

std::pair<std::size_t, std::size_t> split_boundaries(std::size_t count) {
  return {count * 8 / 10, count * 9 / 10};
}

DatasetSplit DatasetSplit::by_position(std::vector<DatasetEntry> entries, fs::path root) {
  DatasetSplit split;
  const auto [train_end, val_end] = split_boundaries(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].split = i < train_end ? SplitTag::Train
                       : i < val_end ? SplitTag::Validation
                                     : SplitTag::Test;
  }
  split.entries_ = std::move(entries);
  split.root_ = std::move(root);
  split.train_ = {0, train_end};
  split.validation_ = {train_end, val_end};
  split.test_ = {val_end, split.entries_.size()};
  return split;
}

fs::path DatasetSplit::graph_path(std::size_t i) const {
  const fs::path& p = entries_.at(i).graph_path;
  return p.is_absolute() ? p : root_ / p;
}

fs::path DatasetSplit::truth_labels_path(std::size_t i) const {
  fs::path p = graph_path(i);
  p.replace_extension(".labels");
  return p;
}

fs::path DatasetSplit::pseudo_labels_path(std::size_t i) const {
  fs::path p = graph_path(i);
  p.replace_extension(".pseudo.labels");
  return p;
}

void write_manifest(std::ostream& out, const DatasetSplit& split) {
  out << "# path nodes edges communities split\n";
  for (const auto& e : split.entries()) {
    out << e.graph_path.generic_string() << ' ' << e.num_nodes << ' ' << e.num_edges << ' '
        << e.communities << ' ' << to_string(e.split) << '\n';
  }
}

void write_manifest(const fs::path& path, const DatasetSplit& split) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write manifest " + path.string());
  write_manifest(out, split);
}

DatasetSplit read_manifest(std::istream& in, fs::path root) {
  std::vector<DatasetEntry> entries;
  std::vector<std::optional<SplitTag>> stored;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    DatasetEntry e;
    std::string path, tag;
    if (!(fields >> path >> e.num_nodes >> e.num_edges >> e.communities)) {
      throw FormatError("manifest line " + std::to_string(line_no) + " is malformed");
    }
    e.graph_path = path;
    stored.push_back(fields >> tag ? std::optional(parse_split_tag(tag)) : std::nullopt);
    entries.push_back(std::move(e));
  }
  DatasetSplit split = DatasetSplit::by_position(std::move(entries), std::move(root));
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (stored[i] && *stored[i] != split.entries()[i].split) {
      throw FormatError("manifest entry " + std::to_string(i) + " is tagged '" +
                        to_string(*stored[i]) + "' but its position puts it in '" +
                        to_string(split.entries()[i].split) + "'");
    }
  }
  return split;
}

DatasetSplit read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  return read_manifest(in, path.parent_path());
}

namespace {

std::string numbered(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu%s", stem, i, ext);
  return buf;
}

}  // namespace

DatasetSplit write_dataset(const fs::path& dir, const std::vector<LabeledGraph>& graphs) {
  fs::create_directories(dir);
  std::vector<DatasetEntry> entries;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& lg = graphs[i];
    DatasetEntry e;
    e.graph_path = numbered("graph", i, ".edges");
    e.num_nodes = lg.graph.num_nodes();
    e.num_edges = lg.graph.num_edges();
    e.communities = lg.truth.num_communities();
    write_edge_list(dir / e.graph_path, lg.graph);
    write_labels(dir / numbered("graph", i, ".labels"), lg.truth);
    entries.push_back(std::move(e));
  }
  DatasetSplit split = DatasetSplit::by_position(std::move(entries), dir);
  write_manifest(dir / "manifest.txt", split);
  return split;
}

DatasetSplit index_dataset(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".edges") {
      files.push_back(item.path().filename());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<DatasetEntry> entries;
  for (const auto& f : files) {
    const Graph g = read_edge_list(dir / f);
    DatasetEntry e;
    e.graph_path = f;
    e.num_nodes = g.num_nodes();
    e.num_edges = g.num_edges();
    fs::path labels = dir / f;
    labels.replace_extension(".labels");
    if (fs::exists(labels)) e.communities = read_labels(labels).num_communities();
    entries.push_back(std::move(e));
  }
  DatasetSplit split = DatasetSplit::by_position(std::move(entries), dir);
  write_manifest(dir / "manifest.txt", split);
  return split;
}

std::vector<LabeledExample> load_examples(const DatasetSplit& split, IndexRange range,
                                          LabelSource source) {
  std::vector<LabeledExample> out;
  for (std::size_t i = range.begin; i < range.end; ++i) {
    LabeledExample ex;
    ex.graph = read_edge_list(split.graph_path(i));
    ex.communities = split.entries()[i].communities;
    const fs::path labels = source == LabelSource::Truth ? split.truth_labels_path(i)
                                                         : split.pseudo_labels_path(i);
    if (fs::exists(labels)) {
      ex.labels = read_labels(labels);
      if (ex.labels->num_nodes() != ex.graph.num_nodes()) {
        throw FormatError(labels.string() + " does not match its graph's node count");
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

const char* to_string(QualityKind k) {
  switch (k) {
    case QualityKind::Nmi: return "nmi";
    case QualityKind::Accuracy: return "ac";
    case QualityKind::Modularity: return "modularity";
    case QualityKind::Ncut: return "ncut";
  }
  return "?";
}

double tos(double q, QualityKind kind, double e, double e_max, double q_max) {
  if (e_max == 0.0) throw DegenerateError("TOS needs a positive maximum runtime");
  if (e < 0.0 || e > e_max) throw InputError("runtime outside [0, E_m]");
  double q_hat = q;
  switch (kind) {
    case QualityKind::Nmi:
    case QualityKind::Accuracy:
      break;
    case QualityKind::Modularity:
      q_hat = (q + 1.0) / 2.0;
      break;
    case QualityKind::Ncut:
      if (q_max == 0.0) throw DegenerateError("TOS needs a positive maximum NCut");
      if (q > q_max) throw InputError("NCut exceeds Q_m");
      q_hat = (q_max - q) / q_max;
      break;
  }
  return q_hat * (e_max - e) / e_max;
}

Partition baseline_spectral(const Graph& g, int k, std::uint64_t seed, Index max_nodes) {
  const Index n = g.num_nodes();
  if (k < 1 || k > n) throw InputError("K must lie in [1, N]");
  if (n > max_nodes) {
    throw CapabilityError("spectral baseline needs a dense eigensolve; N = " +
                          std::to_string(n) + " exceeds the cap of " +
                          std::to_string(max_nodes));
  }
  if (k == 1) return Partition(std::vector<int>(static_cast<std::size_t>(n), 0));
  const MatrixXd lap = norm_laplacian(g).to_dense();
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw DegenerateError("eigensolve did not converge");
  // Eigenvalues come back ascending.
  const MatrixXd rows = solver.eigenvectors().leftCols(k);
  KMeansOptions options;
  options.seed = seed;
  return kmeans(rows, k, options).labels;
}

Partition baseline_greedy_modularity(const Graph& g, int k) {
  const Index n = g.num_nodes();
  if (g.num_edges() == 0) throw DegenerateError("greedy modularity needs at least one edge");
  if (k < 1 || k > n) throw InputError("K must lie in [1, N]");

  const double two_e = 2.0 * static_cast<double>(g.num_edges());
  // a[c] = vol(c) / 2e; links[c][d] = (edges between c and d) / 2e, both ways.
  std::vector<double> a(static_cast<std::size_t>(n));
  std::vector<std::map<int, double>> links(static_cast<std::size_t>(n));
  std::set<int> alive;
  for (Index i = 0; i < n; ++i) {
    a[i] = g.degree(i) / two_e;
    alive.insert(static_cast<int>(i));
  }
  for (const auto& [u, v] : g.edges()) {
    links[u][v] += 1.0 / two_e;
    links[v][u] += 1.0 / two_e;
  }
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) parent[i] = static_cast<int>(i);

  for (Index remaining = n; remaining > k; --remaining) {
    // Delta Q of merging c and d is 2 (e_cd - a_c a_d). Among non-adjacent
    // pairs the two smallest volumes give the largest (least negative) gain.
    double best = -std::numeric_limits<double>::infinity();
    std::pair<int, int> pick{-1, -1};
    auto consider = [&](int c, int d, double gain) {
      if (c > d) std::swap(c, d);
      if (gain > best || (gain == best && std::pair(c, d) < pick)) {
        best = gain;
        pick = {c, d};
      }
    };
    for (int c : alive) {
      for (const auto& [d, w] : links[c]) {
        if (c < d) consider(c, d, 2.0 * (w - a[c] * a[d]));
      }
    }
    int s1 = -1, s2 = -1;
    for (int c : alive) {
      if (s1 < 0 || a[c] < a[s1]) {
        s2 = s1;
        s1 = c;
      } else if (s2 < 0 || a[c] < a[s2]) {
        s2 = c;
      }
    }
    const auto it = links[s1].find(s2);
    consider(s1, s2, 2.0 * ((it == links[s1].end() ? 0.0 : it->second) - a[s1] * a[s2]));

    auto [keep, gone] = pick;
    for (const auto& [d, w] : links[gone]) {
      links[d].erase(gone);
      if (d == keep) continue;
      links[keep][d] += w;
      links[d][keep] += w;
    }
    links[gone].clear();
    a[keep] += a[gone];
    alive.erase(gone);
    parent[gone] = keep;
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    int r = static_cast<int>(i);
    while (parent[r] != r) r = parent[r];
    labels[i] = r;
  }
  return Partition(labels);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Method icd_method(std::shared_ptr<const Checkpoint> ckpt, std::string name, std::uint64_t seed) {
  return {std::move(name), [ckpt = std::move(ckpt), seed](const Graph& g, int k) {
            InferenceResult r = infer(*ckpt, g, k, seed);
            return MethodOutput{std::move(r.partition), r.timing.total(), r.timing};
          }};
}

Method spectral_method(std::uint64_t seed) {
  return {"spectral", [seed](const Graph& g, int k) {
            const auto start = Clock::now();
            Partition p = baseline_spectral(g, k, seed);
            return MethodOutput{std::move(p), seconds_since(start), std::nullopt};
          }};
}

Method greedy_method() {
  return {"greedy", [](const Graph& g, int k) {
            const auto start = Clock::now();
            Partition p = baseline_greedy_modularity(g, k);
            return MethodOutput{std::move(p), seconds_since(start), std::nullopt};
          }};
}

Summary summarize(const std::vector<std::optional<double>>& values) {
  Summary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    ++s.count;
    sum += *v;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) return s;
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) ss += (*v - s.mean) * (*v - s.mean);
  }
  s.stdev = std::sqrt(ss / static_cast<double>(s.count - 1));
  return s;
}

namespace {

template <typename Get>
Summary summarize_rows(const std::vector<GraphMetrics>& rows, Get get) {
  std::vector<std::optional<double>> values;
  values.reserve(rows.size());
  for (const auto& r : rows) values.push_back(get(r));
  return summarize(values);
}

}  // namespace

Summary MethodRecord::nmi() const {
  return summarize_rows(rows, [](const GraphMetrics& r) { return r.nmi; });
}
Summary MethodRecord::accuracy() const {
  return summarize_rows(rows, [](const GraphMetrics& r) { return r.accuracy; });
}
Summary MethodRecord::modularity() const {
  return summarize_rows(rows,
                        [](const GraphMetrics& r) { return std::optional(r.modularity); });
}
Summary MethodRecord::ncut() const {
  return summarize_rows(rows, [](const GraphMetrics& r) { return r.ncut; });
}
Summary MethodRecord::runtime() const {
  return summarize_rows(rows, [](const GraphMetrics& r) { return std::optional(r.runtime_s); });
}
Summary MethodRecord::features_time() const {
  return summarize_rows(rows, [](const GraphMetrics& r) -> std::optional<double> {
    if (r.timing) return r.timing->features_s;
    return std::nullopt;
  });
}
Summary MethodRecord::propagation_time() const {
  return summarize_rows(rows, [](const GraphMetrics& r) -> std::optional<double> {
    if (r.timing) return r.timing->propagation_s;
    return std::nullopt;
  });
}
Summary MethodRecord::clustering_time() const {
  return summarize_rows(rows, [](const GraphMetrics& r) -> std::optional<double> {
    if (r.timing) return r.timing->clustering_s;
    return std::nullopt;
  });
}
bool MethodRecord::has_labels() const {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.nmi.has_value(); });
}
bool MethodRecord::has_timing() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const auto& r) { return r.timing.has_value(); });
}

std::vector<TosRow> tos_table(const std::vector<MethodSummaryRow>& rows) {
  double e_max = 0.0;
  double q_max = 0.0;
  for (const auto& r : rows) {
    e_max = std::max(e_max, r.runtime_s);
    if (r.ncut) q_max = std::max(q_max, *r.ncut);
  }
  std::vector<TosRow> out;
  // A zero normalizer leaves the score undefined; those rows are left out.
  if (e_max <= 0.0) return out;
  for (const auto& r : rows) {
    auto add = [&](QualityKind kind, const std::optional<double>& q) {
      if (!q || (kind == QualityKind::Ncut && q_max <= 0.0)) return;
      out.push_back({r.method, kind, *q, r.runtime_s, tos(*q, kind, r.runtime_s, e_max, q_max)});
    };
    add(QualityKind::Nmi, r.nmi);
    add(QualityKind::Accuracy, r.accuracy);
    add(QualityKind::Modularity, r.modularity);
    add(QualityKind::Ncut, r.ncut);
  }
  return out;
}

std::vector<MethodSummaryRow> EvalReport::summary_rows() const {
  std::vector<MethodSummaryRow> out;
  for (const auto& rec : records) {
    MethodSummaryRow row;
    row.method = rec.method;
    if (rec.has_labels()) {
      row.nmi = rec.nmi().mean;
      row.accuracy = rec.accuracy().mean;
    }
    row.modularity = rec.modularity().mean;
    if (rec.ncut().count > 0) row.ncut = rec.ncut().mean;
    row.runtime_s = rec.runtime().mean;
    out.push_back(std::move(row));
  }
  return out;
}

EvalReport run_eval(const DatasetSplit& split, const std::vector<Method>& methods,
                    const EvalOptions& options) {
  EvalReport report;
  if (methods.size() < 2) {
    report.warnings.push_back(
        "TOS normalizes by the slowest evaluated method; with fewer than 2 methods every "
        "score is 0");
  }
  const IndexRange test = split.test();
  if (test.size() == 0) report.warnings.push_back("the test split is empty");

  report.records.resize(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    report.records[m].method = methods[m].name;
    report.records[m].rows.resize(test.size());
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < test.size(); t = next++) {
      try {
        const std::size_t i = test.begin + t;
        const Graph g = read_edge_list(split.graph_path(i));
        std::optional<Partition> truth;
        // Only ground truth is read here; pseudo labels never reach Γ'.
        if (fs::exists(split.truth_labels_path(i))) truth = read_labels(split.truth_labels_path(i));
        int k = options.communities > 0 ? options.communities : split.entries()[i].communities;
        if (k <= 0 && truth) k = truth->num_communities();
        if (k <= 0) {
          throw InputError(split.graph_path(i).string() +
                           " has no community count; pass one explicitly");
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
          MethodOutput out = methods[m].run(g, k);
          GraphMetrics& row = report.records[m].rows[t];
          row.entry = i;
          row.num_nodes = g.num_nodes();
          row.num_edges = g.num_edges();
          row.communities = k;
          if (truth) {
            row.nmi = nmi(*truth, out.partition);
            row.accuracy = accuracy(*truth, out.partition);
          }
          row.modularity = g.num_edges() > 0 ? modularity_score(g, out.partition) : 0.0;
          try {
            row.ncut = ncut_score(g, out.partition);
          } catch (const DegenerateError&) {
            row.ncut.reset();
          }
          row.runtime_s = out.runtime_s;
          row.timing = out.timing;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = test.size();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(test.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.tos = tos_table(report.summary_rows());
  return report;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_significant(*v) : ""; }
std::string cell(double v) { return format_significant(v); }

bool any_labels(const EvalReport& report) {
  return std::any_of(report.records.begin(), report.records.end(),
                     [](const MethodRecord& r) { return r.has_labels(); });
}

}  // namespace

void write_per_graph_csv(std::ostream& out, const EvalReport& report) {
  const bool labels = any_labels(report);
  out << "method,graph,nodes,edges,k";
  if (labels) out << ",nmi,ac";
  out << ",modularity,ncut,runtime_s,feat_s,prop_s,clus_s\n";
  for (const auto& rec : report.records) {
    for (const auto& r : rec.rows) {
      out << rec.method << ',' << r.entry << ',' << r.num_nodes << ',' << r.num_edges << ','
          << r.communities;
      if (labels) out << ',' << cell(r.nmi) << ',' << cell(r.accuracy);
      out << ',' << cell(r.modularity) << ',' << cell(r.ncut) << ',' << cell(r.runtime_s);
      if (r.timing) {
        out << ',' << cell(r.timing->features_s) << ',' << cell(r.timing->propagation_s) << ','
            << cell(r.timing->clustering_s);
      } else {
        out << ",,,";
      }
      out << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
  const bool labels = any_labels(report);
  out << "method,graphs";
  if (labels) out << ",nmi_mean,nmi_std,ac_mean,ac_std";
  out << ",modularity_mean,modularity_std,ncut_mean,ncut_std,runtime_mean,runtime_std"
         ",feat_mean,prop_mean,clus_mean\n";
  for (const auto& rec : report.records) {
    auto pair = [](const Summary& s) {
      return s.count ? cell(s.mean) + ',' + cell(s.stdev) : std::string(",");
    };
    out << rec.method << ',' << rec.rows.size();
    if (labels) out << ',' << pair(rec.nmi()) << ',' << pair(rec.accuracy());
    out << ',' << pair(rec.modularity()) << ',' << pair(rec.ncut()) << ',' << pair(rec.runtime());
    if (rec.has_timing()) {
      out << ',' << cell(rec.features_time().mean) << ',' << cell(rec.propagation_time().mean)
          << ',' << cell(rec.clustering_time().mean);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<MethodSummaryRow>& rows) {
  const bool labels =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.nmi.has_value(); });
  out << "method";
  if (labels) out << ",nmi_mean,ac_mean";
  out << ",modularity_mean,ncut_mean,runtime_mean\n";
  for (const auto& r : rows) {
    out << r.method;
    if (labels) out << ',' << cell(r.nmi) << ',' << cell(r.accuracy);
    out << ',' << cell(r.modularity) << ',' << cell(r.ncut) << ',' << cell(r.runtime_s) << '\n';
  }
}

void write_tos_csv(std::ostream& out, const std::vector<TosRow>& rows) {
  out << "method,metric,quality,runtime_s,tos\n";
  for (const auto& r : rows) {
    out << r.method << ',' << to_string(r.metric) << ',' << cell(r.quality) << ','
        << cell(r.runtime_s) << ',' << cell(r.score) << '\n';
  }
}

void write_eval(const fs::path& dir, const EvalReport& report) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    return out;
  };
  auto per_graph = open("per_graph.csv");
  write_per_graph_csv(per_graph, report);
  auto summary = open("summary.csv");
  write_summary_csv(summary, report);
  auto tos_out = open("tos.csv");
  write_tos_csv(tos_out, report.tos);
}

std::vector<MethodSummaryRow> read_summary_csv(std::istream& in) {
  auto split_line = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(std::string(trim(cur)));
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(std::string(trim(cur)));
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw FormatError("summary CSV is empty");
  const auto header = split_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < header.size(); ++c) col[header[c]] = c;
  if (!col.count("method") || !col.count("runtime_mean")) {
    throw FormatError("summary CSV needs 'method' and 'runtime_mean' columns");
  }
  std::vector<MethodSummaryRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    auto get = [&](const char* name) -> std::optional<double> {
      const auto it = col.find(name);
      if (it == col.end() || it->second >= cells.size() || cells[it->second].empty()) {
        return std::nullopt;
      }
      return parse_double(cells[it->second]);
    };
    MethodSummaryRow r;
    r.method = cells[col["method"]];
    r.nmi = get("nmi_mean");
    r.accuracy = get("ac_mean");
    r.modularity = get("modularity_mean");
    r.ncut = get("ncut_mean");
    const auto rt = get("runtime_mean");
    if (!rt) throw FormatError("method '" + r.method + "' has no runtime");
    r.runtime_s = *rt;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace icd

namespace icd {

std::vector<GradientCheckRow> gradient_self_test(std::uint64_t seed) {
  std::vector<GradientCheckRow> out;
  GnSpec spec;
  spec.n = 8;
  spec.k = 2;
  spec.p_in = 0.8;
  LabeledGraph lg;
  // Draw until the sample has an edge and no isolated node.
  for (spec.seed = seed;; ++spec.seed) {
    lg = generate_gn(spec);
    if (lg.graph.num_edges() > 0 && !lg.graph.has_isolated_nodes()) break;
  }
  for (Variant variant : {Variant::Modularity, Variant::Ncut}) {
    TrainConfig cfg;
    cfg.variant = variant;
    cfg.generator_widths = {6, 5, 4};
    cfg.discriminator_widths = {4, 3, 1};
    cfg.seed = seed;
    nn::Rng rng(seed + 101);
    IcdModel model(cfg, rng);
    const TrainingSample sample = prepare_sample(lg.graph, lg.truth, cfg);

    auto run = [&](const std::string& target, std::vector<MatrixXd*> params,
                   const std::function<double(std::vector<MatrixXd>&)>& analytic,
                   const std::function<double()>& loss) {
      std::vector<MatrixXd> grads;
      analytic(grads);
      const auto r = nn::grad_check(loss, params, grads, 1e-6, rng);
      out.push_back({variant, target, r.max_relative_error, r.coordinates_checked});
    };
    auto loss_d_now = [&] { return model.losses(sample).d; };
    auto loss_g_now = [&] { return model.losses(sample).g; };
    run("L_D / discriminator", model.discriminator().parameters(),
        [&](std::vector<MatrixXd>& g) { return model.discriminator_gradient(sample, g); },
        loss_d_now);
    run("L_G / generator", model.generator().parameters(),
        [&](std::vector<MatrixXd>& g) { return model.generator_gradient(sample, g); },
        loss_g_now);
    run("L_D / generator (both encoders)", model.generator().parameters(),
        [&](std::vector<MatrixXd>& g) {
          return model.discriminator_loss_generator_gradient(sample, g);
        },
        loss_d_now);
  }
  return out;
}

}  // namespace icd
