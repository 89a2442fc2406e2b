#include "icd/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "icd/errors.hpp"

namespace icd {

double GnSpec::expected_edges() const {
  const double size = static_cast<double>(n) / k;
  const double within = k * size * (size - 1.0) / 2.0;
  const double all = static_cast<double>(n) * (n - 1.0) / 2.0;
  return within * p_in + (all - within) * p_out();
}

namespace {

// Visits every index in [0, count) independently with probability p, using
// geometric skips so the cost is proportional to the number of hits.
template <typename Rng, typename Fn>
void bernoulli_hits(std::uint64_t count, double p, Rng& rng, Fn&& fn) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::uint64_t i = 0;
  while (true) {
    double r = unif(rng);
    double skip = std::floor(std::log1p(-r) / log_q);
    if (skip >= static_cast<double>(count - i)) return;
    i += static_cast<std::uint64_t>(skip);
    fn(i);
    ++i;
    if (i >= count) return;
  }
}

}  // namespace

LabeledGraph generate_gn(const GnSpec& spec) {
  if (spec.n <= 0 || spec.k <= 0 || spec.n % spec.k != 0) {
    throw InputError("GN benchmark needs K to divide N");
  }
  if (!(spec.p_in > 0.0 && spec.p_in <= 1.0)) throw InputError("p_in must lie in (0, 1]");
  const double p_out = spec.p_out();
  if (p_out < 0.0 || p_out > 1.0) throw InputError("cross-block probability outside [0, 1]");

  std::mt19937_64 rng(spec.seed);
  const Index size = spec.n / spec.k;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(spec.expected_edges() * 1.1) + 16);

  for (int r = 0; r < spec.k; ++r) {
    const NodeId base_r = static_cast<NodeId>(r * size);
    // Within-block pairs (a < b) enumerated row by row of the upper triangle.
    const std::uint64_t tri = static_cast<std::uint64_t>(size) * (size - 1) / 2;
    std::vector<std::uint64_t> row_start(size + 1, 0);
    for (Index a = 0; a < size; ++a) row_start[a + 1] = row_start[a] + (size - 1 - a);
    bernoulli_hits(tri, spec.p_in, rng, [&](std::uint64_t idx) {
      auto it = std::upper_bound(row_start.begin(), row_start.end(), idx);
      const Index a = (it - row_start.begin()) - 1;
      const Index b = a + 1 + static_cast<Index>(idx - row_start[a]);
      edges.emplace_back(base_r + static_cast<NodeId>(a), base_r + static_cast<NodeId>(b));
    });
    for (int s = r + 1; s < spec.k; ++s) {
      const NodeId base_s = static_cast<NodeId>(s * size);
      const auto rect = static_cast<std::uint64_t>(size) * size;
      bernoulli_hits(rect, p_out, rng, [&](std::uint64_t idx) {
        edges.emplace_back(base_r + static_cast<NodeId>(idx / size),
                           base_s + static_cast<NodeId>(idx % size));
      });
    }
  }

  std::vector<int> labels(spec.n);
  for (Index i = 0; i < spec.n; ++i) labels[i] = static_cast<int>(i / size);
  return {Graph::build(spec.n, edges), Partition(labels)};
}

namespace {

// Mean of a continuous power law x^{-tau} on [lo, hi].
double power_law_mean(double lo, double hi, double tau) {
  auto integral = [](double a, double b, double e) {
    // \int_a^b x^e dx
    if (std::abs(e + 1.0) < 1e-12) return std::log(b / a);
    return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
  };
  return integral(lo, hi, 1.0 - tau) / integral(lo, hi, -tau);
}

template <typename Rng>
double sample_power_law(double lo, double hi, double tau, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (std::abs(tau - 1.0) < 1e-12) return lo * std::pow(hi / lo, u);
  const double e = 1.0 - tau;
  const double a = std::pow(lo, e), b = std::pow(hi, e);
  return std::pow(a + u * (b - a), 1.0 / e);
}

using EdgeKey = std::pair<int, int>;
EdgeKey key_of(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

// Pairs up stubs configuration-model style, then repairs self-loops,
// multi-edges and disallowed pairs by double-edge swaps with random partners.
// Whatever is still invalid after `sweeps` rounds is dropped.
template <typename Rng, typename Allowed>
std::vector<Edge> wire_stubs(std::vector<int> stubs, Allowed&& allowed, int sweeps, Rng& rng) {
  std::shuffle(stubs.begin(), stubs.end(), rng);
  if (stubs.size() % 2 == 1) stubs.pop_back();
  std::vector<EdgeKey> pairs;
  pairs.reserve(stubs.size() / 2);
  std::map<EdgeKey, int> count;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    pairs.push_back(key_of(stubs[i], stubs[i + 1]));
    ++count[pairs.back()];
  }
  auto valid = [&](const EdgeKey& e) {
    return e.first != e.second && allowed(e.first, e.second) && count[e] == 1;
  };
  auto fresh = [&](const EdgeKey& e) {
    return e.first != e.second && allowed(e.first, e.second) && count[e] == 0;
  };
  if (pairs.size() >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    std::bernoulli_distribution coin(0.5);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      std::vector<std::size_t> bad;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!valid(pairs[i])) bad.push_back(i);
      }
      if (bad.empty()) break;
      for (std::size_t idx : bad) {
        if (valid(pairs[idx])) continue;
        std::size_t other = pick(rng);
        if (other == idx) continue;
        auto [u, v] = pairs[idx];
        auto [x, y] = pairs[other];
        if (coin(rng)) std::swap(x, y);
        EdgeKey e1 = key_of(u, x), e2 = key_of(v, y);
        if (e1 == e2) continue;
        --count[pairs[idx]];
        --count[pairs[other]];
        if (fresh(e1) && fresh(e2)) {
          pairs[idx] = e1;
          pairs[other] = e2;
        }
        ++count[pairs[idx]];
        ++count[pairs[other]];
      }
    }
  }
  std::vector<Edge> out;
  out.reserve(pairs.size());
  for (const auto& e : pairs) {
    if (e.first != e.second && allowed(e.first, e.second)) out.emplace_back(e.first, e.second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

LabeledGraph generate_lfr(const LfrSpec& spec) {
  if (spec.n <= 1) throw InputError("LFR benchmark needs at least two nodes");
  if (spec.mu < 0.0 || spec.mu > 1.0) throw InputError("mixing ratio mu must lie in [0, 1]");
  if (spec.min_community < 2 || spec.min_community > spec.max_community) {
    throw InputError("community size bounds must satisfy 2 <= c_min <= c_max");
  }
  if (spec.avg_degree <= 0.0 || spec.avg_degree > spec.max_degree) {
    throw InputError("average degree must lie in (0, d_max]");
  }

  std::mt19937_64 rng(spec.seed);
  Index n = spec.n;
  if (spec.n_max > spec.n) {
    n = std::uniform_int_distribution<Index>(spec.n, spec.n_max)(rng);
  }
  if (spec.max_community > n) throw InputError("c_max exceeds the number of nodes");

  // Lower degree cutoff such that the truncated power law has the target mean.
  const double dmax = spec.max_degree;
  double lo = 1.0, hi = dmax;
  if (power_law_mean(lo, dmax, spec.tau1) > spec.avg_degree) {
    throw GenerationError("average degree below what tau1 and d_max allow with d_min = 1");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (power_law_mean(mid, dmax, spec.tau1) < spec.avg_degree ? lo : hi) = mid;
  }
  const double dmin = 0.5 * (lo + hi);

  constexpr int kMaxAttempts = 20;
  std::string last_failure;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<int> degree(n), internal(n);
    for (Index i = 0; i < n; ++i) {
      double x = sample_power_law(dmin, dmax, spec.tau1, rng);
      degree[i] = std::clamp(static_cast<int>(std::lround(x)), 1, spec.max_degree);
      internal[i] = static_cast<int>(std::lround((1.0 - spec.mu) * degree[i]));
    }

    std::vector<int> sizes;
    Index total = 0;
    while (total < n) {
      double c = sample_power_law(spec.min_community, spec.max_community + 1.0 - 1e-9,
                                  spec.tau2, rng);
      int s = std::clamp(static_cast<int>(std::floor(c)), spec.min_community, spec.max_community);
      sizes.push_back(s);
      total += s;
    }
    // Trim the excess from communities that stay above c_min.
    Index excess = total - n;
    while (excess > 0) {
      std::vector<std::size_t> shrinkable;
      for (std::size_t r = 0; r < sizes.size(); ++r) {
        if (sizes[r] > spec.min_community) shrinkable.push_back(r);
      }
      if (shrinkable.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, shrinkable.size() - 1);
      --sizes[shrinkable[pick(rng)]];
      --excess;
    }
    if (excess > 0) {
      last_failure = "community sizes cannot sum to N within [c_min, c_max]";
      continue;
    }

    const int largest = *std::max_element(sizes.begin(), sizes.end());
    const int max_internal = *std::max_element(internal.begin(), internal.end());
    if (max_internal > largest - 1) {
      last_failure = "internal degree (1-mu)*d_max does not fit the largest community";
      continue;
    }

    // Place nodes by descending internal degree into communities with free
    // capacity that can host them, weighting by remaining capacity.
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return internal[a] > internal[b]; });
    std::vector<int> capacity(sizes.begin(), sizes.end());
    std::vector<int> label(n, -1);
    bool placed_all = true;
    for (Index v : order) {
      std::vector<double> weight(sizes.size(), 0.0);
      double sum = 0.0;
      for (std::size_t r = 0; r < sizes.size(); ++r) {
        if (capacity[r] > 0 && sizes[r] - 1 >= internal[v]) {
          weight[r] = capacity[r];
          sum += weight[r];
        }
      }
      if (sum == 0.0) {
        placed_all = false;
        break;
      }
      std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
      std::size_t r = pick(rng);
      label[v] = static_cast<int>(r);
      --capacity[r];
    }
    if (!placed_all) {
      last_failure = "nodes cannot be placed into communities large enough for their internal degree";
      continue;
    }

    std::vector<std::vector<int>> members(sizes.size());
    for (Index v = 0; v < n; ++v) members[label[v]].push_back(static_cast<int>(v));

    std::vector<Edge> edges;
    for (const auto& block : members) {
      std::vector<int> stubs;
      for (int v : block) stubs.insert(stubs.end(), internal[v], v);
      auto part = wire_stubs(std::move(stubs), [](int, int) { return true; },
                             spec.rewire_sweeps, rng);
      edges.insert(edges.end(), part.begin(), part.end());
    }
    std::vector<int> external_stubs;
    for (Index v = 0; v < n; ++v) {
      external_stubs.insert(external_stubs.end(), degree[v] - internal[v], static_cast<int>(v));
    }
    auto cross = wire_stubs(std::move(external_stubs),
                            [&](int a, int b) { return label[a] != label[b]; },
                            spec.rewire_sweeps, rng);
    edges.insert(edges.end(), cross.begin(), cross.end());
    return {Graph::build(n, edges), Partition(label)};
  }
  throw GenerationError("LFR generation failed after " + std::to_string(kMaxAttempts) +
                        " attempts: " + last_failure);
}

double realized_mixing(const Graph& g, const Partition& p) {
  double sum = 0.0;
  Index counted = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) == 0) continue;
    int external = 0;
    for (int j : g.neighbors(i)) external += p[j] != p[i];
    sum += static_cast<double>(external) / g.degree(i);
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

}  // namespace icd
