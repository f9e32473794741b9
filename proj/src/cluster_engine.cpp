#include "wikiprof/cluster_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "wikiprof/csv.hpp"

namespace wikiprof {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

}  // namespace

DistanceMatrix distance_matrix(const Matrix& data, unsigned threads) {
  const std::size_t n = data.rows();
  DistanceMatrix d(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto a = data.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = data.row(j);
      double ss = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) ss += (a[c] - b[c]) * (a[c] - b[c]);
      d.set(i, j, std::sqrt(ss));
    }
  });
  return d;
}

// ---------------------------------------------------------------------------
// Ward

Dendrogram ward_cluster(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) throw std::invalid_argument("ward_cluster needs at least 2 points");

  // Slot-indexed working dissimilarities; a merged cluster reuses the slot
  // of its left member and receives the next (largest) cluster id.
  DistanceMatrix work(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) work.set(i, j, d(i, j) * d(i, j));

  std::vector<std::size_t> id(n), size(n, 1);
  std::iota(id.begin(), id.end(), std::size_t{0});
  std::vector<char> active(n, 1);
  // Nearest neighbour among active clusters with a larger id.
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_d(n, kInf);

  auto refresh = [&](std::size_t a) {
    nn[a] = kNone;
    nn_d[a] = kInf;
    for (std::size_t b = 0; b < n; ++b) {
      if (!active[b] || b == a || id[b] < id[a]) continue;
      const double v = work(a, b);
      if (v < nn_d[a] || (v == nn_d[a] && nn[a] != kNone && id[b] < id[nn[a]])) {
        nn[a] = b;
        nn_d[a] = v;
      }
    }
  };
  for (std::size_t a = 0; a < n; ++a) refresh(a);

  Dendrogram dend;
  dend.leaves = n;
  dend.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s] || nn[s] == kNone) continue;
      if (a == kNone || nn_d[s] < nn_d[a] || (nn_d[s] == nn_d[a] && id[s] < id[a])) a = s;
    }
    const std::size_t b = nn[a];
    const double dab = nn_d[a];
    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);

    dend.merges.push_back({id[a], id[b], dab, size[a] + size[b]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double nk = static_cast<double>(size[k]);
      work.set(a, k, ((na + nk) * work(a, k) + (nb + nk) * work(b, k) - nk * dab) / (na + nb + nk));
    }
    active[b] = 0;
    size[a] += size[b];
    id[a] = n + step;
    nn[a] = kNone;
    nn_d[a] = kInf;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (work(k, a) < nn_d[k]) {
        nn[k] = a;
        nn_d[k] = work(k, a);
      }
    }
  }
  return dend;
}

std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k) {
  const std::size_t n = dend.leaves;
  if (k < 1 || k > n) throw std::invalid_argument("cut_dendrogram: k out of range");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Any leaf of each cluster id serves as its union-find handle.
  std::vector<std::size_t> handle(2 * n - 1);
  std::iota(handle.begin(), handle.begin() + n, std::size_t{0});
  for (std::size_t s = 0; s < n - k; ++s) {
    const auto& m = dend.merges[s];
    const auto ra = find(handle[m.left]);
    const auto rb = find(handle[m.right]);
    parent[std::max(ra, rb)] = std::min(ra, rb);
    handle[n + s] = std::min(ra, rb);
  }
  std::vector<int> labels(n, 0);
  std::vector<int> label_of_root(n, 0);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = label_of_root[find(i)];
    if (l == 0) l = ++next;
    labels[i] = l;
  }
  return labels;
}

std::string dendrogram_csv(const Dendrogram& dend) {
  std::ostringstream out;
  out << "step,left,right,height,size\n";
  for (std::size_t s = 0; s < dend.merges.size(); ++s) {
    const auto& m = dend.merges[s];
    out << (s + 1) << ',' << m.left << ',' << m.right << ',' << format_number(m.height) << ','
        << m.size << '\n';
  }
  return out.str();
}

namespace {

std::string newick_label(const std::string& label) {
  if (label.find_first_of("()[]':;, \t\n") == std::string::npos && !label.empty()) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string dendrogram_newick(const Dendrogram& dend, std::span<const std::string> labels) {
  const std::size_t n = dend.leaves;
  if (!labels.empty() && labels.size() != n)
    throw std::invalid_argument("dendrogram_newick: label count mismatch");
  if (n == 0) return ";";
  if (n == 1) return (labels.empty() ? std::string("0") : newick_label(labels[0])) + ";";

  auto height = [&](std::size_t node) { return node < n ? 0.0 : dend.merges[node - n].height; };
  // Iterative post-order from the root so deep chains cannot overflow the stack.
  std::vector<std::string> text(2 * n - 1);
  struct Frame {
    std::size_t node;
    bool expanded;
  };
  std::vector<Frame> stack{{2 * n - 2, false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (node < n) {
      text[node] = labels.empty() ? std::to_string(node) : newick_label(labels[node]);
      continue;
    }
    const auto& m = dend.merges[node - n];
    if (!expanded) {
      stack.push_back({node, true});
      stack.push_back({m.right, false});
      stack.push_back({m.left, false});
      continue;
    }
    text[node] = "(" + text[m.left] + ":" + format_number(m.height - height(m.left)) + "," +
                 text[m.right] + ":" + format_number(m.height - height(m.right)) + ")";
    text[m.left].clear();
    text[m.right].clear();
  }
  return text[2 * n - 2] + ";";
}

// ---------------------------------------------------------------------------
// PAM

double medoid_cost(const DistanceMatrix& d, std::span<const std::size_t> medoids,
                   std::vector<int>* assignment) {
  const std::size_t n = d.size();
  if (assignment) assignment->assign(n, 0);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      if (medoids[m] == j) {
        best = m;
        best_d = 0.0;
        break;
      }
      const double v = d(j, medoids[m]);
      if (v < best_d) {
        best_d = v;
        best = m;
      }
    }
    total += best_d;
    if (assignment) (*assignment)[j] = static_cast<int>(best) + 1;
  }
  return total;
}

PamResult pam(const DistanceMatrix& d, std::size_t k) {
  const std::size_t n = d.size();
  if (k < 2 || k >= n) throw std::invalid_argument("pam: k must satisfy 2 <= k < n");

  std::vector<char> is_medoid(n, 0);
  std::vector<std::size_t> medoids;
  medoids.reserve(k);

  // BUILD
  {
    std::size_t first = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += d(i, j);
      if (s < best) {
        best = s;
        first = i;
      }
    }
    medoids.push_back(first);
    is_medoid[first] = 1;
  }
  std::vector<double> nearest(n);
  for (std::size_t j = 0; j < n; ++j) nearest[j] = d(j, medoids[0]);
  while (medoids.size() < k) {
    std::size_t pick = kNone;
    double best_gain = -1.0;
    for (std::size_t h = 0; h < n; ++h) {
      if (is_medoid[h]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) gain += std::max(nearest[j] - d(j, h), 0.0);
      if (gain > best_gain) {
        best_gain = gain;
        pick = h;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = 1;
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, pick));
  }
  std::sort(medoids.begin(), medoids.end());

  PamResult result;
  result.build_cost = medoid_cost(d, medoids);
  double cost = result.build_cost;

  // SWAP: nearest and second-nearest medoid distance per point.
  std::vector<std::size_t> near_pos(n);
  std::vector<double> dn(n), ds(n);
  auto refresh = [&] {
    for (std::size_t j = 0; j < n; ++j) {
      double a = kInf, b = kInf;
      std::size_t pos = 0;
      for (std::size_t m = 0; m < medoids.size(); ++m) {
        const double v = d(j, medoids[m]);
        if (v < a) {
          b = a;
          a = v;
          pos = m;
        } else if (v < b) {
          b = v;
        }
      }
      near_pos[j] = pos;
      dn[j] = a;
      ds[j] = b;
    }
  };

  for (;;) {
    refresh();
    double best_delta = 0.0;
    std::size_t best_m = kNone, best_h = kNone;
    // Medoid positions ascend with point index, so the scan order gives the
    // lowest (medoid, candidate) pair on ties.
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double djh = d(j, h);
          if (near_pos[j] == m)
            delta += std::min(djh, ds[j]) - dn[j];
          else
            delta += std::min(djh - dn[j], 0.0);
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_m = m;
          best_h = h;
        }
      }
    }
    if (best_m == kNone) break;
    auto candidate = medoids;
    candidate[best_m] = best_h;
    std::sort(candidate.begin(), candidate.end());
    const double new_cost = medoid_cost(d, candidate);
    // The incremental delta can be off by rounding; only accept real progress.
    if (!(new_cost < cost)) break;
    is_medoid[medoids[best_m]] = 0;
    is_medoid[best_h] = 1;
    medoids = std::move(candidate);
    cost = new_cost;
    ++result.swaps;
  }

  result.cost = medoid_cost(d, medoids, &result.assignment);
  result.medoids = std::move(medoids);
  return result;
}

// ---------------------------------------------------------------------------
// Validation

Silhouette silhouette(const DistanceMatrix& d, std::span<const int> assignment) {
  const std::size_t n = d.size();
  if (assignment.size() != n) throw std::invalid_argument("silhouette: assignment size mismatch");
  std::map<int, std::size_t> index;
  for (int label : assignment) index.emplace(label, 0);
  if (index.size() < 2) throw std::invalid_argument("silhouette needs at least 2 clusters");
  std::size_t c = 0;
  for (auto& [label, pos] : index) pos = c++;
  std::vector<std::size_t> cluster(n), count(c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cluster[i] = index.at(assignment[i]);
    ++count[cluster[i]];
  }

  Silhouette s;
  s.widths.assign(n, 0.0);
  std::vector<double> sums(c);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = cluster[i];
    if (count[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sums[cluster[j]] += d(i, j);
    const double a = sums[own] / static_cast<double>(count[own] - 1);
    double b = kInf;
    for (std::size_t q = 0; q < c; ++q)
      if (q != own) b = std::min(b, sums[q] / static_cast<double>(count[q]));
    const double denom = std::max(a, b);
    s.widths[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  s.average = std::accumulate(s.widths.begin(), s.widths.end(), 0.0) / static_cast<double>(n);
  return s;
}

double within_ss(const Matrix& data, std::span<const int> assignment) {
  if (assignment.size() != data.rows())
    throw std::invalid_argument("within_ss: assignment size mismatch");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  double total = 0.0;
  std::vector<double> centroid(data.cols());
  for (const auto& [label, rows] : members) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (auto r : rows)
      for (std::size_t c = 0; c < data.cols(); ++c) centroid[c] += data(r, c);
    for (auto& v : centroid) v /= static_cast<double>(rows.size());
    for (auto r : rows)
      for (std::size_t c = 0; c < data.cols(); ++c) {
        const double diff = data(r, c) - centroid[c];
        total += diff * diff;
      }
  }
  return total;
}

ClusteringResult evaluate_pam(const DistanceMatrix& d, const Matrix& data, std::size_t k) {
  auto p = pam(d, k);
  ClusteringResult r;
  r.k = k;
  r.cost = p.cost;
  const auto sil = silhouette(d, p.assignment);
  r.avg_silhouette = sil.average;
  r.silhouettes = sil.widths;
  r.within_ss = within_ss(data, p.assignment);
  r.medoids = std::move(p.medoids);
  r.assignment = std::move(p.assignment);
  return r;
}

const ClusteringResult& SelectKResult::chosen() const {
  for (const auto& r : results)
    if (r.k == chosen_k) return r;
  throw std::logic_error("chosen k missing from results");
}

SelectKResult select_k(const DistanceMatrix& d, const Matrix& data, std::size_t k_min,
                       std::size_t k_max, unsigned threads) {
  const std::size_t n = d.size();
  if (k_min < 2 || k_max < k_min || k_max > n - 1)
    throw std::invalid_argument("select_k: k range must lie within [2, n-1]");
  SelectKResult out;
  out.results.resize(k_max - k_min + 1);
  parallel_for(out.results.size(), threads,
               [&](std::size_t i) { out.results[i] = evaluate_pam(d, data, k_min + i); });
  double best = -kInf;
  for (const auto& r : out.results) {
    out.table.push_back({r.k, r.avg_silhouette, r.within_ss, r.cost});
    if (r.avg_silhouette > best) {
      best = r.avg_silhouette;
      out.chosen_k = r.k;
    }
  }
  return out;
}

}  // namespace wikiprof
