#include "wikiprof/stats_interpret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "wikiprof/special_functions.hpp"

namespace wikiprof {

// ---------------------------------------------------------------------------
// Eigen / PCA

EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tol, int max_sweeps) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);

  auto max_off = [&] {
    double m = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::fabs(a(p, q)));
    return m;
  };

  EigenDecomposition out;
  while (max_off() > tol) {
    if (out.sweeps >= max_sweeps) throw std::runtime_error("Jacobi eigensolver did not converge");
    ++out.sweeps;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::fabs(v(k, src)) > std::fabs(v(lead, src))) lead = k;
    const double sign = v(lead, src) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
  }
  return out;
}

PcaModel pca_fit(const StandardizedMatrix& data) {
  const std::size_t n = data.values.rows();
  const std::size_t p = data.values.cols();
  if (n <= p) throw std::invalid_argument("pca_fit needs more rows than features");
  PcaModel model;
  model.names = data.names;
  model.means = data.means;
  model.scales = data.scales;
  model.correlation = Matrix(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += data.values(i, a) * data.values(i, b);
      model.correlation(a, b) = model.correlation(b, a) = s / static_cast<double>(n - 1);
    }
  auto eig = jacobi_eigen(model.correlation);
  model.loadings = std::move(eig.vectors);
  model.eigenvalues = std::move(eig.values);
  // Rank-deficient inputs leave rounding-level negatives.
  for (auto& ev : model.eigenvalues) ev = std::max(ev, 0.0);
  const double trace = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
  for (double ev : model.eigenvalues) model.explained.push_back(ev / trace);
  return model;
}

Matrix pca_project(const PcaModel& model, const Matrix& standardized, std::size_t dims) {
  const std::size_t p = model.loadings.rows();
  if (dims > p) throw std::invalid_argument("pca_project: dims exceeds feature count");
  if (standardized.cols() != p) throw std::invalid_argument("pca_project: width mismatch");
  Matrix out(standardized.rows(), dims);
  for (std::size_t i = 0; i < standardized.rows(); ++i)
    for (std::size_t j = 0; j < dims; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += standardized(i, k) * model.loadings(k, j);
      out(i, j) = s;
    }
  return out;
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores) {
  const std::size_t p = model.loadings.rows();
  const std::size_t dims = scores.cols();
  Matrix out(scores.rows(), p);
  for (std::size_t i = 0; i < scores.rows(); ++i)
    for (std::size_t k = 0; k < p; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < dims; ++j) s += scores(i, j) * model.loadings(k, j);
      out(i, k) = s;
    }
  return out;
}

// ---------------------------------------------------------------------------
// ANOVA / Tukey

namespace {

struct GroupSummary {
  std::vector<double> means;
  std::vector<double> sizes;
  double grand_mean = 0;
  double ss_within = 0;
  double ss_between = 0;
  double n = 0;
};

GroupSummary summarize(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw std::invalid_argument("ANOVA needs at least 2 groups");
  GroupSummary s;
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("ANOVA needs at least 2 members per group");
    const double sum = std::accumulate(g.begin(), g.end(), 0.0);
    s.means.push_back(sum / static_cast<double>(g.size()));
    s.sizes.push_back(static_cast<double>(g.size()));
    total += sum;
    s.n += static_cast<double>(g.size());
  }
  s.grand_mean = total / s.n;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (double v : groups[i]) s.ss_within += (v - s.means[i]) * (v - s.means[i]);
    s.ss_between += s.sizes[i] * (s.means[i] - s.grand_mean) * (s.means[i] - s.grand_mean);
  }
  return s;
}

}  // namespace

AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
  const auto s = summarize(groups);
  AnovaResult r;
  r.ss_between = s.ss_between;
  r.ss_within = s.ss_within;
  r.ss_total = 0.0;
  for (const auto& g : groups)
    for (double v : g) r.ss_total += (v - s.grand_mean) * (v - s.grand_mean);
  r.df_between = static_cast<double>(groups.size()) - 1.0;
  r.df_within = s.n - static_cast<double>(groups.size());
  if (r.ss_within == 0.0) {
    r.degenerate = true;
    const bool separated = r.ss_between > 0.0;
    r.f = separated ? std::numeric_limits<double>::infinity() : 0.0;
    r.p = separated ? 0.0 : 1.0;
    return r;
  }
  r.f = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
  r.p = f_upper_tail(r.f, r.df_between, r.df_within);
  return r;
}

TukeyPair TukeyResult::pair(std::size_t a, std::size_t b) const {
  for (const auto& p : pairs) {
    if (p.a == a && p.b == b) return p;
    if (p.a == b && p.b == a) {
      TukeyPair flipped = p;
      std::swap(flipped.a, flipped.b);
      flipped.mean_diff = -flipped.mean_diff;
      return flipped;
    }
  }
  throw std::out_of_range("no Tukey comparison for that pair");
}

TukeyResult tukey_hsd(std::span<const std::vector<double>> groups, double alpha) {
  const auto s = summarize(groups);
  const std::size_t k = groups.size();
  TukeyResult r;
  r.alpha = alpha;
  r.df_within = s.n - static_cast<double>(k);
  r.ms_within = s.ss_within / r.df_within;
  r.degenerate = r.ms_within == 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      TukeyPair p;
      p.a = a;
      p.b = b;
      p.mean_diff = s.means[a] - s.means[b];
      p.std_error = std::sqrt(r.ms_within / 2.0 * (1.0 / s.sizes[a] + 1.0 / s.sizes[b]));
      if (p.mean_diff == 0.0) {
        p.q = 0.0;
        p.p_adjusted = 1.0;
      } else if (p.std_error == 0.0) {
        p.q = std::numeric_limits<double>::infinity();
        p.p_adjusted = 0.0;
      } else {
        p.q = std::fabs(p.mean_diff) / p.std_error;
        p.p_adjusted = std::clamp(1.0 - studentized_range_cdf(p.q, k, r.df_within), 0.0, 1.0);
      }
      p.significant = p.p_adjusted < alpha;
      r.pairs.push_back(p);
    }
  return r;
}

// ---------------------------------------------------------------------------
// Profiles

std::string_view archetype_name(Archetype a) {
  switch (a) {
    case Archetype::OnAMission:
      return "on-a-mission";
    case Archetype::Casual:
      return "casual";
    case Archetype::Regular:
      return "regular";
    case Archetype::Top:
      return "top";
  }
  return "";
}

std::optional<Archetype> parse_archetype(std::string_view name) {
  for (auto a : {Archetype::OnAMission, Archetype::Casual, Archetype::Regular, Archetype::Top})
    if (archetype_name(a) == name) return a;
  return std::nullopt;
}

BoxStats box_stats(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {values.front(), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
          values.back()};
}

namespace {

// Position in `candidates` of the cluster with the strictly largest value.
std::size_t strict_argmax(const std::vector<std::size_t>& candidates,
                          const std::vector<ClusterProfile>& clusters, std::size_t feature,
                          const char* what) {
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = clusters[candidates[i]].features[feature].median;
    const double b = clusters[candidates[best]].features[feature].median;
    if (v > b) {
      best = i;
      tied = false;
    } else if (v == b) {
      tied = true;
    }
  }
  if (tied)
    throw LabelTieError(std::string("tied cluster medians for ") + what +
                        "; archetypes need manual labelling");
  return best;
}

}  // namespace

ProfileReport label_clusters(std::span<const FeatureVector> features, std::span<const int> assignment,
                             std::span<const double> articles,
                             const std::array<bool, kFeatureCount>& significant,
                             bool name_archetypes) {
  if (features.size() != assignment.size())
    throw std::invalid_argument("label_clusters: features/assignment size mismatch");
  if (!articles.empty() && articles.size() != features.size())
    throw std::invalid_argument("label_clusters: illustrative column size mismatch");
  if (features.empty()) throw std::invalid_argument("label_clusters: no contributors");

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);

  ProfileReport report;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    std::vector<double> col;
    for (const auto& v : features) col.push_back(v.values()[f]);
    report.global_medians[f] = median(std::move(col));
  }

  for (const auto& [label, rows] : members) {
    ClusterProfile c;
    c.cluster = label;
    c.size = rows.size();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::vector<double> col;
      for (auto r : rows) col.push_back(features[r].values()[f]);
      c.features[f] = box_stats(std::move(col));
      const double m = c.features[f].median;
      const double g = report.global_medians[f];
      c.evidence.push_back({kFeatureNames[f], m > g ? 1 : (m < g ? -1 : 0), significant[f]});
    }
    if (!articles.empty()) {
      std::vector<double> col;
      for (auto r : rows) col.push_back(articles[r]);
      c.articles = box_stats(std::move(col));
    }
    report.clusters.push_back(std::move(c));
  }

  if (!name_archetypes || report.clusters.size() != 4) return report;

  constexpr std::size_t kRatio = 0, kMaxGap = 2, kNumCons = 3;
  std::vector<std::size_t> remaining{0, 1, 2, 3};
  auto take = [&](std::size_t feature, const char* what, Archetype a) {
    const auto pos = strict_argmax(remaining, report.clusters, feature, what);
    report.clusters[remaining[pos]].archetype = a;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  take(kRatio, "ratio", Archetype::Top);
  take(kMaxGap, "max_gap", Archetype::OnAMission);
  take(kNumCons, "num_cons", Archetype::Regular);
  report.clusters[remaining.front()].archetype = Archetype::Casual;
  report.archetypes_assigned = true;
  return report;
}

Interpretation interpret(std::span<const FeatureVector> features, std::span<const int> assignment,
                         std::span<const double> articles, double alpha) {
  Interpretation out;
  const auto z = standardize(features);
  out.pca = pca_fit(z);
  out.scores = pca_project(out.pca, z.values, std::min<std::size_t>(3, kFeatureCount));

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  for (const auto& [label, rows] : members) out.cluster_ids.push_back(label);

  std::array<bool, kFeatureCount> significant{};
  const bool testable = std::all_of(members.begin(), members.end(),
                                    [](const auto& m) { return m.second.size() >= 2; }) &&
                        members.size() >= 2;
  if (testable) {
    out.anova.emplace();
    out.tukey.emplace();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::vector<std::vector<double>> groups;
      for (const auto& [label, rows] : members) {
        std::vector<double> g;
        for (auto r : rows) g.push_back(features[r].values()[f]);
        groups.push_back(std::move(g));
      }
      (*out.anova)[f] = anova_oneway(groups);
      (*out.tukey)[f] = tukey_hsd(groups, alpha);
      significant[f] = (*out.anova)[f].p < alpha;
    }
  }
  try {
    out.profile = label_clusters(features, assignment, articles, significant);
  } catch (const LabelTieError& e) {
    out.label_error = e.what();
    out.profile = label_clusters(features, assignment, articles, significant, false);
  }
  return out;
}

}  // namespace wikiprof
