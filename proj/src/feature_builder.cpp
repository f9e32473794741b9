#include "wikiprof/feature_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wikiprof {

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::array<double, kExtendedFeatureCount> ExtendedFeatureVector::values() const {
  const auto b = base.values();
  return {b[0],
          b[1],
          b[2],
          b[3],
          b[4],
          b[5],
          static_cast<double>(total_edits),
          static_cast<double>(days_active),
          static_cast<double>(min_gap),
          median_gap,
          median_month,
          static_cast<double>(num_active_months)};
}

namespace {

bool passes_filter(const ContributorHistory& h, std::int64_t min_edits) {
  return !h.contributor.anonymous() && !h.contributor.bot && h.active_months() >= 2 &&
         h.total_edits() > min_edits;
}

std::vector<std::int64_t> month_gaps(const ContributorHistory& h) {
  std::vector<std::int64_t> gaps;
  gaps.reserve(h.monthly_counts.size());
  int prev = 0;
  bool first = true;
  for (const auto& [month, count] : h.monthly_counts) {
    if (!first) gaps.push_back(month - prev);
    prev = month;
    first = false;
  }
  return gaps;
}

}  // namespace

std::vector<ContributorHistory> filter_contributors(const HistoryMap& histories,
                                                    std::int64_t min_edits) {
  std::vector<ContributorHistory> out;
  for (const auto& [key, h] : histories)
    if (passes_filter(h, min_edits)) out.push_back(h);
  return out;
}

std::vector<ContributorHistory> filter_contributors(std::span<const ContributorHistory> histories,
                                                    std::int64_t min_edits) {
  std::vector<ContributorHistory> out;
  for (const auto& h : histories)
    if (passes_filter(h, min_edits)) out.push_back(h);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.contributor.key() < b.contributor.key();
  });
  return out;
}

FeatureVector compute_features(const ContributorHistory& h) {
  return compute_extended_features(h).base;
}

ExtendedFeatureVector compute_extended_features(const ContributorHistory& h) {
  const auto active = h.active_months();
  if (active < 2)
    throw ContractViolation("feature computation needs at least 2 active months, got " +
                            std::to_string(active));
  const auto gaps = month_gaps(h);
  std::vector<double> counts;
  counts.reserve(active);
  for (const auto& [month, count] : h.monthly_counts) counts.push_back(static_cast<double>(count));

  ExtendedFeatureVector x;
  x.total_edits = h.total_edits();
  x.days_active = inclusive_day_span(h.first_edit, h.last_edit);
  x.num_active_months = static_cast<std::int64_t>(active);

  FeatureVector& f = x.base;
  const double total = static_cast<double>(x.total_edits);
  f.ratio = total / static_cast<double>(x.days_active);
  f.mean_gap = static_cast<double>(std::accumulate(gaps.begin(), gaps.end(), std::int64_t{0})) /
               static_cast<double>(gaps.size());
  f.max_gap = *std::max_element(gaps.begin(), gaps.end());
  f.num_cons = std::count(gaps.begin(), gaps.end(), 1);
  f.mean_month = total / static_cast<double>(active);
  f.sd = sample_sd(counts);

  x.min_gap = *std::min_element(gaps.begin(), gaps.end());
  x.median_gap = median(std::vector<double>(gaps.begin(), gaps.end()));
  x.median_month = median(counts);
  return x;
}

CorrelationMatrix correlation_matrix(std::span<const std::vector<double>> columns,
                                     std::vector<std::string> names) {
  const std::size_t p = columns.size();
  if (names.size() != p) throw std::invalid_argument("column/name count mismatch");
  const std::size_t n = p ? columns[0].size() : 0;
  for (const auto& c : columns)
    if (c.size() != n) throw std::invalid_argument("columns differ in length");
  if (n < 3) throw std::invalid_argument("correlation needs at least 3 observations");

  std::vector<std::vector<double>> centered(p);
  std::vector<double> norms(p);
  CorrelationMatrix out;
  out.names = std::move(names);
  for (std::size_t j = 0; j < p; ++j) {
    const double mean = std::accumulate(columns[j].begin(), columns[j].end(), 0.0) / n;
    centered[j].resize(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      centered[j][i] = columns[j][i] - mean;
      ss += centered[j][i] * centered[j][i];
    }
    norms[j] = std::sqrt(ss);
    if (norms[j] == 0.0) out.undefined.push_back(j);
  }
  out.values.assign(p, std::vector<std::optional<double>>(p));
  for (std::size_t a = 0; a < p; ++a) {
    if (norms[a] == 0.0) continue;
    out.values[a][a] = 1.0;
    for (std::size_t b = a + 1; b < p; ++b) {
      if (norms[b] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
      const double r = std::clamp(dot / (norms[a] * norms[b]), -1.0, 1.0);
      out.values[a][b] = r;
      out.values[b][a] = r;
    }
  }
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const ExtendedFeatureVector> vectors) {
  std::vector<std::vector<double>> columns(kExtendedFeatureCount);
  for (const auto& v : vectors) {
    const auto vals = v.values();
    for (std::size_t j = 0; j < kExtendedFeatureCount; ++j) columns[j].push_back(vals[j]);
  }
  return correlation_matrix(columns, {kExtendedFeatureNames.begin(), kExtendedFeatureNames.end()});
}

Matrix feature_matrix(std::span<const FeatureVector> vectors) {
  Matrix m(vectors.size(), kFeatureCount);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto vals = vectors[i].values();
    std::copy(vals.begin(), vals.end(), m.row(i).begin());
  }
  return m;
}

StandardizedMatrix standardize(const Matrix& raw, std::vector<std::string> names) {
  if (raw.rows() < 2) throw std::invalid_argument("standardize needs at least 2 rows");
  if (names.size() != raw.cols()) throw std::invalid_argument("column/name count mismatch");
  StandardizedMatrix out;
  out.values = Matrix(raw.rows(), raw.cols());
  out.means.resize(raw.cols());
  out.scales.resize(raw.cols());
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    const auto col = raw.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(col.size() - 1));
    if (!(sd > 0.0)) throw ZeroVarianceColumn(names[j]);
    out.means[j] = mean;
    out.scales[j] = sd;
    for (std::size_t i = 0; i < raw.rows(); ++i) out.values(i, j) = (raw(i, j) - mean) / sd;
  }
  out.names = std::move(names);
  return out;
}

StandardizedMatrix standardize(std::span<const FeatureVector> vectors) {
  return standardize(feature_matrix(vectors), {kFeatureNames.begin(), kFeatureNames.end()});
}

std::vector<double> StandardizedMatrix::transform_row(std::span<const double> raw) const {
  if (raw.size() != means.size()) throw std::invalid_argument("row width mismatch");
  std::vector<double> z(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) z[j] = (raw[j] - means[j]) / scales[j];
  return z;
}

Matrix StandardizedMatrix::inverse_transform() const {
  Matrix raw(values.rows(), values.cols());
  for (std::size_t i = 0; i < values.rows(); ++i)
    for (std::size_t j = 0; j < values.cols(); ++j)
      raw(i, j) = values(i, j) * scales[j] + means[j];
  return raw;
}

}  // namespace wikiprof
