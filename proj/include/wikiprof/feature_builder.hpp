#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikiprof/dump_ingest.hpp"
#include "wikiprof/matrix.hpp"

namespace wikiprof {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "ratio", "mean_gap", "max_gap", "num_cons", "mean_month", "sd"};

// The six clustering features. Gaps are month-index differences between
// consecutive active months.
struct FeatureVector {
  double ratio = 0;       // edits per day over the inclusive activity window
  double mean_gap = 0;    // months
  std::int64_t max_gap = 0;
  std::int64_t num_cons = 0;  // gaps equal to one month
  double mean_month = 0;  // edits per active month
  double sd = 0;          // sample sd of the monthly counts

  std::array<double, kFeatureCount> values() const {
    return {ratio, mean_gap, static_cast<double>(max_gap), static_cast<double>(num_cons),
            mean_month, sd};
  }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::size_t kExtendedFeatureCount = 12;
inline constexpr std::array<const char*, kExtendedFeatureCount> kExtendedFeatureNames = {
    "ratio",       "mean_gap",  "max_gap",    "num_cons",     "mean_month",  "sd",
    "total_edits", "days_active", "min_gap", "median_gap", "median_month", "num_active_months"};

// The twelve candidate features from which the six above were kept.
struct ExtendedFeatureVector {
  FeatureVector base;
  std::int64_t total_edits = 0;
  std::int64_t days_active = 0;
  std::int64_t min_gap = 0;
  double median_gap = 0;
  double median_month = 0;
  std::int64_t num_active_months = 0;

  std::array<double, kExtendedFeatureCount> values() const;
};

// Raised when a history does not meet an operation's precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Registered, non-bot, more than `min_edits` edits, at least two active
// months. Output keeps the canonical key order of the input map.
std::vector<ContributorHistory> filter_contributors(const HistoryMap& histories,
                                                    std::int64_t min_edits = 100);
std::vector<ContributorHistory> filter_contributors(std::span<const ContributorHistory> histories,
                                                    std::int64_t min_edits = 100);

FeatureVector compute_features(const ContributorHistory& history);
ExtendedFeatureVector compute_extended_features(const ContributorHistory& history);

// Pearson correlation; entries involving a zero-variance column are empty
// and the column is listed in `undefined`.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::size_t> undefined;
};

CorrelationMatrix correlation_matrix(std::span<const std::vector<double>> columns,
                                     std::vector<std::string> names);
CorrelationMatrix correlation_matrix(std::span<const ExtendedFeatureVector> vectors);

struct ZeroVarianceColumn : std::invalid_argument {
  explicit ZeroVarianceColumn(const std::string& column)
      : std::invalid_argument("column '" + column + "' has zero variance"), name(column) {}
  std::string name;
};

// Column-wise z-scores (sample standard deviation) with the scaler kept.
struct StandardizedMatrix {
  Matrix values;
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<std::string> names;

  std::vector<double> transform_row(std::span<const double> raw) const;
  Matrix inverse_transform() const;
};

StandardizedMatrix standardize(const Matrix& raw, std::vector<std::string> names);
StandardizedMatrix standardize(std::span<const FeatureVector> vectors);

Matrix feature_matrix(std::span<const FeatureVector> vectors);

double median(std::vector<double> values);
// Linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double p);
double sample_sd(std::span<const double> values);

}  // namespace wikiprof
