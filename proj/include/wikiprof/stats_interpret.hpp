#pragma once

// Interpretation of a partition: PCA on the feature correlation matrix,
// per-feature one-way ANOVA and Tukey-Kramer comparisons, and the mapping of
// a four-cluster solution onto the behavioural archetypes.

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wikiprof/feature_builder.hpp"
#include "wikiprof/matrix.hpp"

namespace wikiprof {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

// Cyclic Jacobi rotations until every off-diagonal magnitude is <= tol.
// Eigenvector signs are fixed so each column's largest-magnitude entry is
// positive. Throws std::runtime_error after `max_sweeps`.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tol = 1e-12, int max_sweeps = 100);

struct PcaModel {
  std::vector<std::string> names;
  std::vector<double> means;
  std::vector<double> scales;
  Matrix correlation;
  Matrix loadings;  // columns sorted by descending eigenvalue
  std::vector<double> eigenvalues;
  std::vector<double> explained;  // eigenvalue / trace
};

PcaModel pca_fit(const StandardizedMatrix& data);
// Standardized rows times the first `dims` loading columns.
Matrix pca_project(const PcaModel& model, const Matrix& standardized, std::size_t dims = 3);
Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores);

struct AnovaResult {
  double ss_between = 0, ss_within = 0, ss_total = 0;
  double df_between = 0, df_within = 0;
  double f = 0;
  double p = 1;
  bool degenerate = false;  // zero within-group variance
};

AnovaResult anova_oneway(std::span<const std::vector<double>> groups);

struct TukeyPair {
  std::size_t a = 0, b = 0;  // group positions, a < b
  double mean_diff = 0;      // mean(a) - mean(b)
  double std_error = 0;
  double q = 0;
  double p_adjusted = 1;
  bool significant = false;
};

struct TukeyResult {
  double ms_within = 0;
  double df_within = 0;
  double alpha = 0.05;
  bool degenerate = false;
  std::vector<TukeyPair> pairs;

  // Either orientation of the pair; mean_diff is flipped for (b, a).
  TukeyPair pair(std::size_t a, std::size_t b) const;
};

TukeyResult tukey_hsd(std::span<const std::vector<double>> groups, double alpha = 0.05);

enum class Archetype { OnAMission, Casual, Regular, Top };
std::string_view archetype_name(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view name);

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
BoxStats box_stats(std::vector<double> values);

struct Evidence {
  std::string feature;
  int direction = 0;  // +1 above, -1 below, 0 equal to the global median
  bool significant = false;
};

struct ClusterProfile {
  int cluster = 0;
  std::size_t size = 0;
  std::array<BoxStats, kFeatureCount> features{};
  std::optional<BoxStats> articles;  // illustrative, never clustered on
  std::optional<Archetype> archetype;
  std::vector<Evidence> evidence;
};

struct ProfileReport {
  std::vector<ClusterProfile> clusters;  // ascending cluster id
  std::array<double, kFeatureCount> global_medians{};
  bool archetypes_assigned = false;
};

// Raised when archetype naming would have to break a tie between clusters.
struct LabelTieError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// With four clusters: top = highest median ratio; on-a-mission = highest
// median max_gap of the rest; regular = higher median num_cons of the last
// two; casual = remainder. Other k produce a descriptive report only.
ProfileReport label_clusters(std::span<const FeatureVector> features, std::span<const int> assignment,
                             std::span<const double> articles = {},
                             const std::array<bool, kFeatureCount>& significant = {},
                             bool name_archetypes = true);

struct Interpretation {
  PcaModel pca;
  Matrix scores;  // first three components
  // Empty when some cluster has fewer than two members.
  std::optional<std::array<AnovaResult, kFeatureCount>> anova;
  std::optional<std::array<TukeyResult, kFeatureCount>> tukey;
  std::vector<int> cluster_ids;  // group order used by anova/tukey
  ProfileReport profile;
  std::optional<std::string> label_error;  // set when archetype naming hit a tie
};

Interpretation interpret(std::span<const FeatureVector> features, std::span<const int> assignment,
                         std::span<const double> articles = {}, double alpha = 0.05);

}  // namespace wikiprof
