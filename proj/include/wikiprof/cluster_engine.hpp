#pragma once

// Two-stage clustering: Ward agglomeration to inspect the range of k, then
// PAM (k-medoids) for the final partition, validated by silhouette width and
// within-cluster sum of squares.
//
// All routines are deterministic: ties are broken by the lowest index and
// parallel work is reduced in a fixed order.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikiprof/matrix.hpp"

namespace wikiprof {

// Condensed upper triangle of a symmetric dissimilarity matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return d_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, double v) { d_[index(i, j)] = v; }
  const std::vector<double>& condensed() const { return d_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Euclidean distances between rows; rows are split across `threads` workers.
DistanceMatrix distance_matrix(const Matrix& data, unsigned threads = 1);

// Merge of two clusters. Leaves are 0..n-1; merge s creates cluster n+s.
struct Merge {
  std::size_t left = 0;   // smaller cluster id
  std::size_t right = 0;  // larger cluster id
  double height = 0.0;    // Ward dissimilarity, squared-distance units
  std::size_t size = 0;
  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

// Lance-Williams Ward recurrence over squared Euclidean dissimilarities.
// Each step merges the pair with the smallest pending dissimilarity,
// lowest (left, right) cluster id on ties.
Dendrogram ward_cluster(const DistanceMatrix& d);

// Labels in 1..k ordered by each cluster's smallest leaf index.
std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k);

// Merge table `step,left,right,height,size` and Newick with branch lengths.
std::string dendrogram_csv(const Dendrogram& dend);
std::string dendrogram_newick(const Dendrogram& dend, std::span<const std::string> labels = {});

struct PamResult {
  std::vector<std::size_t> medoids;  // ascending point indices; medoid i labels cluster i+1
  std::vector<int> assignment;       // 1..k
  double cost = 0.0;                 // sum of distances to own medoid
  double build_cost = 0.0;
  std::size_t swaps = 0;
};

// Classical BUILD + steepest-descent SWAP; no randomness.
PamResult pam(const DistanceMatrix& d, std::size_t k);

// Total distance to the nearest medoid, ties to the lowest medoid index.
double medoid_cost(const DistanceMatrix& d, std::span<const std::size_t> medoids,
                   std::vector<int>* assignment = nullptr);

struct Silhouette {
  std::vector<double> widths;
  double average = 0.0;
};

// Clusters are the distinct labels; singleton clusters score 0.
Silhouette silhouette(const DistanceMatrix& d, std::span<const int> assignment);

double within_ss(const Matrix& data, std::span<const int> assignment);

struct ClusteringResult {
  std::size_t k = 0;
  std::vector<std::size_t> medoids;
  std::vector<int> assignment;
  double cost = 0.0;
  double avg_silhouette = 0.0;
  std::vector<double> silhouettes;
  double within_ss = 0.0;
};

ClusteringResult evaluate_pam(const DistanceMatrix& d, const Matrix& data, std::size_t k);

struct ValidationRow {
  std::size_t k = 0;
  double avg_silhouette = 0.0;
  double within_ss = 0.0;
  double cost = 0.0;
};

struct SelectKResult {
  std::size_t chosen_k = 0;
  std::vector<ValidationRow> table;
  std::vector<ClusteringResult> results;  // parallel to table

  const ClusteringResult& chosen() const;
};

// Runs PAM for each k in [k_min, k_max] (k values spread over `threads`
// workers) and picks the largest average silhouette, smaller k on ties.
SelectKResult select_k(const DistanceMatrix& d, const Matrix& data, std::size_t k_min = 2,
                       std::size_t k_max = 10, unsigned threads = 1);

}  // namespace wikiprof
