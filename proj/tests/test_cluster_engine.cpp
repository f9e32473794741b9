#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "wikiprof/cluster_engine.hpp"
#include "wikiprof/synth_oracle.hpp"

using namespace wikiprof;
using doctest::Approx;

TEST_CASE("distance matrix on simple rows") {
  Matrix m(3, 6);
  m(1, 0) = 1;
  m(2, 0) = 3;
  m(2, 1) = 4;
  const auto d = distance_matrix(m);
  CHECK(d(0, 0) == 0.0);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(0, 2) == 5.0);
  CHECK(d(2, 0) == 5.0);
  Matrix same(2, 6);
  CHECK(distance_matrix(same)(0, 1) == 0.0);

  std::mt19937_64 rng(5);
  const auto big = oracle::random_points(rng, 300, 6);
  CHECK(distance_matrix(big, 1).condensed() == distance_matrix(big, 7).condensed());
}

TEST_CASE("Ward base cases") {
  const auto two = ward_cluster(oracle::line_distances({0, 3}));
  REQUIRE(two.merges.size() == 1);
  CHECK(two.merges[0] == Merge{0, 1, 9.0, 2});

  const auto three = ward_cluster(oracle::line_distances({0, 1, 10}));
  REQUIRE(three.merges.size() == 2);
  CHECK(three.merges[0] == Merge{0, 1, 1.0, 2});
  CHECK(three.merges[1].left == 2);
  CHECK(three.merges[1].right == 3);
  // 2 * (2 * 1 / 3) * (10 - 0.5)^2: squared-distance Lance-Williams units.
  CHECK(three.merges[1].height == Approx(361.0 / 3.0).epsilon(1e-14));
  CHECK(three.merges == oracle::naive_ward(oracle::line_distances({0, 1, 10})));
}

TEST_CASE("Ward agrees with the naive recurrence and stays monotone") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng() % 35;
    const auto d = distance_matrix(oracle::random_points(rng, n, 6));
    const auto dend = ward_cluster(d);
    CHECK(dend.merges == oracle::naive_ward(d));
    for (std::size_t s = 1; s < dend.merges.size(); ++s)
      CHECK(dend.merges[s].height >= dend.merges[s - 1].height);
    CHECK(dend.merges.back().size == n);
  }
}

TEST_CASE("Ward ties go to the lowest cluster ids") {
  // Equilateral layout: every pair ties, so leaves 0 and 1 merge first.
  const auto dend = ward_cluster(oracle::line_distances({0, 1, 2, 3}));
  CHECK(dend.merges[0].left == 0);
  CHECK(dend.merges[0].right == 1);
  CHECK(dend.merges == oracle::naive_ward(oracle::line_distances({0, 1, 2, 3})));
}

TEST_CASE("cutting the dendrogram") {
  const auto dend = ward_cluster(oracle::line_distances({0, 1, 10}));
  CHECK(cut_dendrogram(dend, 1) == std::vector<int>{1, 1, 1});
  CHECK(cut_dendrogram(dend, 2) == std::vector<int>{1, 1, 2});
  CHECK(cut_dendrogram(dend, 3) == std::vector<int>{1, 2, 3});
  CHECK_THROWS(cut_dendrogram(dend, 0));
  CHECK_THROWS(cut_dendrogram(dend, 4));

  std::mt19937_64 rng(8);
  const auto d = distance_matrix(oracle::random_points(rng, 40, 6));
  const auto big = ward_cluster(d);
  for (std::size_t k = 2; k <= 40; ++k) {
    const auto fine = cut_dendrogram(big, k), coarse = cut_dendrogram(big, k - 1);
    // Refinement: each fine cluster lies inside one coarse cluster.
    std::map<int, int> parent;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      auto [it, inserted] = parent.emplace(fine[i], coarse[i]);
      CHECK(it->second == coarse[i]);
    }
    CHECK(*std::max_element(fine.begin(), fine.end()) == static_cast<int>(k));
  }
}

TEST_CASE("dendrogram export formats") {
  const auto dend = ward_cluster(oracle::line_distances({0, 1, 10}));
  CHECK(dendrogram_csv(dend) == "step,left,right,height,size\n1,0,1,1,2\n2,2,3,120.33333333333333,3\n");
  const std::vector<std::string> labels = {"a", "b", "c d"};
  CHECK(dendrogram_newick(dend, labels) == "('c d':120.33333333333333,(a:1,b:1):119.33333333333333);");
}

TEST_CASE("PAM on two 1-D groups") {
  const auto d = oracle::line_distances({0, 1, 2, 10, 11, 12});
  const auto r = pam(d, 2);
  CHECK(r.medoids == std::vector<std::size_t>{1, 4});
  CHECK(r.cost == 4.0);
  CHECK(r.assignment == std::vector<int>{1, 1, 1, 2, 2, 2});
  const auto best = exhaustive_kmedoids(d, 2);
  CHECK(best.medoids == std::vector<std::size_t>{1, 4});
  CHECK(best.cost == 4.0);
  CHECK_THROWS(pam(d, 1));
  CHECK_THROWS(pam(d, 6));
}

TEST_CASE("PAM with k = n - 1 costs the smallest pairwise distance") {
  const auto d = oracle::line_distances({0, 2.5, 7, 7.75, 20});
  CHECK(pam(d, 4).cost == 0.75);
}

TEST_CASE("PAM invariants on random data") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 10 + rng() % 60, k = 2 + rng() % 5;
    const auto d = distance_matrix(oracle::random_points(rng, n, 6));
    const auto r = pam(d, k);
    CHECK(r.cost <= r.build_cost);
    CHECK(std::is_sorted(r.medoids.begin(), r.medoids.end()));
    for (std::size_t c = 0; c < k; ++c) CHECK(r.assignment[r.medoids[c]] == static_cast<int>(c) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t nearest = 0;
      for (std::size_t c = 1; c < k; ++c)
        if (d(i, r.medoids[c]) < d(i, r.medoids[nearest])) nearest = c;
      if (std::find(r.medoids.begin(), r.medoids.end(), i) == r.medoids.end())
        CHECK(r.assignment[i] == static_cast<int>(nearest) + 1);
    }
    CHECK(medoid_cost(d, r.medoids) == Approx(r.cost).epsilon(1e-12));
    CHECK(pam(d, k).assignment == r.assignment);
  }
}

TEST_CASE("silhouette examples") {
  const auto d = oracle::line_distances({0, 1, 10});
  const auto s = silhouette(d, std::vector<int>{1, 1, 2});
  CHECK(s.widths[0] == Approx(0.9).epsilon(1e-14));
  CHECK(s.widths[1] == Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(s.widths[2] == 0.0);
  CHECK(s.average == Approx((0.9 + 8.0 / 9.0) / 3.0).epsilon(1e-14));
  CHECK(s.average == Approx(0.5963).epsilon(1e-4));

  const auto dup = oracle::line_distances({0, 0, 50, 50});
  CHECK(silhouette(dup, std::vector<int>{1, 1, 2, 2}).average == 1.0);
  CHECK_THROWS(silhouette(d, std::vector<int>{1, 1, 1}));

  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5 + rng() % 100;
    const auto dd = distance_matrix(oracle::random_points(rng, n, 6));
    std::vector<int> labels(n);
    for (auto& l : labels) l = 1 + static_cast<int>(rng() % 4);
    if (std::set<int>(labels.begin(), labels.end()).size() < 2) continue;
    const auto got = silhouette(dd, labels);
    const auto want = oracle::naive_silhouette(dd, labels);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(got.widths[i] - want[i]) <= 1e-12);
      CHECK(got.widths[i] >= -1.0);
      CHECK(got.widths[i] <= 1.0);
    }
  }
}

TEST_CASE("within-cluster sum of squares") {
  Matrix pts(2, 1);
  pts(1, 0) = 2;
  CHECK(within_ss(pts, std::vector<int>{1, 1}) == 2.0);
  CHECK(within_ss(pts, std::vector<int>{1, 2}) == 0.0);

  std::mt19937_64 rng(13);
  const auto data = oracle::random_points(rng, 60, 6);
  const auto dend = ward_cluster(distance_matrix(data));
  double prev = within_ss(data, cut_dendrogram(dend, 1));
  for (std::size_t k = 2; k <= 20; ++k) {
    const double w = within_ss(data, cut_dendrogram(dend, k));
    CHECK(w <= prev + 1e-12);
    prev = w;
  }
}

namespace {

Matrix blobs(std::size_t count, std::size_t per, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix m(count * per, 6);
  for (std::size_t b = 0; b < count; ++b)
    for (std::size_t i = 0; i < per; ++i)
      for (std::size_t j = 0; j < 6; ++j) m(b * per + i, j) = (j == b % 6 ? 10.0 * (1 + b / 6) : 0.0) + noise(rng);
  return m;
}

}  // namespace

TEST_CASE("select_k recovers planted blob counts") {
  for (std::size_t blobs_n : {2u, 4u}) {
    const auto data = blobs(blobs_n, 25, 17 + blobs_n);
    const auto d = distance_matrix(data);
    const auto sel = select_k(d, data, 2, 10);
    CHECK(sel.chosen_k == blobs_n);
    CHECK(sel.table.size() == 9);
    const auto again = select_k(d, data, 2, 10, 4);
    CHECK(again.chosen_k == sel.chosen_k);
    for (std::size_t i = 0; i < sel.table.size(); ++i) {
      CHECK(again.table[i].avg_silhouette == sel.table[i].avg_silhouette);
      CHECK(again.results[i].assignment == sel.results[i].assignment);
    }
  }
}
