#pragma once

// Labelled synthetic cohorts for the four behavioural archetypes, plus the
// brute-force oracles used to check the clustering code.
//
// Randomness: std::mt19937_64 (bit-exact by the C++ standard), seeded per
// contributor with splitmix64(cohort_seed ^ splitmix64(index)). Integer ranges
// and probabilities are drawn with the helpers below instead of the
// implementation-defined std:: distributions, so fixtures are identical on
// every platform.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikiprof/cluster_engine.hpp"
#include "wikiprof/dump_ingest.hpp"
#include "wikiprof/stats_interpret.hpp"

namespace wikiprof {

std::uint64_t splitmix64(std::uint64_t x);

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform integer in [lo, hi] by rejection on the raw 64-bit output.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Active months are generated in sequence; each gap after the first month is
// 1 with probability `consecutive_probability`, otherwise uniform in `gap`.
struct ArchetypeSpec {
  Archetype archetype = Archetype::Casual;
  IntRange months;
  IntRange edits_per_month;
  IntRange gap;
  double consecutive_probability = 0.0;
};

std::vector<ArchetypeSpec> default_archetypes();

struct CohortGroup {
  ArchetypeSpec spec;
  std::size_t count = 0;
};

// 40 on-a-mission, 80 casual, 50 regular, 15 top.
std::vector<CohortGroup> default_cohort();

// Versioned JSON: {"schema":"wikiprof.archetypes","version":1,"groups":[...]}.
std::vector<CohortGroup> read_cohort_spec(std::istream& in);
std::vector<CohortGroup> read_cohort_spec(const std::filesystem::path& path);
std::string cohort_spec_json(std::span<const CohortGroup> groups);

struct LabeledContributor {
  ContributorHistory history;
  Archetype archetype = Archetype::Casual;
};

struct LabeledCohort {
  std::vector<LabeledContributor> members;  // ascending contributor id
  std::uint64_t seed = 0;
};

// Every generated history passes filter_contributors at the default
// threshold (draws with 100 edits or fewer are redrawn).
LabeledCohort generate_cohort(std::span<const CohortGroup> groups, std::uint64_t seed,
                              unsigned threads = 1);

ContributorHistory generate_history(const ArchetypeSpec& spec, std::uint64_t seed,
                                    std::int64_t contributor_id);

struct MedoidSolution {
  std::vector<std::size_t> medoids;
  double cost = 0.0;
};

struct CombinatorialBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Global optimum over all k-subsets; lexicographically smallest on ties.
MedoidSolution exhaustive_kmedoids(const DistanceMatrix& d, std::size_t k,
                                   std::uint64_t budget = 1'000'000);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace wikiprof
