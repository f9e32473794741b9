#include "wikiprof/synth_oracle.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "wikiprof/errors.hpp"

namespace wikiprof {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t SynthRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double SynthRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<ArchetypeSpec> default_archetypes() {
  return {
      {Archetype::OnAMission, {2, 4}, {40, 120}, {6, 18}, 0.0},
      {Archetype::Casual, {5, 15}, {8, 20}, {2, 6}, 0.0},
      {Archetype::Regular, {18, 36}, {5, 25}, {1, 1}, 1.0},
      {Archetype::Top, {24, 48}, {60, 300}, {2, 2}, 0.9},
  };
}

std::vector<CohortGroup> default_cohort() {
  const auto specs = default_archetypes();
  return {{specs[0], 40}, {specs[1], 80}, {specs[2], 50}, {specs[3], 15}};
}

// ---------------------------------------------------------------------------
// Spec file

namespace {

using nlohmann::json;

IntRange read_range(const json& g, const char* field) {
  const auto it = g.find(field);
  if (it == g.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
      !(*it)[1].is_number_integer())
    throw SchemaError(field, 0, "expected [lo, hi] integer pair");
  IntRange r{(*it)[0].get<std::int64_t>(), (*it)[1].get<std::int64_t>()};
  if (r.hi < r.lo) throw SchemaError(field, 0, "hi below lo");
  return r;
}

}  // namespace

std::vector<CohortGroup> read_cohort_spec(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("<json>", 0, e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "wikiprof.archetypes")
    throw SchemaError("schema", 0, "expected 'wikiprof.archetypes'");
  if (j.value("version", 0) != 1) throw SchemaError("version", 0, "unsupported version");
  const auto groups = j.find("groups");
  if (groups == j.end() || !groups->is_array()) throw SchemaError("groups", 0, "expected array");
  std::vector<CohortGroup> out;
  for (const auto& g : *groups) {
    CohortGroup group;
    const auto name = g.value("archetype", "");
    const auto a = parse_archetype(name);
    if (!a) throw SchemaError("archetype", 0, "unknown archetype '" + name + "'");
    group.spec.archetype = *a;
    group.spec.months = read_range(g, "months");
    group.spec.edits_per_month = read_range(g, "edits_per_month");
    group.spec.gap = read_range(g, "gap");
    group.spec.consecutive_probability = g.value("consecutive_probability", 0.0);
    const auto count = g.find("count");
    if (count == g.end() || !count->is_number_integer() || count->get<std::int64_t>() < 1)
      throw SchemaError("count", 0, "expected integer >= 1");
    group.count = count->get<std::size_t>();
    if (group.spec.months.lo < 2) throw SchemaError("months", 0, "need at least 2 months");
    if (group.spec.edits_per_month.lo < 1 || group.spec.gap.lo < 1)
      throw SchemaError("edits_per_month", 0, "ranges must be positive");
    if (group.spec.edits_per_month.hi * group.spec.months.hi <= 100)
      throw SchemaError("edits_per_month", 0, "archetype can never exceed 100 edits");
    out.push_back(group);
  }
  return out;
}

std::vector<CohortGroup> read_cohort_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open archetype spec " + path.string());
  return read_cohort_spec(in);
}

std::string cohort_spec_json(std::span<const CohortGroup> groups) {
  json arr = json::array();
  for (const auto& g : groups) {
    arr.push_back({{"archetype", archetype_name(g.spec.archetype)},
                   {"count", g.count},
                   {"months", {g.spec.months.lo, g.spec.months.hi}},
                   {"edits_per_month", {g.spec.edits_per_month.lo, g.spec.edits_per_month.hi}},
                   {"gap", {g.spec.gap.lo, g.spec.gap.hi}},
                   {"consecutive_probability", g.spec.consecutive_probability}});
  }
  return json{{"schema", "wikiprof.archetypes"}, {"version", 1}, {"groups", arr}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Generation

ContributorHistory generate_history(const ArchetypeSpec& spec, std::uint64_t seed,
                                    std::int64_t contributor_id) {
  using namespace std::chrono;
  SynthRng rng(seed);
  ContributorHistory h;
  h.contributor.identity = Registered{contributor_id, "Synth" + std::to_string(contributor_id)};

  std::int64_t total = 0;
  do {
    h.monthly_counts.clear();
    total = 0;
    const auto months = rng.uniform_int(std::max<std::int64_t>(2, spec.months.lo),
                                        std::max<std::int64_t>(2, spec.months.hi));
    auto month = static_cast<int>(rng.uniform_int(month_index(2004, 1), month_index(2012, 12)));
    for (std::int64_t i = 0; i < months; ++i) {
      if (i > 0)
        month += static_cast<int>(rng.bernoulli(spec.consecutive_probability)
                                      ? 1
                                      : rng.uniform_int(spec.gap.lo, spec.gap.hi));
      const auto edits = rng.uniform_int(spec.edits_per_month.lo, spec.edits_per_month.hi);
      h.monthly_counts[month] = edits;
      total += edits;
    }
  } while (total <= 100);

  auto instant_in = [&](int month) {
    const year_month_day ymd{year{month / 12}, std::chrono::month{static_cast<unsigned>(month % 12 + 1)},
                             day{static_cast<unsigned>(rng.uniform_int(1, 28))}};
    return Instant{sys_days{ymd}} + seconds{rng.uniform_int(0, 86399)};
  };
  h.first_edit = instant_in(h.monthly_counts.begin()->first);
  h.last_edit = instant_in(h.monthly_counts.rbegin()->first);
  h.distinct_articles = rng.uniform_int(1, std::max<std::int64_t>(1, total / 2));
  return h;
}

LabeledCohort generate_cohort(std::span<const CohortGroup> groups, std::uint64_t seed,
                              unsigned threads) {
  struct Job {
    const ArchetypeSpec* spec;
  };
  std::vector<Job> jobs;
  for (const auto& g : groups)
    for (std::size_t i = 0; i < g.count; ++i) jobs.push_back({&g.spec});

  LabeledCohort cohort;
  cohort.seed = seed;
  cohort.members.resize(jobs.size());
  auto build = [&](std::size_t i) {
    const auto member_seed = splitmix64(seed ^ splitmix64(i));
    cohort.members[i] = {generate_history(*jobs[i].spec, member_seed, static_cast<std::int64_t>(i) + 1),
                         jobs[i].spec->archetype};
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) build(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < jobs.size(); i += threads) build(i);
      });
  }
  return cohort;
}

// ---------------------------------------------------------------------------
// Oracles

MedoidSolution exhaustive_kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t budget) {
  const std::size_t n = d.size();
  if (k < 1 || k > n) throw std::invalid_argument("exhaustive_kmedoids: k out of range");
  // C(n, k) with early exit once over budget.
  std::uint64_t subsets = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    subsets = subsets * (n - k + i) / i;
    if (subsets > budget)
      throw CombinatorialBudgetExceeded("C(" + std::to_string(n) + ", " + std::to_string(k) +
                                        ") exceeds the enumeration budget");
  }

  std::vector<std::size_t> combo(k);
  for (std::size_t i = 0; i < k; ++i) combo[i] = i;
  MedoidSolution best{combo, std::numeric_limits<double>::infinity()};
  for (;;) {
    const double cost = medoid_cost(d, combo);
    if (cost < best.cost) best = {combo, cost};
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
  const auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [cell, n] : table) index += comb2(n);
  for (const auto& [label, n] : rows) sum_rows += comb2(n);
  for (const auto& [label, n] : cols) sum_cols += comb2(n);
  const double total = comb2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial (all singletons or one block): define as perfect.
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace wikiprof
