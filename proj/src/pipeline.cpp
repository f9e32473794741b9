#include "wikiprof/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wikiprof/cluster_engine.hpp"
#include "wikiprof/csv.hpp"
#include "wikiprof/errors.hpp"
#include "wikiprof/history_io.hpp"
#include "wikiprof/stats_interpret.hpp"
#include "wikiprof/svg.hpp"
#include "wikiprof/synth_oracle.hpp"

namespace wikiprof {

using nlohmann::json;
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (min_edits < 1) throw std::invalid_argument("min_edits must be >= 1");
  if (k_min < 2 || k_max > 50 || k_min > k_max)
    throw std::invalid_argument("k range must lie within [2, 50]");
  if (fixed_k && (*fixed_k < 2 || *fixed_k > 50))
    throw std::invalid_argument("k must lie within [2, 50]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

json versioned(const char* schema) { return json{{"schema", schema}, {"version", 1}}; }

json load_versioned(const fs::path& path, const char* schema) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError("<json>", 0, path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != schema)
    throw SchemaError("schema", 1, path.string() + ": expected '" + schema + "'");
  if (j.value("version", 0) != 1) throw SchemaError("version", 1, path.string() + ": unsupported");
  return j;
}

double parse_double(const std::string& text, const char* field, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw SchemaError(field, line, "not a number: '" + text + "'");
  return v;
}

std::int64_t parse_integer(const std::string& text, const char* field, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw SchemaError(field, line, "not an integer: '" + text + "'");
  return v;
}

std::string output_path(const PipelineConfig& c, const char* name) { return (c.output_dir / name).string(); }

}  // namespace

// ---------------------------------------------------------------------------
// Feature table

std::vector<FeatureRow> build_feature_rows(std::span<const ContributorHistory> filtered) {
  std::vector<FeatureRow> rows;
  rows.reserve(filtered.size());
  for (const auto& h : filtered)
    rows.push_back({h.contributor.key().str(), compute_features(h), h.distinct_articles, h.total_edits()});
  return rows;
}

std::string feature_table_csv(std::span<const FeatureRow> rows) {
  std::string out = std::string(kFeatureSchemaLine) + "\n" + kFeatureHeader + "\n";
  for (const auto& r : rows) {
    const auto& f = r.features;
    out += csv_join({r.contributor, format_number(f.ratio), format_number(f.mean_gap),
                     std::to_string(f.max_gap), std::to_string(f.num_cons), format_number(f.mean_month),
                     format_number(f.sd), std::to_string(r.n_articles), std::to_string(r.total_edits)});
    out += '\n';
  }
  return out;
}

std::vector<FeatureRow> read_feature_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&] {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next() || line != kFeatureSchemaLine)
    throw SchemaError("schema", line_no, std::string("expected '") + kFeatureSchemaLine + "'");
  if (!next() || line != kFeatureHeader)
    throw SchemaError("header", line_no, std::string("expected '") + kFeatureHeader + "'");
  static constexpr std::array<const char*, 9> kColumns = {
      "contributor", "ratio", "mean_gap", "max_gap", "num_cons", "mean_month", "sd", "n_articles", "total_edits"};
  std::vector<FeatureRow> rows;
  while (next()) {
    std::vector<std::string> f;
    try {
      f = csv_split(line);
    } catch (const std::invalid_argument& e) {
      throw SchemaError("contributor", line_no, e.what());
    }
    if (f.size() != kColumns.size())
      throw SchemaError(kColumns[std::min(f.size(), kColumns.size() - 1)], line_no,
                        "expected 9 fields, got " + std::to_string(f.size()));
    FeatureRow r;
    r.contributor = f[0];
    if (!ContributorKey::parse(r.contributor)) throw SchemaError("contributor", line_no, "bad key");
    r.features.ratio = parse_double(f[1], kColumns[1], line_no);
    r.features.mean_gap = parse_double(f[2], kColumns[2], line_no);
    r.features.max_gap = parse_integer(f[3], kColumns[3], line_no);
    r.features.num_cons = parse_integer(f[4], kColumns[4], line_no);
    r.features.mean_month = parse_double(f[5], kColumns[5], line_no);
    r.features.sd = parse_double(f[6], kColumns[6], line_no);
    r.n_articles = parse_integer(f[7], kColumns[7], line_no);
    r.total_edits = parse_integer(f[8], kColumns[8], line_no);
    if (!(r.features.ratio > 0)) throw SchemaError("ratio", line_no, "must be positive");
    if (r.features.mean_gap < 1 || static_cast<double>(r.features.max_gap) < r.features.mean_gap)
      throw SchemaError("mean_gap", line_no, "need 1 <= mean_gap <= max_gap");
    if (r.features.num_cons < 0) throw SchemaError("num_cons", line_no, "negative");
    if (r.features.sd < 0) throw SchemaError("sd", line_no, "negative");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FeatureRow> read_feature_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature table " + path.string());
  return read_feature_table(in);
}

// ---------------------------------------------------------------------------
// Stages

IngestSummary ingest_stage(const PipelineConfig& config) {
  config.validate();
  IngestConfig ingest;
  ingest.namespaces = config.namespaces;
  ingest.compression = config.compression;
  if (config.bot_list) ingest.bot_list = load_bot_list(*config.bot_list);

  DumpInput input(config.input, config.compression);
  const unsigned shards = std::max(1u, config.threads);
  std::vector<HistoryAccumulator> parts(shards);
  const std::hash<std::string> hasher;
  const auto stats = parse_dump(input.stream(), ingest, [&](const RevisionEvent& e) {
    parts[hasher(e.contributor.key().str()) % shards].add(e);
  });
  HistoryAccumulator merged;
  for (const auto& p : parts) merged.merge(p);
  const auto histories = merged.finish();

  IngestSummary s;
  s.revisions = stats.revisions;
  s.events = stats.events;
  s.skipped = stats.skipped.size();
  s.contributors = histories.size();
  s.histories = output_path(config, files::kHistories);
  std::ostringstream out;
  write_histories(out, histories);
  write_text_file(s.histories, out.str());
  return s;
}

IngestSummary synth_stage(const PipelineConfig& config, const std::optional<fs::path>& spec) {
  config.validate();
  const auto groups = spec ? read_cohort_spec(*spec) : default_cohort();
  const auto cohort = generate_cohort(groups, config.seed, config.threads);
  std::vector<HistoryRecord> records;
  for (const auto& m : cohort.members)
    records.push_back({m.history, std::string(archetype_name(m.archetype))});
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.history.contributor.key() < b.history.contributor.key();
  });
  IngestSummary s;
  for (const auto& r : records) s.events += static_cast<std::uint64_t>(r.history.total_edits());
  s.revisions = s.events;
  s.contributors = records.size();
  s.histories = output_path(config, files::kHistories);
  std::ostringstream out;
  write_histories(out, records);
  write_text_file(s.histories, out.str());
  return s;
}

FeatureSummary features_stage(const fs::path& histories_path, const PipelineConfig& config) {
  config.validate();
  const auto records = read_histories(histories_path);
  std::vector<ContributorHistory> histories;
  for (const auto& r : records) histories.push_back(r.history);
  const auto filtered = filter_contributors(std::span<const ContributorHistory>(histories), config.min_edits);
  const auto rows = build_feature_rows(filtered);

  FeatureSummary s;
  s.contributors_in = histories.size();
  s.retained = rows.size();
  s.features = output_path(config, files::kFeatures);
  write_text_file(s.features, feature_table_csv(rows));

  json corr = versioned("wikiprof.correlation");
  corr["contributors"] = filtered.size();
  if (filtered.size() >= 3) {
    std::vector<ExtendedFeatureVector> ext;
    for (const auto& h : filtered) ext.push_back(compute_extended_features(h));
    const auto cm = correlation_matrix(ext);
    corr["features"] = cm.names;
    json matrix = json::array();
    for (const auto& row : cm.values) {
      json r = json::array();
      for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
      matrix.push_back(std::move(r));
    }
    corr["matrix"] = std::move(matrix);
    json undefined = json::array();
    for (auto u : cm.undefined) undefined.push_back(cm.names[u]);
    corr["undefined"] = std::move(undefined);
  } else {
    corr["features"] = json::array();
    corr["matrix"] = json::array();
    corr["undefined"] = json::array();
  }
  write_text_file(output_path(config, files::kCorrelation), corr.dump(2) + "\n");
  return s;
}

ClusterSummary cluster_stage(const fs::path& features_path, const PipelineConfig& config) {
  config.validate();
  const auto rows = read_feature_table(features_path);
  const std::size_t n = rows.size();
  if (n < 3) throw SchemaError("contributor", 0, "clustering needs at least 3 contributors, got " + std::to_string(n));
  std::vector<FeatureVector> vectors;
  for (const auto& r : rows) vectors.push_back(r.features);
  const auto z = standardize(vectors);
  const auto d = distance_matrix(z.values, config.threads);
  const auto dend = ward_cluster(d);

  std::size_t k_min = config.fixed_k.value_or(config.k_min);
  std::size_t k_max = config.fixed_k.value_or(config.k_max);
  k_max = std::min(k_max, n - 1);
  k_min = std::min(k_min, k_max);
  const auto selection = select_k(d, z.values, k_min, k_max, config.threads);
  const auto& best = selection.chosen();

  std::vector<std::string> labels;
  for (const auto& r : rows) labels.push_back(r.contributor);
  write_text_file(output_path(config, files::kDendrogramCsv), dendrogram_csv(dend));
  write_text_file(output_path(config, files::kDendrogramNewick), dendrogram_newick(dend, labels) + "\n");

  std::string validation = "# schema=wikiprof.validation version=1\nk,avg_silhouette,within_ss,cost\n";
  for (const auto& row : selection.table)
    validation += std::to_string(row.k) + "," + format_number(row.avg_silhouette) + "," +
                  format_number(row.within_ss) + "," + format_number(row.cost) + "\n";
  write_text_file(output_path(config, files::kValidation), validation);

  json j = versioned("wikiprof.clustering");
  j["k"] = best.k;
  j["selection"] = config.fixed_k ? "fixed" : "max_avg_silhouette";
  j["k_range"] = {k_min, k_max};
  j["medoids"] = best.medoids;
  json medoid_keys = json::array();
  for (auto m : best.medoids) medoid_keys.push_back(rows[m].contributor);
  j["medoid_contributors"] = std::move(medoid_keys);
  j["assignment"] = best.assignment;
  j["contributors"] = labels;
  j["avg_silhouette"] = best.avg_silhouette;
  j["silhouettes"] = best.silhouettes;
  j["within_ss"] = best.within_ss;
  j["cost"] = best.cost;
  j["ward_cut"] = cut_dendrogram(dend, best.k);
  write_text_file(output_path(config, files::kClustering), j.dump(2) + "\n");

  ClusterSummary s;
  s.contributors = n;
  s.k = best.k;
  s.avg_silhouette = best.avg_silhouette;
  s.sizes.assign(best.k, 0);
  for (int a : best.assignment) ++s.sizes[static_cast<std::size_t>(a - 1)];
  return s;
}

namespace {

json box_json(const BoxStats& b) {
  return {{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}};
}

}  // namespace

InterpretSummary interpret_stage(const fs::path& features_path, const fs::path& clustering_path,
                                 const PipelineConfig& config) {
  config.validate();
  const auto rows = read_feature_table(features_path);
  const auto clustering = load_versioned(clustering_path, "wikiprof.clustering");
  const auto& assignment_json = clustering.at("assignment");
  const auto& contributors_json = clustering.at("contributors");
  if (!assignment_json.is_array() || assignment_json.size() != rows.size())
    throw SchemaError("assignment", 0, "length differs from the feature table");
  std::vector<int> assignment;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!assignment_json[i].is_number_integer()) throw SchemaError("assignment", 0, "non-integer label");
    if (contributors_json.at(i) != rows[i].contributor)
      throw SchemaError("contributors", 0, "row " + std::to_string(i) + " does not match the feature table");
    assignment.push_back(assignment_json[i].get<int>());
  }
  std::vector<FeatureVector> vectors;
  std::vector<double> articles;
  for (const auto& r : rows) {
    vectors.push_back(r.features);
    articles.push_back(static_cast<double>(r.n_articles));
  }
  const auto result = interpret(vectors, assignment, articles, config.alpha);

  json j = versioned("wikiprof.interpretation");
  j["k"] = result.profile.clusters.size();
  j["features"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  json loadings = json::array();
  for (std::size_t r = 0; r < result.pca.loadings.rows(); ++r) {
    const auto row = result.pca.loadings.row(r);
    loadings.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["pca"] = {{"eigenvalues", result.pca.eigenvalues},
              {"explained", result.pca.explained},
              {"loadings", std::move(loadings)},
              {"means", result.pca.means},
              {"scales", result.pca.scales}};
  json scores = json::array();
  for (std::size_t r = 0; r < result.scores.rows(); ++r) {
    const auto row = result.scores.row(r);
    scores.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["scores"] = std::move(scores);
  j["assignment"] = assignment;
  j["cluster_ids"] = result.cluster_ids;

  json anova = json::array(), tukey = json::array();
  if (result.anova) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const auto& a = (*result.anova)[f];
      anova.push_back({{"feature", kFeatureNames[f]},
                       {"ss_between", a.ss_between},
                       {"ss_within", a.ss_within},
                       {"df_between", a.df_between},
                       {"df_within", a.df_within},
                       {"f", a.degenerate && a.p == 0.0 ? json("Inf") : json(a.f)},
                       {"p", a.p},
                       {"degenerate", a.degenerate}});
      const auto& t = (*result.tukey)[f];
      json pairs = json::array();
      for (const auto& p : t.pairs)
        pairs.push_back({{"a", result.cluster_ids[p.a]},
                         {"b", result.cluster_ids[p.b]},
                         {"mean_diff", p.mean_diff},
                         {"std_error", p.std_error},
                         {"q", std::isinf(p.q) ? json("Inf") : json(p.q)},
                         {"p_adjusted", p.p_adjusted},
                         {"significant", p.significant}});
      tukey.push_back({{"feature", kFeatureNames[f]}, {"ms_within", t.ms_within},
                       {"df_within", t.df_within}, {"pairs", std::move(pairs)}});
    }
  }
  j["anova"] = std::move(anova);
  j["tukey"] = std::move(tukey);
  j["alpha"] = config.alpha;

  json clusters = json::array();
  InterpretSummary s;
  for (const auto& c : result.profile.clusters) {
    json feats = json::object();
    for (std::size_t f = 0; f < kFeatureCount; ++f) feats[kFeatureNames[f]] = box_json(c.features[f]);
    json evidence = json::array();
    for (const auto& e : c.evidence)
      evidence.push_back({{"feature", e.feature}, {"direction", e.direction}, {"significant", e.significant}});
    clusters.push_back({{"cluster", c.cluster},
                        {"size", c.size},
                        {"archetype", c.archetype ? json(archetype_name(*c.archetype)) : json(nullptr)},
                        {"features", std::move(feats)},
                        {"n_articles", c.articles ? box_json(*c.articles) : json(nullptr)},
                        {"evidence", std::move(evidence)}});
    s.labels.push_back(c.archetype ? std::string(archetype_name(*c.archetype)) : std::string());
  }
  j["clusters"] = std::move(clusters);
  json medians = json::object();
  for (std::size_t f = 0; f < kFeatureCount; ++f) medians[kFeatureNames[f]] = result.profile.global_medians[f];
  j["global_medians"] = std::move(medians);
  j["archetypes_assigned"] = result.profile.archetypes_assigned;
  j["label_error"] = result.label_error ? json(*result.label_error) : json(nullptr);
  write_text_file(output_path(config, files::kInterpretation), j.dump(2) + "\n");

  s.k = result.profile.clusters.size();
  s.explained = result.pca.explained;
  return s;
}

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<ValidationRow> read_validation(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<ValidationRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "# schema=wikiprof.validation version=1") throw SchemaError("schema", 1, "bad validation header");
      continue;
    }
    if (line_no == 2 || line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 4) throw SchemaError("k", line_no, "expected 4 fields");
    rows.push_back({static_cast<std::size_t>(parse_integer(f[0], "k", line_no)),
                    parse_double(f[1], "avg_silhouette", line_no), parse_double(f[2], "within_ss", line_no),
                    parse_double(f[3], "cost", line_no)});
  }
  return rows;
}

}  // namespace

void report_stage(const fs::path& dir, const PipelineConfig& config) {
  config.validate();
  const auto clustering = load_versioned(dir / files::kClustering, "wikiprof.clustering");
  const auto interp = load_versioned(dir / files::kInterpretation, "wikiprof.interpretation");
  const auto validation = read_validation(dir / files::kValidation);

  json report = versioned("wikiprof.report");
  report["contributors"] = clustering.at("assignment").size();
  report["k"] = clustering.at("k");
  report["avg_silhouette"] = clustering.at("avg_silhouette");
  report["within_ss"] = clustering.at("within_ss");
  json vt = json::array();
  for (const auto& r : validation)
    vt.push_back({{"k", r.k}, {"avg_silhouette", r.avg_silhouette}, {"within_ss", r.within_ss}, {"cost", r.cost}});
  report["validation"] = vt;
  json sizes = json::array();
  for (const auto& c : interp.at("clusters")) sizes.push_back(c.at("size"));
  report["cluster_sizes"] = sizes;
  report["clusters"] = interp.at("clusters");
  report["global_medians"] = interp.at("global_medians");
  report["pca"] = {{"eigenvalues", interp.at("pca").at("eigenvalues")},
                   {"explained", interp.at("pca").at("explained")},
                   {"loadings", interp.at("pca").at("loadings")}};
  report["anova"] = interp.at("anova");
  report["tukey"] = interp.at("tukey");
  report["archetypes_assigned"] = interp.at("archetypes_assigned");
  report["label_error"] = interp.at("label_error");
  write_text_file(dir / files::kReportJson, report.dump(2) + "\n");

  // Markdown
  std::ostringstream md;
  md << "# Contributor profile report\n\n";
  md << "- Contributors clustered: " << report["contributors"].get<std::size_t>() << "\n";
  md << "- Chosen k: " << report["k"].get<std::size_t>() << " (average silhouette "
     << fixed(report["avg_silhouette"].get<double>()) << ")\n";
  if (!interp.at("label_error").is_null())
    md << "- Archetype naming skipped: " << interp.at("label_error").get<std::string>() << "\n";
  md << "\n## Validation\n\n| k | avg silhouette | within SS | PAM cost |\n|---|---|---|---|\n";
  for (const auto& r : validation)
    md << "| " << r.k << " | " << fixed(r.avg_silhouette) << " | " << fixed(r.within_ss) << " | "
       << fixed(r.cost) << " |\n";
  md << "\n## Clusters\n\n| cluster | size | archetype |";
  for (auto name : kFeatureNames) md << " median " << name << " |";
  md << "\n|---|---|---|";
  for (std::size_t f = 0; f < kFeatureCount; ++f) md << "---|";
  md << "\n";
  for (const auto& c : interp.at("clusters")) {
    md << "| " << c.at("cluster").get<int>() << " | " << c.at("size").get<std::size_t>() << " | "
       << (c.at("archetype").is_null() ? std::string("-") : c.at("archetype").get<std::string>()) << " |";
    for (auto name : kFeatureNames) md << " " << fixed(c.at("features").at(name).at("median").get<double>()) << " |";
    md << "\n";
  }
  md << "\n## Principal components\n\n| component | eigenvalue | explained | cumulative |\n|---|---|---|---|\n";
  double cumulative = 0.0;
  const auto& ev = interp.at("pca").at("eigenvalues");
  const auto& ex = interp.at("pca").at("explained");
  for (std::size_t i = 0; i < ev.size(); ++i) {
    cumulative += ex[i].get<double>();
    md << "| PC" << i + 1 << " | " << fixed(ev[i].get<double>()) << " | " << fixed(ex[i].get<double>())
       << " | " << fixed(cumulative) << " |\n";
  }
  md << "\nLoadings (rows = features):\n\n| feature |";
  for (std::size_t i = 0; i < ev.size(); ++i) md << " PC" << i + 1 << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < ev.size(); ++i) md << "---|";
  md << "\n";
  const auto& loadings = interp.at("pca").at("loadings");
  for (std::size_t f = 0; f < loadings.size(); ++f) {
    md << "| " << kFeatureNames[f] << " |";
    for (const auto& v : loadings[f]) md << " " << fixed(v.get<double>()) << " |";
    md << "\n";
  }
  if (!interp.at("anova").empty()) {
    md << "\n## One-way ANOVA\n\n| feature | F | p | significant |\n|---|---|---|---|\n";
    const double alpha = interp.at("alpha").get<double>();
    for (const auto& a : interp.at("anova")) {
      const auto f = a.at("f").is_string() ? a.at("f").get<std::string>() : fixed(a.at("f").get<double>());
      md << "| " << a.at("feature").get<std::string>() << " | " << f << " | " << fixed(a.at("p").get<double>(), 6)
         << " | " << (a.at("p").get<double>() < alpha ? "yes" : "no") << " |\n";
    }
    md << "\n## Tukey HSD (significant pairs)\n\n| feature | pair | mean diff | p adj |\n|---|---|---|---|\n";
    for (const auto& t : interp.at("tukey"))
      for (const auto& p : t.at("pairs"))
        if (p.at("significant").get<bool>())
          md << "| " << t.at("feature").get<std::string>() << " | " << p.at("a").get<int>() << "-"
             << p.at("b").get<int>() << " | " << fixed(p.at("mean_diff").get<double>()) << " | "
             << fixed(p.at("p_adjusted").get<double>(), 6) << " |\n";
  }
  write_text_file(dir / files::kReportMarkdown, md.str());

  if (!config.svg) return;
  const auto& scores = interp.at("scores");
  const auto assignment = interp.at("assignment").get<std::vector<int>>();
  const std::size_t dims = scores.empty() ? 0 : scores[0].size();
  for (std::size_t a = 0; a < dims; ++a)
    for (std::size_t b = a + 1; b < dims; ++b) {
      std::vector<double> x, y;
      for (const auto& s : scores) {
        x.push_back(s[a].get<double>());
        y.push_back(s[b].get<double>());
      }
      const auto name = "PC" + std::to_string(a + 1) + "_PC" + std::to_string(b + 1);
      write_text_file(dir / ("pca_" + name + ".svg"),
                      svg::scatter(x, y, assignment, "PCA projection " + name, "PC" + std::to_string(a + 1),
                                   "PC" + std::to_string(b + 1)));
    }
  svg::Series sil{"average silhouette", {}, {}}, wss{"within SS", {}, {}};
  for (const auto& r : validation) {
    sil.x.push_back(static_cast<double>(r.k));
    sil.y.push_back(r.avg_silhouette);
    wss.x.push_back(static_cast<double>(r.k));
    wss.y.push_back(r.within_ss);
  }
  write_text_file(dir / "validation_silhouette.svg", svg::line_chart(std::span(&sil, 1), "Average silhouette width", "k"));
  write_text_file(dir / "validation_within_ss.svg", svg::line_chart(std::span(&wss, 1), "Total within sum of squares", "k"));
  for (auto name : kFeatureNames) {
    std::vector<BoxStats> boxes;
    std::vector<std::string> names;
    for (const auto& c : interp.at("clusters")) {
      const auto& b = c.at("features").at(name);
      boxes.push_back({b.at("min").get<double>(), b.at("q1").get<double>(), b.at("median").get<double>(),
                       b.at("q3").get<double>(), b.at("max").get<double>()});
      names.push_back(c.at("archetype").is_null() ? "cluster " + std::to_string(c.at("cluster").get<int>())
                                                  : c.at("archetype").get<std::string>());
    }
    write_text_file(dir / ("boxplot_" + std::string(name) + ".svg"), svg::boxplots(boxes, names, name));
  }
}

}  // namespace wikiprof
