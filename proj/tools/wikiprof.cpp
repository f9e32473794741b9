// wikiprof: contributor profiling pipeline front end.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wikiprof/dump_ingest.hpp"
#include "wikiprof/errors.hpp"
#include "wikiprof/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kIo = 3 };

constexpr const char* kSchemas = R"(Stage files (all written into --out):
  histories.jsonl      line 1 {"schema":"wikiprof.histories","version":1}; then one JSON
                       object per contributor: key, kind, id, name|ip, bot, first_edit,
                       last_edit, distinct_articles, monthly_counts {"YYYY-MM": n}
                       [, archetype for synthetic cohorts]
  features.csv         "# schema=wikiprof.features version=1", header
                       contributor,ratio,mean_gap,max_gap,num_cons,mean_month,sd,n_articles,total_edits
  correlation.json     schema wikiprof.correlation: 12 extended features, Pearson matrix
                       (null where a column has zero variance)
  clustering.json      schema wikiprof.clustering: k, medoids, assignment (1-based), silhouettes
  validation.csv       "# schema=wikiprof.validation version=1"; k,avg_silhouette,within_ss,cost
  dendrogram.csv/.nwk  Ward merges (step,left,right,height,size) and Newick tree
  interpretation.json  schema wikiprof.interpretation: PCA, ANOVA, Tukey, cluster profiles
  report.json/.md      final report (+ SVG charts with --svg)

Exit codes: 0 ok, 1 usage, 2 parse/schema error, 3 I/O error.
Config file (--config): key = value lines using the long option names, e.g. k-max = 8.)";

void print_ingest(const wikiprof::IngestSummary& s) {
  std::cout << "revisions: " << s.revisions << "\nevents: " << s.events << "\nskipped: " << s.skipped
            << "\ncontributors: " << s.contributors << "\nwrote " << s.histories.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wikiprof;
  namespace fs = std::filesystem;

  CLI::App app{"Cluster wiki contributors into behavioural profiles from revision-history dumps."};
  app.footer(kSchemas);
  app.set_config("--config", "", "Key-value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  PipelineConfig config;
  std::string compression = "auto";
  std::vector<int> namespaces;
  std::string bot_list;
  std::size_t fixed_k = 0;
  app.add_option("-o,--out", config.output_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", config.threads, "Worker threads (outputs do not depend on this)")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", config.seed, "Seed for synthetic cohorts")->capture_default_str();
  app.add_option("--compression", compression, "auto, none, gzip or bzip2")->capture_default_str();
  app.add_option("--namespaces", namespaces, "Keep only these page namespaces")->delimiter(',');
  app.add_option("--bot-list", bot_list, "File with one bot account name per line");
  app.add_option("--min-edits", config.min_edits, "Keep contributors with more than this many edits")
      ->capture_default_str();
  app.add_option("--k-min", config.k_min, "Smallest k evaluated")->capture_default_str();
  app.add_option("--k-max", config.k_max, "Largest k evaluated")->capture_default_str();
  app.add_option("--k", fixed_k, "Use this k instead of silhouette selection");
  app.add_option("--alpha", config.alpha, "Significance level for ANOVA/Tukey")->capture_default_str();
  app.add_flag("--svg", config.svg, "Also write SVG charts in the report stage");

  std::string dump, synthetic, histories, features, clustering, stage_dir;
  bool synthetic_flag = false;

  auto* ingest = app.add_subcommand("ingest", "Stream a dump into histories.jsonl");
  ingest->add_option("dump", dump, "pages-meta-history XML (plain, .gz or .bz2)");
  ingest->add_option("--synthetic", synthetic, "Generate a synthetic cohort from this archetype spec instead");

  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic cohort into histories.jsonl");
  synth->add_option("spec", synthetic, "Archetype spec (JSON); built-in defaults when omitted");

  auto* feat = app.add_subcommand("features", "Filter contributors and compute features.csv");
  feat->add_option("histories", histories, "histories.jsonl")->required();

  auto* clus = app.add_subcommand("cluster", "Ward + PAM clustering with silhouette selection");
  clus->add_option("features", features, "features.csv")->required();

  auto* interp = app.add_subcommand("interpret", "PCA, ANOVA, Tukey and archetype labels");
  interp->add_option("features", features, "features.csv")->required();
  interp->add_option("clustering", clustering, "clustering.json")->required();

  auto* report = app.add_subcommand("report", "Assemble report.json and report.md");
  report->add_option("dir", stage_dir, "Directory holding the stage outputs (default: --out)");

  auto* run = app.add_subcommand("run", "Run every stage in sequence");
  run->add_option("dump", dump, "pages-meta-history XML");
  run->add_option("--synthetic", synthetic, "Archetype spec to use instead of a dump");
  run->add_flag("--synthetic-defaults", synthetic_flag, "Use the built-in archetype defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const auto c = parse_compression(compression);
    if (!c) throw std::invalid_argument("unknown compression '" + compression + "'");
    config.compression = *c;
    if (!namespaces.empty()) config.namespaces = std::set<int>(namespaces.begin(), namespaces.end());
    if (!bot_list.empty()) config.bot_list = fs::path(bot_list);
    if (fixed_k) config.fixed_k = fixed_k;
    config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const auto out = config.output_dir;
    if (*ingest || *synth || *run) {
      const bool use_synth = *synth || !synthetic.empty() || synthetic_flag;
      if (!use_synth && dump.empty()) {
        std::cerr << "error: a dump path or --synthetic <spec> is required\n";
        return kUsage;
      }
      if (use_synth) {
        const auto spec = synthetic.empty() ? std::nullopt : std::optional<fs::path>(synthetic);
        print_ingest(synth_stage(config, spec));
      } else {
        config.input = dump;
        print_ingest(ingest_stage(config));
      }
      if (!*run) return kOk;
      histories = (out / files::kHistories).string();
    }
    if (*feat || *run) {
      const auto s = features_stage(histories, config);
      std::cout << "contributors: " << s.contributors_in << "\nretained: " << s.retained << "\nwrote "
                << s.features.string() << "\n";
      if (!*run) return kOk;
      features = (out / files::kFeatures).string();
    }
    if (*clus || *run) {
      const auto s = cluster_stage(features, config);
      std::cout << "k: " << s.k << "\navg_silhouette: " << s.avg_silhouette << "\nsizes:";
      for (auto n : s.sizes) std::cout << ' ' << n;
      std::cout << "\n";
      if (!*run) return kOk;
      clustering = (out / files::kClustering).string();
    }
    if (*interp || *run) {
      const auto s = interpret_stage(features, clustering, config);
      std::cout << "clusters:";
      for (const auto& l : s.labels) std::cout << ' ' << (l.empty() ? "-" : l);
      std::cout << "\n";
      if (!*run) return kOk;
    }
    report_stage(stage_dir.empty() ? out : fs::path(stage_dir), config);
    std::cout << "wrote " << ((stage_dir.empty() ? out : fs::path(stage_dir)) / files::kReportMarkdown).string()
              << "\n";
    return kOk;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return kParse;
  } catch (const DumpParseError& e) {
    std::cerr << "parse error at byte " << e.byte_offset << ": " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
}
