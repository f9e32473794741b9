// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <streambuf>

#include "oracles.hpp"
#include "wikiprof/cluster_engine.hpp"
#include "wikiprof/dump_ingest.hpp"
#include "wikiprof/feature_builder.hpp"
#include "wikiprof/history_io.hpp"
#include "wikiprof/pipeline.hpp"
#include "wikiprof/special_functions.hpp"
#include "wikiprof/stats_interpret.hpp"
#include "wikiprof/synth_oracle.hpp"

using namespace wikiprof;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = WIKIPROF_FIXTURES;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string problems;
  void require(bool ok, const std::string& what) {
    if (ok) return;
    problems += (problems.empty() ? "" : "; ") + what;
    pass = false;
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0) o.require(secs < budget_s, "runtime " + std::to_string(secs) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s (%.2f s) %s%s%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
              o.detail.str().c_str(), o.problems.empty() ? "" : " | failed: ", o.problems.c_str());
  std::fflush(stdout);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wikiprof_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Dump synthesis: one <revision> per edit of each history.

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

void write_cohort_dump(const std::vector<ContributorHistory>& histories, const fs::path& path) {
  struct Rev {
    std::string stamp;
    const ContributorHistory* who;
  };
  std::map<std::int64_t, std::vector<Rev>> pages;
  std::int64_t page_base = 0;
  for (const auto& h : histories) {
    std::int64_t edit = 0;
    const int first = h.monthly_counts.begin()->first, last = h.monthly_counts.rbegin()->first;
    for (const auto& [month, count] : h.monthly_counts) {
      for (std::int64_t i = 0; i < count; ++i, ++edit) {
        std::string stamp;
        if (month == first) stamp = format_timestamp(h.first_edit);
        else if (month == last) stamp = format_timestamp(h.last_edit);
        else stamp = format_month(month) + "-15T12:00:00Z";
        pages[page_base + 1 + edit % h.distinct_articles].push_back({stamp, &h});
      }
    }
    page_base += h.distinct_articles;
  }
  std::ofstream out(path, std::ios::binary);
  out << "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\">\n";
  std::int64_t rev_id = 0;
  for (const auto& [page, revs] : pages) {
    out << "<page><title>P" << page << "</title><ns>0</ns><id>" << page << "</id>\n";
    for (const auto& r : revs) {
      const auto& reg = std::get<Registered>(r.who->contributor.identity);
      out << "<revision><id>" << ++rev_id << "</id><timestamp>" << r.stamp << "</timestamp><contributor><username>"
          << xml_escape(reg.name) << "</username><id>" << *reg.id
          << "</id></contributor><text xml:space=\"preserve\">x</text></revision>\n";
    }
    out << "</page>\n";
  }
  out << "</mediawiki>\n";
}

// Endless-looking dump produced on the fly: `revisions` revisions, each with
// a `text_bytes` text body, never materialized as a whole.
class GeneratedDump : public std::streambuf {
 public:
  GeneratedDump(std::size_t revisions, std::size_t text_bytes) : revisions_(revisions), text_bytes_(text_bytes) {
    filler_.assign(64 * 1024, 'a');
    for (std::size_t i = 0; i < filler_.size(); i += 61) filler_[i] = ' ';
  }
  std::uint64_t text_emitted() const { return text_emitted_; }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    buf_.clear();
    refill();
    if (buf_.empty()) return traits_type::eof();
    setg(buf_.data(), buf_.data(), buf_.data() + buf_.size());
    return traits_type::to_int_type(*gptr());
  }

 private:
  void emit(const std::string& s) { buf_ += s; }
  void refill() {
    if (!opened_) {
      emit("<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\">\n"
           "<page><title>Big</title><ns>0</ns><id>1</id>\n");
      opened_ = true;
      return;
    }
    if (text_left_ > 0) {
      const std::size_t n = std::min(text_left_, filler_.size());
      buf_.append(filler_, 0, n);
      text_left_ -= n;
      text_emitted_ += n;
      if (text_left_ == 0) emit("</text></revision>\n");
      return;
    }
    if (next_ < revisions_) {
      ++next_;
      const int month = static_cast<int>(next_ % 12) + 1;
      char head[256];
      std::snprintf(head, sizeof head,
                    "<revision><id>%zu</id><timestamp>2015-%02d-10T08:00:00Z</timestamp><contributor>"
                    "<username>Writer%zu</username><id>%zu</id></contributor><text xml:space=\"preserve\">",
                    next_, month, next_ % 3, 1 + next_ % 3);
      emit(head);
      text_left_ = text_bytes_;
      return;
    }
    if (!closed_) {
      emit("</page>\n</mediawiki>\n");
      closed_ = true;
    }
  }

  std::size_t revisions_, text_bytes_;
  std::size_t next_ = 0, text_left_ = 0;
  std::uint64_t text_emitted_ = 0;
  bool opened_ = false, closed_ = false;
  std::string filler_, buf_;
};

long proc_status_kb(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key, 0) == 0) return std::strtol(line.c_str() + std::strlen(key) + 1, nullptr, 10);
  return -1;
}

bool reset_peak_rss() {
  std::ofstream f("/proc/self/clear_refs");
  f << "5";
  f.close();
  return static_cast<bool>(f);
}

std::map<std::string, std::string> directory_snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = read_text_file(e.path());
  return files;
}

double pam_cost_direct(const DistanceMatrix& d, const std::vector<std::size_t>& medoids) {
  double total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double best = INFINITY;
    for (auto m : medoids) best = std::min(best, d(i, m));
    total += best;
  }
  return total;
}

}  // namespace

int main() {
  std::printf("wikiprof acceptance suite\n");

  criterion(1, "end-to-end run on a MediaWiki dump (published counts need the 2018-01-01 dumps; not asserted)", 0,
            [](Outcome& o) {
              PipelineConfig cfg;
              cfg.seed = 1;
              if (const char* real = std::getenv("WIKIPROF_DUMP")) {
                cfg.input = real;
                cfg.output_dir = scratch("real");
                const auto s = ingest_stage(cfg);
                const auto f = features_stage(cfg.output_dir / files::kHistories, cfg);
                const auto c = cluster_stage(cfg.output_dir / files::kFeatures, cfg);
                interpret_stage(cfg.output_dir / files::kFeatures, cfg.output_dir / files::kClustering, cfg);
                report_stage(cfg.output_dir, cfg);
                o.detail << "supplied dump: " << s.events << " events, " << f.retained << " retained, k=" << c.k
                         << ", sizes";
                for (auto n : c.sizes) o.detail << ' ' << n;
                return;
              }
              // No real dump: render a synthetic cohort as XML, ingest it, and
              // require the feature table to equal the one computed directly.
              const auto direct = scratch("c1_direct");
              cfg.output_dir = direct;
              synth_stage(cfg, std::nullopt);
              features_stage(direct / files::kHistories, cfg);
              std::vector<ContributorHistory> hs;
              for (const auto& r : read_histories(direct / files::kHistories)) hs.push_back(r.history);
              const auto via_xml = scratch("c1_xml");
              write_cohort_dump(hs, via_xml / "dump.xml");
              cfg.output_dir = via_xml;
              cfg.input = via_xml / "dump.xml";
              const auto s = ingest_stage(cfg);
              const auto f = features_stage(via_xml / files::kHistories, cfg);
              const auto c = cluster_stage(via_xml / files::kFeatures, cfg);
              const auto i = interpret_stage(via_xml / files::kFeatures, via_xml / files::kClustering, cfg);
              report_stage(via_xml, cfg);
              o.require(read_text_file(via_xml / files::kFeatures) == read_text_file(direct / files::kFeatures),
                        "features from the XML dump differ from the direct cohort");
              o.require(fs::exists(via_xml / files::kReportMarkdown), "report missing");
              o.detail << "no dump supplied; synthetic XML dump: " << s.events << " events, " << f.retained
                       << " retained, k=" << c.k << ", sizes";
              for (auto n : c.sizes) o.detail << ' ' << n;
              o.detail << ", labels";
              for (const auto& l : i.labels) o.detail << ' ' << l;
            });

  criterion(2, "PAM vs exhaustive optimum on 200 random instances (n<=12, k<=3)", 10, [](Outcome& o) {
    std::mt19937_64 rng(2024);
    int equal = 0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t k = 2 + rng() % 2;
      const std::size_t n = k + 1 + rng() % (12 - k);
      const auto d = distance_matrix(oracle::random_points(rng, n, 6));
      const double opt = exhaustive_kmedoids(d, k).cost;
      const double got = pam(d, k).cost;
      o.require(got >= opt - 1e-12 * std::max(1.0, opt), "PAM below the global optimum at instance " + std::to_string(t));
      if (std::fabs(got - opt) <= 1e-12 * std::max(1.0, opt)) ++equal;
    }
    o.require(equal >= 190, "optimum reached in only " + std::to_string(equal) + "/200");
    o.detail << "optimum reached in " << equal << "/200";
  });

  criterion(3, "PAM local optimality on 50 random instances (n=100, k=4)", 30, [](Outcome& o) {
    std::mt19937_64 rng(77);
    std::size_t improving = 0;
    for (int t = 0; t < 50; ++t) {
      const auto d = distance_matrix(oracle::random_points(rng, 100, 6));
      const auto r = pam(d, 4);
      const double cost = pam_cost_direct(d, r.medoids);
      for (std::size_t mi = 0; mi < r.medoids.size(); ++mi)
        for (std::size_t h = 0; h < 100; ++h) {
          if (std::find(r.medoids.begin(), r.medoids.end(), h) != r.medoids.end()) continue;
          auto trial = r.medoids;
          trial[mi] = h;
          if (pam_cost_direct(d, trial) < cost - 1e-12 * cost) ++improving;
        }
    }
    o.require(improving == 0, std::to_string(improving) + " improving swaps found");
    o.detail << "19,200 swaps scanned, none improving";
  });

  criterion(4, "Ward merges equal the naive O(n^3) Lance-Williams oracle on 50 instances (n<=40)", 10,
            [](Outcome& o) {
              std::mt19937_64 rng(404);
              int mismatches = 0, non_monotone = 0;
              for (int t = 0; t < 50; ++t) {
                const std::size_t n = 2 + rng() % 39;
                const auto d = distance_matrix(oracle::random_points(rng, n, 6));
                const auto dend = ward_cluster(d);
                if (dend.merges != oracle::naive_ward(d)) ++mismatches;
                for (std::size_t s = 1; s < dend.merges.size(); ++s)
                  if (dend.merges[s].height < dend.merges[s - 1].height) ++non_monotone;
              }
              o.require(mismatches == 0, std::to_string(mismatches) + " merge sequences differ");
              o.require(non_monotone == 0, std::to_string(non_monotone) + " height decreases");
            });

  criterion(5, "silhouette equals the naive double loop within 1e-12 on 50 instances (n<=200)", 10,
            [](Outcome& o) {
              std::mt19937_64 rng(505);
              double worst = 0;
              for (int t = 0; t < 50; ++t) {
                const std::size_t n = 3 + rng() % 198;
                const std::size_t k = 2 + rng() % std::min<std::size_t>(8, n - 1);
                const auto d = distance_matrix(oracle::random_points(rng, n, 6));
                std::vector<int> labels(n);
                for (std::size_t i = 0; i < n; ++i) labels[i] = 1 + static_cast<int>(i < k ? i : rng() % k);
                std::shuffle(labels.begin(), labels.end(), rng);
                const auto got = silhouette(d, labels);
                const auto want = oracle::naive_silhouette(d, labels);
                double avg = 0;
                for (std::size_t i = 0; i < n; ++i) {
                  worst = std::max(worst, std::fabs(got.widths[i] - want[i]));
                  avg += want[i] / static_cast<double>(n);
                }
                worst = std::max(worst, std::fabs(got.average - avg));
              }
              o.require(worst <= 1e-12, "max deviation " + std::to_string(worst));
              o.detail << "max deviation " << worst;
            });

  criterion(6, "PCA orthonormality, eigen residuals, trace, projected variances, rank-1 fixture", 0, [](Outcome& o) {
    std::mt19937_64 rng(606);
    std::normal_distribution<double> g;
    const std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
    double orth = 0, resid = 0, trace = 0, var_rel = 0;
    for (int t = 0; t < 20; ++t) {
      const std::size_t n = 30 + rng() % 200;
      Matrix raw(n, 6);
      for (std::size_t i = 0; i < n; ++i) {
        const double common = g(rng);
        for (std::size_t j = 0; j < 6; ++j) raw(i, j) = (0.3 * static_cast<double>(j)) * common + g(rng) * (1 + j);
      }
      const auto z = standardize(raw, names);
      const auto m = pca_fit(z);
      const auto gram = m.loadings.transpose() * m.loadings;
      const auto cv = m.correlation * m.loadings;
      double sum = 0;
      for (std::size_t a = 0; a < 6; ++a) {
        sum += m.eigenvalues[a];
        for (std::size_t b = 0; b < 6; ++b) {
          orth = std::max(orth, std::fabs(gram(a, b) - (a == b ? 1.0 : 0.0)));
          resid = std::max(resid, std::fabs(cv(b, a) - m.eigenvalues[a] * m.loadings(b, a)));
        }
      }
      trace = std::max(trace, std::fabs(sum - 6.0));
      const auto scores = pca_project(m, z.values, 6);
      for (std::size_t j = 0; j < 6; ++j) {
        std::vector<double> col;
        for (std::size_t i = 0; i < n; ++i) col.push_back(scores(i, j));
        const double var = sample_sd(col) * sample_sd(col);
        var_rel = std::max(var_rel, std::fabs(var - m.eigenvalues[j]) / m.eigenvalues[j]);
      }
    }
    o.require(orth <= 1e-8, "orthonormality " + std::to_string(orth));
    o.require(resid <= 1e-8, "eigen residual " + std::to_string(resid));
    o.require(trace <= 1e-8, "trace deviation " + std::to_string(trace));
    o.require(var_rel <= 1e-6, "projected variance " + std::to_string(var_rel));

    Matrix rank1(20, 6);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 6; ++j) rank1(i, j) = std::sin(static_cast<double>(i)) * 3 + 1;
    const auto m1 = pca_fit(standardize(rank1, names));
    o.require(std::fabs(m1.explained[0] - 1.0) <= 1e-12, "rank-1 PC1 explains " + std::to_string(m1.explained[0]));
    char buf[200];
    std::snprintf(buf, sizeof buf, "orth %.1e, resid %.1e, trace %.1e, var %.1e, rank-1 PC1 %.12f", orth, resid, trace,
                  var_rel, m1.explained[0]);
    o.detail << buf;
  });

  criterion(7, "ANOVA F=13.5 and Monte Carlo p, Tukey q(2, 1e6), incomplete beta cross-check", 0, [](Outcome& o) {
    const std::vector<std::vector<double>> groups = {{1, 2, 3}, {4, 5, 6}};
    const auto a = anova_oneway(groups);
    o.require(a.f == 13.5, "F = " + std::to_string(a.f));
    const double mc = oracle::monte_carlo_f_tail(13.5, 1, 4, 1'000'000, 7);
    o.require(std::fabs(a.p - mc) <= 0.003, "p " + std::to_string(a.p) + " vs Monte Carlo " + std::to_string(mc));

    // 20 random fixtures: p against simulation of the F statistic under the null.
    std::mt19937_64 rng(707);
    std::normal_distribution<double> g;
    double worst_p = 0;
    int fixtures = 0;
    while (fixtures < 20) {
      std::vector<std::vector<double>> gs(2 + rng() % 4);
      for (std::size_t i = 0; i < gs.size(); ++i) {
        gs[i].resize(3 + rng() % 8);
        for (auto& v : gs[i]) v = g(rng) + 0.4 * static_cast<double>(i);
      }
      const auto r = anova_oneway(gs);
      if (r.p < 0.001) continue;
      ++fixtures;
      std::chi_squared_distribution<double> c1(r.df_between), c2(r.df_within);
      std::size_t hits = 0;
      const std::size_t draws = 1'000'000;
      for (std::size_t s = 0; s < draws; ++s)
        if ((c1(rng) / r.df_between) / (c2(rng) / r.df_within) > r.f) ++hits;
      worst_p = std::max(worst_p, std::fabs(r.p - static_cast<double>(hits) / draws));
    }
    o.require(worst_p <= 0.003, "random fixtures deviate by " + std::to_string(worst_p));

    const double q = studentized_range_quantile(0.95, 2, 1e6);
    o.require(std::fabs(q - 2.7718) <= 1e-3, "q = " + std::to_string(q));

    double worst_beta = 0;
    for (double aa : {0.5, 1.0, 1.5, 3.0, 8.0, 25.0})
      for (double bb : {0.5, 2.0, 4.5, 12.0, 30.0})
        for (double x : {0.01, 0.1, 0.25, 0.4, 0.55, 0.7}) {
          // The series converges well below the mean; use symmetry above it.
          const bool flip = x > aa / (aa + bb);
          const double want = flip ? 1.0 - oracle::series_incomplete_beta(bb, aa, 1.0 - x)
                                   : oracle::series_incomplete_beta(aa, bb, x);
          if (want < 1e-300) continue;
          worst_beta = std::max(worst_beta, std::fabs(incomplete_beta(aa, bb, x) - want) / want);
        }
    o.require(worst_beta <= 1e-10, "incomplete beta relative error " + std::to_string(worst_beta));
    char buf[256];
    std::snprintf(buf, sizeof buf, "p %.5f vs MC %.5f, 20 fixtures max |dp| %.5f, q %.5f, beta rel err %.1e", a.p, mc,
                  worst_p, q, worst_beta);
    o.detail << buf;
  });

  criterion(8, "synthetic recovery: k=4 and ARI>=0.9 in >=18/20 seeds, labels match planted archetypes", 60,
            [](Outcome& o) {
              int good = 0, label_mismatch = 0;
              std::ostringstream seeds;
              for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                const auto cohort = generate_cohort(default_cohort(), seed, 4);
                std::vector<ContributorHistory> hs;
                std::vector<int> truth;
                for (const auto& m : cohort.members) {
                  hs.push_back(m.history);
                  truth.push_back(static_cast<int>(m.archetype));
                }
                const auto filtered = filter_contributors(std::span<const ContributorHistory>(hs));
                std::vector<FeatureVector> fv;
                for (const auto& h : filtered) fv.push_back(compute_features(h));
                const auto z = standardize(fv);
                const auto d = distance_matrix(z.values, 4);
                const auto sel = select_k(d, z.values, 2, 10, 4);
                const auto& best = sel.chosen();
                const double ari = adjusted_rand_index(best.assignment, truth);
                seeds << " " << seed << ":k" << best.k << "/" << std::fixed;
                seeds.precision(3);
                seeds << ari;
                if (best.k == 4 && ari >= 0.9) {
                  ++good;
                  const auto profile = label_clusters(fv, best.assignment);
                  // Majority planted archetype per cluster must equal the assigned label.
                  for (const auto& c : profile.clusters) {
                    std::map<int, int> votes;
                    for (std::size_t i = 0; i < truth.size(); ++i)
                      if (best.assignment[i] == c.cluster) ++votes[truth[i]];
                    const auto top = std::max_element(votes.begin(), votes.end(), [](auto& x, auto& y) {
                      return x.second < y.second;
                    });
                    if (!c.archetype || static_cast<int>(*c.archetype) != top->first) ++label_mismatch;
                  }
                }
              }
              o.require(good >= 18, "only " + std::to_string(good) + "/20 seeds recovered");
              o.require(label_mismatch == 0, std::to_string(label_mismatch) + " cluster labels disagree");
              o.detail << good << "/20 recovered;" << seeds.str();
            });

  criterion(9, "fixture dumps give the expected filtered set; 1 GiB text dump streams in bounded memory", 0,
            [](Outcome& o) {
              for (const char* name : {"filter.xml", "filter.xml.gz", "filter.xml.bz2"}) {
                IngestConfig cfg;
                cfg.bot_list = load_bot_list(kFixtures / "bots.txt");
                DumpInput in(kFixtures / name, Compression::Auto);
                const auto events = parse_dump(in.stream(), cfg);
                const auto kept = filter_contributors(aggregate_histories(events));
                std::set<std::string> keys;
                for (const auto& h : kept) keys.insert(h.contributor.key().str());
                // Alice (110 edits, 2 months) and Bob (101 edits) stay. Carol has
                // exactly 100, Dave one month, CleanupBot and the listed Helper are
                // bots, 10.0.0.1 is anonymous, Eve has 5 edits.
                o.require(keys == std::set<std::string>{"id:1", "id:2"},
                          std::string(name) + " filtered set differs");
              }

              const bool peak_reset = reset_peak_rss();
              const long before = proc_status_kb(peak_reset ? "VmHWM:" : "VmRSS:");
              GeneratedDump gen(1024, 1024 * 1024);
              std::istream stream(&gen);
              ParseStats stats;
              std::uint64_t events = 0;
              parse_dump(stream, {}, [&](const RevisionEvent&) { ++events; });
              const long after = proc_status_kb("VmHWM:");
              const long growth_mb = (after - before) / 1024;
              o.require(events == 1024, "events " + std::to_string(events));
              o.require(gen.text_emitted() == (1ull << 30), "generated text volume wrong");
              o.require(growth_mb < 32, "peak memory grew by " + std::to_string(growth_mb) + " MiB");
              o.detail << "1 GiB of revision text parsed, peak RSS " << before / 1024 << " -> " << after / 1024
                       << " MiB (growth " << growth_mb << " MiB)"
                       << (peak_reset ? "" : " (peak reset unavailable; measured against current RSS)");
            });

  criterion(10, "every stage is byte-identical across re-runs and thread counts", 0, [](Outcome& o) {
    std::map<std::string, std::string> reference;
    std::map<std::string, std::string> ingest_reference;
    for (unsigned threads : {1u, 1u, 2u, 8u}) {
      PipelineConfig cfg;
      cfg.threads = threads;
      cfg.seed = 11;
      cfg.svg = true;
      cfg.output_dir = scratch("det");
      synth_stage(cfg, std::nullopt);
      features_stage(cfg.output_dir / files::kHistories, cfg);
      cluster_stage(cfg.output_dir / files::kFeatures, cfg);
      interpret_stage(cfg.output_dir / files::kFeatures, cfg.output_dir / files::kClustering, cfg);
      report_stage(cfg.output_dir, cfg);
      const auto snap = directory_snapshot(cfg.output_dir);
      if (reference.empty()) reference = snap;
      o.require(snap == reference, "synthetic chain differs at threads=" + std::to_string(threads));

      PipelineConfig ing;
      ing.threads = threads;
      ing.input = kFixtures / "filter.xml.bz2";
      ing.output_dir = scratch("det_ingest");
      ingest_stage(ing);
      features_stage(ing.output_dir / files::kHistories, ing);
      const auto isnap = directory_snapshot(ing.output_dir);
      if (ingest_reference.empty()) ingest_reference = isnap;
      o.require(isnap == ingest_reference, "ingest differs at threads=" + std::to_string(threads));
    }
    o.detail << reference.size() << " chain files and " << ingest_reference.size()
             << " ingest files identical for threads 1,1,2,8";
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
