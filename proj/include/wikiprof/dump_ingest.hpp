#pragma once

// Streaming reader for MediaWiki `pages-meta-history` XML exports and the
// per-contributor aggregation that feeds feature construction.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wikiprof/time_util.hpp"

namespace wikiprof {

struct Registered {
  std::optional<std::int64_t> id;  // dumps occasionally omit it
  std::string name;
  friend bool operator==(const Registered&, const Registered&) = default;
};

struct Anonymous {
  std::string ip;
  friend bool operator==(const Anonymous&, const Anonymous&) = default;
};

// Total order used for maps and for canonical output ordering.
struct ContributorKey {
  enum class Kind { RegisteredId, RegisteredName, Anonymous };
  Kind kind = Kind::RegisteredId;
  std::int64_t id = 0;
  std::string text;

  std::string str() const;  // "id:42", "name:Foo", "ip:1.2.3.4"
  static std::optional<ContributorKey> parse(std::string_view s);

  friend auto operator<=>(const ContributorKey&, const ContributorKey&) = default;
  friend bool operator==(const ContributorKey&, const ContributorKey&) = default;
};

struct ContributorRef {
  std::variant<Registered, Anonymous> identity;
  bool bot = false;

  bool anonymous() const { return std::holds_alternative<Anonymous>(identity); }
  // Registered contributors are keyed by id when present, else by name.
  ContributorKey key() const;
  // Username, or the IP address for anonymous edits.
  const std::string& display_name() const;

  friend bool operator==(const ContributorRef&, const ContributorRef&) = default;
};

struct RevisionEvent {
  std::int64_t page_id = 0;
  int ns = 0;
  Instant timestamp{};
  ContributorRef contributor;
  bool minor = false;
  friend bool operator==(const RevisionEvent&, const RevisionEvent&) = default;
};

struct ContributorHistory {
  ContributorRef contributor;
  std::map<int, std::int64_t> monthly_counts;  // month index -> edits
  Instant first_edit{};
  Instant last_edit{};
  std::int64_t distinct_articles = 0;

  std::int64_t total_edits() const;
  std::size_t active_months() const { return monthly_counts.size(); }
  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  friend bool operator==(const ContributorHistory&, const ContributorHistory&) = default;
};

using HistoryMap = std::map<ContributorKey, ContributorHistory>;

enum class Compression { Auto, None, Gzip, Bzip2 };

Compression detect_compression(std::span<const unsigned char> magic);
std::optional<Compression> parse_compression(std::string_view name);

struct IngestConfig {
  std::optional<std::set<int>> namespaces;  // nullopt keeps every namespace
  std::set<std::string> bot_list;
  Compression compression = Compression::Auto;
};

struct DumpParseError : std::runtime_error {
  DumpParseError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what), byte_offset(offset) {}
  std::uint64_t byte_offset;
};

struct SkippedRevision {
  std::int64_t page_id = 0;
  std::uint64_t byte_offset = 0;
  std::string reason;
};

struct ParseStats {
  std::uint64_t pages = 0;
  std::uint64_t revisions = 0;  // every <revision> element seen
  std::uint64_t events = 0;     // emitted after namespace filtering
  std::uint64_t filtered = 0;   // dropped by the namespace filter
  std::vector<SkippedRevision> skipped;
};

// True iff `name` is listed or case-insensitively ends with "bot".
bool classify_bot(std::string_view name, const std::set<std::string>& bot_list);

// UTF-8, one username per line, `#` starts a comment.
std::set<std::string> load_bot_list(std::istream& in);
std::set<std::string> load_bot_list(const std::filesystem::path& path);

// Streams `source` through expat in fixed-size chunks; revision text is
// discarded as it arrives, so memory does not grow with text volume.
ParseStats parse_dump(std::istream& source, const IngestConfig& config,
                      const std::function<void(const RevisionEvent&)>& sink);
std::vector<RevisionEvent> parse_dump(std::istream& source, const IngestConfig& config,
                                      ParseStats* stats = nullptr);

// Opens a dump file, undoing gzip/bzip2 wrapping (detected from magic bytes
// when the config says Auto).
class DumpInput {
 public:
  DumpInput(const std::filesystem::path& path, Compression compression);
  ~DumpInput();
  DumpInput(const DumpInput&) = delete;
  DumpInput& operator=(const DumpInput&) = delete;

  std::istream& stream();
  Compression compression() const { return compression_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Compression compression_;
};

// Commutative accumulator; shards can be merged in any order.
class HistoryAccumulator {
 public:
  void add(const RevisionEvent& event);
  void merge(const HistoryAccumulator& other);
  HistoryMap finish() const;
  std::uint64_t event_count() const { return events_; }

 private:
  struct Entry {
    ContributorRef contributor;
    Instant name_seen{};  // registered name comes from the latest edit
    std::map<int, std::int64_t> monthly_counts;
    Instant first_edit{};
    Instant last_edit{};
    std::set<std::int64_t> pages;
  };
  static void absorb_identity(Entry& into, const ContributorRef& ref, Instant when);
  std::map<ContributorKey, Entry> entries_;
  std::uint64_t events_ = 0;
};

HistoryMap aggregate_histories(std::span<const RevisionEvent> events);
// Splits events by contributor key into `shards` accumulators and merges
// them back; the result equals aggregate_histories for any shard count.
HistoryMap aggregate_histories_sharded(std::span<const RevisionEvent> events,
                                       unsigned shards);

}  // namespace wikiprof
