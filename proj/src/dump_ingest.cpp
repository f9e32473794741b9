#include "wikiprof/dump_ingest.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <exception>
#include <fstream>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "wikiprof/errors.hpp"

namespace wikiprof {

// ---------------------------------------------------------------------------
// Identity

std::string ContributorKey::str() const {
  switch (kind) {
    case Kind::RegisteredId:
      return "id:" + std::to_string(id);
    case Kind::RegisteredName:
      return "name:" + text;
    case Kind::Anonymous:
      return "ip:" + text;
  }
  return {};
}

std::optional<ContributorKey> ContributorKey::parse(std::string_view s) {
  ContributorKey key;
  if (s.starts_with("id:")) {
    key.kind = Kind::RegisteredId;
    const auto digits = s.substr(3);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), key.id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty())
      return std::nullopt;
    return key;
  }
  if (s.starts_with("name:") && s.size() > 5) {
    key.kind = Kind::RegisteredName;
    key.text = std::string(s.substr(5));
    return key;
  }
  if (s.starts_with("ip:") && s.size() > 3) {
    key.kind = Kind::Anonymous;
    key.text = std::string(s.substr(3));
    return key;
  }
  return std::nullopt;
}

ContributorKey ContributorRef::key() const {
  if (const auto* anon = std::get_if<Anonymous>(&identity))
    return {ContributorKey::Kind::Anonymous, 0, anon->ip};
  const auto& reg = std::get<Registered>(identity);
  if (reg.id) return {ContributorKey::Kind::RegisteredId, *reg.id, {}};
  return {ContributorKey::Kind::RegisteredName, 0, reg.name};
}

const std::string& ContributorRef::display_name() const {
  if (const auto* anon = std::get_if<Anonymous>(&identity)) return anon->ip;
  return std::get<Registered>(identity).name;
}

std::int64_t ContributorHistory::total_edits() const {
  std::int64_t total = 0;
  for (const auto& [month, count] : monthly_counts) total += count;
  return total;
}

void ContributorHistory::validate() const {
  if (monthly_counts.empty()) throw std::invalid_argument("monthly_counts is empty");
  for (const auto& [month, count] : monthly_counts)
    if (count < 1) throw std::invalid_argument("monthly count below 1 in " + format_month(month));
  if (first_edit > last_edit) throw std::invalid_argument("first_edit after last_edit");
  if (month_index(first_edit) != monthly_counts.begin()->first)
    throw std::invalid_argument("first_edit month differs from earliest active month");
  if (month_index(last_edit) != monthly_counts.rbegin()->first)
    throw std::invalid_argument("last_edit month differs from latest active month");
  if (distinct_articles < 1) throw std::invalid_argument("distinct_articles below 1");
  if (const auto* reg = std::get_if<Registered>(&contributor.identity)) {
    if (reg->name.empty()) throw std::invalid_argument("registered name is empty");
  } else if (contributor.bot) {
    throw std::invalid_argument("anonymous contributor flagged as bot");
  }
}

// ---------------------------------------------------------------------------
// Bots

bool classify_bot(std::string_view name, const std::set<std::string>& bot_list) {
  if (bot_list.contains(std::string(name))) return true;
  if (name.size() < 3) return false;
  const auto tail = name.substr(name.size() - 3);
  return std::tolower(static_cast<unsigned char>(tail[0])) == 'b' &&
         std::tolower(static_cast<unsigned char>(tail[1])) == 'o' &&
         std::tolower(static_cast<unsigned char>(tail[2])) == 't';
}

std::set<std::string> load_bot_list(std::istream& in) {
  std::set<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r\n");
    names.insert(line.substr(begin, end - begin + 1));
  }
  return names;
}

std::set<std::string> load_bot_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bot list " + path.string());
  return load_bot_list(in);
}

// ---------------------------------------------------------------------------
// Compression

Compression detect_compression(std::span<const unsigned char> magic) {
  if (magic.size() >= 2 && magic[0] == 0x1f && magic[1] == 0x8b) return Compression::Gzip;
  if (magic.size() >= 3 && magic[0] == 'B' && magic[1] == 'Z' && magic[2] == 'h')
    return Compression::Bzip2;
  return Compression::None;
}

std::optional<Compression> parse_compression(std::string_view name) {
  if (name == "auto") return Compression::Auto;
  if (name == "none" || name == "xml") return Compression::None;
  if (name == "gzip" || name == "gz") return Compression::Gzip;
  if (name == "bzip2" || name == "bz2") return Compression::Bzip2;
  return std::nullopt;
}

struct DumpInput::Impl {
  std::ifstream file;
  boost::iostreams::filtering_istream filtered;
};

DumpInput::DumpInput(const std::filesystem::path& path, Compression compression)
    : impl_(std::make_unique<Impl>()), compression_(compression) {
  impl_->file.open(path, std::ios::binary);
  if (!impl_->file) throw IoError("cannot open dump " + path.string());
  if (compression_ == Compression::Auto) {
    std::array<unsigned char, 3> magic{};
    impl_->file.read(reinterpret_cast<char*>(magic.data()), magic.size());
    const auto got = static_cast<std::size_t>(impl_->file.gcount());
    compression_ = detect_compression(std::span(magic).first(got));
    impl_->file.clear();
    impl_->file.seekg(0);
  }
  namespace io = boost::iostreams;
  if (compression_ == Compression::Gzip) impl_->filtered.push(io::gzip_decompressor());
  if (compression_ == Compression::Bzip2) impl_->filtered.push(io::bzip2_decompressor());
  impl_->filtered.push(impl_->file);
}

DumpInput::~DumpInput() = default;

std::istream& DumpInput::stream() { return impl_->filtered; }

// ---------------------------------------------------------------------------
// Streaming parser

namespace {

enum class Tag { Page, Ns, Id, Revision, Timestamp, Contributor, Username, Ip, Minor, Text, Other };

Tag classify_tag(std::string_view name) {
  if (name == "page") return Tag::Page;
  if (name == "ns") return Tag::Ns;
  if (name == "id") return Tag::Id;
  if (name == "revision") return Tag::Revision;
  if (name == "timestamp") return Tag::Timestamp;
  if (name == "contributor") return Tag::Contributor;
  if (name == "username") return Tag::Username;
  if (name == "ip") return Tag::Ip;
  if (name == "minor") return Tag::Minor;
  if (name == "text") return Tag::Text;
  return Tag::Other;
}

constexpr std::size_t kMaxFieldBytes = 4096;
constexpr std::size_t kChunkBytes = 1 << 16;

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  Int value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class ExpatDumpReader {
 public:
  ExpatDumpReader(const IngestConfig& config,
                  const std::function<void(const RevisionEvent&)>& sink)
      : config_(config), sink_(sink), parser_(XML_ParserCreate(nullptr)) {
    if (!parser_) throw std::bad_alloc();
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &ExpatDumpReader::on_start, &ExpatDumpReader::on_end);
    XML_SetCharacterDataHandler(parser_, &ExpatDumpReader::on_chars);
  }
  ~ExpatDumpReader() { XML_ParserFree(parser_); }
  ExpatDumpReader(const ExpatDumpReader&) = delete;
  ExpatDumpReader& operator=(const ExpatDumpReader&) = delete;

  ParseStats run(std::istream& source) {
    std::vector<char> chunk(kChunkBytes);
    bool done = false;
    while (!done) {
      source.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      const auto got = source.gcount();
      if (source.bad()) throw IoError("read failure while streaming dump");
      done = got == 0 || source.eof();
      if (XML_Parse(parser_, chunk.data(), static_cast<int>(got), done) == XML_STATUS_ERROR) {
        if (pending_) std::rethrow_exception(pending_);
        throw DumpParseError(std::string("malformed XML: ") +
                                 XML_ErrorString(XML_GetErrorCode(parser_)) + " at byte " +
                                 std::to_string(XML_GetCurrentByteIndex(parser_)),
                             static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser_)));
      }
    }
    return std::move(stats_);
  }

 private:
  static void on_start(void* self, const XML_Char* name, const XML_Char** /*attrs*/) {
    static_cast<ExpatDumpReader*>(self)->start(name);
  }
  static void on_end(void* self, const XML_Char* /*name*/) {
    static_cast<ExpatDumpReader*>(self)->end();
  }
  static void on_chars(void* self, const XML_Char* s, int len) {
    static_cast<ExpatDumpReader*>(self)->chars(std::string_view(s, static_cast<std::size_t>(len)));
  }

  Tag parent() const { return stack_.size() >= 2 ? stack_[stack_.size() - 2] : Tag::Other; }

  bool capturing() const {
    if (stack_.empty()) return false;
    switch (stack_.back()) {
      case Tag::Ns:
        return parent() == Tag::Page;
      case Tag::Id:
        return parent() == Tag::Page || parent() == Tag::Contributor;
      case Tag::Timestamp:
        return parent() == Tag::Revision;
      case Tag::Username:
      case Tag::Ip:
        return parent() == Tag::Contributor;
      default:
        return false;
    }
  }

  void start(std::string_view name) {
    stack_.push_back(classify_tag(name));
    field_.clear();
    field_overflow_ = false;
    switch (stack_.back()) {
      case Tag::Page:
        page_id_.reset();
        page_ns_ = 0;
        ++stats_.pages;
        break;
      case Tag::Revision:
        rev_ = {};
        rev_.offset = static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser_));
        ++stats_.revisions;
        break;
      case Tag::Minor:
        if (parent() == Tag::Revision) rev_.minor = true;
        break;
      default:
        break;
    }
  }

  void chars(std::string_view s) {
    if (!capturing()) return;
    if (field_.size() + s.size() > kMaxFieldBytes) {
      field_overflow_ = true;
      return;
    }
    field_.append(s);
  }

  void end() {
    const Tag tag = stack_.back();
    const Tag up = parent();
    if (capturing()) {
      const std::string_view value = field_overflow_ ? std::string_view{} : trim(field_);
      if (tag == Tag::Ns) {
        if (auto ns = parse_int<int>(value)) page_ns_ = *ns;
      } else if (tag == Tag::Id && up == Tag::Page) {
        page_id_ = parse_int<std::int64_t>(value);
      } else if (tag == Tag::Id) {
        rev_.contributor_id_text = std::string(value);
        rev_.has_contributor_id = true;
      } else if (tag == Tag::Timestamp) {
        rev_.timestamp = std::string(value);
      } else if (tag == Tag::Username) {
        rev_.username = std::string(value);
      } else if (tag == Tag::Ip) {
        rev_.ip = std::string(value);
      }
    }
    field_.clear();
    if (tag == Tag::Revision) finish_revision();
    stack_.pop_back();
  }

  void skip(const std::string& reason) {
    stats_.skipped.push_back({page_id_.value_or(0), rev_.offset, reason});
  }

  void finish_revision() {
    if (!page_id_ || *page_id_ <= 0) return skip("missing or invalid page id");
    const std::string stamp = rev_.timestamp.value_or("");
    const auto when = parse_timestamp(stamp);
    if (!when) return skip("unparseable timestamp '" + stamp + "'");

    RevisionEvent event;
    event.page_id = *page_id_;
    event.ns = page_ns_;
    event.timestamp = *when;
    event.minor = rev_.minor;
    if (rev_.ip && !rev_.ip->empty()) {
      event.contributor.identity = Anonymous{*rev_.ip};
    } else {
      Registered reg;
      if (rev_.has_contributor_id) {
        reg.id = parse_int<std::int64_t>(rev_.contributor_id_text);
        if (!reg.id) return skip("invalid contributor id '" + rev_.contributor_id_text + "'");
      }
      if (rev_.username && !rev_.username->empty()) {
        reg.name = *rev_.username;
      } else if (reg.id) {
        reg.name = "#" + std::to_string(*reg.id);
      } else {
        return skip("contributor identity missing or suppressed");
      }
      event.contributor.bot = classify_bot(reg.name, config_.bot_list);
      event.contributor.identity = std::move(reg);
    }

    if (config_.namespaces && !config_.namespaces->contains(event.ns)) {
      ++stats_.filtered;
      return;
    }
    ++stats_.events;
    try {
      sink_(event);
    } catch (...) {
      pending_ = std::current_exception();
      XML_StopParser(parser_, XML_FALSE);
    }
  }

  struct PendingRevision {
    std::uint64_t offset = 0;
    std::optional<std::string> timestamp;
    std::optional<std::string> username;
    std::optional<std::string> ip;
    std::string contributor_id_text;
    bool has_contributor_id = false;
    bool minor = false;
  };

  const IngestConfig& config_;
  const std::function<void(const RevisionEvent&)>& sink_;
  XML_Parser parser_;
  std::vector<Tag> stack_;
  std::string field_;
  bool field_overflow_ = false;
  std::optional<std::int64_t> page_id_;
  int page_ns_ = 0;
  PendingRevision rev_;
  ParseStats stats_;
  std::exception_ptr pending_;
};

}  // namespace

ParseStats parse_dump(std::istream& source, const IngestConfig& config,
                      const std::function<void(const RevisionEvent&)>& sink) {
  ExpatDumpReader reader(config, sink);
  return reader.run(source);
}

std::vector<RevisionEvent> parse_dump(std::istream& source, const IngestConfig& config,
                                      ParseStats* stats) {
  std::vector<RevisionEvent> events;
  auto result = parse_dump(source, config, [&](const RevisionEvent& e) { events.push_back(e); });
  if (stats) *stats = std::move(result);
  return events;
}

// ---------------------------------------------------------------------------
// Aggregation

void HistoryAccumulator::absorb_identity(Entry& into, const ContributorRef& ref, Instant when) {
  into.contributor.bot = into.contributor.bot || ref.bot;
  auto* mine = std::get_if<Registered>(&into.contributor.identity);
  const auto* theirs = std::get_if<Registered>(&ref.identity);
  if (!mine || !theirs) return;
  if (when > into.name_seen || (when == into.name_seen && theirs->name < mine->name)) {
    mine->name = theirs->name;
    into.name_seen = when;
  }
}

void HistoryAccumulator::add(const RevisionEvent& event) {
  ++events_;
  const auto key = event.contributor.key();
  auto [it, inserted] = entries_.try_emplace(key);
  Entry& entry = it->second;
  if (inserted) {
    entry.contributor = event.contributor;
    entry.name_seen = event.timestamp;
    entry.first_edit = event.timestamp;
    entry.last_edit = event.timestamp;
  } else {
    absorb_identity(entry, event.contributor, event.timestamp);
    entry.first_edit = std::min(entry.first_edit, event.timestamp);
    entry.last_edit = std::max(entry.last_edit, event.timestamp);
  }
  ++entry.monthly_counts[month_index(event.timestamp)];
  entry.pages.insert(event.page_id);
}

void HistoryAccumulator::merge(const HistoryAccumulator& other) {
  events_ += other.events_;
  for (const auto& [key, theirs] : other.entries_) {
    auto [it, inserted] = entries_.try_emplace(key, theirs);
    if (inserted) continue;
    Entry& mine = it->second;
    absorb_identity(mine, theirs.contributor, theirs.name_seen);
    mine.first_edit = std::min(mine.first_edit, theirs.first_edit);
    mine.last_edit = std::max(mine.last_edit, theirs.last_edit);
    for (const auto& [month, count] : theirs.monthly_counts) mine.monthly_counts[month] += count;
    mine.pages.insert(theirs.pages.begin(), theirs.pages.end());
  }
}

HistoryMap HistoryAccumulator::finish() const {
  HistoryMap out;
  for (const auto& [key, entry] : entries_) {
    ContributorHistory h;
    h.contributor = entry.contributor;
    h.monthly_counts = entry.monthly_counts;
    h.first_edit = entry.first_edit;
    h.last_edit = entry.last_edit;
    h.distinct_articles = static_cast<std::int64_t>(entry.pages.size());
    out.emplace(key, std::move(h));
  }
  return out;
}

HistoryMap aggregate_histories(std::span<const RevisionEvent> events) {
  HistoryAccumulator acc;
  for (const auto& e : events) acc.add(e);
  return acc.finish();
}

HistoryMap aggregate_histories_sharded(std::span<const RevisionEvent> events, unsigned shards) {
  if (shards == 0) shards = 1;
  std::vector<HistoryAccumulator> parts(shards);
  const std::hash<std::string> hasher;
  for (const auto& e : events) parts[hasher(e.contributor.key().str()) % shards].add(e);
  HistoryAccumulator merged;
  for (const auto& part : parts) merged.merge(part);
  return merged.finish();
}

}  // namespace wikiprof
