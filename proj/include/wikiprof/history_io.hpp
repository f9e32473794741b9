#pragma once

// JSON-lines serialization of contributor histories.
//
// Line 1:  {"schema":"wikiprof.histories","version":1}
// Line 2+: one contributor per line, ordered by key:
//   {"key":"id:42","kind":"registered","id":42,"name":"Alice","bot":false,
//    "first_edit":"2011-01-05T10:00:00Z","last_edit":"2011-03-20T08:00:00Z",
//    "distinct_articles":2,"monthly_counts":{"2011-01":60,"2011-03":50}}
// Anonymous lines carry "kind":"anonymous" and "ip" instead of id/name.
// Synthetic cohorts add an optional "archetype" string.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wikiprof/dump_ingest.hpp"

namespace wikiprof {

inline constexpr const char* kHistorySchema = "wikiprof.histories";
inline constexpr int kHistoryVersion = 1;

struct HistoryRecord {
  ContributorHistory history;
  std::optional<std::string> archetype;
};

std::string history_to_json_line(const ContributorHistory& h,
                                 const std::optional<std::string>& archetype = std::nullopt);

void write_histories(std::ostream& out, const std::vector<HistoryRecord>& records);
void write_histories(std::ostream& out, const HistoryMap& histories);

// Throws SchemaError naming the offending field and line.
std::vector<HistoryRecord> read_histories(std::istream& in);
std::vector<HistoryRecord> read_histories(const std::filesystem::path& path);

}  // namespace wikiprof
