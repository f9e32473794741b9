#include "wikiprof/history_io.hpp"

#include <fstream>

#include <json.hpp>

#include "wikiprof/errors.hpp"

namespace wikiprof {

using nlohmann::json;

std::string history_to_json_line(const ContributorHistory& h,
                                 const std::optional<std::string>& archetype) {
  json j;
  j["key"] = h.contributor.key().str();
  if (const auto* reg = std::get_if<Registered>(&h.contributor.identity)) {
    j["kind"] = "registered";
    j["id"] = reg->id ? json(*reg->id) : json(nullptr);
    j["name"] = reg->name;
  } else {
    j["kind"] = "anonymous";
    j["ip"] = std::get<Anonymous>(h.contributor.identity).ip;
  }
  j["bot"] = h.contributor.bot;
  j["first_edit"] = format_timestamp(h.first_edit);
  j["last_edit"] = format_timestamp(h.last_edit);
  j["distinct_articles"] = h.distinct_articles;
  json months = json::object();
  for (const auto& [month, count] : h.monthly_counts) months[format_month(month)] = count;
  j["monthly_counts"] = std::move(months);
  if (archetype) j["archetype"] = *archetype;
  return j.dump();
}

void write_histories(std::ostream& out, const std::vector<HistoryRecord>& records) {
  out << json{{"schema", kHistorySchema}, {"version", kHistoryVersion}}.dump() << '\n';
  for (const auto& r : records) out << history_to_json_line(r.history, r.archetype) << '\n';
}

void write_histories(std::ostream& out, const HistoryMap& histories) {
  out << json{{"schema", kHistorySchema}, {"version", kHistoryVersion}}.dump() << '\n';
  for (const auto& [key, h] : histories) out << history_to_json_line(h) << '\n';
}

namespace {

const json& require(const json& j, const char* field, std::size_t line) {
  const auto it = j.find(field);
  if (it == j.end()) throw SchemaError(field, line, "missing");
  return *it;
}

std::string require_string(const json& j, const char* field, std::size_t line) {
  const json& v = require(j, field, line);
  if (!v.is_string()) throw SchemaError(field, line, "expected string");
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, const char* field, std::size_t line) {
  const json& v = require(j, field, line);
  if (!v.is_number_integer()) throw SchemaError(field, line, "expected integer");
  return v.get<std::int64_t>();
}

Instant require_instant(const json& j, const char* field, std::size_t line) {
  const auto text = require_string(j, field, line);
  const auto t = parse_timestamp(text);
  if (!t) throw SchemaError(field, line, "bad timestamp '" + text + "'");
  return *t;
}

HistoryRecord parse_line(const json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError("<record>", line, "expected JSON object");
  HistoryRecord rec;
  ContributorHistory& h = rec.history;
  const auto kind = require_string(j, "kind", line);
  if (kind == "registered") {
    Registered reg;
    const json& id = require(j, "id", line);
    if (id.is_number_integer()) {
      reg.id = id.get<std::int64_t>();
    } else if (!id.is_null()) {
      throw SchemaError("id", line, "expected integer or null");
    }
    reg.name = require_string(j, "name", line);
    if (reg.name.empty()) throw SchemaError("name", line, "empty");
    h.contributor.identity = std::move(reg);
  } else if (kind == "anonymous") {
    h.contributor.identity = Anonymous{require_string(j, "ip", line)};
  } else {
    throw SchemaError("kind", line, "expected 'registered' or 'anonymous'");
  }
  const json& bot = require(j, "bot", line);
  if (!bot.is_boolean()) throw SchemaError("bot", line, "expected boolean");
  h.contributor.bot = bot.get<bool>();
  h.first_edit = require_instant(j, "first_edit", line);
  h.last_edit = require_instant(j, "last_edit", line);
  h.distinct_articles = require_int(j, "distinct_articles", line);
  const json& months = require(j, "monthly_counts", line);
  if (!months.is_object()) throw SchemaError("monthly_counts", line, "expected object");
  for (const auto& [month, count] : months.items()) {
    const auto idx = parse_month(month);
    if (!idx) throw SchemaError("monthly_counts", line, "bad month '" + month + "'");
    if (!count.is_number_integer())
      throw SchemaError("monthly_counts", line, "count for " + month + " is not an integer");
    h.monthly_counts[*idx] = count.get<std::int64_t>();
  }
  const auto key = require_string(j, "key", line);
  if (key != h.contributor.key().str())
    throw SchemaError("key", line, "'" + key + "' does not match identity fields");
  if (const auto it = j.find("archetype"); it != j.end()) {
    if (!it->is_string()) throw SchemaError("archetype", line, "expected string");
    rec.archetype = it->get<std::string>();
  }
  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError("monthly_counts", line, e.what());
  }
  return rec;
}

}  // namespace

std::vector<HistoryRecord> read_histories(std::istream& in) {
  std::vector<HistoryRecord> out;
  std::string text;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError("<json>", line, e.what());
    }
    if (!header_seen) {
      if (!j.is_object() || j.value("schema", "") != kHistorySchema)
        throw SchemaError("schema", line, std::string("expected '") + kHistorySchema + "'");
      if (j.value("version", 0) != kHistoryVersion)
        throw SchemaError("version", line, "unsupported version");
      header_seen = true;
      continue;
    }
    out.push_back(parse_line(j, line));
  }
  if (!header_seen) throw SchemaError("schema", 1, "missing header line");
  return out;
}

std::vector<HistoryRecord> read_histories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open histories file " + path.string());
  return read_histories(in);
}

}  // namespace wikiprof
