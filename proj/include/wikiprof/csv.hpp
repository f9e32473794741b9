#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace wikiprof {

// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_number(double value);

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// RFC 4180 record splitting (quoted fields, doubled quotes). Records may not
// span lines.
std::vector<std::string> csv_split(std::string_view line);

}  // namespace wikiprof
