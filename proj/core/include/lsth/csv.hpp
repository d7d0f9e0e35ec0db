// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lsth {
namespace csv {

// RFC-4180 CSV: comma-separated, double-quote quoting, "" escapes a quote,
// records separated by LF or CRLF.

std::string encode_field(const std::string& field);
std::string encode_record(const std::vector<std::string>& fields);

// Splits the whole text into records of fields. Empty trailing line ignored.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace csv
}  // namespace lsth
