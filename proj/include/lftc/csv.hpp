// Copyright 2026 The lftc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lftc/common.hpp"

namespace lftc::csv {

/// One parsed record and the 1-based physical line it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC 4180 reader: quoted fields may hold delimiters, doubled quotes and line
/// breaks. Records end at LF or CRLF. A leading UTF-8 BOM is skipped.
/// Throws ValidationError on an unterminated quote or stray quote.
inline std::vector<Record> parse(ByteView input, char delimiter = ',') {
  if (input.starts_with("\xEF\xBB\xBF")) input.remove_prefix(3);

  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t line = 1;
  current.line = line;
  bool field_touched = false;  // current field has content or an opening quote
  bool pending = false;        // a delimiter promised one more field

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_touched = false;
  };
  auto end_record = [&] {
    if (field_touched || pending) {
      end_field();
      records.push_back(std::move(current));
    }
    current = Record{};
    current.line = line;
    pending = false;
  };

  std::size_t i = 0;
  const std::size_t n = input.size();
  while (i < n) {
    const char c = input[i];
    if (c == '"' && !field_touched) {
      field_touched = true;
      const std::size_t open_line = line;
      ++i;
      for (;;) {
        if (i >= n) {
          throw ValidationError("csv: unterminated quoted field starting on line " +
                                std::to_string(open_line));
        }
        if (input[i] == '"') {
          if (i + 1 < n && input[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (input[i] == '\n') ++line;
        field.push_back(input[i++]);
      }
      if (i < n && input[i] != delimiter && input[i] != '\n' && input[i] != '\r') {
        throw ValidationError("csv: unexpected character after closing quote on line " +
                              std::to_string(line));
      }
      continue;
    }
    if (c == delimiter) {
      end_field();
      pending = true;
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < n && input[i + 1] == '\n') {
      ++i;
      continue;
    }
    if (c == '\n') {
      ++line;
      end_record();
      ++i;
      continue;
    }
    field_touched = true;
    field.push_back(c);
    ++i;
  }
  end_record();
  return records;
}

/// Quotes a field when it contains the delimiter, a quote, CR or LF, or
/// leading/trailing whitespace.
inline std::string escape(ByteView field, char delimiter = ',') {
  bool needs_quotes = field.empty() ? false : (field.front() == ' ' || field.back() == ' ');
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_row(const std::vector<std::string>& fields, char delimiter = ',') {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(delimiter);
    out += escape(fields[i], delimiter);
  }
  out.push_back('\n');
  return out;
}

}  // namespace lftc::csv
