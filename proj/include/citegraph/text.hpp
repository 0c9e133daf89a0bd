#pragma once

#include <optional>
#include <string>
#include <vector>

namespace citegraph {

// Lowercases, folds accented Latin letters to ASCII, replaces punctuation by
// spaces and collapses whitespace. Input is treated as UTF-8; unmappable
// non-ASCII bytes are dropped.
std::string normalize_title(const std::string& title);

// Deterministic fallback key for records without a provider id:
// normalized title with '_' separators plus the year (or "noyear").
// Empty title after normalization yields an empty key.
std::string title_key(const std::string& title, std::optional<int> year);

// Percent-encodes everything outside [A-Za-z0-9._-] so any id can be used as
// a file name. Injective, so distinct ids never collide on disk.
std::string sanitize_for_filename(const std::string& id);

// Shortest round-trip decimal representation (std::to_chars), used wherever
// numbers end up in deterministic text output.
std::string format_double(double v);

// Minimal RFC 4180 quoting: fields containing comma, quote or newline are
// quoted, embedded quotes doubled.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split_line(const std::string& line);

std::string xml_escape(const std::string& text);

}  // namespace citegraph
