#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentinel::text {

// Replaces ASCII and C1 control characters with spaces, collapses whitespace
// runs to one space and trims both ends. Idempotent.
std::string normalize(std::string_view raw);

// Splits a single entry on the composite delimiters ';', '|' and newline,
// normalizes every piece and drops empty pieces.
std::vector<std::string> split_composite(std::string_view raw);

// Lowercased tokens: splits on Unicode whitespace and punctuation. Only ASCII
// letters are case-folded; other code points pass through unchanged.
std::vector<std::string> tokenize(std::string_view text);

// Number of whitespace-delimited words.
std::size_t word_count(std::string_view text);

// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t codepoint_count(std::string_view text);

}  // namespace sentinel::text
