#ifndef OCP_UTF8_H_
#define OCP_UTF8_H_

#include <string>
#include <string_view>

namespace ocp::utf8 {

// Invalid byte sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view codepoints);
void append(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
// General category P* plus the ASCII symbol characters that tweet
// tokenizers conventionally treat as punctuation.
bool is_punctuation(char32_t cp);
// Simple one-to-one case folding for Latin, Greek and Cyrillic.
char32_t fold_case(char32_t cp);
std::string fold_case(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace ocp::utf8

#endif  // OCP_UTF8_H_
