#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small byte-level string helpers shared by the parsers. Text is UTF-8;
// case folding touches ASCII letters only.
namespace disfl::text {

bool is_space(char c) noexcept;

// Splits on runs of ASCII whitespace, dropping empty items.
std::vector<std::string_view> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& items, std::string_view sep = " ");

std::string ascii_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;

bool valid_utf8(std::string_view s) noexcept;

// Byte offsets of code point starts, plus a final entry equal to s.size().
std::vector<std::size_t> codepoint_offsets(std::string_view s);

// First code point of s (empty if s is empty).
std::string_view first_codepoint(std::string_view s);

}  // namespace disfl::text
