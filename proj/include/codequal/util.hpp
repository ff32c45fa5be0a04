// Copyright 2026 The codequal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace codequal {

inline std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

/// Splits into lines, each retaining its trailing '\n' except a final
/// unterminated line. "" yields no lines; "a\nb" yields {"a\n", "b"}.
inline std::vector<std::string> split_lines_keep_ends(std::string_view s) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < s.size()) {
    size_t pos = s.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.emplace_back(s.substr(start));
      break;
    }
    lines.emplace_back(s.substr(start, pos - start + 1));
    start = pos + 1;
  }
  return lines;
}

inline int count_lines(std::string_view s) {
  if (s.empty()) return 0;
  int n = static_cast<int>(std::count(s.begin(), s.end(), '\n'));
  if (s.back() != '\n') ++n;
  return n;
}

/// Lowercases, maps punctuation to spaces, splits on whitespace.
inline std::vector<std::string> normalize_tokens(std::string_view text) {
  std::string norm;
  norm.reserve(text.size());
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      norm.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      norm.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  std::istringstream in(norm);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

inline std::set<std::string> token_set(std::string_view text) {
  auto toks = normalize_tokens(text);
  return std::set<std::string>(toks.begin(), toks.end());
}

inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

/// Decodes standard base64, skipping ASCII whitespace (the GitHub content
/// API wraps payloads at 60 columns). Returns false on any other
/// non-alphabet byte or truncated group.
inline bool base64_decode(std::string_view in, std::string& out) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  out.clear();
  out.reserve(in.size() / 4 * 3);
  int acc = 0;
  int bits = 0;
  int pad = 0;
  for (char c : in) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '=') {
      ++pad;
      continue;
    }
    if (pad > 0) return false;
    int v = value_of(c);
    if (v < 0) return false;
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
    }
  }
  return bits < 6 && pad <= 2;
}

inline bool is_valid_utf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      if (c < 0xC2) return false;  // overlong
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      if (c > 0xF4) return false;  // beyond U+10FFFF
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

/// Truncates to at most max_bytes without splitting a UTF-8 sequence.
inline std::string clip_utf8(std::string_view s, size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  size_t end = max_bytes;
  while (end > 0 &&
         (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80)
    --end;
  return std::string(s.substr(0, end));
}

/// Rounds to one decimal place, half away from zero.
inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

/// Formats with exactly one decimal digit, e.g. 7 -> "7.0".
inline std::string format1(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", x);
  return std::string(buf);
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  std::string h = to_lower(haystack);
  std::string n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

}  // namespace codequal
