/*
 * Copyright 2026 The Billboard Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 handling for the builtin metrics. Case folding covers ASCII,
// Latin-1, Latin Extended-A, Greek and Cyrillic; anything else is left as is.

namespace billboard::text {

bool is_valid_utf8(std::string_view s);

/// Decodes UTF-8; malformed bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

bool is_whitespace(char32_t c);
bool is_punctuation(char32_t c);
char32_t to_lower(char32_t c);

/// Lowercases, splits punctuation into standalone tokens, splits on whitespace.
std::vector<std::string> tokenize(std::string_view s);

/// Code points with all whitespace removed.
std::u32string strip_whitespace(std::string_view s);

}  // namespace billboard::text
