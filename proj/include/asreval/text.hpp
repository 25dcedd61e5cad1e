// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// UTF-8 helpers shared by WER normalization and the subword tokenizer.
// Case mapping and accent folding cover Latin-1, Latin Extended-A, basic
// Greek and Cyrillic, which is what English ASR transcripts contain.

#include <string>
#include <string_view>
#include <vector>

namespace asreval::text {

// Invalid byte sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t c);

char32_t to_lower(char32_t c);
std::string lowercase(std::string_view s);

bool is_whitespace(char32_t c);
bool is_control(char32_t c);
bool is_punctuation(char32_t c);
bool is_combining_mark(char32_t c);

// Canonical decomposition followed by removal of combining marks, so
// "é" and "é" both become "e". Letters without a decomposition
// (ø, æ, ß) pass through unchanged.
std::u32string strip_accents(std::u32string_view s);
std::string strip_accents(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace asreval::text
