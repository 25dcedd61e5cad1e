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

#include <string>
#include <vector>

#include "asreval/stats.hpp"

namespace asreval::svg {

std::string escape_xml(const std::string& s);

// Standalone SVG document with one box-and-whisker glyph per summary, drawn
// on a shared y axis. Output is a pure function of the input.
std::string boxplot(const std::vector<stats::BoxplotSummary>& groups, const std::string& title,
                    const std::string& y_label);

}  // namespace asreval::svg
