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

#include <filesystem>
#include <string>

#include "asreval/annotation.hpp"

namespace httplib {
class Server;
}

namespace asreval::annotation {

// Mounts the JSON API (and, if `static_dir` is non-empty, the browser UI)
// on `server`. Requests authenticate with "Authorization: Bearer <token>".
void register_routes(httplib::Server& server, AnnotationStore& store,
                     const std::filesystem::path& static_dir = {});

// Blocks serving on host:port.
void serve(AnnotationStore& store, const std::string& host, int port,
           const std::filesystem::path& static_dir = {});

}  // namespace asreval::annotation
