// Copyright (c) 2026 The affectdialog Authors
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

#include <map>
#include <memory>
#include <string>

#include "json.hpp"

#include "affectdialog/annotations.hpp"
#include "affectdialog/generator.hpp"

namespace httplib {
class Server;
}

namespace affectdialog {

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

using QueryParams = std::map<std::string, std::string>;

/// Request handlers behind the HTTP endpoints. Errors become
/// {"error": message} bodies with a 4xx/5xx status.
///
///   POST /generate      GenerationRequest -> response + scored candidates.
///                       "assign_gamma": true draws gamma round-robin from
///                       the grid instead of using the request/default value.
///   POST /annotations   AnnotationRecord (id, timestamp optional) -> {id}
///   GET  /annotations   {annotations: [...]}
///   GET  /gamma-curve   curve + gamma_opt; ?emotion=NAME, ?min_vad_norm=X
///   GET  /health
class AffectService {
 public:
  /// `generator` may be null, in which case /generate answers 503.
  AffectService(std::shared_ptr<const Generator> generator, std::shared_ptr<AnnotationStore> store);

  HttpReply generate(const std::string& body);
  HttpReply post_annotation(const std::string& body);
  HttpReply get_annotations() const;
  HttpReply gamma_curve(const QueryParams& query) const;
  HttpReply health() const;

  /// Registers all routes (plus permissive CORS headers) on `server`.
  void bind(httplib::Server& server);

 private:
  std::shared_ptr<const Generator> generator_;
  std::shared_ptr<AnnotationStore> store_;
  GammaScheduler scheduler_;
};

/// Blocks serving on host:port until the process is stopped.
/// Throws std::runtime_error when the socket cannot be bound.
void serve(AffectService& service, const std::string& host, int port);

}  // namespace affectdialog
