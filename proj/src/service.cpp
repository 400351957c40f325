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

#include "affectdialog/service.hpp"

#include <cmath>
#include <exception>

#include "httplib.h"

namespace affectdialog {

namespace {

HttpReply error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

nlohmann::json parse_body(const std::string& body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw RequestError(std::string("body is not valid JSON: ") + e.what());
  }
}

}  // namespace

AffectService::AffectService(std::shared_ptr<const Generator> generator,
                             std::shared_ptr<AnnotationStore> store)
    : generator_(std::move(generator)), store_(std::move(store)) {
  if (!store_) throw std::invalid_argument("service needs an annotation store");
}

HttpReply AffectService::generate(const std::string& body) {
  if (!generator_) return error(503, "no models loaded");
  try {
    const nlohmann::json j = parse_body(body);
    GenerationRequest req = generation_request_from_json(j);
    if (j.value("assign_gamma", false)) req.gamma = scheduler_.next();
    const GenerationResult r = generator_->generate(req);
    nlohmann::json out = generator_->result_to_json(r);
    out["prompt"] = req.prompt;
    return {200, std::move(out)};
  } catch (const RequestError& e) {
    return error(400, e.what());
  }
}

HttpReply AffectService::post_annotation(const std::string& body) {
  try {
    const AnnotationRecord rec = annotation_from_json(parse_body(body));
    const std::string id = store_->record(rec);
    return {201, {{"id", id}}};
  } catch (const AnnotationError& e) {
    return error(400, e.what());
  } catch (const RequestError& e) {
    return error(400, e.what());
  }
}

HttpReply AffectService::get_annotations() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : store_->records()) list.push_back(annotation_to_json(r));
  return {200, {{"annotations", std::move(list)}}};
}

HttpReply AffectService::gamma_curve(const QueryParams& query) const {
  CurveFilter filter;
  if (auto it = query.find("emotion"); it != query.end()) {
    filter.emotion = parse_emotion(it->second);
    if (!filter.emotion) return error(400, "unknown emotion '" + it->second + "'");
  }
  if (auto it = query.find("min_vad_norm"); it != query.end()) {
    try {
      std::size_t used = 0;
      filter.min_vad_norm = std::stod(it->second, &used);
      if (used != it->second.size() || !std::isfinite(*filter.min_vad_norm)) throw std::invalid_argument("");
    } catch (const std::exception&) {
      return error(400, "min_vad_norm must be a number");
    }
  }
  const auto records = store_->records();
  GammaCurve curve;
  try {
    curve = compute_gamma_curve(records, filter);
  } catch (const std::invalid_argument& e) {
    return error(404, e.what());
  }
  nlohmann::json out = curve.to_json();
  out["gamma_opt"] = fit_gamma_opt(curve);
  return {200, std::move(out)};
}

HttpReply AffectService::health() const {
  return {200,
          {{"status", "ok"}, {"models_loaded", generator_ != nullptr}, {"annotations", store_->size()}}};
}

void AffectService::bind(httplib::Server& server) {
  const auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/generate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, generate(req.body));
  });
  server.Post("/annotations", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_annotation(req.body));
  });
  server.Get("/annotations", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, get_annotations());
  });
  server.Get("/gamma-curve", [this, send](const httplib::Request& req, httplib::Response& res) {
    QueryParams q;
    for (const auto& [k, v] : req.params) q[k] = v;
    send(res, gamma_curve(q));
  });
  server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(nlohmann::json{{"error", what}}.dump(), "application/json");
  });
}

void serve(AffectService& service, const std::string& host, int port) {
  httplib::Server server;
  service.bind(server);
  if (!server.listen(host, port)) {
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace affectdialog
