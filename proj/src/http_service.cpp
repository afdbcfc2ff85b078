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

#include "billboard/http_service.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"

#include "billboard/errors.hpp"
#include "billboard/metric_runner.hpp"
#include "billboard/pipeline.hpp"

namespace billboard {
namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kHtml = "text/html; charset=utf-8";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 const std::string& diagnostics = {}) {
  Json body = {{"error", message}};
  if (!diagnostics.empty()) body["diagnostics"] = diagnostics;
  reply(res, status, body);
}

/// Maps engine errors of a submission to 409 / 422 / 500 responses.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const DuplicateError& e) {
    reply_error(res, 409, e.what());
  } catch (const ScoringError& e) {
    reply_error(res, 422, e.what(), e.diagnostics());
  } catch (const ValidationError& e) {
    reply_error(res, 422, e.what());
  } catch (const ParseError& e) {
    reply_error(res, 422, e.what());
  } catch (const NotFoundError& e) {
    reply_error(res, 404, e.what());
  } catch (const Json::exception& e) {
    reply_error(res, 422, std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

Json receipt_json(const Receipt& r) {
  return {{"id", r.id}, {"accepted_at", r.accepted_at}, {"version", r.version}};
}

struct Job {
  std::string status = "queued";
  Json summary;
  std::string error;
};

}  // namespace

GeneratorSubmission generator_from_json(const Json& body) {
  try {
    GeneratorSubmission g;
    g.generator_id = body.at("generator_id").get<std::string>();
    g.kind = parse_generator_kind(body.value("kind", std::string("machine")));
    g.description = body.value("description", std::string{});
    g.outputs = parse_outputs(body.at("outputs"));
    return g;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid generator submission: ") + e.what());
  }
}

struct Service::Impl {
  Board& board;
  httplib::Server server;

  std::mutex published_mu;
  std::shared_ptr<const std::map<std::string, std::string>> published;

  std::mutex jobs_mu;
  std::condition_variable jobs_cv;
  std::map<std::string, Job> jobs;
  std::deque<std::string> queue;
  long next_job = 1;
  bool busy = false;
  bool stopping = false;
  std::thread worker;

  explicit Impl(Board& b) : board(b) {
    publish();
    routes();
    worker = std::thread([this] { work(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(jobs_mu);
      stopping = true;
    }
    jobs_cv.notify_all();
    if (worker.joinable()) worker.join();
  }

  void publish() {
    auto files = std::make_shared<std::map<std::string, std::string>>();
    for (ReportKind kind : {ReportKind::generators, ReportKind::metrics, ReportKind::ensemble,
                            ReportKind::overrate}) {
      for (ReportFormat format : {ReportFormat::json, ReportFormat::html, ReportFormat::tsv}) {
        (*files)[std::string(to_string(kind)) + "." + std::string(extension(format))] =
            current_report(board, kind, format);
      }
    }
    auto index = board.read_artifact("reports/index.html");
    (*files)["index.html"] = index ? *index : render_index(inventory(*board.snapshot()));
    std::lock_guard lock(published_mu);
    published = std::move(files);
  }

  std::shared_ptr<const std::map<std::string, std::string>> current() {
    std::lock_guard lock(published_mu);
    return published;
  }

  void serve_published(httplib::Response& res, const std::string& file) {
    const auto files = current();
    const auto it = files->find(file);
    if (it == files->end()) {
      reply_error(res, 404, "no report '" + file + "'");
      return;
    }
    const bool html = file.size() > 5 && file.compare(file.size() - 5, 5, ".html") == 0;
    const bool tsv = file.size() > 4 && file.compare(file.size() - 4, 4, ".tsv") == 0;
    res.status = 200;
    res.set_content(it->second, html ? kHtml : tsv ? "text/tab-separated-values" : kJson);
  }

  void work() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(jobs_mu);
        jobs_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping && queue.empty()) return;
        id = queue.front();
        queue.pop_front();
        jobs[id].status = "running";
        busy = true;
      }
      Job result;
      try {
        BoardLock lock(board.root());
        result.summary = to_json(recompute(board));
        result.status = "succeeded";
      } catch (const std::exception& e) {
        result.status = "failed";
        result.error = e.what();
      }
      publish();
      {
        std::lock_guard lock(jobs_mu);
        jobs[id] = std::move(result);
        busy = false;
      }
      jobs_cv.notify_all();
    }
  }

  std::string enqueue() {
    std::string id;
    {
      std::lock_guard lock(jobs_mu);
      id = "job-" + std::to_string(next_job++);
      jobs[id] = Job{};
      queue.push_back(id);
    }
    jobs_cv.notify_all();
    return id;
  }

  void routes() {
    server.Post("/api/v1/generators", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        GeneratorSubmission g = generator_from_json(Json::parse(req.body));
        BoardLock lock(board.root());
        reply(res, 201, receipt_json(board.add_generator(std::move(g))));
      });
    });
    server.Post("/api/v1/metrics", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        MetricSpec spec = metric_spec_from_json(Json::parse(req.body));
        BoardLock lock(board.root());
        reply(res, 201, receipt_json(submit_metric(board, std::move(spec))));
      });
    });
    server.Post("/api/v1/recompute", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 202, {{"job_id", enqueue()}});
    });
    server.Get(R"(/api/v1/recompute/([A-Za-z0-9._-]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 std::lock_guard lock(jobs_mu);
                 const auto it = jobs.find(req.matches[1].str());
                 if (it == jobs.end()) {
                   reply_error(res, 404, "unknown job '" + req.matches[1].str() + "'");
                   return;
                 }
                 Json body = {{"job_id", it->first}, {"status", it->second.status}};
                 if (!it->second.summary.is_null()) body["summary"] = it->second.summary;
                 if (!it->second.error.empty()) body["error"] = it->second.error;
                 reply(res, 200, body);
               });
    server.Get("/api/v1/leaderboard/generators",
               [this](const httplib::Request&, httplib::Response& res) {
                 serve_published(res, "generators.json");
               });
    server.Get("/api/v1/leaderboard/metrics",
               [this](const httplib::Request&, httplib::Response& res) {
                 serve_published(res, "metrics.json");
               });
    server.Get("/api/v1/ensemble/current", [this](const httplib::Request&, httplib::Response& res) {
      serve_published(res, "ensemble.json");
    });
    server.Get(R"(/api/v1/ensemble/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   const EnsembleModel m = registry_for(board).find(req.matches[1].str());
                   res.status = 200;
                   res.set_content(ensemble_file_content(m), kJson);
                 });
               });
    server.Get("/api/v1/analysis/overrate",
               [this](const httplib::Request&, httplib::Response& res) {
                 serve_published(res, "overrate.json");
               });
    server.Get(R"(/api/v1/generators/([^/]+)/outputs)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const SnapshotPtr snap = board.snapshot();
                 const auto it = snap->generators.find(req.matches[1].str());
                 if (it == snap->generators.end()) {
                   reply_error(res, 404, "unknown generator '" + req.matches[1].str() + "'");
                   return;
                 }
                 std::string body;
                 for (const auto& inst : snap->testset.instances()) {
                   body += Json{{"instance_id", inst.instance_id},
                                {"text", it->second.outputs.at(inst.instance_id)}}
                               .dump() +
                           "\n";
                 }
                 res.status = 200;
                 res.set_header("Content-Disposition",
                                "attachment; filename=\"" + it->first + ".jsonl\"");
                 res.set_content(body, "application/x-ndjson");
               });
    server.Get("/", [this](const httplib::Request&, httplib::Response& res) {
      serve_published(res, "index.html");
    });
    server.Get(R"(/reports/([A-Za-z0-9._-]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_published(res, req.matches[1].str());
               });
  }
};

Service::Service(Board& board) : impl_(std::make_unique<Impl>(board)) {}
Service::~Service() {
  stop();
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

std::string Service::enqueue_recompute() { return impl_->enqueue(); }

void Service::wait_idle() {
  std::unique_lock lock(impl_->jobs_mu);
  impl_->jobs_cv.wait(lock, [&] { return impl_->queue.empty() && !impl_->busy; });
}

}  // namespace billboard
