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

#include "billboard/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"

#include "billboard/errors.hpp"
#include "billboard/http_service.hpp"
#include "billboard/metric_runner.hpp"
#include "billboard/pipeline.hpp"

namespace billboard {
namespace {

namespace fs = std::filesystem;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

/// Splits "A,B" and "A B" into separate tags.
std::vector<std::string> split_tags(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::string cur;
    for (char c : item) {
      if (c == ',' || c == ' ') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Options {
  std::string board;
  // init
  std::string board_id;
  std::string testset;
  std::string judgments;
  std::vector<std::string> reference_tags;
  std::string evaluated_human;
  std::vector<std::string> mixed_effects_tags;
  bool exclude_human = false;
  std::string rubric_note;
  // submit-generator
  std::string file;
  std::string id;
  std::string kind = "machine";
  std::string description;
  // submit-metric
  std::string spec;
  // report
  std::string report_kind;
  std::string report_format = "json";
  // serve
  std::string host = "127.0.0.1";
  int port = 0;
};

fs::path board_dir(const Options& o) {
  if (o.board.empty()) {
    throw ValidationError("no board directory: pass --board or set BILLBOARD_HOME");
  }
  return o.board;
}

int cmd_init(const Options& o, std::ostream& out) {
  const fs::path dir = board_dir(o);
  BoardConfig config;
  config.board_id = o.board_id;
  config.reference_tags = split_tags(o.reference_tags);
  config.include_human_in_correlation = !o.exclude_human;
  config.rubric_note = o.rubric_note;
  if (!o.evaluated_human.empty() || !o.mixed_effects_tags.empty()) {
    config.mixed_effects = MixedEffectsConfig{o.evaluated_human, split_tags(o.mixed_effects_tags)};
  }
  TestSet testset = load_testset(o.testset);
  HumanJudgments judgments = load_judgments(o.judgments, testset);
  Board board = Board::create(dir, std::move(config), std::move(testset), std::move(judgments));
  const SnapshotPtr snap = board.snapshot();
  out << Json{{"board", dir.string()},
              {"board_id", snap->config.board_id},
              {"instances", snap->testset.size()},
              {"version", snap->config.version}}
             .dump(2)
      << "\n";
  return kExitOk;
}

Json receipt_json(const Receipt& r) {
  return {{"id", r.id}, {"accepted_at", r.accepted_at}, {"version", r.version}};
}

int cmd_submit_generator(const Options& o, std::ostream& out) {
  GeneratorSubmission g;
  g.generator_id = o.id;
  g.kind = parse_generator_kind(o.kind);
  g.description = o.description;
  g.outputs = load_outputs(o.file);
  const fs::path dir = board_dir(o);
  BoardLock lock(dir);
  Board board = Board::open(dir);
  out << receipt_json(board.add_generator(std::move(g))).dump(2) << "\n";
  return kExitOk;
}

int cmd_submit_metric(const Options& o, std::ostream& out) {
  Json j;
  try {
    j = Json::parse(read_file(o.spec));
  } catch (const Json::exception& e) {
    throw ParseError("'" + o.spec + "': " + e.what());
  }
  MetricSpec spec = metric_spec_from_json(j);
  const fs::path dir = board_dir(o);
  BoardLock lock(dir);
  Board board = Board::open(dir);
  out << receipt_json(submit_metric(board, std::move(spec))).dump(2) << "\n";
  return kExitOk;
}

int cmd_recompute(const Options& o, std::ostream& out) {
  const fs::path dir = board_dir(o);
  BoardLock lock(dir);
  Board board = Board::open(dir);
  Json summary = to_json(recompute(board));
  summary.erase("wall_seconds");
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const ReportKind kind = parse_report_kind(o.report_kind);
  const ReportFormat format = parse_report_format(o.report_format);
  Board board = Board::open(board_dir(o));
  out << current_report(board, kind, format);
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  int port = o.port;
  if (port == 0) port = std::stoi(env_or("BILLBOARD_PORT", "8080"));
  Board board = Board::open(board_dir(o));

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(board);
  const int bound = service.bind(o.host, port);
  if (bound < 0) {
    err << "cannot bind " << o.host << ":" << port << "\n";
    return kExitInternal;
  }
  out << Json{{"listening", o.host + ":" + std::to_string(bound)}}.dump() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  o.board = env_or("BILLBOARD_HOME", "");
  CLI::App app{"Bidimensional leaderboard engine", "billboard"};
  app.require_subcommand(1);
  app.add_option("--board", o.board, "Board directory (default: $BILLBOARD_HOME)");

  auto* init = app.add_subcommand("init", "Create a board");
  init->add_option("--board-id", o.board_id, "Board identifier")->required();
  init->add_option("--testset", o.testset, "Test set JSONL")->required();
  init->add_option("--judgments", o.judgments, "Human judgments JSONL")->required();
  init->add_option("--reference-tags", o.reference_tags, "Reference tags used for scoring");
  init->add_option("--evaluated-human", o.evaluated_human,
                   "Human generator evaluated by the overrating analysis");
  init->add_option("--mixed-effects-reference-tags", o.mixed_effects_tags,
                   "Reference tags for the overrating analysis");
  init->add_flag("--exclude-human-from-correlation", o.exclude_human,
                 "Leave human-kind generators out of correlation pools");
  init->add_option("--rubric-note", o.rubric_note, "Description of the judgment rubric");

  auto* gen = app.add_subcommand("submit-generator", "Submit generator outputs");
  gen->add_option("--file", o.file, "Outputs JSONL {instance_id, text}")->required();
  gen->add_option("--id", o.id, "Generator identifier")->required();
  gen->add_option("--kind", o.kind, "machine or human")->check(CLI::IsMember({"machine", "human"}));
  gen->add_option("--description", o.description, "Free-form description");

  auto* met = app.add_subcommand("submit-metric", "Submit a metric spec");
  met->add_option("--spec", o.spec, "Metric spec JSON")->required();

  app.add_subcommand("recompute", "Score pending cells and refresh analyses");

  auto* rep = app.add_subcommand("report", "Print a report");
  rep->add_option("--kind", o.report_kind, "generators, metrics, ensemble or overrate")
      ->required()
      ->check(CLI::IsMember({"generators", "metrics", "ensemble", "overrate"}));
  rep->add_option("--format", o.report_format, "json, html or tsv")
      ->check(CLI::IsMember({"json", "html", "tsv"}));

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", o.port, "Port (default: $BILLBOARD_PORT or 8080)");
  serve->add_option("--host", o.host, "Bind address");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (init->parsed()) return cmd_init(o, out);
    if (gen->parsed()) return cmd_submit_generator(o, out);
    if (met->parsed()) return cmd_submit_metric(o, out);
    if (app.got_subcommand("recompute")) return cmd_recompute(o, out);
    if (rep->parsed()) return cmd_report(o, out);
    if (serve->parsed()) return cmd_serve(o, out, err);
  } catch (const ScoringError& e) {
    err << "error: " << e.what() << "\n";
    if (!e.diagnostics().empty()) err << e.diagnostics() << "\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  err << app.help();
  return kExitInvalid;
}

}  // namespace billboard
