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

#include "billboard/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "billboard/errors.hpp"

namespace billboard {
namespace {

constexpr const char* kNoSubmissions = "No submissions yet.";

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tsv_field(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

std::string num(double v, int decimals = 4) { return fmt::format("{:.{}f}", v, decimals); }

std::string page(const Artifacts& a, const std::string& title, const std::string& body) {
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>" + escape_html(a.board_id) + " - " + escape_html(title) + "</title>\n";
  out +=
      "<style>\n"
      "body{font-family:sans-serif;margin:2em;}\n"
      "table{border-collapse:collapse;}\n"
      "th,td{border:1px solid #ccc;padding:4px 8px;text-align:right;}\n"
      "th:first-child,td:first-child{text-align:left;}\n"
      ".positive{background:#f8d7da;}\n"
      ".negative{background:#d1e7dd;}\n"
      ".empty{color:#666;font-style:italic;}\n"
      "</style>\n</head>\n<body>\n";
  out +=
      "<nav><a href=\"index.html\">Board</a> | <a href=\"generators.html\">Generators</a> | "
      "<a href=\"metrics.html\">Metrics</a> | <a href=\"ensemble.html\">Ensemble</a> | "
      "<a href=\"overrate.html\">Overrating</a></nav>\n";
  out += "<h1>" + escape_html(title) + "</h1>\n";
  out += fmt::format("<p>Board <code>{}</code>, version {}.</p>\n", escape_html(a.board_id),
                     a.board_version);
  out += body;
  out += "</body>\n</html>\n";
  return out;
}

std::string empty_state(const std::string& text) {
  return "<p class=\"empty\">" + escape_html(text) + "</p>\n";
}

Json header(const Artifacts& a) {
  return {{"board_id", a.board_id}, {"board_version", a.board_version}};
}

std::string kind_of(const Artifacts& a, const std::string& generator_id) {
  const auto it = a.generators.find(generator_id);
  return it == a.generators.end() ? "" : std::string(to_string(it->second));
}

// ---- generators -----------------------------------------------------------

Json generators_json(const Artifacts& a) {
  Json j = header(a);
  Json entries = Json::array();
  if (a.generator_ranking) {
    const auto& r = *a.generator_ranking;
    j["scorer"] = r.scorer;
    j["scorer_is_ensemble"] = r.scorer_is_ensemble;
    j["scorer_correlation"] = r.scorer_correlation;
    for (const auto& e : r.entries) {
      entries.push_back({{"rank", e.rank},
                         {"generator_id", e.generator_id},
                         {"kind", kind_of(a, e.generator_id)},
                         {"score", e.score}});
    }
  } else {
    j["scorer"] = nullptr;
    Json unranked = Json::array();
    for (const auto& [id, kind] : a.generators) unranked.push_back(id);
    j["unranked"] = std::move(unranked);
    j["note"] = a.generators.empty() ? kNoSubmissions : a.metric_ranking_note;
  }
  j["entries"] = std::move(entries);
  return j;
}

std::string generators_html(const Artifacts& a) {
  std::string body;
  if (a.generators.empty()) {
    body = empty_state(kNoSubmissions);
  } else if (!a.generator_ranking) {
    body = empty_state("Generators are not ranked yet: " + a.metric_ranking_note);
    body += "<ul>\n";
    for (const auto& [id, kind] : a.generators) {
      body += "<li>" + escape_html(id) + " (" + std::string(to_string(kind)) + ")</li>\n";
    }
    body += "</ul>\n";
  } else {
    const auto& r = *a.generator_ranking;
    body += fmt::format("<p>Scorer: <code>{}</code>{} (correlation {}).</p>\n",
                        escape_html(r.scorer), r.scorer_is_ensemble ? " [ensemble]" : "",
                        num(r.scorer_correlation));
    body += "<table>\n<tr><th>Generator</th><th>Rank</th><th>Kind</th><th>Score</th></tr>\n";
    for (const auto& e : r.entries) {
      body += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                          escape_html(e.generator_id), e.rank, kind_of(a, e.generator_id),
                          num(e.score));
    }
    body += "</table>\n";
  }
  return page(a, "Generator leaderboard", body);
}

std::string generators_tsv(const Artifacts& a) {
  std::string out = "rank\tgenerator_id\tkind\tscore\tscorer\n";
  if (!a.generator_ranking) return out;
  for (const auto& e : a.generator_ranking->entries) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", e.rank, tsv_field(e.generator_id),
                       kind_of(a, e.generator_id), num(e.score, 6),
                       tsv_field(a.generator_ranking->scorer));
  }
  return out;
}

// ---- metrics --------------------------------------------------------------

std::string direction_of(const Artifacts& a, const std::string& metric_id) {
  const auto it = a.metric_directions.find(metric_id);
  return it == a.metric_directions.end() ? "" : std::string(to_string(it->second));
}

Json metrics_json(const Artifacts& a) {
  Json j = header(a);
  Json entries = Json::array();
  for (const auto& e : a.metric_ranking) {
    entries.push_back({{"metric_id", e.metric_id},
                       {"direction", direction_of(a, e.metric_id)},
                       {"pearson_instance", e.pearson_instance},
                       {"kendall_system", e.kendall_system},
                       {"n_pairs", e.n_pairs},
                       {"degenerate", e.degenerate}});
  }
  j["entries"] = std::move(entries);
  Json rejected = Json::array();
  for (const auto& [id, diag] : a.rejected_metrics) {
    rejected.push_back({{"metric_id", id}, {"diagnostic", diag}});
  }
  j["rejected"] = std::move(rejected);
  if (a.metric_ranking.empty()) {
    j["note"] = a.metric_directions.empty() ? kNoSubmissions : a.metric_ranking_note;
  }
  return j;
}

std::string metrics_html(const Artifacts& a) {
  std::string body;
  if (a.metric_directions.empty() && a.rejected_metrics.empty()) {
    body = empty_state(kNoSubmissions);
  } else if (a.metric_ranking.empty()) {
    body = empty_state("Metrics are not ranked yet: " + a.metric_ranking_note);
  } else {
    body +=
        "<table>\n<tr><th>Metric</th><th>Pearson (instance)</th><th>Kendall (system)</th>"
        "<th>Pairs</th><th>Direction</th><th>Degenerate</th></tr>\n";
    for (const auto& e : a.metric_ranking) {
      body += fmt::format(
          "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
          escape_html(e.metric_id), num(e.pearson_instance), num(e.kendall_system), e.n_pairs,
          direction_of(a, e.metric_id), e.degenerate ? "yes" : "no");
    }
    body += "</table>\n";
  }
  if (!a.rejected_metrics.empty()) {
    body += "<h2>Rejected metrics</h2>\n<table>\n<tr><th>Metric</th><th>Diagnostic</th></tr>\n";
    for (const auto& [id, diag] : a.rejected_metrics) {
      body += "<tr><td>" + escape_html(id) + "</td><td><pre>" + escape_html(diag) +
              "</pre></td></tr>\n";
    }
    body += "</table>\n";
  }
  return page(a, "Metric leaderboard", body);
}

std::string metrics_tsv(const Artifacts& a) {
  std::string out = "metric_id\tpearson_instance\tkendall_system\tn_pairs\tdirection\tdegenerate\n";
  for (const auto& e : a.metric_ranking) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", tsv_field(e.metric_id),
                       num(e.pearson_instance, 6), num(e.kendall_system, 6), e.n_pairs,
                       direction_of(a, e.metric_id), e.degenerate ? "true" : "false");
  }
  return out;
}

// ---- ensemble -------------------------------------------------------------

Json ensemble_json(const Artifacts& a) {
  Json j = header(a);
  if (a.ensemble) {
    j["status"] = "fitted";
    j["model"] = to_json(*a.ensemble);
    j["formula"] = ensemble_formula(*a.ensemble);
    j["ablation"] = to_json(a.ablation);
  } else {
    j["status"] = "skipped";
    j["note"] = a.generators.empty() && a.metric_directions.empty() ? kNoSubmissions
                                                                     : a.ensemble_note;
    j["model"] = nullptr;
  }
  return j;
}

std::string ensemble_html(const Artifacts& a) {
  std::string body;
  if (!a.ensemble) {
    body = empty_state(a.generators.empty() && a.metric_directions.empty()
                           ? kNoSubmissions
                           : "No ensemble: " + a.ensemble_note);
    return page(a, "Ensemble metric", body);
  }
  const auto& m = *a.ensemble;
  body += "<p class=\"formula\">" + escape_html(ensemble_formula(m)) + "</p>\n";
  body += "<table>\n";
  body += "<tr><th>Signature</th><td><code>" + escape_html(m.signature) + "</code></td></tr>\n";
  body += fmt::format("<tr><th>&lambda;</th><td>{}</td></tr>\n", num(m.lambda, 6));
  body += fmt::format("<tr><th>Intercept</th><td>{}</td></tr>\n", num(m.intercept));
  body += fmt::format("<tr><th>CV correlation</th><td>{}</td></tr>\n", num(m.cv_correlation));
  body += fmt::format("<tr><th>Exact support</th><td>{}</td></tr>\n",
                      m.inexact_support ? "no" : "yes");
  body += "</table>\n";
  body += "<h2>Terms</h2>\n<table>\n<tr><th>Metric</th><th>Weight</th><th>Mean</th><th>Std</th></tr>\n";
  for (const auto& t : m.terms) {
    body += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                        escape_html(t.metric_id), num(t.weight), num(t.mean), num(t.std));
  }
  body += "</table>\n";
  if (!a.ablation.empty()) {
    body += "<h2>Ablation</h2>\n<table>\n<tr><th>Removed</th><th>CV correlation</th><th>Drop</th></tr>\n";
    for (const auto& e : a.ablation) {
      body += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                          escape_html(e.removed_metric_id), num(e.cv_correlation), num(e.drop));
    }
    body += "</table>\n";
  }
  return page(a, "Ensemble metric", body);
}

std::string ensemble_tsv(const Artifacts& a) {
  std::string out = "signature\tmetric_id\tweight\tmean\tstd\n";
  if (!a.ensemble) return out;
  for (const auto& t : a.ensemble->terms) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", tsv_field(a.ensemble->signature),
                       tsv_field(t.metric_id), num(t.weight, 6), num(t.mean, 6), num(t.std, 6));
  }
  return out;
}

// ---- overrate -------------------------------------------------------------

Json overrate_json(const Artifacts& a) {
  Json j = header(a);
  if (a.overrate) {
    j.update(to_json(*a.overrate));
  } else {
    j["rows"] = Json::array();
    j["failures"] = Json::array();
    j["note"] = a.generators.empty() ? kNoSubmissions : a.overrate_note;
  }
  return j;
}

std::string overrate_html(const Artifacts& a) {
  std::string body;
  if (!a.overrate) {
    body = empty_state(a.generators.empty() ? kNoSubmissions
                                            : "No overrating analysis: " + a.overrate_note);
    return page(a, "Overrating of machines over humans", body);
  }
  const auto& r = *a.overrate;
  if (!r.evaluated_human.empty()) {
    body += "<p>Evaluated human: <code>" + escape_html(r.evaluated_human) +
            "</code>; references: " + escape_html(r.reference_tags) + ".</p>\n";
  }
  if (r.rows.empty()) {
    body += empty_state("No metric could be fitted.");
  } else {
    body +=
        "<table>\n<tr><th>Metric</th><th>&beta;<sub>0</sub> (90% CI)</th><th>SE</th>"
        "<th>&sigma;<sup>2</sup><sub>&gamma;</sub></th><th>&sigma;<sup>2</sup><sub>&epsilon;</sub></th>"
        "<th>Significance</th></tr>\n";
    for (const auto& row : r.rows) {
      const std::string sig(to_string(row.significance));
      body += fmt::format(
          "<tr class=\"{}\"><td>{}</td><td>{}<sub>[{}, {}]</sub></td><td>{}</td><td>{}</td>"
          "<td>{}</td><td>{}</td></tr>\n",
          sig, escape_html(row.metric_id), num(row.fit.beta0, 2), num(row.fit.ci90_lo, 2),
          num(row.fit.ci90_hi, 2), num(row.fit.se_beta0), num(row.fit.sigma_gamma_sq),
          num(row.fit.sigma_eps_sq), sig);
    }
    body += "</table>\n<p>The ensemble row uses full-fit ensemble scores.</p>\n";
  }
  if (!r.failures.empty()) {
    body += "<h2>Not fitted</h2>\n<table>\n<tr><th>Metric</th><th>Reason</th></tr>\n";
    for (const auto& f : r.failures) {
      body += "<tr><td>" + escape_html(f.metric_id) + "</td><td>" + escape_html(f.error) +
              "</td></tr>\n";
    }
    body += "</table>\n";
  }
  return page(a, "Overrating of machines over humans", body);
}

std::string overrate_tsv(const Artifacts& a) {
  std::string out =
      "metric_id\tbeta0\tse\tci90_lo\tci90_hi\tsigma_gamma_sq\tsigma_eps_sq\tsignificance\n";
  if (!a.overrate) return out;
  for (const auto& row : a.overrate->rows) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", tsv_field(row.metric_id),
                       num(row.fit.beta0, 6), num(row.fit.se_beta0, 6), num(row.fit.ci90_lo, 6),
                       num(row.fit.ci90_hi, 6), num(row.fit.sigma_gamma_sq, 6),
                       num(row.fit.sigma_eps_sq, 6), to_string(row.significance));
  }
  return out;
}

}  // namespace

Artifacts inventory(const Snapshot& snapshot) {
  Artifacts a;
  a.board_id = snapshot.config.board_id;
  a.board_version = snapshot.config.version;
  for (const auto& [id, g] : snapshot.generators) a.generators[id] = g.kind;
  for (const auto& [id, rec] : snapshot.metrics) {
    if (rec.status == MetricStatus::active) {
      a.metric_directions[id] = rec.spec.direction;
    } else {
      a.rejected_metrics[id] = rec.diagnostic;
    }
  }
  a.metric_ranking_note = "recompute has not run";
  a.ensemble_note = "recompute has not run";
  a.overrate_note = "recompute has not run";
  return a;
}

ReportKind parse_report_kind(std::string_view s) {
  if (s == "generators") return ReportKind::generators;
  if (s == "metrics") return ReportKind::metrics;
  if (s == "ensemble") return ReportKind::ensemble;
  if (s == "overrate") return ReportKind::overrate;
  throw ValidationError("unknown report kind '" + std::string(s) + "'");
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "html") return ReportFormat::html;
  if (s == "tsv") return ReportFormat::tsv;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

std::string_view to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::generators: return "generators";
    case ReportKind::metrics: return "metrics";
    case ReportKind::ensemble: return "ensemble";
    case ReportKind::overrate: return "overrate";
  }
  return "generators";
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return "json";
    case ReportFormat::html: return "html";
    case ReportFormat::tsv: return "tsv";
  }
  return "json";
}

Json report_json(const Artifacts& a, ReportKind kind) {
  switch (kind) {
    case ReportKind::generators: return generators_json(a);
    case ReportKind::metrics: return metrics_json(a);
    case ReportKind::ensemble: return ensemble_json(a);
    case ReportKind::overrate: return overrate_json(a);
  }
  return {};
}

std::string render(const Artifacts& a, ReportKind kind, ReportFormat format) {
  if (format == ReportFormat::json) return report_json(a, kind).dump(2) + "\n";
  if (format == ReportFormat::html) {
    switch (kind) {
      case ReportKind::generators: return generators_html(a);
      case ReportKind::metrics: return metrics_html(a);
      case ReportKind::ensemble: return ensemble_html(a);
      case ReportKind::overrate: return overrate_html(a);
    }
  }
  switch (kind) {
    case ReportKind::generators: return generators_tsv(a);
    case ReportKind::metrics: return metrics_tsv(a);
    case ReportKind::ensemble: return ensemble_tsv(a);
    case ReportKind::overrate: return overrate_tsv(a);
  }
  return {};
}

std::string render_index(const Artifacts& a) {
  std::string body;
  if (a.generators.empty() && a.metric_directions.empty()) {
    body += empty_state(kNoSubmissions);
  }
  body += "<table>\n";
  body += fmt::format("<tr><th>Generators</th><td>{}</td></tr>\n", a.generators.size());
  body += fmt::format("<tr><th>Active metrics</th><td>{}</td></tr>\n", a.metric_directions.size());
  if (!a.metric_ranking.empty()) {
    body += "<tr><th>Top metric</th><td>" + escape_html(a.metric_ranking.front().metric_id) +
            " (" + num(a.metric_ranking.front().pearson_instance) + ")</td></tr>\n";
  }
  if (a.generator_ranking && !a.generator_ranking->entries.empty()) {
    body += "<tr><th>Top generator</th><td>" +
            escape_html(a.generator_ranking->entries.front().generator_id) + "</td></tr>\n";
  }
  if (a.ensemble) {
    body += "<tr><th>Ensemble</th><td>" + escape_html(ensemble_formula(*a.ensemble)) + " (" +
            num(a.ensemble->cv_correlation) + ")</td></tr>\n";
  }
  body += "</table>\n";
  return page(a, "Leaderboard", body);
}

std::string ensemble_formula(const EnsembleModel& model, int decimals) {
  auto terms = model.selected();
  std::stable_sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
    return std::abs(x.weight) > std::abs(y.weight);
  });
  if (terms.empty()) return num(model.intercept, decimals);
  std::string out;
  for (const auto& t : terms) {
    const std::string w = num(std::abs(t.weight), decimals);
    if (t.weight < 0.0) {
      out += "-";
    } else if (!out.empty()) {
      out += "+";
    }
    out += w + "·" + t.metric_id;
  }
  return out;
}

std::map<std::string, std::string> render_reports(const Artifacts& a) {
  std::map<std::string, std::string> out;
  for (ReportKind kind : {ReportKind::generators, ReportKind::metrics, ReportKind::ensemble,
                          ReportKind::overrate}) {
    for (ReportFormat format : {ReportFormat::json, ReportFormat::html, ReportFormat::tsv}) {
      out[std::string(to_string(kind)) + "." + std::string(extension(format))] =
          render(a, kind, format);
    }
  }
  out["index.html"] = render_index(a);
  return out;
}

}  // namespace billboard
