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

#include <random>

#include <gtest/gtest.h>

#include "billboard/builtin_metrics.hpp"
#include "billboard/errors.hpp"
#include "billboard/metric_runner.hpp"
#include "test_util.hpp"

namespace billboard {
namespace {

using testing::plugin_spec;

ProtocolBatch batch_of(const std::vector<std::string>& ids) {
  ProtocolBatch b;
  b.metric_id = "m";
  for (const auto& id : ids) b.requests.push_back({id, "cand " + id, {"ref"}, std::nullopt});
  return b;
}

template <typename F>
ScoringError scoring_error(F&& f) {
  try {
    f();
  } catch (const ScoringError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ScoringError";
  return ScoringError("none");
}

TEST(Orient, IdentityAndNegation) {
  MetricSpec hb;
  hb.direction = Direction::higher_better;
  MetricSpec lb;
  lb.direction = Direction::lower_better;
  const std::vector<double> raw{0.1, 0.9};
  EXPECT_EQ(orient(hb, raw), raw);
  EXPECT_EQ(orient(lb, raw), (std::vector<double>{-0.1, -0.9}));
  const auto twice = orient(lb, orient(lb, raw));
  EXPECT_EQ(twice, raw);
}

TEST(Protocol, EncodeRequest) {
  const Json j = Json::parse(encode_request({"a7", "hi", {"r1", "r2"}, std::nullopt}));
  EXPECT_EQ(j.at("id"), "a7");
  EXPECT_EQ(j.at("candidate"), "hi");
  EXPECT_EQ(j.at("references").size(), 2u);
  EXPECT_TRUE(j.at("source").is_null());
  const Json k = Json::parse(encode_request({"b", "c", {}, std::string("src")}));
  EXPECT_EQ(k.at("source"), "src");
}

TEST(Protocol, ParseResponseLine) {
  const auto v = parse_responses(batch_of({"a7"}), "a7\t0.5312\n");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_DOUBLE_EQ(v[0], 0.5312);
  EXPECT_DOUBLE_EQ(parse_responses(batch_of({"a", "b"}), "a\t-1e-3\r\nb\t2")[1], 2.0);
}

TEST(Protocol, ParseErrors) {
  const auto b = batch_of({"a", "b", "c"});
  EXPECT_THROW(parse_responses(b, "a\t1\nb\t1\n"), ScoringError);
  EXPECT_THROW(parse_responses(b, "a\t1\nc\t1\nb\t1\n"), ScoringError);
  EXPECT_THROW(parse_responses(b, "a\t1\nb\tx\nc\t1\n"), ScoringError);
  EXPECT_THROW(parse_responses(b, "a\t1\nb 1\nc\t1\n"), ScoringError);
  EXPECT_THROW(parse_responses(b, "a\t1\nb\tnan\nc\t1\n"), ScoringError);
}

TEST(RunExternal, EchoPluginReturnsOnes) {
  const auto v = run_external(plugin_spec("m", {"const", "1.0"}), batch_of({"a", "b", "c"}));
  EXPECT_EQ(v, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(RunExternal, ProtocolVersionIsExported) {
  EXPECT_NO_THROW(run_external(plugin_spec("m", {"env"}), batch_of({"a"})));
}

TEST(RunExternal, CountMismatch) {
  const auto e = scoring_error(
      [&] { run_external(plugin_spec("m", {"short"}), batch_of({"a", "b", "c"})); });
  EXPECT_NE(std::string(e.what()).find("2 lines for 3 requests"), std::string::npos) << e.what();
}

TEST(RunExternal, NonzeroExitCarriesStderr) {
  const auto e = scoring_error([&] { run_external(plugin_spec("m", {"exit", "4"}), batch_of({"a"})); });
  EXPECT_NE(std::string(e.what()).find("status 4"), std::string::npos) << e.what();
  EXPECT_NE(e.diagnostics().find("plugin failed on purpose"), std::string::npos);
}

TEST(RunExternal, GarbageAndWrongId) {
  EXPECT_THROW(run_external(plugin_spec("m", {"garbage"}), batch_of({"a"})), ScoringError);
  EXPECT_THROW(run_external(plugin_spec("m", {"wrongid"}), batch_of({"a"})), ScoringError);
}

TEST(RunExternal, MissingExecutable) {
  MetricSpec s = plugin_spec("m", {"const"});
  s.executor = Executor::external({"/nonexistent/plugin"});
  EXPECT_THROW(run_external(s, batch_of({"a"})), ScoringError);
}

TEST(ScoreGenerator, TimeoutNamesInstance) {
  const TestSet ts = testing::make_testset(3);
  const auto g = testing::make_generator(ts, "sysA");
  const auto e = scoring_error(
      [&] { score_generator(plugin_spec("m", {"hang", "2"}, true, 1.0), g, ts, {}); });
  EXPECT_NE(std::string(e.what()).find("timed out"), std::string::npos) << e.what();
  EXPECT_NE(std::string(e.what()).find("'x3'"), std::string::npos) << e.what();
}

TEST(ScoreGenerator, BuiltinShapeAndDeterminism) {
  const TestSet ts = testing::make_testset(3);
  const auto g = testing::make_generator(ts, "sysA");
  const auto spec = testing::builtin_spec("bleu", "sentence_bleu");
  const auto a = score_generator(spec, g, ts, {});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a, score_generator(spec, g, ts, {}));
}

TEST(ScoreOne, SingleReference) {
  const auto spec = plugin_spec("m", {"refvalue"}, false);
  EXPECT_DOUBLE_EQ(score_one(spec, {"a", "c", {"0.25"}, std::nullopt}), 0.25);
}

TEST(ScoreOne, NonNativeMaxRuleHigherBetter) {
  const auto spec = plugin_spec("m", {"refvalue"}, false);
  EXPECT_DOUBLE_EQ(score_one(spec, {"a", "c", {"0.40", "0.70"}, std::nullopt}), 0.70);
}

TEST(ScoreOne, NonNativeMaxRuleLowerBetter) {
  auto spec = plugin_spec("m", {"refvalue"}, false);
  spec.direction = Direction::lower_better;
  const double raw = score_one(spec, {"a", "c", {"0.40", "0.70"}, std::nullopt});
  EXPECT_DOUBLE_EQ(raw, 0.40);
  EXPECT_DOUBLE_EQ(orient(spec.direction, raw), -0.40);
}

TEST(ScoreOne, NativeMetricGetsAllReferences) {
  const auto spec = plugin_spec("m", {"refcount"}, true);
  EXPECT_DOUBLE_EQ(score_one(spec, {"a", "c", {"x", "y", "z"}, std::nullopt}), 3.0);
  const auto split = plugin_spec("m", {"refcount"}, false);
  EXPECT_DOUBLE_EQ(score_one(split, {"a", "c", {"x", "y", "z"}, std::nullopt}), 1.0);
}

TEST(ScoreOne, ChrfMaxRuleProperty) {
  const auto spec = testing::builtin_spec("chrf", "chrf");
  std::mt19937_64 rng(5);
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "eps"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  auto sentence = [&] {
    std::string s;
    for (int i = 0; i < 4; ++i) s += words[pick(rng)] + " ";
    return s;
  };
  for (int t = 0; t < 50; ++t) {
    ScoringRequest req{"r", sentence(), {sentence(), sentence(), sentence()}, std::nullopt};
    double best = -1.0;
    for (const auto& ref : req.references) {
      best = std::max(best, score_one(spec, {"r", req.candidate, {ref}, std::nullopt}));
    }
    EXPECT_EQ(score_one(spec, req), best);
  }
}

TEST(ScoreGenerator, PluginMaxMatchesNativeMode) {
  const TestSet ts = testing::make_testset(4, {"A", "B"});
  auto g = testing::make_generator(ts, "sysA");
  g.outputs["x2"] = "reference B for item 2";
  const auto native = score_generator(plugin_spec("m", {"overlap"}, true), g, ts, {});
  const auto split = score_generator(plugin_spec("m", {"overlap"}, false), g, ts, {});
  EXPECT_EQ(native, split);
  EXPECT_DOUBLE_EQ(native[1], 1.0);
}

TEST(ScoreGenerator, ReferenceTagRestriction) {
  const TestSet ts = testing::make_testset(2, {"A", "B"});
  const auto g = testing::make_generator(ts, "sysA");
  const auto spec = plugin_spec("m", {"refcount"}, true);
  EXPECT_EQ(score_generator(spec, g, ts, {}), (std::vector<double>{2.0, 2.0}));
  EXPECT_EQ(score_generator(spec, g, ts, {"A"}), (std::vector<double>{1.0, 1.0}));
  EXPECT_THROW(score_generator(spec, g, ts, {"Z"}), ScoringError);
}

TEST(SmokeTest, ExternalFailureRejectsSubmission) {
  testing::TempDir dir;
  const TestSet ts = testing::make_testset(3);
  BoardConfig cfg;
  cfg.board_id = "demo";
  Board board = Board::create(dir.path() / "b", cfg, ts, testing::make_judgments(ts, {"a", "b"}));
  try {
    submit_metric(board, plugin_spec("bad", {"exit", "1"}));
    FAIL() << "expected rejection";
  } catch (const ScoringError& e) {
    EXPECT_NE(std::string(e.what()).find("smoke test"), std::string::npos);
    EXPECT_NE(e.diagnostics().find("plugin failed on purpose"), std::string::npos);
  }
  EXPECT_TRUE(board.snapshot()->metrics.empty());
  EXPECT_NO_THROW(submit_metric(board, plugin_spec("good", {"const", "0.5"})));
  EXPECT_THROW(submit_metric(board, plugin_spec("slow", {"hang", "0"}, true, 0.5)), ScoringError);
}

}  // namespace
}  // namespace billboard
