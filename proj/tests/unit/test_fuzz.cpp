#include <gtest/gtest.h>

#include "kbo/fuzz.hpp"

using namespace kbo;

TEST(Fuzz, GenerateIsDeterministic) {
  FuzzTemplate t;
  t.n = 4;
  for (std::uint64_t i = 0; i < 20; ++i) EXPECT_EQ(to_json(generate(t, i)), to_json(generate(t, i)));
  EXPECT_NE(to_json(generate(t, 1)), to_json(generate(t, 2)));
  t.seed_base = 100;
  EXPECT_EQ(generate(t, 0).seed, 100u);
}

TEST(Fuzz, CrashCountsCycle) {
  FuzzTemplate t;
  t.n = 5;
  t.crash_step_max = 50;
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto c = generate(t, i);
    EXPECT_EQ(c.crash_plan.size(), i % 5);
    std::set<ProcessId> pids;
    for (const auto& cp : c.crash_plan) {
      EXPECT_LE(cp.step, 50u);
      pids.insert(cp.pid);
    }
    EXPECT_EQ(pids.size(), c.crash_plan.size());
  }
  t.crashes = "none";
  EXPECT_TRUE(generate(t, 3).crash_plan.empty());
  t.crashes = "2";
  EXPECT_EQ(generate(t, 3).crash_plan.size(), 2u);
}

TEST(Fuzz, WorkloadShape) {
  FuzzTemplate t;
  t.n = 3;
  t.k = 2;
  for (std::uint64_t i = 0; i < 30; ++i) {
    auto c = generate(t, i);
    EXPECT_EQ(c.schedule_policy, SchedulePolicy::SeededRandom);
    for (const auto& items : c.workload) {
      EXPECT_GE(items.size(), t.min_items);
      EXPECT_LE(items.size(), t.max_items);
    }
  }
  t.protocol = Protocol::K2S;
  for (const auto& items : generate(t, 0).workload) EXPECT_EQ(items.size(), 1u);
}

TEST(Fuzz, ParallelMatchesSerial) {
  FuzzTemplate t;
  t.n = 3;
  t.k = 2;
  t.crash_step_max = 240;
  auto serial = fuzz_batch(t, 24, 1);
  auto parallel = fuzz_batch(t, 24, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(parallel[i].index, i);
    EXPECT_EQ(trace_text(serial[i].trace), trace_text(parallel[i].trace));
    EXPECT_EQ(report_text(serial[i].verdicts), report_text(parallel[i].verdicts));
  }
}

TEST(Fuzz, SummaryCounts) {
  FuzzTemplate t;
  t.n = 3;
  t.crash_step_max = 240;
  auto results = fuzz_batch(t, 12, 2);
  auto s = fuzz_summary(t, results);
  EXPECT_EQ(s["seeds"], 12);
  EXPECT_EQ(s["failed_seeds"], 0);
  EXPECT_EQ(s["crash_plans"]["by_planned_crashes"]["0"], 4);
  EXPECT_EQ(s["crash_plans"]["by_planned_crashes"]["2"], 4);
  const auto& kb = s["properties"]["KBO-Bounded"];
  EXPECT_EQ(kb["pass"].get<int>() + kb["fail"].get<int>() + kb["not-evaluated"].get<int>(), 12);
}

TEST(Fuzz, TemplateParsing) {
  auto t = fuzz_template_from_json(json::parse(R"({"format":"kbo-fuzz/1","n":5,"k":3,"crashes":"none"})"));
  EXPECT_EQ(t.n, 5u);
  EXPECT_EQ(t.k, 3u);
  EXPECT_EQ(t.crashes, "none");
  EXPECT_EQ(fuzz_template_from_json(to_json(t)).crash_step_max, t.crash_step_max);
  EXPECT_THROW(fuzz_template_from_json(json::parse(R"({"n":3,"typo":1})")), ConfigError);
  EXPECT_THROW(fuzz_template_from_json(json::parse(R"({"n":2,"k":3})")), ConfigError);
  EXPECT_THROW(fuzz_template_from_json(json::parse(R"({"crashes":"sometimes"})")), ConfigError);
}
