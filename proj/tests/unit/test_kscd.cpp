#include <gtest/gtest.h>

#include "kbo/checker.hpp"
#include "kbo/fuzz.hpp"
#include "kbo/sim.hpp"

using namespace kbo;

namespace {

const MessageId m1{1, 0}, m2{2, 0}, m3{3, 0};

ScenarioConfig broadcasts(std::uint32_t n, std::uint32_t k) {
  ScenarioConfig c;
  c.n = n;
  c.k = k;
  c.workload.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) c.workload[i].push_back(WorkloadItem::broadcast("x" + std::to_string(i + 1)));
  return c;
}

std::vector<std::pair<std::uint64_t, MessageSet>> sets_of(const Trace& t, ProcessId p) {
  std::vector<std::pair<std::uint64_t, MessageSet>> out;
  auto facts = extract_facts(t);
  for (const auto& sd : facts.set_deliveries[p]) out.emplace_back(sd.round, sd.set);
  return out;
}

std::vector<ScriptStep> script(std::initializer_list<const char*> toks) {
  std::vector<ScriptStep> out;
  for (const char* t : toks) out.push_back(parse_script_step(t));
  return out;
}

}  // namespace

TEST(KscdAbsorb, MinimalSetsPeeledInOrder) {
  KscdProcess p(ProcessId(1));
  EXPECT_EQ(p.absorb({{m1}, {m1, m2}}), (MessageSet{m1}));
  ASSERT_EQ(p.seq().size(), 1u);
  EXPECT_EQ(p.seq().front(), (MessageSet{m2}));
  EXPECT_EQ(p.absorb({{m2}}), (MessageSet{m2}));
  EXPECT_TRUE(p.seq().empty());
  EXPECT_EQ(p.delivered(), (MessageSet{m1, m2}));
}

TEST(KscdAbsorb, OldSeqPurgedAndEmptiedSetsDropped) {
  KscdProcess p(ProcessId(1));
  p.absorb({{m1}, {m1, m2}});  // seq = [{m2}]
  // New round returns {m3} < {m2, m3}: new_seq = [{m3}, {m2}], old {m2} purged away.
  EXPECT_EQ(p.absorb({{m3}, {m2, m3}}), (MessageSet{m3}));
  ASSERT_EQ(p.seq().size(), 1u);
  EXPECT_EQ(p.seq().front(), (MessageSet{m2}));
}

TEST(KscdAbsorb, NonChainOutputRejected) {
  KscdProcess p(ProcessId(1));
  EXPECT_THROW(p.absorb({{m1}, {m2}}), ProtocolViolation);
  KscdProcess q(ProcessId(1));
  EXPECT_THROW(q.absorb({}), ProtocolViolation);
}

TEST(Kscd, SoloBroadcastDeliversItself) {
  auto t = run(broadcasts(1, 1));
  ASSERT_TRUE(t.quiescent());
  auto sets = sets_of(t, ProcessId(1));
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].first, 0u);
  EXPECT_EQ(sets[0].second, (MessageSet{m1}));
  EXPECT_FALSE(any_failed(check_all(t)));
}

TEST(Kscd, ConcurrentBroadcastsReachEveryone) {
  auto c = broadcasts(2, 2);
  c.schedule_policy = SchedulePolicy::RoundRobin;
  auto t = run(c);
  ASSERT_TRUE(t.quiescent());
  for (std::uint32_t p = 1; p <= 2; ++p) {
    MessageSet all;
    for (const auto& [_, s] : sets_of(t, ProcessId(p))) all.insert(s.begin(), s.end());
    EXPECT_EQ(all, (MessageSet{m1, m2}));
  }
  auto v = check_all(t, {Suite::KSCD});
  EXPECT_EQ(find_verdict(v, "KSCD-Termination-2")->status, Verdict::Status::Pass);
}

// p2 proposes m2 before seeing m1; p1 proposes m1 and sees only its own view
// at SNAP1; p2 snapshots SNAP2 before p1 writes it. Then p1 delivers {m1} at
// round 0 keeping [{m2}] in seq, while p2 delivers {m1, m2}.
TEST(Kscd, NestedRoundSetsAndSeqPrefix) {
  auto c = broadcasts(2, 2);
  c.oracle_policy = OraclePolicy::Echo;
  c.schedule_policy = SchedulePolicy::Scripted;
  c.schedule_script = script({"2a", "2t", "1a", "1t",         // MEM writes and snapshots
                              "1t", "1t", "1t",               // p1: KSA, SNAP1 write, SNAP1 snapshot
                              "2t", "2t", "2t", "2t", "2t",   // p2 completes its K2S
                              "1t", "1t"});                   // p1: SNAP2 write, SNAP2 snapshot
  Simulator sim(c);
  for (std::size_t i = 0; i < c.schedule_script.size(); ++i) ASSERT_TRUE(sim.step());

  EXPECT_EQ(sim.kscd(ProcessId(1)).delivered(), (MessageSet{m1}));
  ASSERT_EQ(sim.kscd(ProcessId(1)).seq().size(), 1u);
  EXPECT_EQ(sim.kscd(ProcessId(1)).seq().front(), (MessageSet{m2}));
  EXPECT_EQ(sim.kscd(ProcessId(2)).delivered(), (MessageSet{m1, m2}));
  // msg_set_1(0) is a strict subset of msg_set_2(0); p1's seq prefix unions to the difference.
  EXPECT_TRUE(is_subset(sim.kscd(ProcessId(1)).delivered(), sim.kscd(ProcessId(2)).delivered()));

  auto t = sim.run();
  ASSERT_TRUE(t.quiescent());
  auto p1 = sets_of(t, ProcessId(1));
  ASSERT_EQ(p1.size(), 2u);
  EXPECT_EQ(p1[1], (std::pair<std::uint64_t, MessageSet>{1, {m2}}));
  auto p2 = sets_of(t, ProcessId(2));
  ASSERT_EQ(p2.size(), 1u);
  EXPECT_EQ(p2[0], (std::pair<std::uint64_t, MessageSet>{0, {m1, m2}}));
  EXPECT_FALSE(any_failed(check_all(t)));
}

TEST(Kscd, SenderCrashAfterMemWriteStillDelivered) {
  auto c = broadcasts(3, 2);
  c.schedule_policy = SchedulePolicy::Scripted;
  c.schedule_script = script({"2a"});  // p2 writes m2 to MEM, then crashes
  c.crash_plan = {{ProcessId(2), 1}};
  auto t = run(c);
  ASSERT_TRUE(t.quiescent());
  for (std::uint32_t p : {1u, 3u}) {
    MessageSet all;
    for (const auto& [_, s] : sets_of(t, ProcessId(p))) all.insert(s.begin(), s.end());
    EXPECT_TRUE(all.contains(m2)) << "p" << p;
  }
  EXPECT_TRUE(sets_of(t, ProcessId(2)).empty());
  EXPECT_FALSE(any_failed(check_all(t)));
}

TEST(Kscd, RoundsStrictlyIncreaseByDeliveredCount) {
  FuzzTemplate tpl;
  tpl.n = 4;
  tpl.k = 3;
  for (std::uint64_t i = 0; i < 30; ++i) {
    auto t = run(generate(tpl, i));
    for (const auto& [pid, sets] : extract_facts(t).set_deliveries) {
      std::uint64_t expected = 0;
      for (const auto& sd : sets) {
        EXPECT_EQ(sd.round, expected);
        expected += sd.set.size();
      }
    }
  }
}

TEST(Kscd, FuzzedRunsPassTheSuite) {
  for (std::uint32_t k = 1; k <= 3; ++k) {
    FuzzTemplate tpl;
    tpl.n = 4;
    tpl.k = k;
    tpl.crash_step_max = 320;
    for (const auto& r : fuzz_batch(tpl, 40, 4, {Suite::KSCD, Suite::RoundSync})) {
      EXPECT_TRUE(r.error.empty()) << r.error;
      for (const auto& v : r.verdicts) EXPECT_FALSE(v.failed()) << v.to_json().dump();
    }
  }
}
