// kbosim: run scenarios, fuzz seeds, check traces, decompose into channels,
// replay golden files.
//
// Exit status: 0 pass / quiescent, 1 property failure (or golden mismatch),
// 2 usage, parse or validation error, 3 step budget exhausted.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kbo/checker.hpp"
#include "kbo/fuzz.hpp"
#include "kbo/poset.hpp"
#include "kbo/sim.hpp"

namespace {

enum Status { kOk = 0, kFail = 1, kUsage = 2, kBudget = 3 };

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

// Writes to `path`, or stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    spill(path, text);
}

int cmd_run(const std::string& scenario, const std::string& out, std::optional<std::uint64_t> seed) {
  auto config = kbo::load_config(scenario);
  if (seed) config.seed = *seed;
  auto trace = kbo::run(config);
  emit(out, kbo::trace_text(trace));
  if (!trace.quiescent()) {
    std::cerr << "kbosim: step budget exhausted after " << trace.ticks << " steps (partial trace written)\n";
    return kBudget;
  }
  return kOk;
}

int cmd_check(const std::string& trace_path, const std::string& suites, const std::string& out) {
  auto selected = kbo::parse_suites(suites);
  auto trace = kbo::load_trace(trace_path);
  auto verdicts = kbo::check_all(trace, selected);
  emit(out, kbo::report_text(verdicts));
  return kbo::any_failed(verdicts) ? kFail : kOk;
}

int cmd_decompose(const std::string& trace_path, std::uint32_t k, const std::string& out) {
  auto trace = kbo::load_trace(trace_path);
  auto order = kbo::delivery_order(trace);
  auto poset = kbo::build_order(order);
  kbo::json j;
  j["k"] = k;
  j["width"] = kbo::width(poset);
  try {
    auto assignment = kbo::decompose_channels(poset, k);
    kbo::json channels = kbo::json::array();
    for (std::size_t c = 0; c < assignment.channels.size(); ++c) {
      kbo::json ms = kbo::json::array();
      for (const auto& m : assignment.channels[c]) ms.push_back(m.str());
      channels.push_back(kbo::json{{"channel", c + 1}, {"messages", ms}});
    }
    j["channels"] = channels;
    // Each non-faulty process's sequence split by channel.
    kbo::json per = kbo::json::object();
    for (const auto& [pid, seq] : order.per_process) {
      if (order.faulty.contains(pid)) continue;
      kbo::json by = kbo::json::array();
      for (std::size_t c = 0; c < assignment.channels.size(); ++c) {
        kbo::json s = kbo::json::array();
        for (const auto& m : seq)
          if (assignment.channel_of.at(m) == c + 1) s.push_back(m.str());
        by.push_back(s);
      }
      per["p" + std::to_string(pid.index)] = by;
    }
    j["per_process"] = per;
    emit(out, j.dump(2) + "\n");
    return kOk;
  } catch (const kbo::BoundViolation& e) {
    kbo::json anti = kbo::json::array();
    for (const auto& m : e.antichain()) anti.push_back(m.str());
    j["error"] = "bound-violation";
    j["antichain"] = anti;
    emit(out, j.dump(2) + "\n");
    std::cerr << "kbosim: " << e.what() << "\n";
    return kFail;
  }
}

int cmd_fuzz(const std::string& template_path, std::uint64_t seeds, std::optional<std::uint64_t> seed_base,
             const std::string& out_dir, const std::string& suites, unsigned jobs) {
  auto t = kbo::load_fuzz_template(template_path);
  if (seed_base) t.seed_base = *seed_base;
  auto selected = kbo::parse_suites(suites);
  auto results = kbo::fuzz_batch(t, seeds, jobs, selected);
  auto summary = kbo::fuzz_summary(t, results);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream per_seed;
    for (const auto& r : results) {
      kbo::json line;
      line["seed"] = t.seed_base + r.index;
      try {
        if (!r.error.empty()) {
          line["error"] = r.error;
        } else {
          line["outcome"] = kbo::to_string(r.trace.outcome);
          line["crashes"] = r.config.crash_plan.size();
          kbo::json failed = kbo::json::array();
          for (const auto& v : r.verdicts)
            if (v.failed()) failed.push_back(v.to_json());
          line["failed"] = failed;
          if (r.failed())
            spill((std::filesystem::path(out_dir) / ("seed-" + std::to_string(t.seed_base + r.index) + ".trace.jsonl"))
                      .string(),
                  kbo::trace_text(r.trace));
        }
      } catch (const std::exception& e) {
        // I/O problems are reported per seed; the batch continues.
        line["io_error"] = e.what();
      }
      per_seed << line.dump() << "\n";
    }
    spill((std::filesystem::path(out_dir) / "seeds.jsonl").string(), per_seed.str());
    spill((std::filesystem::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  }
  std::cout << summary.dump(2) << "\n";
  return summary["failed_seeds"].get<std::uint64_t>() > 0 ? kFail : kOk;
}

int cmd_golden(const std::string& scenario, const std::string& golden, bool update) {
  auto config = kbo::load_config(scenario);
  auto text = kbo::trace_text(kbo::run(config));
  if (update) {
    spill(golden, text);
    std::cout << "wrote " << golden << "\n";
    return kOk;
  }
  const auto expected = slurp(golden);
  if (text == expected) {
    std::cout << "golden: match (" << text.size() << " bytes)\n";
    return kOk;
  }
  std::istringstream a(expected), b(text);
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
    if (!ga && !gb) break;
    if (!ga || !gb || la != lb) {
      std::cout << "golden: mismatch at line " << line << "\n  expected: " << (ga ? la : "<eof>")
                << "\n  actual:   " << (gb ? lb : "<eof>") << "\n";
      break;
    }
  }
  return kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kbosim: k-BO-broadcast stack simulator and trace checker"};
  app.require_subcommand(1, 1);

  std::string scenario, out, trace_path, suites = "all", golden_path;
  std::optional<std::uint64_t> seed;
  std::uint64_t seeds = 0;
  std::uint32_t k = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool update = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("--scenario", scenario, "Scenario file (kbo-scenario/1)")->required();
  run->add_option("--out", out, "Trace output path (default stdout)");
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* fuzz = app.add_subcommand("fuzz", "Run and check a batch of seeded scenarios");
  fuzz->add_option("--template,--scenario", scenario, "Fuzz template (kbo-fuzz/1)")->required();
  fuzz->add_option("--seeds", seeds, "Number of seeds")->required();
  fuzz->add_option("--seed", seed, "First seed (overrides the template's seed_base)");
  fuzz->add_option("--out", out, "Directory for summary.json, seeds.jsonl and failing traces");
  fuzz->add_option("--suites", suites, "Comma-separated suites or 'all'");
  fuzz->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Check a trace against the property suites");
  check->add_option("trace", trace_path, "Trace file (kbo-trace/1)")->required();
  check->add_option("--suites", suites, "kbo,kscd,k2s,snapshot,ksa,roundsync or all");
  check->add_option("--out", out, "Report output path (default stdout)");

  auto* decompose = app.add_subcommand("decompose", "Split a trace's delivery order into k channels");
  decompose->add_option("trace", trace_path, "Trace file (kbo-trace/1)")->required();
  decompose->add_option("--k", k, "Number of channels")->required()->check(CLI::PositiveNumber);
  decompose->add_option("--out", out, "Output path (default stdout)");

  auto* golden = app.add_subcommand("golden", "Re-run a scenario and compare with its golden trace");
  golden->add_option("--scenario", scenario, "Scenario file")->required();
  golden->add_option("--trace", golden_path, "Golden trace file")->required();
  golden->add_flag("--update", update, "Rewrite the golden trace instead of comparing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out, seed);
    if (*fuzz) return cmd_fuzz(scenario, seeds, seed, out, suites, jobs);
    if (*check) return cmd_check(trace_path, suites, out);
    if (*decompose) return cmd_decompose(trace_path, k, out);
    if (*golden) return cmd_golden(scenario, golden_path, update);
  } catch (const kbo::ConfigError& e) {
    std::cerr << "kbosim: invalid configuration: " << e.what() << "\n";
    return kUsage;
  } catch (const kbo::TraceFormatError& e) {
    std::cerr << "kbosim: " << e.what() << "\n";
    return kUsage;
  } catch (const kbo::UnknownSuite& e) {
    std::cerr << "kbosim: " << e.what() << "\n";
    return kUsage;
  } catch (const kbo::ScheduleError& e) {
    std::cerr << "kbosim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "kbosim: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
