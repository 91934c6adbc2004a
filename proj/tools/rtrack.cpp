#include <cstdint>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rtrack/analyzer.hpp"
#include "rtrack/comparators.hpp"
#include "rtrack/differential.hpp"
#include "rtrack/gen.hpp"
#include "rtrack/oracle.hpp"
#include "rtrack/refine.hpp"
#include "rtrack/report.hpp"
#include "rtrack/trace.hpp"

namespace {

using rtrack::Mode;
using rtrack::Report;
using rtrack::Trace;

constexpr int kExitSerializable = 0;
constexpr int kExitNonSerializable = 1;
constexpr int kExitError = 2;
constexpr int kExitRelationBreach = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open `" + path + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Trace load_trace(const std::string& path) {
  Trace trace = rtrack::parse_trace(read_file(path));
  auto issues = rtrack::validate(trace);
  for (const auto& v : issues) {
    if (v.warning)
      std::cerr << "warning: event " << v.index << ": " << v.message << "\n";
    else
      throw std::runtime_error("invalid trace: event " + std::to_string(v.index) +
                               ": " + v.message);
  }
  return trace;
}

struct EngineRun {
  Report report;
  std::vector<std::pair<std::string, std::uint64_t>> counters;
};

const std::vector<std::string> kEngines = {
    "regiontrack-full", "regiontrack-atomicity", "regiontrack-trace",
    "velodrome",        "aerodrome",             "naive-blame"};

EngineRun run_engine(const std::string& engine, const Trace& trace,
                     std::size_t threads_hint) {
  EngineRun run;
  if (engine == "regiontrack-full" || engine == "regiontrack-atomicity" ||
      engine == "regiontrack-trace") {
    Mode mode = engine == "regiontrack-full"
                    ? Mode::Full
                    : engine == "regiontrack-atomicity" ? Mode::AtomicityOnly
                                                        : Mode::TraceOnly;
    rtrack::AnalyzeOptions options;
    options.thread_hint = threads_hint;
    run.report = rtrack::analyze(trace, mode, options);
    run.counters = {{"joins", run.report.stats.joins},
                    {"subregions", run.report.stats.subregions},
                    {"max_live_nodes", run.report.stats.max_live_nodes},
                    {"transactions", run.report.stats.transactions}};
    return run;
  }
  rtrack::comparators::EngineResult result;
  if (engine == "velodrome")
    result = rtrack::comparators::velodrome_check(trace);
  else if (engine == "aerodrome")
    result = rtrack::comparators::aerodrome_check(trace);
  else if (engine == "naive-blame")
    result = rtrack::comparators::naive_blame_check(trace);
  else
    throw std::runtime_error("unknown engine `" + engine + "`");
  run.report = std::move(result.report);
  run.counters = std::move(result.counters);
  return run;
}

bool is_regiontrack(const std::string& engine) {
  return engine.rfind("regiontrack-", 0) == 0;
}

std::string violation_set_to_string(const rtrack::differential::ViolationSet& set,
                                    const Trace& trace) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [thread, ordinal] : set) {
    if (!first) out << ", ";
    first = false;
    out << "(" << trace.thread_names()[static_cast<std::size_t>(thread)] << ","
        << ordinal << ")";
  }
  out << "}";
  return out.str();
}

nlohmann::ordered_json violation_set_to_json(
    const rtrack::differential::ViolationSet& set, const Trace& trace) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [thread, ordinal] : set)
    arr.push_back({{"thread", trace.thread_names()[static_cast<std::size_t>(thread)]},
                   {"ordinal", ordinal}});
  return arr;
}

struct GenFlags {
  rtrack::GenConfig config;
  void attach(CLI::App* cmd) {
    cmd->add_option("--threads", config.threads, "thread count (>= 2)");
    cmd->add_option("--events", config.events, "payload operation count");
    cmd->add_option("--vars", config.variables, "variable count");
    cmd->add_option("--locks", config.locks, "lock count");
    cmd->add_option("--labels", config.labels, "region label count");
    cmd->add_option("--p-region", config.p_region,
                    "probability an idle thread opens a region");
    cmd->add_option("--p-close", config.p_close,
                    "probability an open region closes before the next op");
    cmd->add_option("--mix-read", config.w_read, "op-mix weight: read");
    cmd->add_option("--mix-write", config.w_write, "op-mix weight: write");
    cmd->add_option("--mix-acquire", config.w_acquire, "op-mix weight: acquire");
    cmd->add_option("--mix-release", config.w_release, "op-mix weight: release");
  }
};

int cmd_check(const std::string& path, const std::string& engine,
              const std::string& format, std::size_t threads_hint) {
  Trace trace = load_trace(path);
  EngineRun run = run_engine(engine, trace, threads_hint);
  std::string tag = is_regiontrack(engine) ? "" : engine;
  if (format == "json")
    std::cout << rtrack::report_to_json(run.report, trace, tag);
  else
    std::cout << rtrack::report_to_human(run.report, trace, engine);
  return run.report.non_serializable ? kExitNonSerializable : kExitSerializable;
}

int cmd_oracle(const std::string& path, const std::string& format) {
  Trace trace = load_trace(path);
  bool nonser = rtrack::oracle::nonserializable(trace);
  if (format == "json") {
    std::cout << rtrack::oracle::to_json(trace);
  } else {
    std::cout << "verdict: " << (nonser ? "non-serializable" : "serializable") << "\n";
    auto vs = rtrack::oracle::violations(trace);
    for (const auto& tx : rtrack::oracle::transactions_of(trace)) {
      if (!vs.count({tx.thread, tx.ordinal})) continue;
      std::cout << "violation thread="
                << trace.thread_names()[static_cast<std::size_t>(tx.thread)]
                << " ordinal=" << tx.ordinal << " label=" << tx.label << "\n";
    }
  }
  return nonser ? kExitNonSerializable : kExitSerializable;
}

void print_comparison_human(const rtrack::differential::TraceComparison& c,
                            const Trace& trace) {
  auto line = [&](const char* name, const rtrack::differential::EngineOutcome& o) {
    std::cout << name << ": " << (o.non_serializable ? "non-serializable" : "serializable")
              << " violations=" << violation_set_to_string(o.violations, trace) << "\n";
  };
  line("oracle", c.oracle);
  line("regiontrack-full", c.full);
  line("regiontrack-atomicity", c.atomicity);
  line("regiontrack-trace", c.trace_only);
  line("velodrome", c.velodrome);
  line("aerodrome", c.aerodrome);
  line("naive-blame", c.naive);
  if (c.ok()) {
    std::cout << "relations: all hold\n";
  } else {
    for (const auto& r : c.failed_relations()) std::cout << "relation FAILED: " << r << "\n";
  }
}

nlohmann::ordered_json comparison_to_json(const rtrack::differential::TraceComparison& c,
                                          const Trace& trace) {
  nlohmann::ordered_json j;
  auto engine = [&](const rtrack::differential::EngineOutcome& o) {
    nlohmann::ordered_json e;
    e["non_serializable"] = o.non_serializable;
    e["violations"] = violation_set_to_json(o.violations, trace);
    return e;
  };
  j["oracle"] = engine(c.oracle);
  j["engines"] = {{"regiontrack-full", engine(c.full)},
                  {"regiontrack-atomicity", engine(c.atomicity)},
                  {"regiontrack-trace", engine(c.trace_only)},
                  {"velodrome", engine(c.velodrome)},
                  {"aerodrome", engine(c.aerodrome)},
                  {"naive-blame", engine(c.naive)}};
  j["relations"] = {{"full_violations_equal_oracle", c.full_violations_equal_oracle},
                    {"full_verdict_equals_oracle", c.full_verdict_equals_oracle},
                    {"atomicity_matches_full", c.atomicity_matches_full},
                    {"trace_only_matches_full", c.trace_only_matches_full},
                    {"velodrome_subset_of_full", c.velodrome_subset_of_full},
                    {"full_subset_of_naive", c.full_subset_of_naive},
                    {"verdicts_agree", c.verdicts_agree}};
  j["ok"] = c.ok();
  return j;
}

int cmd_compare_file(const std::string& path, const std::string& format) {
  Trace trace = load_trace(path);
  auto c = rtrack::differential::compare_trace(trace);
  if (format == "json")
    std::cout << comparison_to_json(c, trace).dump() << "\n";
  else
    print_comparison_human(c, trace);
  return c.ok() ? 0 : kExitRelationBreach;
}

int cmd_compare_random(const std::string& range, const rtrack::GenConfig& config,
                       unsigned jobs, const std::string& format) {
  auto sep = range.find("..");
  if (sep == std::string::npos)
    throw std::runtime_error("--random expects a seed range like 0..999");
  std::uint64_t lo = std::stoull(range.substr(0, sep));
  std::uint64_t hi = std::stoull(range.substr(sep + 2));
  if (hi < lo) throw std::runtime_error("--random range is empty");
  config.check();

  const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
  struct Row {
    bool ok = true;
    bool velodrome_witness = false;
    bool naive_witness = false;
    std::vector<std::string> failures;
  };
  std::vector<Row> rows(count);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Trace trace = rtrack::generate_random(config, lo + k);
      auto c = rtrack::differential::compare_trace(trace);
      rows[k].ok = c.ok();
      rows[k].velodrome_witness = c.velodrome_strictly_smaller;
      rows[k].naive_witness = c.naive_strictly_larger;
      if (!c.ok()) rows[k].failures = c.failed_relations();
    }
  };
  if (jobs <= 1) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (count + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
      std::size_t begin = std::min<std::size_t>(count, w * chunk);
      std::size_t end = std::min<std::size_t>(count, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  std::size_t bad = 0, velodrome_witnesses = 0, naive_witnesses = 0;
  std::vector<std::uint64_t> bad_seeds;
  for (std::size_t k = 0; k < count; ++k) {
    if (!rows[k].ok) {
      ++bad;
      if (bad_seeds.size() < 10) bad_seeds.push_back(lo + k);
    }
    velodrome_witnesses += rows[k].velodrome_witness ? 1 : 0;
    naive_witnesses += rows[k].naive_witness ? 1 : 0;
  }

  if (format == "json") {
    nlohmann::ordered_json j;
    j["traces"] = count;
    j["divergences"] = bad;
    j["velodrome_strict_witnesses"] = velodrome_witnesses;
    j["naive_blame_strict_witnesses"] = naive_witnesses;
    j["failing_seeds"] = bad_seeds;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "traces: " << count << "\n"
              << "divergences: " << bad << "\n"
              << "velodrome strict-subset witnesses: " << velodrome_witnesses << "\n"
              << "naive-blame strict-superset witnesses: " << naive_witnesses << "\n";
  }
  for (std::size_t k = 0; k < count && bad > 0; ++k) {
    if (rows[k].ok) continue;
    std::cerr << "seed " << (lo + k) << " diverged:";
    for (const auto& f : rows[k].failures) std::cerr << " [" << f << "]";
    std::cerr << "\n" << rtrack::serialize_trace(rtrack::generate_random(config, lo + k));
  }
  return bad == 0 ? 0 : kExitRelationBreach;
}

int cmd_generate(const rtrack::GenConfig& config, std::uint64_t seed,
                 const std::string& out_path) {
  Trace trace = rtrack::generate_random(config, seed);
  std::string text = rtrack::serialize_trace(trace);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write `" + out_path + "`");
    out << text;
  }
  return 0;
}

int cmd_refine(const std::string& path, const std::string& engine,
               std::size_t threshold, const std::vector<std::string>& seed_excluded,
               const std::string& format) {
  if (engine == "regiontrack-trace" || engine == "aerodrome")
    throw std::runtime_error("engine `" + engine +
                             "` reports no violations; refinement needs a "
                             "violation-detecting engine");
  Trace trace = load_trace(path);
  auto runner = [&](const Trace& t) { return run_engine(engine, t, 0).report; };
  auto result = rtrack::refine(
      trace, runner, threshold,
      std::set<std::string>(seed_excluded.begin(), seed_excluded.end()));

  if (format == "json") {
    nlohmann::ordered_json j;
    j["engine"] = engine;
    j["threshold"] = threshold;
    j["iterations"] = nlohmann::ordered_json::array();
    for (const auto& it : result.iterations)
      j["iterations"].push_back({{"iteration", it.number},
                                 {"dynamic_violations", it.dynamic_violations},
                                 {"newly_excluded", it.newly_excluded}});
    j["excluded"] = std::vector<std::string>(result.excluded.begin(), result.excluded.end());
    std::cout << j.dump() << "\n";
  } else {
    for (const auto& it : result.iterations) {
      std::cout << "iteration " << it.number << ": dynamic_violations="
                << it.dynamic_violations << " newly_excluded=[";
      for (std::size_t i = 0; i < it.newly_excluded.size(); ++i)
        std::cout << (i ? "," : "") << it.newly_excluded[i];
      std::cout << "]\n";
    }
    std::cout << "excluded:";
    for (const auto& label : result.excluded) std::cout << " " << label;
    std::cout << "\niterations: " << result.iterations.size() << "\n";
  }
  return 0;
}

int cmd_stats(const std::string& path, const std::string& engine,
              const std::string& format, std::size_t threads_hint) {
  Trace trace = load_trace(path);
  EngineRun run = run_engine(engine, trace, threads_hint);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["engine"] = engine;
    for (const auto& [name, value] : run.counters) j[name] = value;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "engine: " << engine << "\n";
    for (const auto& [name, value] : run.counters)
      std::cout << name << "=" << value << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace serializability and atomicity-violation analysis"};
  app.require_subcommand(1);

  std::string path, engine, format = "human", out_path, random_range;
  std::size_t threads_hint = 0, threshold = 2;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  GenFlags gen;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "human"}));
  };
  auto add_engine = [&](CLI::App* cmd) {
    cmd->add_option("--engine", engine, "analysis engine")
        ->required()
        ->check(CLI::IsMember(kEngines));
  };

  CLI::App* check = app.add_subcommand("check", "analyze a trace file with one engine");
  check->add_option("path", path, "trace file")->required();
  add_engine(check);
  add_format(check);
  check->add_option("--threads-hint", threads_hint, "presize clocks (performance only)");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force ground-truth verdict");
  oracle_cmd->add_option("path", path, "trace file")->required();
  add_format(oracle_cmd);

  CLI::App* compare = app.add_subcommand(
      "compare", "run every engine plus the oracle and check the documented relations");
  compare->add_option("path", path, "trace file");
  compare->add_option("--random", random_range,
                      "seed range `A..B`: compare generated traces instead of a file");
  compare->add_option("--jobs", jobs, "worker threads for --random");
  gen.attach(compare);
  add_format(compare);

  CLI::App* generate = app.add_subcommand("generate", "emit a seeded random trace");
  generate->add_option("--seed", seed, "generator seed");
  generate->add_option("--out", out_path, "output path (default stdout)");
  gen.attach(generate);

  CLI::App* refine_cmd = app.add_subcommand(
      "refine", "iterative atomicity-specification refinement on a fixed trace");
  refine_cmd->add_option("path", path, "trace file")->required();
  add_engine(refine_cmd);
  refine_cmd->add_option("--threshold", threshold,
                         "consecutive clean trials before stopping (offline, 1 suffices)");
  std::vector<std::string> seed_excluded;
  refine_cmd->add_option("--exclude", seed_excluded,
                         "label(s) excluded from the specification up front");
  add_format(refine_cmd);

  CLI::App* stats = app.add_subcommand("stats", "run-time counters for one engine");
  stats->add_option("path", path, "trace file")->required();
  add_engine(stats);
  add_format(stats);
  stats->add_option("--threads-hint", threads_hint, "presize clocks (performance only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(check)) return cmd_check(path, engine, format, threads_hint);
    if (app.got_subcommand(oracle_cmd)) return cmd_oracle(path, format);
    if (app.got_subcommand(compare)) {
      if (!random_range.empty())
        return cmd_compare_random(random_range, gen.config, jobs, format);
      if (path.empty())
        throw std::runtime_error("compare needs a trace file or --random A..B");
      return cmd_compare_file(path, format);
    }
    if (app.got_subcommand(generate)) return cmd_generate(gen.config, seed, out_path);
    if (app.got_subcommand(refine_cmd))
      return cmd_refine(path, engine, threshold, seed_excluded, format);
    if (app.got_subcommand(stats)) return cmd_stats(path, engine, format, threads_hint);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
