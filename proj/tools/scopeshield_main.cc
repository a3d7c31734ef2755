// Copyright 2026 The ScopeShield Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: obfuscate, analyze, metrics, verify, bench.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scopeshield/corpus.h"
#include "scopeshield/emit.h"
#include "scopeshield/equivharness.h"
#include "scopeshield/metrics.h"
#include "scopeshield/parser.h"
#include "scopeshield/pasa.h"
#include "scopeshield/pipeline.h"
#include "scopeshield/scope_tree.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitFatal = 3;

// Missing input that only becomes apparent after the config file is merged.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteAll(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

uint32_t DefaultThreads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Threads from SCOPESHIELD_THREADS, if set and valid.
std::optional<uint32_t> EnvThreads() {
  const char* v = std::getenv("SCOPESHIELD_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1)
    throw scopeshield::FatalConfigError("SCOPESHIELD_THREADS must be a positive integer");
  return static_cast<uint32_t>(n);
}

struct CommonOptions {
  std::string config_path;
  int threads = 0;
  std::string allowlist;
};

// defaults < config file < SCOPESHIELD_THREADS < flags.
scopeshield::ObfuscationConfig BaseConfig(const CommonOptions& common) {
  scopeshield::ObfuscationConfig config;
  config.workers = DefaultThreads();
  if (!common.config_path.empty())
    config = scopeshield::ParseConfigJson(ReadAll(common.config_path), config);
  if (auto env = EnvThreads()) config.workers = *env;
  if (common.threads > 0) config.workers = static_cast<uint32_t>(common.threads);
  if (!common.allowlist.empty()) config.allowlist_path = common.allowlist;
  return config;
}

std::string DefaultReportPath(const std::string& out) {
  fs::path p = fs::path(out).lexically_normal();
  std::string s = p.string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s + ".report.json";
}

int RunObfuscate(const CommonOptions& common, const std::string& in,
                 const std::string& out, bool no_rename, bool no_strings,
                 bool no_prop, bool no_minify, bool count_decodes,
                 const std::string& dump_scopes,
                 const std::string& dump_renames, std::string report_path) {
  scopeshield::ObfuscationConfig config = BaseConfig(common);
  if (!in.empty()) config.input_root = in;
  if (!out.empty()) config.output_root = out;
  if (config.input_root.empty() || config.output_root.empty())
    throw UsageError("--in and --out are required (flags or config file)");
  if (no_rename) config.rename = false;
  if (no_strings) config.strings = false;
  if (no_prop) config.property_access = false;
  if (no_minify) config.minify = false;
  if (count_decodes) config.count_decodes = true;
  config.dump_scopes_path = dump_scopes;
  config.dump_renames_path = dump_renames;
  scopeshield::RunReport report = scopeshield::ObfuscateProject(config);
  if (report_path.empty()) report_path = DefaultReportPath(config.output_root);
  WriteAll(report_path, report.ToJson(&config) + "\n");
  std::cout << "run report: " << report_path << "\n";
  if (report.fatal) std::cerr << "fatal: " << report.fatal_message << "\n";
  for (const auto& issue : report.issues)
    if (issue.kind != "Unsupported")
      std::cerr << issue.path << ": " << issue.kind << ": " << issue.message
                << "\n";
  return report.ExitCode();
}

int RunAnalyze(const CommonOptions& common, const std::string& in,
               const std::string& dump_scopes) {
  scopeshield::ObfuscationConfig config = BaseConfig(common);
  const scopeshield::HostNames hosts =
      config.allowlist_path.empty()
          ? scopeshield::HostNames::Default()
          : scopeshield::HostNames::FromFile(config.allowlist_path);
  std::vector<std::string> paths;
  for (auto it = fs::recursive_directory_iterator(in);
       it != fs::recursive_directory_iterator(); ++it) {
    const std::string ext = it->path().extension().string();
    if (it->is_regular_file() && (ext == ".js" || ext == ".mjs" || ext == ".cjs"))
      paths.push_back(fs::relative(it->path(), in).generic_string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<scopeshield::FileSummary> summaries;
  Json errors = Json::array();
  std::string scopes;
  for (const std::string& rel : paths) {
    std::string text = ReadAll((fs::path(in) / rel).string());
    if (config.minify) text = scopeshield::Minify(text);
    try {
      scopeshield::ParseResult r = scopeshield::ParseSource(
          text, static_cast<scopeshield::FileId>(summaries.size()));
      r.summary.path = rel;
      r.summary.size_bytes = text.size();
      if (!dump_scopes.empty())
        scopes += "== " + rel + "\n" +
                  scopeshield::DumpScopeTree(scopeshield::BuildScopeTree(r.ast));
      summaries.push_back(std::move(r.summary));
    } catch (const std::exception& e) {
      errors.push_back({{"path", rel}, {"message", e.what()}});
    }
  }
  const auto graph = scopeshield::BuildDependencyGraph(summaries, hosts);
  const auto map = scopeshield::PartitionGraph(graph, config.workers);
  const auto link = scopeshield::LinkCrossFile(summaries, graph, map, hosts);
  Json files = Json::array();
  for (const auto& s : summaries)
    files.push_back({{"path", s.path},
                     {"module", s.is_module},
                     {"bytes", s.size_bytes},
                     {"partition", map.partition_of_file[s.file]},
                     {"dynamic_sites", s.dynamic_sites.size()},
                     {"warnings", s.warnings}});
  Json edges = Json::array();
  for (const auto& e : graph.edges)
    edges.push_back({{"from", graph.paths[e.from]},
                     {"to", graph.paths[e.to]},
                     {"kind", e.implicit_global ? "implicit-global" : "import"},
                     {"shared", e.shared}});
  Json markers = Json::array();
  for (const auto& m : link.markers)
    markers.push_back({{"identifier", m.identifier},
                       {"owner_file", graph.paths[m.owner_file]},
                       {"owner_partition", m.owner_partition},
                       {"consumer_partitions", m.consumer_partitions},
                       {"global", m.binding.IsGlobal()}});
  Json unresolved = Json::array();
  for (const auto& u : graph.unresolved)
    unresolved.push_back({{"importer", graph.paths[u.importer]},
                          {"source", u.source},
                          {"names", u.names}});
  Json out{{"files", files},
           {"partitions", map.partition_count},
           {"cut_weight", map.cut_weight},
           {"edges", edges},
           {"markers", markers},
           {"shared_globals", link.shared_globals},
           {"global_renames", link.global_renames},
           {"globals_frozen", link.globals_frozen},
           {"unresolved_imports", unresolved},
           {"parse_errors", errors}};
  std::cout << out.dump(2) << "\n";
  if (!dump_scopes.empty()) WriteAll(dump_scopes, scopes);
  return errors.empty() ? 0 : 2;
}

int RunMetrics(const std::string& orig, const std::string& obf,
               const std::string& json_path) {
  scopeshield::MetricsReport report = scopeshield::ComputeMetrics(orig, obf);
  std::cout << report.ToTable();
  if (json_path.empty())
    std::cout << report.ToJson() << "\n";
  else
    WriteAll(json_path, report.ToJson() + "\n");
  return report.missing.empty() ? 0 : 2;
}

int RunVerify(const CommonOptions& common, const std::string& orig,
              const std::string& obf, const std::string& cases_path,
              std::string engine, const std::string& verdicts_path,
              const std::string& rename_dump) {
  scopeshield::ObfuscationConfig config = BaseConfig(common);
  if (engine.empty()) engine = config.engine;
  std::vector<scopeshield::TestCase> cases = scopeshield::LoadCases(cases_path);
  std::vector<scopeshield::Verdict> verdicts;
  try {
    verdicts = scopeshield::RunDifferential(orig, obf, cases, engine,
                                            config.workers, rename_dump);
  } catch (const scopeshield::EngineNotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  std::ostringstream lines;
  for (const auto& v : verdicts) lines << v.ToJsonLine() << "\n";
  if (verdicts_path.empty())
    std::cout << lines.str();
  else
    WriteAll(verdicts_path, lines.str());
  const double rate = scopeshield::EquivalenceRate(verdicts);
  std::printf("equivalence rate: %.2f%% (%zu cases)\n", rate * 100.0,
              verdicts.size());
  return rate == 1.0 ? 0 : 2;
}

int RunBench(const CommonOptions& common, const std::string& in,
             const std::string& out, const std::vector<int>& threads,
             int repeat, uint64_t generate_bytes) {
  scopeshield::ObfuscationConfig config = BaseConfig(common);
  config.input_root = in;
  if (generate_bytes > 0) {
    config.input_root = out + "/corpus";
    fs::remove_all(config.input_root);
    auto stats = scopeshield::WriteScalingCorpus(config.input_root, generate_bytes);
    std::cerr << "generated " << stats.files << " files, " << stats.bytes
              << " bytes in " << config.input_root << "\n";
  } else if (in.empty()) {
    throw UsageError("bench needs --in or --generate");
  }
  Json runs = Json::array();
  double base = 0;
  for (int t : threads) {
    config.workers = static_cast<uint32_t>(t);
    config.output_root = out + "/t" + std::to_string(t);
    double best = 0;
    scopeshield::RunReport report;
    for (int r = 0; r < std::max(repeat, 1); ++r) {
      auto start = std::chrono::steady_clock::now();
      report = scopeshield::ObfuscateProject(config);
      double ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      if (report.fatal) {
        std::cerr << "fatal: " << report.fatal_message << "\n";
        return kExitFatal;
      }
      best = r == 0 ? ms : std::min(best, ms);
    }
    if (runs.empty()) base = best;
    runs.push_back({{"threads", t},
                    {"wall_ms", best},
                    {"speedup", best > 0 ? base / best : 0},
                    {"input_bytes", report.input_bytes},
                    {"output_bytes", report.output_bytes}});
  }
  std::cerr << "threads  wall_ms  speedup\n";
  for (const Json& r : runs) {
    char line[96];
    std::snprintf(line, sizeof(line), "%7d  %7.0f  %7.2f\n", r["threads"].get<int>(),
                  r["wall_ms"].get<double>(), r["speedup"].get<double>());
    std::cerr << line;
  }
  std::cout << Json{{"hardware_threads", std::thread::hardware_concurrency()},
                    {"runs", runs}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ScopeShield: scope-aware parallel JavaScript obfuscator"};
  app.require_subcommand(1);
  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--threads", common.threads,
                    "worker count (overrides SCOPESHIELD_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--allowlist", common.allowlist,
                    "file of extra host names never renamed");
  };

  std::string in, out, dump_scopes, dump_renames, report_path;
  bool no_rename = false, no_strings = false, no_prop = false,
       no_minify = false, count_decodes = false;
  CLI::App* obf = app.add_subcommand("obfuscate", "obfuscate a source tree");
  add_common(obf);
  obf->add_option("--in", in, "input root");
  obf->add_option("--out", out, "output root");
  obf->add_flag("--no-rename", no_rename, "disable identifier renaming");
  obf->add_flag("--no-strings", no_strings, "disable string encoding");
  obf->add_flag("--no-prop-access", no_prop,
                "disable property-access rewriting");
  obf->add_flag("--no-minify", no_minify, "skip the minify pre-pass");
  obf->add_flag("--count-decodes", count_decodes,
                "instrument string-table decoding with a global counter");
  obf->add_option("--dump-scopes", dump_scopes, "write scope trees here");
  obf->add_option("--dump-renames", dump_renames, "write rename maps here");
  obf->add_option("--report", report_path,
                  "run report path (default: <out>.report.json)");

  std::string analyze_in, analyze_scopes;
  CLI::App* analyze =
      app.add_subcommand("analyze", "print dependency graph and partitions");
  add_common(analyze);
  analyze->add_option("--in", analyze_in, "input root")->required();
  analyze->add_option("--dump-scopes", analyze_scopes, "write scope trees here");

  std::string orig, obf_root, metrics_json;
  CLI::App* metrics = app.add_subcommand("metrics", "size, complexity, NID");
  metrics->add_option("--orig", orig, "original root")->required();
  metrics->add_option("--obf", obf_root, "obfuscated root")->required();
  metrics->add_option("--json", metrics_json, "write JSON report here");

  std::string v_orig, v_obf, cases, engine, verdicts, rename_dump;
  CLI::App* verify = app.add_subcommand("verify", "differential testing");
  add_common(verify);
  verify->add_option("--orig", v_orig, "original root")->required();
  verify->add_option("--obf", v_obf, "obfuscated root")->required();
  verify->add_option("--cases", cases, "case manifest (JSON)")->required();
  verify->add_option("--engine", engine, "engine command with {file}");
  verify->add_option("--verdicts", verdicts, "write JSON lines here");
  verify->add_option("--rename-dump", rename_dump,
                     "rename map dump referenced by divergent verdicts");

  std::string bench_in, bench_out;
  std::vector<int> bench_threads{1, 2, 4, 8};
  int repeat = 1;
  CLI::App* bench = app.add_subcommand("bench", "time obfuscation per worker count");
  bench->add_option("--config", common.config_path, "JSON config file");
  uint64_t generate_bytes = 0;
  bench->add_option("--in", bench_in, "input root");
  bench->add_option("--generate", generate_bytes,
                    "generate a synthetic corpus of this many bytes under <out>/corpus");
  bench->add_option("--out", bench_out, "scratch output root")->required();
  bench->add_option("--threads", bench_threads, "worker counts")->delimiter(',');
  bench->add_option("--repeat", repeat, "runs per worker count (best kept)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (obf->parsed())
      return RunObfuscate(common, in, out, no_rename, no_strings, no_prop,
                          no_minify, count_decodes, dump_scopes, dump_renames,
                          report_path);
    if (analyze->parsed()) return RunAnalyze(common, analyze_in, analyze_scopes);
    if (metrics->parsed()) return RunMetrics(orig, obf_root, metrics_json);
    if (verify->parsed())
      return RunVerify(common, v_orig, v_obf, cases, engine, verdicts,
                       rename_dump);
    if (bench->parsed())
      return RunBench(common, bench_in, bench_out, bench_threads, repeat,
                      generate_bytes);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const scopeshield::FatalConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  std::cerr << app.help();
  return kExitUsage;
}
