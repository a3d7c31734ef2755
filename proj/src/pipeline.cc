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


#include "scopeshield/pipeline.h"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "scopeshield/emit.h"
#include "scopeshield/lexer.h"
#include "scopeshield/parser.h"
#include "scopeshield/pasa.h"
#include "scopeshield/renamer.h"
#include "scopeshield/scope_tree.h"

namespace scopeshield {

namespace fs = std::filesystem;
using Json = nlohmann::json;

void ObfuscationConfig::Validate() const {
  if (workers < 1) throw FatalConfigError("worker count must be at least 1");
  if (unit_bytes < 1) throw FatalConfigError("unit_bytes must be positive");
  if (engine.find("{file}") == std::string::npos)
    throw FatalConfigError("engine command must contain {file}");
}

ObfuscationConfig ParseConfigJson(std::string_view text,
                                  ObfuscationConfig base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FatalConfigError(std::string("config is not valid JSON: ") +
                           e.what());
  }
  if (!j.is_object()) throw FatalConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "input") base.input_root = value.get<std::string>();
      else if (key == "output") base.output_root = value.get<std::string>();
      else if (key == "threads" || key == "workers") {
        const int64_t n = value.get<int64_t>();
        if (n < 1) throw FatalConfigError("threads must be at least 1");
        base.workers = static_cast<uint32_t>(n);
      } else if (key == "rename") base.rename = value.get<bool>();
      else if (key == "strings") base.strings = value.get<bool>();
      else if (key == "property_access")
        base.property_access = value.get<bool>();
      else if (key == "minify") base.minify = value.get<bool>();
      else if (key == "count_decodes") base.count_decodes = value.get<bool>();
      else if (key == "allowlist") base.allowlist_path = value.get<std::string>();
      else if (key == "engine") base.engine = value.get<std::string>();
      else if (key == "seed") base.seed = value.get<uint64_t>();
      else if (key == "unit_bytes") base.unit_bytes = value.get<size_t>();
      else throw FatalConfigError("unknown config key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw FatalConfigError(std::string("bad config value: ") + e.what());
  }
  base.Validate();
  return base;
}

namespace {

Json ConfigJson(const ObfuscationConfig& c) {
  return Json{{"input", c.input_root},
              {"output", c.output_root},
              {"threads", c.workers},
              {"rename", c.rename},
              {"strings", c.strings},
              {"property_access", c.property_access},
              {"minify", c.minify},
              {"count_decodes", c.count_decodes},
              {"allowlist", c.allowlist_path},
              {"engine", c.engine},
              {"seed", c.seed},
              {"unit_bytes", c.unit_bytes}};
}

}  // namespace

std::string ConfigToJson(const ObfuscationConfig& config) {
  return ConfigJson(config).dump(2);
}

int RunReport::ExitCode() const {
  if (fatal) return 3;
  for (const FileIssue& i : issues)
    if (i.kind != "Unsupported") return 2;
  return 0;
}

std::string RunReport::ToJson(const ObfuscationConfig* config) const {
  Json j{{"files_total", files_total},
         {"files_transformed", files_transformed},
         {"files_copied", files_copied},
         {"cut_weight", cut_weight},
         {"phase_times_ms",
          {{"parse", phase_times.parse_ms},
           {"pasa", phase_times.pasa_ms},
           {"rename", phase_times.rename_ms},
           {"transform", phase_times.transform_ms},
           {"emit", phase_times.emit_ms}}},
         {"peak_memory_bytes", peak_memory_bytes},
         {"output_bytes", output_bytes},
         {"input_bytes", input_bytes},
         {"workers", workers},
         {"partitions", partitions},
         {"renamed_bindings", renamed_bindings},
         {"rename_cost", rename_cost},
         {"strings_encoded", transform.strings_encoded},
         {"properties_rewritten", transform.properties_rewritten},
         {"property_slots", transform.property_slots},
         {"exit_code", ExitCode()}};
  Json files = Json::array();
  for (const FileIssue& i : issues)
    files.push_back({{"path", i.path}, {"kind", i.kind}, {"message", i.message}});
  j["issues"] = std::move(files);
  if (fatal) j["fatal"] = fatal_message;
  if (config != nullptr) j["config"] = ConfigJson(*config);
  return j.dump(2);
}

uint64_t PeakMemoryBytes() {
  struct rusage usage {};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<uint64_t>(usage.ru_maxrss) * 1024;
}

namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Runs fn(i) for i in [0, n) on `workers` threads pulling from a shared
// counter in the given order.
template <typename Fn>
void ParallelFor(std::span<const size_t> order, uint32_t workers, Fn&& fn) {
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (size_t k = next++; k < order.size(); k = next++) fn(order[k]);
  };
  const uint32_t n = std::min<uint32_t>(
      workers, static_cast<uint32_t>(std::max<size_t>(order.size(), 1)));
  if (n <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (uint32_t t = 0; t < n; ++t) threads.emplace_back(loop);
  for (std::thread& t : threads) t.join();
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source of JavaScript files for the core pipeline.
class FileAccess {
 public:
  virtual ~FileAccess() = default;
  virtual size_t size() const = 0;
  virtual const std::string& path(size_t i) const = 0;
  virtual std::string Read(size_t i) const = 0;
  virtual void Write(size_t i, const std::string& text) = 0;
};

class MemoryAccess : public FileAccess {
 public:
  explicit MemoryAccess(std::span<const SourceFile> files)
      : files_(files), outputs_(files.size()) {}
  size_t size() const override { return files_.size(); }
  const std::string& path(size_t i) const override { return files_[i].path; }
  std::string Read(size_t i) const override { return files_[i].text; }
  void Write(size_t i, const std::string& text) override { outputs_[i] = text; }
  std::vector<std::string>& outputs() { return outputs_; }

 private:
  std::span<const SourceFile> files_;
  std::vector<std::string> outputs_;
};

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + p.string());
  return ss.str();
}

void WriteFile(const fs::path& p, std::string_view text) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

class DiskAccess : public FileAccess {
 public:
  DiskAccess(fs::path in, fs::path out, std::vector<std::string> paths)
      : in_(std::move(in)), out_(std::move(out)), paths_(std::move(paths)) {}
  size_t size() const override { return paths_.size(); }
  const std::string& path(size_t i) const override { return paths_[i]; }
  std::string Read(size_t i) const override { return ReadFile(in_ / paths_[i]); }
  void Write(size_t i, const std::string& text) override {
    WriteFile(out_ / paths_[i], text);
  }

 private:
  fs::path in_, out_;
  std::vector<std::string> paths_;
};

struct Prepared {
  std::string text;
  std::vector<Token> tokens;
};

Prepared Prepare(std::string text, bool minify, FileId file) {
  Prepared p;
  p.tokens = Tokenize(text, file);
  if (minify) {
    p.text = Minify(text, p.tokens);
    p.tokens = Tokenize(p.text, file);
  } else {
    p.text = std::move(text);
  }
  return p;
}

struct StepTimes {
  double parse = 0, rename = 0, transform = 0, emit = 0;
};

void RunCore(FileAccess& io, const ObfuscationConfig& config,
             RunReport* report) {
  const size_t n = io.size();
  const HostNames hosts = config.allowlist_path.empty()
                              ? HostNames::Default()
                              : HostNames::FromFile(config.allowlist_path);
  std::mutex mu;
  std::vector<FileIssue> issues;
  auto add_issue = [&](size_t i, std::string kind, std::string message) {
    std::lock_guard<std::mutex> lock(mu);
    issues.push_back({io.path(i), std::move(kind), std::move(message)});
  };

  // Phase 1: parse every file into a summary; ASTs are dropped.
  auto t0 = Clock::now();
  std::vector<std::optional<FileSummary>> parsed(n);
  std::vector<uint64_t> sizes(n, 0);
  std::vector<bool> unreadable(n, false);
  {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    ParallelFor(order, config.workers, [&](size_t i) {
      std::string text;
      try {
        text = io.Read(i);
      } catch (const std::exception& e) {
        unreadable[i] = true;
        add_issue(i, "IoError", e.what());
        return;
      }
      sizes[i] = text.size();
      try {
        Prepared p = Prepare(std::move(text), config.minify, 0);
        ParseResult r = Parse(p.tokens, p.text, 0);
        r.summary.path = io.path(i);
        r.summary.size_bytes = p.text.size();
        parsed[i] = std::move(r.summary);
      } catch (const ParseError& e) {
        add_issue(i, "ParseError",
                  "offset " + std::to_string(e.offset()) + ": " + e.what());
      } catch (const LexError& e) {
        add_issue(i, "ParseError", e.what());
      }
    });
  }
  report->phase_times.parse_ms = MsSince(t0);
  for (uint64_t s : sizes) report->input_bytes += s;

  // Phase 2: dependency graph, partitioning and cross-file link.
  t0 = Clock::now();
  std::vector<FileSummary> summaries;
  std::vector<FileId> file_id(n, 0);
  std::vector<size_t> summary_owner;
  bool parse_failures = false;
  for (size_t i = 0; i < n; ++i) {
    if (!parsed[i]) {
      parse_failures = parse_failures || !unreadable[i];
      continue;
    }
    file_id[i] = static_cast<FileId>(summaries.size());
    parsed[i]->file = file_id[i];
    summaries.push_back(std::move(*parsed[i]));
    summary_owner.push_back(i);
  }
  parsed.clear();
  const DependencyGraph graph = BuildDependencyGraph(summaries, hosts);
  const IndependenceMap independence = PartitionGraph(graph, config.workers);
  LinkResult link = LinkCrossFile(summaries, graph, independence, hosts);
  if (parse_failures) {
    // Unparsed scripts may use any global; keep the shared scope intact.
    link.globals_frozen = true;
    link.global_renames.clear();
  }
  std::set<std::string> dollar_names;
  std::vector<std::vector<BoundaryMarker>> file_markers(summaries.size());
  for (const FileSummary& s : summaries)
    dollar_names.insert(s.dollar_names.begin(), s.dollar_names.end());
  for (const BoundaryMarker& m : link.markers)
    file_markers[m.owner_file].push_back(m);
  const HelperNamer namer(std::move(dollar_names));
  report->cut_weight = independence.cut_weight;
  report->partitions = independence.partition_count;
  report->phase_times.pasa_ms = MsSince(t0);
  summaries.clear();

  // Phase 3: per-file rename, check, transform and emit.
  t0 = Clock::now();
  RenameConstraints constraints;
  constraints.link = &link;
  constraints.hosts = &hosts;
  TransformOptions topt;
  topt.strings = config.strings;
  topt.property_access = config.property_access;
  topt.count_decodes = config.count_decodes;
  topt.seed = config.seed;

  std::vector<size_t> order;
  for (size_t i = 0; i < n; ++i)
    if (!unreadable[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return sizes[a] > sizes[b]; });
  std::vector<bool> is_parsed(n, false);
  for (size_t owner : summary_owner) is_parsed[owner] = true;
  const bool want_scopes = !config.dump_scopes_path.empty();
  const bool want_renames = !config.dump_renames_path.empty();
  std::vector<std::string> scope_dumps(want_scopes ? n : 0);
  std::vector<std::string> rename_dumps(want_renames ? n : 0);
  std::atomic<uint64_t> transformed{0}, copied{0}, out_bytes{0};
  std::atomic<uint64_t> renamed{0}, cost{0};
  StepTimes total_steps;
  TransformStats total_stats;

  ParallelFor(order, config.workers, [&](size_t i) {
    StepTimes steps;
    TransformStats stats;
    std::string original;
    auto copy_verbatim = [&] {
      try {
        io.Write(i, original);
        out_bytes += original.size();
      } catch (const std::exception& e) {
        add_issue(i, "IoError", e.what());
      }
      ++copied;
    };
    try {
      original = io.Read(i);
    } catch (const std::exception& e) {
      add_issue(i, "IoError", e.what());
      ++copied;
      return;
    }
    if (!is_parsed[i]) {
      copy_verbatim();
      return;
    }
    const FileId fid = file_id[i];
    std::string output;
    try {
      auto s = Clock::now();
      Prepared p = Prepare(original, config.minify, fid);
      ParseResult parsed_file = Parse(p.tokens, p.text, fid);
      p.tokens.clear();
      p.tokens.shrink_to_fit();
      ScopeTree tree = BuildScopeTree(parsed_file.ast, fid);
      steps.parse += MsSince(s);

      s = Clock::now();
      std::vector<Patch> patches;
      RenameMap map;
      if (config.rename) {
        map = RenameFile(tree, constraints);
        SafetyReport safety = CheckSafety(tree, map, constraints);
        if (!safety.ok()) {
          const SafetyViolation& v = safety.violations.front();
          add_issue(i, "SafetyViolation",
                    std::to_string(safety.violations.size()) +
                        " violation(s); first at offset " +
                        std::to_string(v.span.start) + " ('" + v.original +
                        "' -> '" + v.renamed + "'): " + v.reason);
          copy_verbatim();
          return;
        }
        RenameMap merged = MergeMaps(std::span<const RenameMap>(&map, 1),
                                     file_markers[fid]);
        patches = RenamePatches(tree, merged);
        uint64_t changed = 0;
        for (const auto& [key, entry] : merged.entries())
          if (entry.name != key.name) ++changed;
        renamed += changed;
        cost += Cost(merged);
      }
      if (want_renames)
        rename_dumps[i] = "# " + io.path(i) + "\n" + DumpRenames(tree, map);
      if (want_scopes)
        scope_dumps[i] = "== " + io.path(i) + "\n" + DumpScopeTree(tree);
      steps.rename += MsSince(s);

      s = Clock::now();
      if (config.strings || config.property_access) {
        std::vector<Unit> units = PlanUnits(parsed_file.ast, tree, p.text.size(),
                                            config.unit_bytes, &hosts);
        TransformContext ctx{topt, io.path(i), fid, &namer};
        std::vector<Patch> t =
            TransformFile(parsed_file.ast, tree, units, p.text, ctx, &stats);
        patches.insert(patches.end(), std::make_move_iterator(t.begin()),
                       std::make_move_iterator(t.end()));
        SortPatches(patches);
      }
      steps.transform += MsSince(s);

      s = Clock::now();
      output = Emit(p.text, patches);
      steps.emit += MsSince(s);
    } catch (const ParseError& e) {
      add_issue(i, "ParseError", e.what());
      copy_verbatim();
      return;
    } catch (const std::exception& e) {
      add_issue(i, "TransformError", e.what());
      copy_verbatim();
      return;
    }
    auto s = Clock::now();
    try {
      io.Write(i, output);
      out_bytes += output.size();
      ++transformed;
    } catch (const std::exception& e) {
      add_issue(i, "IoError", e.what());
      ++copied;
    }
    steps.emit += MsSince(s);
    std::lock_guard<std::mutex> lock(mu);
    total_steps.parse += steps.parse;
    total_steps.rename += steps.rename;
    total_steps.transform += steps.transform;
    total_steps.emit += steps.emit;
    total_stats += stats;
  });
  const double wall = MsSince(t0);
  // Worker time per step, scaled to the stage's wall time.
  const double busy = total_steps.parse + total_steps.rename +
                      total_steps.transform + total_steps.emit;
  const double scale = busy > 0 ? wall / busy : 0;
  report->phase_times.parse_ms += total_steps.parse * scale;
  report->phase_times.rename_ms = total_steps.rename * scale;
  report->phase_times.transform_ms = total_steps.transform * scale;
  report->phase_times.emit_ms = total_steps.emit * scale;

  report->files_total += n;
  report->files_transformed += transformed;
  report->files_copied += copied;
  report->output_bytes += out_bytes;
  report->renamed_bindings = renamed;
  report->rename_cost = cost;
  report->transform = total_stats;
  report->issues.insert(report->issues.end(), issues.begin(), issues.end());

  auto write_dump = [&](const std::string& path,
                        const std::vector<std::string>& parts) {
    std::string all;
    for (const std::string& part : parts) all += part;
    try {
      WriteFile(path, all);
    } catch (const std::exception& e) {
      report->issues.push_back({path, "IoError", e.what()});
    }
  };
  if (want_scopes) write_dump(config.dump_scopes_path, scope_dumps);
  if (want_renames) write_dump(config.dump_renames_path, rename_dumps);
}

void SortIssues(RunReport* report) {
  std::stable_sort(report->issues.begin(), report->issues.end(),
                   [](const FileIssue& a, const FileIssue& b) {
                     return a.path < b.path;
                   });
}

bool IsJavaScript(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".js" || ext == ".mjs" || ext == ".cjs";
}

}  // namespace

ProgramResult ObfuscateSources(std::span<const SourceFile> files,
                               const ObfuscationConfig& config) {
  config.Validate();
  ProgramResult result;
  result.report.workers = config.workers;
  MemoryAccess io(files);
  try {
    RunCore(io, config, &result.report);
  } catch (const LinkError& e) {
    result.report.fatal = true;
    result.report.fatal_message = e.what();
  }
  SortIssues(&result.report);
  result.report.peak_memory_bytes = PeakMemoryBytes();
  result.outputs = std::move(io.outputs());
  return result;
}

RunReport ObfuscateProject(const ObfuscationConfig& config) {
  RunReport report;
  report.workers = config.workers;
  try {
    config.Validate();
    const fs::path in(config.input_root);
    const fs::path out(config.output_root);
    if (!fs::is_directory(in))
      throw FatalConfigError("input root is not a directory: " +
                             config.input_root);
    std::vector<std::string> js;
    std::vector<std::string> other;
    for (auto it = fs::recursive_directory_iterator(in);
         it != fs::recursive_directory_iterator(); ++it) {
      if (!it->is_regular_file()) continue;
      const std::string rel = fs::relative(it->path(), in).generic_string();
      (IsJavaScript(it->path()) ? js : other).push_back(rel);
    }
    std::sort(js.begin(), js.end());
    std::sort(other.begin(), other.end());
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw FatalConfigError("cannot create output root: " + ec.message());
    for (const std::string& rel : other) {
      ++report.files_total;
      ++report.files_copied;
      try {
        std::string text = ReadFile(in / rel);
        report.input_bytes += text.size();
        WriteFile(out / rel, text);
        report.output_bytes += text.size();
        report.issues.push_back({rel, "Unsupported", "copied verbatim"});
      } catch (const std::exception& e) {
        report.issues.push_back({rel, "IoError", e.what()});
      }
    }
    DiskAccess io(in, out, std::move(js));
    RunCore(io, config, &report);
  } catch (const FatalConfigError& e) {
    report.fatal = true;
    report.fatal_message = e.what();
  } catch (const LinkError& e) {
    report.fatal = true;
    report.fatal_message = e.what();
  } catch (const std::runtime_error& e) {
    report.fatal = true;
    report.fatal_message = e.what();
  }
  SortIssues(&report);
  report.peak_memory_bytes = PeakMemoryBytes();
  return report;
}

}  // namespace scopeshield
