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


#include "scopeshield/equivharness.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "scopeshield/lexer.h"

extern char** environ;

namespace scopeshield {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::vector<TestCase> ParseCases(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw CaseManifestError(std::string("manifest is not valid JSON: ") +
                            e.what());
  }
  if (j.is_object() && j.contains("cases")) j = j["cases"];
  if (!j.is_array()) throw CaseManifestError("manifest must list cases");
  std::vector<TestCase> cases;
  try {
    for (const Json& c : j) {
      TestCase t;
      if (!c.is_object() || !c.contains("entry"))
        throw CaseManifestError("case without entry");
      t.entry = c.at("entry").get<std::string>();
      if (c.contains("args"))
        t.args = c.at("args").get<std::vector<std::string>>();
      if (c.contains("stdin")) t.stdin_data = c.at("stdin").get<std::string>();
      if (c.contains("mode")) {
        const std::string mode = c.at("mode").get<std::string>();
        if (mode == "exact")
          t.mode = CompareMode::kExact;
        else if (mode == "normalized")
          t.mode = CompareMode::kNormalized;
        else
          throw CaseManifestError("unknown mode '" + mode + "'");
      }
      if (c.contains("timeout_s")) t.timeout_s = c.at("timeout_s").get<double>();
      if (t.timeout_s <= 0) throw CaseManifestError("timeout_s must be positive");
      cases.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    throw CaseManifestError(std::string("bad case: ") + e.what());
  }
  return cases;
}

std::vector<TestCase> LoadCases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseManifestError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCases(ss.str());
}

std::vector<std::string> ExpandEngine(std::string_view tmpl,
                                      const std::string& file,
                                      const std::vector<std::string>& args) {
  std::vector<std::string> argv;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (char c : tmpl) {
    if (quote) {
      if (c == quote)
        quote = 0;
      else
        cur.push_back(c);
    } else if (c == '"' || c == '\'') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t') {
      if (in_word) argv.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur.push_back(c);
      in_word = true;
    }
  }
  if (in_word) argv.push_back(std::move(cur));
  for (std::string& a : argv) {
    for (size_t pos = a.find("{file}"); pos != std::string::npos;
         pos = a.find("{file}", pos + file.size()))
      a.replace(pos, 6, file);
  }
  argv.insert(argv.end(), args.begin(), args.end());
  return argv;
}

namespace {

bool Executable(const std::string& path) {
  return access(path.c_str(), X_OK) == 0 && !fs::is_directory(path);
}

}  // namespace

void CheckEngine(std::string_view tmpl) {
  std::vector<std::string> argv = ExpandEngine(tmpl, "x.js", {});
  if (argv.empty()) throw EngineNotFound("engine command is empty");
  const std::string& prog = argv[0];
  if (prog.find('/') != std::string::npos) {
    if (!Executable(prog)) throw EngineNotFound("engine not found: " + prog);
    return;
  }
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/bin:/bin";
  size_t pos = 0;
  while (pos <= dirs.size()) {
    size_t next = dirs.find(':', pos);
    if (next == std::string::npos) next = dirs.size();
    std::string dir = dirs.substr(pos, next - pos);
    if (dir.empty()) dir = ".";
    if (Executable(dir + "/" + prog)) return;
    pos = next + 1;
  }
  throw EngineNotFound("engine not found on PATH: " + prog);
}

ProcessResult RunProcess(const std::vector<std::string>& argv,
                         std::string_view stdin_data, double timeout_s) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { signal(SIGPIPE, SIG_IGN); });

  ProcessResult result;
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) {
    result.spawn_failed = true;
    result.err = std::strerror(errno);
    return result;
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0) {
    result.spawn_failed = true;
    result.err = std::strerror(errno);
    close(in_pipe[0]);
    close(in_pipe[1]);
    return result;
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], 2);
  std::vector<char*> cargv;
  for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  pid_t pid = 0;
  const int rc =
      posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(err_pipe[0]);
    result.spawn_failed = true;
    result.err = std::strerror(rc);
    return result;
  }

  int in_fd = in_pipe[1];
  fcntl(in_fd, F_SETFL, O_NONBLOCK);
  size_t written = 0;
  if (stdin_data.empty()) {
    close(in_fd);
    in_fd = -1;
  }
  int out_fd = out_pipe[0], err_fd = err_pipe[0];
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::microseconds(static_cast<int64_t>(timeout_s * 1e6));
  char buf[65536];
  while (out_fd >= 0 || err_fd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count() + 1);
    pollfd fds[3];
    int nfds = 0;
    if (out_fd >= 0) fds[nfds++] = {out_fd, POLLIN, 0};
    if (err_fd >= 0) fds[nfds++] = {err_fd, POLLIN, 0};
    if (in_fd >= 0) fds[nfds++] = {in_fd, POLLOUT, 0};
    const int ready = poll(fds, nfds, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int k = 0; k < nfds; ++k) {
      if (fds[k].revents == 0) continue;
      if (fds[k].fd == in_fd) {
        ssize_t w = write(in_fd, stdin_data.data() + written,
                          stdin_data.size() - written);
        if (w > 0) written += static_cast<size_t>(w);
        if (w < 0 && errno != EAGAIN) written = stdin_data.size();
        if (written >= stdin_data.size()) {
          close(in_fd);
          in_fd = -1;
        }
        continue;
      }
      ssize_t r = read(fds[k].fd, buf, sizeof buf);
      if (r > 0) {
        (fds[k].fd == out_fd ? result.out : result.err).append(buf, r);
      } else if (r == 0 || (r < 0 && errno != EINTR && errno != EAGAIN)) {
        if (fds[k].fd == out_fd) {
          close(out_fd);
          out_fd = -1;
        } else {
          close(err_fd);
          err_fd = -1;
        }
      }
    }
  }
  if (in_fd >= 0) close(in_fd);
  if (out_fd >= 0) close(out_fd);
  if (err_fd >= 0) close(err_fd);
  int status = 0;
  if (!result.timed_out) {
    // Output closed; wait for the exit, still bounded by the deadline.
    while (true) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  } else {
    waitpid(pid, &status, 0);
  }
  if (!result.timed_out) {
    if (WIFEXITED(status))
      result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
      result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

const char* VerdictKindName(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kEquivalent: return "equivalent";
    case VerdictKind::kDivergent: return "divergent";
    case VerdictKind::kError: return "error";
    case VerdictKind::kTimeout: return "timeout";
  }
  return "unknown";
}

std::string Verdict::ToJsonLine() const {
  Json j{{"entry", entry}, {"verdict", VerdictKindName(kind)}};
  if (!side.empty()) j["side"] = side;
  if (!message.empty()) j["message"] = message;
  if (kind == VerdictKind::kDivergent) {
    j["line"] = line;
    j["original"] = original_line;
    j["obfuscated"] = obfuscated_line;
    if (!rename_dump.empty()) j["rename_dump"] = rename_dump;
  }
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

namespace {

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string Normalize(std::string_view text) {
  std::vector<std::string> lines = SplitLines(text);
  std::string out;
  for (std::string& l : lines) {
    size_t end = l.find_last_not_of(" \t\r");
    l.erase(end == std::string::npos ? 0 : end + 1);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

std::string Excerpt(std::string s) {
  if (s.size() > 200) s = s.substr(0, 200) + "...";
  return s;
}

}  // namespace

bool SameOutput(std::string_view original, std::string_view obfuscated,
                CompareMode mode, Verdict* verdict) {
  std::string a(original), b(obfuscated);
  if (mode == CompareMode::kNormalized) {
    a = Normalize(a);
    b = Normalize(b);
  }
  if (a == b) return true;
  if (verdict != nullptr) {
    std::vector<std::string> la = SplitLines(a), lb = SplitLines(b);
    size_t i = 0;
    while (i < la.size() && i < lb.size() && la[i] == lb[i]) ++i;
    verdict->line = i + 1;
    verdict->original_line = Excerpt(i < la.size() ? la[i] : "<end of output>");
    verdict->obfuscated_line =
        Excerpt(i < lb.size() ? lb[i] : "<end of output>");
    if (i >= la.size() && i >= lb.size()) {
      // Same lines, different trailing newline.
      verdict->original_line = "<trailing newline differs>";
      verdict->obfuscated_line = "<trailing newline differs>";
    }
  }
  return false;
}

std::vector<Verdict> RunDifferential(const std::string& original_root,
                                     const std::string& obfuscated_root,
                                     const std::vector<TestCase>& cases,
                                     std::string_view engine_template,
                                     uint32_t workers,
                                     const std::string& rename_dump) {
  CheckEngine(engine_template);
  if (!fs::is_directory(original_root))
    throw std::runtime_error("original root not found: " + original_root);
  if (!fs::is_directory(obfuscated_root))
    throw std::runtime_error("obfuscated root not found: " + obfuscated_root);
  std::vector<Verdict> verdicts(cases.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < cases.size(); i = next++) {
      const TestCase& c = cases[i];
      Verdict& v = verdicts[i];
      v.entry = c.entry;
      const std::string orig = (fs::path(original_root) / c.entry).string();
      const std::string obf = (fs::path(obfuscated_root) / c.entry).string();
      if (!fs::is_regular_file(orig) || !fs::is_regular_file(obf)) {
        v.kind = VerdictKind::kError;
        v.side = fs::is_regular_file(orig) ? "obfuscated" : "original";
        v.message = "entry not found";
        continue;
      }
      ProcessResult a = RunProcess(ExpandEngine(engine_template, orig, c.args),
                                   c.stdin_data, c.timeout_s);
      ProcessResult b = RunProcess(ExpandEngine(engine_template, obf, c.args),
                                   c.stdin_data, c.timeout_s);
      if (a.timed_out || b.timed_out) {
        v.kind = VerdictKind::kTimeout;
        v.side = a.timed_out ? "original" : "obfuscated";
        continue;
      }
      if (a.spawn_failed || b.spawn_failed) {
        v.kind = VerdictKind::kError;
        v.side = a.spawn_failed ? "original" : "obfuscated";
        v.message = a.spawn_failed ? a.err : b.err;
        continue;
      }
      if (a.exit_code != b.exit_code) {
        v.kind = VerdictKind::kError;
        const bool orig_failed = a.exit_code != 0;
        v.side = orig_failed ? "original" : "obfuscated";
        v.message = "exit code " + std::to_string(orig_failed ? a.exit_code
                                                              : b.exit_code) +
                    ": " + Excerpt(orig_failed ? a.err : b.err);
        continue;
      }
      if (!SameOutput(a.out, b.out, c.mode, &v)) {
        v.kind = VerdictKind::kDivergent;
        v.rename_dump = rename_dump;
        continue;
      }
      v.kind = VerdictKind::kEquivalent;
    }
  };
  const uint32_t n = std::max<uint32_t>(
      1, std::min<uint32_t>(workers, static_cast<uint32_t>(cases.size())));
  std::vector<std::thread> threads;
  for (uint32_t t = 1; t < n; ++t) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();
  return verdicts;
}

double EquivalenceRate(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) return 0;
  size_t ok = 0;
  for (const Verdict& v : verdicts)
    if (v.kind == VerdictKind::kEquivalent) ++ok;
  return static_cast<double>(ok) / static_cast<double>(verdicts.size());
}

std::vector<std::string> LintDeterminism(std::string_view source) {
  std::vector<Token> all;
  try {
    all = Tokenize(source);
  } catch (const LexError& e) {
    return {std::string("cannot tokenize: ") + e.what()};
  }
  std::vector<const Token*> t;
  for (const Token& tok : all)
    if (!tok.IsTrivia()) t.push_back(&tok);
  auto text = [&](size_t i) -> std::string_view {
    return i < t.size() ? t[i]->text : std::string_view();
  };
  // obj.prop patterns and whether the program assigns its own replacement.
  struct Source {
    const char* object;
    const char* property;
  };
  const Source kSources[] = {{"Math", "random"},
                             {"Date", "now"},
                             {"performance", "now"},
                             {"crypto", "getRandomValues"}};
  std::vector<std::string> findings;
  for (const Source& s : kSources) {
    bool used = false, shimmed = false;
    uint32_t first = 0;
    for (size_t i = 0; i + 2 < t.size(); ++i) {
      if (text(i) != s.object || text(i + 1) != "." || text(i + 2) != s.property)
        continue;
      if (i > 0 && (text(i - 1) == "." || text(i - 1) == "?.")) continue;
      if (text(i + 3) == "=") {
        shimmed = true;
      } else if (!used) {
        used = true;
        first = t[i]->span.start;
      }
    }
    if (used && !shimmed)
      findings.push_back(std::string(s.object) + "." + s.property +
                         " used at offset " + std::to_string(first) +
                         " without a deterministic replacement");
  }
  bool date_shimmed = false;
  for (size_t i = 0; i + 1 < t.size(); ++i)
    if (text(i) == "Date" && text(i + 1) == "=" &&
        (i == 0 || text(i - 1) != "."))
      date_shimmed = true;
  for (size_t i = 0; i + 1 < t.size(); ++i) {
    if (text(i) != "new" || text(i + 1) != "Date") continue;
    if (date_shimmed) break;
    if (text(i + 2) != "(" || text(i + 3) == ")") {
      findings.push_back("new Date() without arguments at offset " +
                         std::to_string(t[i]->span.start));
      break;
    }
  }
  return findings;
}

}  // namespace scopeshield
