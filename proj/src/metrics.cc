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


#include "scopeshield/metrics.h"

#include <lzma.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scopeshield/parser.h"

namespace scopeshield {

namespace fs = std::filesystem;

double SizeInflation(uint64_t input_bytes, uint64_t output_bytes) {
  if (input_bytes == 0) throw ZeroInput("inflation of an empty input");
  return (static_cast<double>(output_bytes) - static_cast<double>(input_bytes)) /
         static_cast<double>(input_bytes) * 100.0;
}

uint64_t CyclomaticComplexity(const Ast& ast) {
  uint64_t count = 1;  // module body
  for (size_t i = 0; i < ast.size(); ++i) {
    switch (ast.node(static_cast<uint32_t>(i)).kind) {
      case NodeKind::kFunctionDecl:
      case NodeKind::kFunctionExpr:
      case NodeKind::kArrow:
      case NodeKind::kIf:
      case NodeKind::kLoop:
      case NodeKind::kSwitchCase:
      case NodeKind::kCatchClause:
      case NodeKind::kConditional:
      case NodeKind::kLogicalAnd:
      case NodeKind::kLogicalOr:
        ++count;
        break;
      default:
        break;
    }
  }
  return count;
}

std::optional<uint64_t> CyclomaticComplexity(std::string_view source) {
  try {
    ParseResult r = ParseSource(source);
    return CyclomaticComplexity(r.ast);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

const char* CompressorName() { return "xz (LZMA2, preset 6, no integrity check)"; }

uint64_t CompressedSize(std::string_view data) {
  std::vector<uint8_t> out(lzma_stream_buffer_bound(data.size()));
  size_t pos = 0;
  lzma_ret r = lzma_easy_buffer_encode(
      6, LZMA_CHECK_NONE, nullptr,
      reinterpret_cast<const uint8_t*>(data.data()), data.size(), out.data(),
      &pos, out.size());
  if (r != LZMA_OK)
    throw CompressorFailure("lzma_easy_buffer_encode failed with code " +
                            std::to_string(static_cast<int>(r)));
  return pos;
}

double NidFromSizes(uint64_t cx, uint64_t cy, uint64_t cxy) {
  const uint64_t lo = std::min(cx, cy);
  const uint64_t hi = std::max(cx, cy);
  if (hi == 0) return 0;
  return (static_cast<double>(cxy) - static_cast<double>(lo)) /
         static_cast<double>(hi);
}

double Nid(std::string_view x, std::string_view y) {
  std::string xy;
  xy.reserve(x.size() + y.size());
  xy.append(x);
  xy.append(y);
  return NidFromSizes(CompressedSize(x), CompressedSize(y), CompressedSize(xy));
}

namespace {

struct SizeClass {
  const char* label;
  uint64_t bytes;
};

constexpr SizeClass kSizeClasses[] = {
    {"50 KB", 50ull << 10}, {"500 KB", 500ull << 10}, {"1 MB", 1ull << 20},
    {"2 MB", 2ull << 20},   {"5 MB", 5ull << 20},     {"10 MB", 10ull << 20},
    {"20 MB", 20ull << 20},
};

// Nearest class on a log scale.
const char* ClassOf(uint64_t bytes) {
  const double l = std::log(static_cast<double>(std::max<uint64_t>(bytes, 1)));
  const SizeClass* best = &kSizeClasses[0];
  for (const SizeClass& c : kSizeClasses)
    if (std::abs(std::log(static_cast<double>(c.bytes)) - l) <
        std::abs(std::log(static_cast<double>(best->bytes)) - l))
      best = &c;
  return best->label;
}

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::string FormatBytes(uint64_t bytes) {
  char buf[32];
  if (bytes < (1ull << 20))
    std::snprintf(buf, sizeof buf, "%.0f KB", static_cast<double>(bytes) / 1024);
  else
    std::snprintf(buf, sizeof buf, "%.1f MB",
                  static_cast<double>(bytes) / (1024.0 * 1024.0));
  return buf;
}

std::vector<SizeClassRow> MetricsReport::SizeClasses() const {
  std::vector<SizeClassRow> rows;
  for (const SizeClass& c : kSizeClasses) {
    SizeClassRow row;
    row.size_class = c.label;
    for (const FileMetrics& f : files) {
      if (f.input_bytes == 0 || ClassOf(f.input_bytes) != c.label) continue;
      ++row.files;
      row.input_bytes += f.input_bytes;
      row.output_bytes += f.output_bytes;
    }
    if (row.files == 0) continue;
    row.inflation_percent = SizeInflation(row.input_bytes, row.output_bytes);
    rows.push_back(row);
  }
  return rows;
}

std::string MetricsReport::ToJson() const {
  using Json = nlohmann::json;
  Json list = Json::array();
  for (const FileMetrics& f : files) {
    Json j{{"path", f.path},
           {"input_bytes", f.input_bytes},
           {"output_bytes", f.output_bytes},
           {"inflation_percent", Round2(f.inflation_percent)},
           {"nid", f.nid}};
    j["cyclomatic_original"] =
        f.cyclomatic_original ? Json(*f.cyclomatic_original) : Json(nullptr);
    j["cyclomatic_obfuscated"] =
        f.cyclomatic_obfuscated ? Json(*f.cyclomatic_obfuscated) : Json(nullptr);
    list.push_back(std::move(j));
  }
  Json classes = Json::array();
  for (const SizeClassRow& r : SizeClasses())
    classes.push_back({{"size_class", r.size_class},
                       {"files", r.files},
                       {"average_input_bytes", r.input_bytes / r.files},
                       {"average_output_bytes", r.output_bytes / r.files},
                       {"inflation_percent", Round2(r.inflation_percent)}});
  Json j{{"compressor", CompressorName()},
         {"files", std::move(list)},
         {"size_classes", std::move(classes)},
         {"aggregate",
          {{"input_bytes", input_bytes},
           {"output_bytes", output_bytes},
           {"inflation_percent", Round2(inflation_percent)},
           {"cyclomatic_original", cyclomatic_original},
           {"cyclomatic_obfuscated", cyclomatic_obfuscated},
           {"cyclomatic_ratio", cyclomatic_ratio},
           {"nid", nid}}},
         {"missing", missing}};
  return j.dump(2);
}

std::string MetricsReport::ToTable() const {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %6s %14s %12s\n", "Size class",
                "Files", "Output size", "Inflation");
  out << line;
  for (const SizeClassRow& r : SizeClasses()) {
    std::snprintf(line, sizeof line, "%-10s %6llu %14s %11.2f%%\n",
                  r.size_class.c_str(),
                  static_cast<unsigned long long>(r.files),
                  FormatBytes(r.output_bytes / r.files).c_str(),
                  r.inflation_percent);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-10s %6zu %14s %11.2f%%\n", "All",
                files.size(), FormatBytes(output_bytes).c_str(),
                inflation_percent);
  out << line;
  std::snprintf(line, sizeof line,
                "Cyclomatic complexity %llu -> %llu (%.2fx), NID %.4f\n",
                static_cast<unsigned long long>(cyclomatic_original),
                static_cast<unsigned long long>(cyclomatic_obfuscated),
                cyclomatic_ratio, nid);
  out << line;
  return out.str();
}

MetricsReport ComputeMetrics(const std::vector<FilePair>& pairs) {
  MetricsReport report;
  double nid_weighted = 0;
  for (const FilePair& p : pairs) {
    FileMetrics f;
    f.path = p.path;
    f.input_bytes = p.original.size();
    f.output_bytes = p.obfuscated.size();
    f.inflation_percent =
        f.input_bytes ? SizeInflation(f.input_bytes, f.output_bytes) : 0;
    f.cyclomatic_original = CyclomaticComplexity(p.original);
    f.cyclomatic_obfuscated = CyclomaticComplexity(p.obfuscated);
    f.nid = Nid(p.original, p.obfuscated);
    report.input_bytes += f.input_bytes;
    report.output_bytes += f.output_bytes;
    if (f.cyclomatic_original && f.cyclomatic_obfuscated) {
      report.cyclomatic_original += *f.cyclomatic_original;
      report.cyclomatic_obfuscated += *f.cyclomatic_obfuscated;
    }
    nid_weighted += f.nid * static_cast<double>(f.input_bytes);
    report.files.push_back(std::move(f));
  }
  if (report.input_bytes > 0) {
    report.inflation_percent =
        SizeInflation(report.input_bytes, report.output_bytes);
    report.nid = nid_weighted / static_cast<double>(report.input_bytes);
  }
  if (report.cyclomatic_original > 0)
    report.cyclomatic_ratio =
        static_cast<double>(report.cyclomatic_obfuscated) /
        static_cast<double>(report.cyclomatic_original);
  return report;
}

namespace {

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

MetricsReport ComputeMetrics(const std::string& original_root,
                             const std::string& obfuscated_root) {
  std::vector<std::string> rels;
  for (auto it = fs::recursive_directory_iterator(original_root);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    const std::string ext = it->path().extension().string();
    if (ext != ".js" && ext != ".mjs" && ext != ".cjs") continue;
    rels.push_back(fs::relative(it->path(), original_root).generic_string());
  }
  std::sort(rels.begin(), rels.end());
  std::vector<FilePair> pairs;
  std::vector<std::string> missing;
  for (const std::string& rel : rels) {
    const fs::path obf = fs::path(obfuscated_root) / rel;
    if (!fs::exists(obf)) {
      missing.push_back(rel);
      continue;
    }
    pairs.push_back({rel, Slurp(fs::path(original_root) / rel), Slurp(obf)});
  }
  MetricsReport report = ComputeMetrics(pairs);
  report.missing = std::move(missing);
  return report;
}

}  // namespace scopeshield
