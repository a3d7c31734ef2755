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


#include "scopeshield/transforms.h"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "scopeshield/lexer.h"
#include "scopeshield/name_pool.h"

namespace scopeshield {

TransformStats& TransformStats::operator+=(const TransformStats& o) {
  strings_encoded += o.strings_encoded;
  properties_rewritten += o.properties_rewritten;
  property_slots += o.property_slots;
  units_with_helpers += o.units_with_helpers;
  return *this;
}

std::vector<Unit> PlanUnits(const Ast& ast, const ScopeTree& tree,
                            size_t source_size, size_t min_bytes,
                            const HostNames* hosts) {
  std::vector<Unit> units;
  if (ast.node(ast.root()).first_child == kNoNode) return units;
  const uint32_t end = static_cast<uint32_t>(source_size);
  uint32_t last_end = 0;
  ast.ForEachChild(ast.root(),
                   [&](uint32_t c) { last_end = ast.node(c).span.end; });
  uint32_t start = 0;
  ast.ForEachChild(ast.root(), [&](uint32_t c) {
    const uint32_t stmt_end = ast.node(c).span.end;
    // Trailing trivia joins the last statement's unit.
    if (stmt_end - start >= min_bytes && stmt_end < last_end) {
      units.push_back(Unit{static_cast<uint32_t>(units.size()),
                           Span{start, stmt_end}, {}});
      start = stmt_end;
    }
  });
  units.push_back(
      Unit{static_cast<uint32_t>(units.size()), Span{start, end}, {}});

  // External dependencies: names used in a unit whose declaration lies
  // elsewhere.
  std::vector<std::set<std::string>> deps(units.size());
  for (const Occurrence& o : tree.occurrences()) {
    auto it = std::upper_bound(
        units.begin(), units.end(), o.span.start,
        [](uint32_t off, const Unit& u) { return off < u.span.end; });
    if (it == units.end()) continue;
    const Unit& u = *it;
    bool external;
    if (o.decl_scope == kGlobalBinding) {
      external = hosts == nullptr || !hosts->Contains(tree.name(o.name_id));
    } else {
      const Declaration& d = tree.declaration(o.decl_scope, o.decl_index);
      external = d.imported || !u.span.Contains(d.site);
    }
    if (external) deps[u.index].insert(tree.name(o.name_id));
  }
  for (Unit& u : units)
    u.external_deps.assign(deps[u.index].begin(), deps[u.index].end());
  return units;
}

std::string HelperNamer::Name(FileId file, uint32_t unit, char role) const {
  std::string name = "$" + RawPoolName(file) + std::to_string(unit) + role;
  while (taken_.count(name)) name.push_back('$');
  return name;
}

uint32_t UnitKey(const std::string& path, uint32_t unit, uint64_t seed) {
  uint64_t h = 1469598103934665603ull ^ seed;
  auto mix = [&](unsigned char b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  for (char ch : path) mix(static_cast<unsigned char>(ch));
  mix('#');
  for (int i = 0; i < 4; ++i) mix(static_cast<unsigned char>(unit >> (8 * i)));
  return static_cast<uint32_t>((h ^ (h >> 32)) & 0xFFFFu);
}

std::u16string Utf8ToUtf16(std::string_view text) {
  std::u16string out;
  for (size_t i = 0; i < text.size();) {
    const unsigned char b = text[i];
    uint32_t cp;
    size_t len;
    if (b < 0x80) {
      cp = b;
      len = 1;
    } else if ((b >> 5) == 0x6) {
      cp = b & 0x1F;
      len = 2;
    } else if ((b >> 4) == 0xE) {
      cp = b & 0x0F;
      len = 3;
    } else if ((b >> 3) == 0x1E) {
      cp = b & 0x07;
      len = 4;
    } else {
      cp = 0xFFFD;
      len = 1;
    }
    if (len > 1) {
      if (i + len > text.size()) {
        cp = 0xFFFD;
        len = 1;
      } else {
        for (size_t k = 1; k < len; ++k)
          cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
      }
    }
    i += len;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      out.push_back(static_cast<char16_t>(0xD800 + (cp >> 10)));
      out.push_back(static_cast<char16_t>(0xDC00 + (cp & 0x3FF)));
    } else {
      out.push_back(static_cast<char16_t>(cp));
    }
  }
  return out;
}

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void AppendCodePoint(uint32_t cp, std::u16string* out) {
  if (cp >= 0x10000) {
    cp -= 0x10000;
    out->push_back(static_cast<char16_t>(0xD800 + (cp >> 10)));
    out->push_back(static_cast<char16_t>(0xDC00 + (cp & 0x3FF)));
  } else {
    out->push_back(static_cast<char16_t>(cp));
  }
}

void AppendUtf8(uint32_t cp, std::string* out) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

void AppendEscaped(char16_t w, std::string* out) {
  if (w == u'"') {
    out->append("\\\"");
  } else if (w == u'\\') {
    out->append("\\\\");
  } else if (w >= 0x20 && w < 0x7F) {
    out->push_back(static_cast<char>(w));
  } else if (w >= 0xA0 && (w < 0xD800 || w > 0xDFFF) && w != 0x2028 &&
             w != 0x2029 && w != 0xFEFF) {
    AppendUtf8(w, out);
  } else {
    static const char kHex[] = "0123456789abcdef";
    out->append("\\u");
    for (int shift = 12; shift >= 0; shift -= 4)
      out->push_back(kHex[(w >> shift) & 0xF]);
  }
}

}  // namespace

std::optional<std::u16string> DecodeStringLiteral(std::string_view literal) {
  if (literal.size() < 2 || (literal.front() != '"' && literal.front() != '\'') ||
      literal.back() != literal.front())
    return std::nullopt;
  std::string_view body = literal.substr(1, literal.size() - 2);
  std::u16string out;
  size_t i = 0;
  while (i < body.size()) {
    size_t next = body.find('\\', i);
    if (next == std::string_view::npos) next = body.size();
    out += Utf8ToUtf16(body.substr(i, next - i));
    i = next;
    if (i >= body.size()) break;
    if (i + 1 >= body.size()) return std::nullopt;
    const char e = body[i + 1];
    i += 2;
    switch (e) {
      case 'n': out.push_back(u'\n'); break;
      case 't': out.push_back(u'\t'); break;
      case 'r': out.push_back(u'\r'); break;
      case 'b': out.push_back(u'\b'); break;
      case 'f': out.push_back(u'\f'); break;
      case 'v': out.push_back(u'\v'); break;
      case '\r':
        if (i < body.size() && body[i] == '\n') ++i;
        break;
      case '\n':
        break;
      case 'x': {
        if (i + 2 > body.size()) return std::nullopt;
        int h = HexValue(body[i]), l = HexValue(body[i + 1]);
        if (h < 0 || l < 0) return std::nullopt;
        out.push_back(static_cast<char16_t>(h * 16 + l));
        i += 2;
        break;
      }
      case 'u': {
        uint32_t cp = 0;
        if (i < body.size() && body[i] == '{') {
          size_t close = body.find('}', i);
          if (close == std::string_view::npos || close == i + 1)
            return std::nullopt;
          for (size_t k = i + 1; k < close; ++k) {
            int v = HexValue(body[k]);
            if (v < 0) return std::nullopt;
            cp = cp * 16 + v;
            if (cp > 0x10FFFF) return std::nullopt;
          }
          i = close + 1;
        } else {
          if (i + 4 > body.size()) return std::nullopt;
          for (size_t k = i; k < i + 4; ++k) {
            int v = HexValue(body[k]);
            if (v < 0) return std::nullopt;
            cp = cp * 16 + v;
          }
          i += 4;
        }
        AppendCodePoint(cp, &out);
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          // \0 or a legacy octal escape of up to three digits (value < 256).
          uint32_t v = e - '0';
          size_t max_digits = e <= '3' ? 2 : 1;
          for (size_t k = 0; k < max_digits && i < body.size() &&
                             body[i] >= '0' && body[i] <= '7';
               ++k)
            v = v * 8 + (body[i++] - '0');
          out.push_back(static_cast<char16_t>(v));
        } else if (static_cast<unsigned char>(e) >= 0x80) {
          // Escaped non-ASCII character (e.g. LS/PS line continuation).
          size_t start = i - 1;
          size_t len = 1;
          while (start + len < body.size() &&
                 (static_cast<unsigned char>(body[start + len]) & 0xC0) == 0x80)
            ++len;
          std::u16string ch = Utf8ToUtf16(body.substr(start, len));
          if (ch != u"\u2028" && ch != u"\u2029") out += ch;
          i = start + len;
        } else {
          out.push_back(static_cast<char16_t>(e));
        }
    }
  }
  return out;
}

namespace {

uint32_t RollingKey(uint32_t key, uint32_t n, uint32_t j) {
  return key + n * 31u + j * 7u;
}

}  // namespace

std::string EncodeTableEntry(const std::u16string& value, uint32_t key,
                             uint32_t n) {
  std::string out = "\"";
  for (uint32_t j = 0; j < value.size(); ++j) {
    const uint32_t k = RollingKey(key, n, j);
    const char16_t u = value[j];
    char16_t w = u;
    if (u >= 32 && u < 127)
      w = static_cast<char16_t>(32 + (u - 32 + k % 95) % 95);
    else if (u > 127)
      w = static_cast<char16_t>(((u - 128) ^ (k & 127)) + 128);
    AppendEscaped(w, &out);
  }
  out.push_back('"');
  return out;
}

std::u16string DecodeTableEntry(const std::u16string& encoded, uint32_t key,
                                uint32_t n) {
  std::u16string out;
  for (uint32_t j = 0; j < encoded.size(); ++j) {
    const uint32_t k = RollingKey(key, n, j);
    const char16_t c = encoded[j];
    if (c > 31 && c < 127)
      out.push_back(static_cast<char16_t>((c - 32 - k % 95 + 95) % 95 + 32));
    else if (c > 127)
      out.push_back(static_cast<char16_t>(((c - 128) ^ (k & 127)) + 128));
    else
      out.push_back(c);
  }
  return out;
}

std::string QuoteUtf16(const std::u16string& value) {
  std::string out = "\"";
  for (size_t i = 0; i < value.size(); ++i) {
    const char16_t w = value[i];
    if (w >= 0xD800 && w <= 0xDBFF && i + 1 < value.size() &&
        value[i + 1] >= 0xDC00 && value[i + 1] <= 0xDFFF) {
      uint32_t cp = 0x10000 + ((w - 0xD800) << 10) + (value[i + 1] - 0xDC00);
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      ++i;
      continue;
    }
    AppendEscaped(w, &out);
  }
  out.push_back('"');
  return out;
}

namespace {

enum class CandidateKind : uint8_t { kString, kMember };

struct Candidate {
  uint32_t node = 0;
  CandidateKind kind = CandidateKind::kString;
};

bool IsDirectiveStatement(const Ast& ast, uint32_t stmt) {
  const AstNode& s = ast.node(stmt);
  if (s.kind != NodeKind::kOtherStatement || s.first_child == kNoNode)
    return false;
  const AstNode& c = ast.node(s.first_child);
  return c.kind == NodeKind::kStringLit && c.Has(kFlagDirective);
}

// Innermost scope whose span contains `span`.
ScopeId InnermostScope(const ScopeTree& tree, Span span) {
  ScopeId s = tree.module_scope();
  while (true) {
    const auto& children = tree.node(s).children;
    auto it = std::upper_bound(
        children.begin(), children.end(), span.start,
        [&](uint32_t off, ScopeId c) { return off < tree.node(c).span.start; });
    if (it == children.begin()) return s;
    const ScopeId c = *(it - 1);
    if (!tree.node(c).span.Contains(span)) return s;
    s = c;
  }
}

// Transformable nodes of the file in source order.
std::vector<Candidate> CollectCandidates(const Ast& ast, const ScopeTree& tree,
                                         const TransformOptions& options) {
  std::vector<Candidate> out;
  struct Item {
    uint32_t node;
    uint32_t parent;
  };
  std::vector<Item> stack{{ast.root(), kNoNode}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    const AstNode& n = ast.node(item.node);
    if (n.kind == NodeKind::kStringLit && options.strings &&
        !n.Has(kFlagDirective) && !n.Has(kFlagModuleSpecifier)) {
      bool module_arg = false;
      if (item.parent != kNoNode) {
        const AstNode& p = ast.node(item.parent);
        module_arg = p.kind == NodeKind::kCall &&
                     (p.name == "require" || p.name == "import");
      }
      if (!module_arg) out.push_back({item.node, CandidateKind::kString});
    } else if (n.kind == NodeKind::kMemberAccess && options.property_access &&
               !n.Has(kFlagOptional) && !n.Has(kFlagPrivate) &&
               !n.Has(kFlagDeleteOperand) &&
               n.name.find('\\') == std::string_view::npos) {
      out.push_back({item.node, CandidateKind::kMember});
    }
    std::vector<uint32_t> children = ast.Children(item.node);
    for (auto it = children.rbegin(); it != children.rend(); ++it)
      stack.push_back({*it, item.node});
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    return ast.node(a.node).span.start < ast.node(b.node).span.start;
  });
  // Dynamic scopes are left untouched.
  std::erase_if(out, [&](const Candidate& c) {
    return tree.node(InnermostScope(tree, ast.node(c.node).span)).is_dynamic;
  });
  return out;
}

uint32_t HelperOffset(const Ast& ast, const Unit& unit,
                      std::string_view source) {
  uint32_t offset = unit.span.start;
  if (unit.index != 0) return offset;
  if (source.starts_with("#!")) {
    size_t nl = source.find_first_of("\r\n");
    offset = static_cast<uint32_t>(nl == std::string_view::npos ? source.size()
                                                                : nl);
  }
  for (uint32_t c = ast.node(ast.root()).first_child; c != kNoNode;
       c = ast.node(c).next_sibling) {
    if (!IsDirectiveStatement(ast, c)) break;
    offset = std::max(offset, ast.node(c).span.end);
  }
  return offset;
}

std::vector<Patch> TransformRange(const Ast& ast, const Unit& unit,
                                  std::span<const Candidate> candidates,
                                  std::string_view source,
                                  const TransformContext& ctx,
                                  TransformStats* stats) {
  const TransformOptions& opt = ctx.options;
  std::vector<Patch> patches;
  std::vector<std::u16string> table;
  std::map<std::u16string, uint32_t> index;
  std::set<std::u16string> property_names;
  const HelperNamer default_namer;
  const HelperNamer& namer = ctx.namer ? *ctx.namer : default_namer;
  const std::string decoder = namer.Name(ctx.file, unit.index, 'd');
  const std::string cache = namer.Name(ctx.file, unit.index, 't');
  auto slot = [&](std::u16string value) {
    auto [it, inserted] =
        index.try_emplace(value, static_cast<uint32_t>(table.size()));
    if (inserted) table.push_back(std::move(value));
    return decoder + "(" + std::to_string(it->second) + ")";
  };
  const uint32_t helper_at = HelperOffset(ast, unit, source);
  for (const Candidate& c : candidates) {
    const AstNode& n = ast.node(c.node);
    if (n.span.start < helper_at) continue;
    if (c.kind == CandidateKind::kString) {
      std::optional<std::u16string> value =
          DecodeStringLiteral(source.substr(n.span.start, n.span.size()));
      if (!value || value->size() < opt.min_string_units) continue;
      std::string call = slot(std::move(*value));
      if (n.span.start > 0 &&
          IsIdentifierPart(static_cast<unsigned char>(source[n.span.start - 1])))
        call.insert(call.begin(), ' ');
      patches.push_back({n.span, std::move(call)});
      ++stats->strings_encoded;
    } else {
      std::u16string name = Utf8ToUtf16(n.name);
      property_names.insert(name);
      patches.push_back({n.span, "[" + slot(std::move(name)) + "]"});
      ++stats->properties_rewritten;
    }
  }
  stats->property_slots += property_names.size();
  if (table.empty()) return patches;
  ++stats->units_with_helpers;

  std::string tab = "[";
  const uint32_t key = UnitKey(ctx.path, unit.index, opt.seed);
  for (uint32_t n = 0; n < table.size(); ++n) {
    if (n) tab.push_back(',');
    tab += opt.strings ? EncodeTableEntry(table[n], key, n)
                       : QuoteUtf16(table[n]);
  }
  tab.push_back(']');
  if (opt.strings) {
    tab += ".map(function(s,n){for(var r=\"\",j=0,c,k;j<s.length;j++){k=" +
           std::to_string(key) +
           "+n*31+j*7;c=s.charCodeAt(j);r+=String.fromCharCode(c>31&&c<127?"
           "(c-32-k%95+95)%95+32:c>127?(c-128^k&127)+128:c)}return r})";
  }
  std::string helper;
  if (helper_at > 0 && source[helper_at - 1] != ';') helper.push_back(';');
  helper += "function " + decoder + "(i){if(!" + cache + "){";
  if (opt.count_decodes)
    helper +=
        "globalThis.__ssDecodeCount=(globalThis.__ssDecodeCount||0)+1;";
  helper += cache + "=" + tab + "}return " + cache + "[i]}var " + cache + ";";
  patches.push_back({Span{helper_at, helper_at}, std::move(helper)});
  return patches;
}

}  // namespace

std::vector<Patch> TransformUnit(const Ast& ast, const ScopeTree& tree,
                                 const Unit& unit, std::string_view source,
                                 const TransformContext& ctx,
                                 TransformStats* stats) {
  std::vector<Candidate> all = CollectCandidates(ast, tree, ctx.options);
  std::vector<Candidate> mine;
  for (const Candidate& c : all)
    if (unit.span.Contains(ast.node(c.node).span)) mine.push_back(c);
  TransformStats local;
  std::vector<Patch> patches =
      TransformRange(ast, unit, mine, source, ctx, stats ? stats : &local);
  SortPatches(patches);
  return patches;
}

std::vector<Patch> TransformFile(const Ast& ast, const ScopeTree& tree,
                                 std::span<const Unit> units,
                                 std::string_view source,
                                 const TransformContext& ctx,
                                 TransformStats* stats) {
  TransformStats local;
  if (stats == nullptr) stats = &local;
  std::vector<Patch> patches;
  if (!ctx.options.strings && !ctx.options.property_access) return patches;
  std::vector<Candidate> all = CollectCandidates(ast, tree, ctx.options);
  size_t pos = 0;
  for (const Unit& unit : units) {
    size_t end = pos;
    while (end < all.size() && ast.node(all[end].node).span.start < unit.span.end)
      ++end;
    std::vector<Patch> p = TransformRange(
        ast, unit, std::span<const Candidate>(all).subspan(pos, end - pos),
        source, ctx, stats);
    patches.insert(patches.end(), std::make_move_iterator(p.begin()),
                   std::make_move_iterator(p.end()));
    pos = end;
  }
  SortPatches(patches);
  return patches;
}

}  // namespace scopeshield
