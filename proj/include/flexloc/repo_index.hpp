#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct LineSpan {
  int start = 0;  // 1-based, inclusive
  int end = 0;    // 1-based, inclusive

  bool contains(int line) const { return start <= line && line <= end; }
  bool operator==(const LineSpan&) const = default;
};

// `PathName.ClassName.MethodName(ArgTypeList)`; the leading `PathName.` is
// omitted for classes in the default package.
inline std::string make_fqn(std::string_view path_name, std::string_view class_name,
                            std::string_view method_name,
                            const std::vector<std::string>& arg_types) {
  std::string fqn;
  if (!path_name.empty()) {
    fqn += path_name;
    fqn += '.';
  }
  fqn += class_name;
  fqn += '.';
  fqn += method_name;
  fqn += '(';
  fqn += text::join(arg_types, ",");
  fqn += ')';
  return fqn;
}

inline std::string make_class_fqn(std::string_view path_name, std::string_view class_name) {
  if (path_name.empty()) return std::string(class_name);
  return std::string(path_name) + "." + std::string(class_name);
}

struct MethodRecord {
  std::string path_name;
  std::string class_name;
  std::string method_name;
  std::vector<std::string> arg_types;
  std::string fqn;
  std::string snippet;
  std::string file;
  LineSpan line_span;

  std::string class_fqn() const { return make_class_fqn(path_name, class_name); }
  bool operator==(const MethodRecord&) const = default;
};

struct FqnParts {
  std::string path_name;
  std::string class_name;
  std::string method_name;
  std::vector<std::string> arg_types;

  bool operator==(const FqnParts&) const = default;
};

// Inverse of make_fqn. The path/class boundary is taken from `known_paths`
// when the longest matching package prefix is found there; otherwise the
// first segment starting with an upper-case letter opens the class name.
inline std::optional<FqnParts> split_fqn(std::string_view fqn,
                                         const std::set<std::string>* known_paths = nullptr) {
  auto open = fqn.find('(');
  if (open == std::string_view::npos || fqn.empty() || fqn.back() != ')') return std::nullopt;
  std::string_view qualified = fqn.substr(0, open);
  std::string_view args = fqn.substr(open + 1, fqn.size() - open - 2);

  FqnParts parts;
  if (!args.empty()) {
    // Generic arguments are erased in indexed types, so a flat comma split is exact.
    std::size_t start = 0;
    while (true) {
      auto comma = args.find(',', start);
      parts.arg_types.emplace_back(args.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }

  auto last_dot = qualified.rfind('.');
  if (last_dot == std::string_view::npos) return std::nullopt;
  parts.method_name = std::string(qualified.substr(last_dot + 1));
  std::string_view owner = qualified.substr(0, last_dot);
  if (parts.method_name.empty() || owner.empty()) return std::nullopt;

  std::optional<std::size_t> boundary;  // index of the '.' between path and class
  if (known_paths != nullptr) {
    for (std::size_t i = owner.size(); i-- > 0;) {
      if (owner[i] == '.' && known_paths->count(std::string(owner.substr(0, i)))) {
        boundary = i;
        break;
      }
    }
  }
  if (!boundary) {
    std::size_t seg_start = 0;
    while (seg_start < owner.size()) {
      if (std::isupper(static_cast<unsigned char>(owner[seg_start]))) break;
      auto dot = owner.find('.', seg_start);
      if (dot == std::string_view::npos) {
        seg_start = owner.size();
        break;
      }
      seg_start = dot + 1;
    }
    if (seg_start == 0 || seg_start >= owner.size()) {
      // No upper-case segment: treat the last segment as the class.
      auto dot = owner.rfind('.');
      if (dot != std::string_view::npos) boundary = dot;
    } else {
      boundary = seg_start - 1;
    }
  }
  if (boundary) {
    parts.path_name = std::string(owner.substr(0, *boundary));
    parts.class_name = std::string(owner.substr(*boundary + 1));
  } else {
    parts.class_name = std::string(owner);
  }
  return parts;
}

struct ParseWarning {
  std::string file;
  std::string message;
};

// Language front end for build_index. Throws FormatError when a file cannot
// be parsed; build_index records the failure and moves on.
class SourceExtractor {
 public:
  virtual ~SourceExtractor() = default;
  virtual bool handles(const std::filesystem::path& file) const = 0;
  virtual std::vector<MethodRecord> extract(std::string_view source,
                                            const std::string& rel_file) const = 0;
};

namespace detail {

struct JavaToken {
  enum class Kind { Ident, Punct, Literal };
  Kind kind;
  std::string_view text;
  int line;
};

inline std::vector<JavaToken> tokenize_java(std::string_view src, const std::string& file) {
  std::vector<JavaToken> toks;
  int line = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(file + ":" + std::to_string(line) + ": " + what);
  };
  auto advance_counting = [&](std::size_t to) {
    for (; i < to; ++i)
      if (src[i] == '\n') ++line;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) fail("unterminated block comment");
      advance_counting(end + 2);
      continue;
    }
    int start_line = line;
    std::size_t start = i;
    if (src.substr(i, 3) == "\"\"\"") {
      auto end = src.find("\"\"\"", i + 3);
      while (end != std::string_view::npos && src[end - 1] == '\\') end = src.find("\"\"\"", end + 1);
      if (end == std::string_view::npos) fail("unterminated text block");
      advance_counting(end + 3);
      toks.push_back({JavaToken::Kind::Literal, src.substr(start, i - start), start_line});
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') fail("unterminated literal");
        ++i;
      }
      if (i >= src.size()) fail("unterminated literal");
      ++i;
      toks.push_back({JavaToken::Kind::Literal, src.substr(start, i - start), start_line});
      continue;
    }
    if (text::is_ident_start(c)) {
      while (i < src.size() && text::is_ident_char(src[i])) ++i;
      toks.push_back({JavaToken::Kind::Ident, src.substr(start, i - start), start_line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      bool hex = c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X');
      while (i < src.size()) {
        char d = src[i];
        char prev = i > start ? src[i - 1] : '\0';
        bool exp_sign = (d == '+' || d == '-') &&
                        (hex ? (prev == 'p' || prev == 'P') : (prev == 'e' || prev == 'E'));
        if (text::is_ident_char(d) || d == '.' || exp_sign) {
          ++i;
        } else {
          break;
        }
      }
      toks.push_back({JavaToken::Kind::Literal, src.substr(start, i - start), start_line});
      continue;
    }
    if (src.substr(i, 3) == "...") {
      i += 3;
      toks.push_back({JavaToken::Kind::Punct, src.substr(start, 3), start_line});
      continue;
    }
    ++i;
    toks.push_back({JavaToken::Kind::Punct, src.substr(start, 1), start_line});
  }
  return toks;
}

// Recursive-descent over declarations only; method bodies and field
// initializers are skipped by bracket balancing.
class JavaDeclParser {
 public:
  JavaDeclParser(std::string_view src, const std::string& file)
      : src_(src), file_(file), toks_(tokenize_java(src, file)) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < src.size(); ++i)
      if (src[i] == '\n') line_starts_.push_back(i + 1);
  }

  std::vector<MethodRecord> parse() {
    while (!at_end()) {
      if (is(";")) {
        ++pos_;
      } else if (is("package") && !next_is("(")) {
        ++pos_;
        package_ = read_qualified_name();
        expect(";");
      } else if (is("import")) {
        skip_past(";");
      } else if (is("module") || is("open")) {
        break;  // module-info.java declares no types
      } else {
        skip_modifiers();
        if (at_end()) break;
        if (is("package") || is("import")) continue;
        if (!at_type_keyword()) fail("expected type declaration, found '" + std::string(cur()) + "'");
        parse_type_declaration({});
      }
    }
    return std::move(records_);
  }

 private:
  using Kind = JavaToken::Kind;

  bool at_end() const { return pos_ >= toks_.size(); }
  std::string_view cur() const { return at_end() ? std::string_view{} : toks_[pos_].text; }
  bool is(std::string_view t) const { return !at_end() && toks_[pos_].text == t; }
  bool next_is(std::string_view t) const {
    return pos_ + 1 < toks_.size() && toks_[pos_ + 1].text == t;
  }
  bool is_ident() const { return !at_end() && toks_[pos_].kind == Kind::Ident; }
  int cur_line() const { return at_end() ? (toks_.empty() ? 1 : toks_.back().line) : toks_[pos_].line; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(file_ + ":" + std::to_string(cur_line()) + ": " + what);
  }
  void expect(std::string_view t) {
    if (!is(t)) fail("expected '" + std::string(t) + "', found '" + std::string(cur()) + "'");
    ++pos_;
  }
  std::string expect_ident() {
    if (!is_ident()) fail("expected identifier, found '" + std::string(cur()) + "'");
    return std::string(toks_[pos_++].text);
  }

  std::string read_qualified_name() {
    std::string name = expect_ident();
    while (is(".") && pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Kind::Ident) {
      ++pos_;
      name += '.';
      name += toks_[pos_++].text;
    }
    return name;
  }

  void skip_past(std::string_view t) {
    while (!at_end() && !is(t)) ++pos_;
    if (at_end()) fail("expected '" + std::string(t) + "' before end of file");
    ++pos_;
  }

  // Current token is `open`; leaves pos_ just past the matching `close`.
  std::size_t skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    while (!at_end()) {
      if (is(open)) {
        ++depth;
      } else if (is(close)) {
        if (--depth == 0) return pos_++;
      }
      ++pos_;
    }
    fail("unbalanced '" + std::string(open) + "'");
  }

  void skip_annotation() {
    expect("@");
    read_qualified_name();
    if (is("(")) skip_balanced("(", ")");
  }

  static bool is_modifier(std::string_view t) {
    static const std::unordered_set<std::string_view> mods = {
        "public", "protected", "private", "static", "final", "abstract",
        "synchronized", "native", "transient", "volatile", "strictfp", "default", "sealed"};
    return mods.count(t) != 0;
  }

  void skip_modifiers() {
    while (!at_end()) {
      if (is("@") && !next_is("interface")) {
        skip_annotation();
      } else if (is("non") && next_is("-") && pos_ + 2 < toks_.size() &&
                 toks_[pos_ + 2].text == "sealed") {
        pos_ += 3;
      } else if (is_ident() && is_modifier(cur()) && !next_is("(") && !next_is("{")) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_type_keyword() const {
    if (is("class") || is("interface") || is("enum")) return true;
    if (is("@") && next_is("interface")) return true;
    // `record` is contextual: a declaration only when followed by Name `(` or Name `<`.
    if (is("record") && pos_ + 2 < toks_.size() && toks_[pos_ + 1].kind == Kind::Ident &&
        (toks_[pos_ + 2].text == "(" || toks_[pos_ + 2].text == "<"))
      return true;
    return false;
  }

  std::vector<std::string> parse_parameter_types(std::size_t open, std::size_t close) {
    std::vector<std::string> types;
    std::vector<std::size_t> param_starts{open + 1};
    int paren = 0, angle = 0;
    for (std::size_t i = open + 1; i < close; ++i) {
      auto t = toks_[i].text;
      if (t == "(") ++paren;
      else if (t == ")") --paren;
      else if (t == "<") ++angle;
      else if (t == ">") --angle;
      else if (t == "," && paren == 0 && angle == 0) param_starts.push_back(i + 1);
    }
    param_starts.push_back(close + 1);
    for (std::size_t p = 0; p + 1 < param_starts.size(); ++p) {
      std::size_t b = param_starts[p];
      std::size_t e = param_starts[p + 1] - 1;  // exclusive, at ',' or ')'
      if (b >= e) continue;
      // Drop annotations and `final`.
      std::vector<std::size_t> kept;
      for (std::size_t i = b; i < e; ++i) {
        if (toks_[i].text == "@") {
          ++i;
          while (i + 1 < e && toks_[i + 1].text == "." ) i += 2;
          if (i + 1 < e && toks_[i + 1].text == "(") {
            int d = 0;
            for (++i; i < e; ++i) {
              if (toks_[i].text == "(") ++d;
              else if (toks_[i].text == ")" && --d == 0) break;
            }
          }
          continue;
        }
        if (toks_[i].text == "final") continue;
        kept.push_back(i);
      }
      // Trailing `[]` pairs after the parameter name belong to the type.
      int trailing_dims = 0;
      while (kept.size() >= 2 && toks_[kept.back()].text == "]" &&
             toks_[kept[kept.size() - 2]].text == "[") {
        kept.resize(kept.size() - 2);
        ++trailing_dims;
      }
      if (kept.size() < 2 || toks_[kept.back()].kind != Kind::Ident) continue;
      if (toks_[kept.back()].text == "this") continue;  // receiver parameter
      kept.pop_back();
      std::string type;
      int depth = 0;
      for (std::size_t idx : kept) {
        auto t = toks_[idx].text;
        if (t == "<") {
          ++depth;
          continue;
        }
        if (t == ">") {
          --depth;
          continue;
        }
        if (depth > 0) continue;
        if (!type.empty() && toks_[idx].kind == Kind::Ident && text::is_ident_char(type.back()))
          type += ' ';
        type += t;
      }
      for (int d = 0; d < trailing_dims; ++d) type += "[]";
      types.push_back(text::normalize_type_text(type));
    }
    return types;
  }

  void emit(std::size_t start_tok, std::size_t end_tok, const std::vector<std::string>& chain,
            const std::string& name, std::vector<std::string> arg_types) {
    MethodRecord rec;
    rec.path_name = package_;
    rec.class_name = text::join(chain, ".");
    rec.method_name = name;
    rec.arg_types = std::move(arg_types);
    rec.fqn = make_fqn(rec.path_name, rec.class_name, rec.method_name, rec.arg_types);
    rec.file = file_;
    rec.line_span = {toks_[start_tok].line, toks_[end_tok].line};
    std::size_t b = line_starts_[static_cast<std::size_t>(rec.line_span.start - 1)];
    std::size_t e = static_cast<std::size_t>(rec.line_span.end) < line_starts_.size()
                        ? line_starts_[static_cast<std::size_t>(rec.line_span.end)]
                        : src_.size();
    rec.snippet = std::string(src_.substr(b, e - b));
    records_.push_back(std::move(rec));
  }

  // At a type keyword; consumes the whole declaration including its body.
  void parse_type_declaration(std::vector<std::string> chain) {
    bool is_enum = is("enum");
    bool is_record = is("record");
    if (is("@")) ++pos_;
    ++pos_;  // keyword
    chain.push_back(expect_ident());
    std::vector<std::string> record_components;
    if (is_record) {
      if (is("<")) skip_balanced("<", ">");
      if (!is("(")) fail("expected record header");
      std::size_t open = pos_;
      std::size_t close = skip_balanced("(", ")");
      record_components = parse_parameter_types(open, close);
    }
    while (!at_end() && !is("{")) ++pos_;
    if (at_end()) fail("expected class body");
    parse_class_body(chain, is_enum, is_record ? &record_components : nullptr);
  }

  void skip_enum_constants() {
    while (!at_end()) {
      if (is(";")) {
        ++pos_;
        return;
      }
      if (is("}")) return;
      if (is("@")) {
        skip_annotation();
        continue;
      }
      if (is("(")) {
        skip_balanced("(", ")");
        continue;
      }
      if (is("{")) {
        skip_balanced("{", "}");  // constant-specific class body: anonymous, skipped
        continue;
      }
      ++pos_;
    }
  }

  void skip_field_rest() {
    int depth = 0;
    while (!at_end()) {
      auto t = cur();
      if (t == "(" || t == "{" || t == "[") ++depth;
      else if (t == ")" || t == "}" || t == "]") --depth;
      else if (t == ";" && depth == 0) {
        ++pos_;
        return;
      }
      if (depth < 0) fail("unbalanced field declaration");
      ++pos_;
    }
    fail("unterminated field declaration");
  }

  // Skips a type reference: qualified name with generic arguments and dims.
  void skip_type() {
    if (is("@")) skip_annotation();
    expect_ident();
    while (true) {
      if (is("<")) {
        skip_balanced("<", ">");
      } else if (is(".") && pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Kind::Ident) {
        pos_ += 2;
      } else if (is("[") && next_is("]")) {
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  void finish_method(std::size_t start_tok, const std::vector<std::string>& chain,
                     const std::string& name, std::vector<std::string> args) {
    while (is("[") && next_is("]")) pos_ += 2;
    while (!at_end() && !is("{") && !is(";")) {
      if (is("(")) skip_balanced("(", ")");  // annotation-member default values
      else if (is("{")) break;
      else ++pos_;
    }
    if (at_end()) fail("unterminated method declaration '" + name + "'");
    std::size_t end_tok = is("{") ? skip_balanced("{", "}") : pos_++;
    emit(start_tok, end_tok, chain, name, std::move(args));
  }

  void parse_class_body(const std::vector<std::string>& chain, bool is_enum,
                        const std::vector<std::string>* record_components) {
    expect("{");
    if (is_enum) skip_enum_constants();
    const std::string& simple = chain.back();
    while (!at_end() && !is("}")) {
      if (is(";")) {
        ++pos_;
        continue;
      }
      std::size_t start_tok = pos_;
      skip_modifiers();
      if (at_end()) break;
      if (is("{")) {
        skip_balanced("{", "}");  // initializer block
        continue;
      }
      if (at_type_keyword()) {
        parse_type_declaration(chain);
        continue;
      }
      if (is("<")) skip_balanced("<", ">");
      if (is(simple) && next_is("(")) {
        std::string name = expect_ident();
        std::size_t open = pos_;
        std::size_t close = skip_balanced("(", ")");
        finish_method(start_tok, chain, name, parse_parameter_types(open, close));
        continue;
      }
      if (record_components != nullptr && is(simple) && next_is("{")) {
        std::string name = expect_ident();
        std::size_t end_tok = skip_balanced("{", "}");
        emit(start_tok, end_tok, chain, name, *record_components);
        continue;
      }
      if (!is_ident()) fail("unexpected token '" + std::string(cur()) + "' in class body");
      skip_type();
      std::string name = expect_ident();
      if (is("(")) {
        std::size_t open = pos_;
        std::size_t close = skip_balanced("(", ")");
        finish_method(start_tok, chain, name, parse_parameter_types(open, close));
      } else {
        skip_field_rest();
      }
    }
    expect("}");
  }

  std::string_view src_;
  std::string file_;
  std::vector<JavaToken> toks_;
  std::vector<std::size_t> line_starts_;
  std::size_t pos_ = 0;
  std::string package_;
  std::vector<MethodRecord> records_;
};

}  // namespace detail

class JavaExtractor final : public SourceExtractor {
 public:
  bool handles(const std::filesystem::path& file) const override {
    return file.extension() == ".java";
  }
  std::vector<MethodRecord> extract(std::string_view source,
                                    const std::string& rel_file) const override {
    return detail::JavaDeclParser(source, rel_file).parse();
  }
};

// Immutable once constructed; safe to share between threads.
class RepoIndex {
 public:
  RepoIndex() = default;

  // Records keep their given order. A record whose FQN was already seen is
  // dropped and reported through `duplicates`.
  explicit RepoIndex(std::vector<MethodRecord> records,
                     std::vector<std::string>* duplicates = nullptr) {
    for (auto& rec : records) {
      if (by_fqn_.count(rec.fqn)) {
        if (duplicates != nullptr) duplicates->push_back(rec.fqn);
        continue;
      }
      by_fqn_.emplace(rec.fqn, records_.size());
      paths_.insert(rec.path_name);
      classes_[rec.path_name].insert(rec.class_name);
      auto class_fqn = rec.class_fqn();
      auto& members = methods_[class_fqn];
      if (members.empty()) class_fqns_.push_back(class_fqn);
      members.push_back(rec);
      all_method_fqns_.push_back(rec.fqn);
      records_.push_back(std::move(rec));
    }
    std::sort(class_fqns_.begin(), class_fqns_.end());
  }

  const std::set<std::string>& paths() const { return paths_; }
  const std::map<std::string, std::set<std::string>>& classes() const { return classes_; }
  const std::map<std::string, std::vector<MethodRecord>>& methods() const { return methods_; }
  const std::vector<std::string>& all_method_fqns() const { return all_method_fqns_; }
  const std::vector<std::string>& class_fqns() const { return class_fqns_; }
  const std::vector<MethodRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  const MethodRecord* find_method(std::string_view fqn) const {
    auto it = by_fqn_.find(std::string(fqn));
    return it == by_fqn_.end() ? nullptr : &records_[it->second];
  }
  const std::set<std::string>* classes_of_path(std::string_view path) const {
    auto it = classes_.find(std::string(path));
    return it == classes_.end() ? nullptr : &it->second;
  }
  const std::vector<MethodRecord>* methods_of_class(std::string_view class_fqn) const {
    auto it = methods_.find(std::string(class_fqn));
    return it == methods_.end() ? nullptr : &it->second;
  }

  bool operator==(const RepoIndex& o) const { return records_ == o.records_; }

 private:
  std::set<std::string> paths_;
  std::map<std::string, std::set<std::string>> classes_;
  std::map<std::string, std::vector<MethodRecord>> methods_;
  std::vector<std::string> all_method_fqns_;
  std::vector<std::string> class_fqns_;
  std::vector<MethodRecord> records_;
  std::unordered_map<std::string, std::size_t> by_fqn_;
};

struct IndexBuild {
  RepoIndex index;
  std::vector<ParseWarning> warnings;
};

// Walks `root` in lexicographic order of repo-relative paths. Files the
// extractor cannot parse are reported in `warnings` and skipped.
inline IndexBuild build_index(const std::filesystem::path& root,
                              const SourceExtractor& extractor = JavaExtractor{}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw ConfigError("index root is not a readable directory: " + root.string());

  std::vector<std::pair<std::string, fs::path>> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw ConfigError("cannot traverse index root " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec) || !extractor.handles(it->path())) continue;
    files.emplace_back(fs::relative(it->path(), root).generic_string(), it->path());
  }
  std::sort(files.begin(), files.end());

  IndexBuild out;
  std::vector<MethodRecord> records;
  for (const auto& [rel, full] : files) {
    try {
      auto src = text::read_file(full);
      auto recs = extractor.extract(src, rel);
      records.insert(records.end(), std::make_move_iterator(recs.begin()),
                     std::make_move_iterator(recs.end()));
    } catch (const Error& e) {
      out.warnings.push_back({rel, e.what()});
    }
  }
  std::vector<std::string> dups;
  out.index = RepoIndex(std::move(records), &dups);
  for (const auto& d : dups) out.warnings.push_back({"", "duplicate method FQN dropped: " + d});
  return out;
}

inline constexpr int kIndexFormatVersion = 1;

inline std::string index_to_json(const RepoIndex& index) {
  nlohmann::ordered_json doc;
  doc["version"] = kIndexFormatVersion;
  auto& methods = doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& r : index.records()) {
    nlohmann::ordered_json m;
    m["path"] = r.path_name;
    m["class"] = r.class_name;
    m["name"] = r.method_name;
    m["arg_types"] = r.arg_types;
    m["file"] = r.file;
    m["start_line"] = r.line_span.start;
    m["end_line"] = r.line_span.end;
    m["snippet"] = r.snippet;
    methods.push_back(std::move(m));
  }
  return doc.dump(1) + "\n";
}

inline void save_index(const RepoIndex& index, const std::filesystem::path& file) {
  text::write_file(file, index_to_json(index));
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + "." + key + ": missing");
  return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw FormatError(where + "." + key + ": expected string");
  return v.get<std::string>();
}

inline long long require_int(const nlohmann::json& obj, const char* key,
                             const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_integer()) throw FormatError(where + "." + key + ": expected integer");
  return v.get<long long>();
}

inline nlohmann::json parse_json(std::string_view content, const std::string& what) {
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(what + ": invalid JSON: " + e.what());
  }
}

}  // namespace detail

inline RepoIndex index_from_json(std::string_view content, const std::string& what = "index") {
  auto doc = detail::parse_json(content, what);
  if (!doc.is_object()) throw FormatError(what + ": expected JSON object");
  if (detail::require_int(doc, "version", what) != kIndexFormatVersion)
    throw FormatError(what + ".version: unsupported version");
  const auto& methods = detail::require(doc, "methods", what);
  if (!methods.is_array()) throw FormatError(what + ".methods: expected array");
  std::vector<MethodRecord> records;
  records.reserve(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    std::string where = what + ".methods[" + std::to_string(i) + "]";
    const auto& m = methods[i];
    if (!m.is_object()) throw FormatError(where + ": expected object");
    MethodRecord r;
    r.path_name = detail::require_string(m, "path", where);
    r.class_name = detail::require_string(m, "class", where);
    r.method_name = detail::require_string(m, "name", where);
    const auto& args = detail::require(m, "arg_types", where);
    if (!args.is_array()) throw FormatError(where + ".arg_types: expected array");
    for (const auto& a : args) {
      if (!a.is_string()) throw FormatError(where + ".arg_types: expected strings");
      r.arg_types.push_back(a.get<std::string>());
    }
    r.file = detail::require_string(m, "file", where);
    r.line_span.start = static_cast<int>(detail::require_int(m, "start_line", where));
    r.line_span.end = static_cast<int>(detail::require_int(m, "end_line", where));
    r.snippet = detail::require_string(m, "snippet", where);
    if (r.class_name.empty() || r.method_name.empty())
      throw FormatError(where + ": class and name must be non-empty");
    if (r.line_span.start < 1 || r.line_span.start > r.line_span.end)
      throw FormatError(where + ".start_line: invalid line span");
    if (r.snippet.empty()) throw FormatError(where + ".snippet: empty");
    r.fqn = make_fqn(r.path_name, r.class_name, r.method_name, r.arg_types);
    records.push_back(std::move(r));
  }
  std::vector<std::string> dups;
  RepoIndex index(std::move(records), &dups);
  if (!dups.empty()) throw FormatError(what + ".methods: duplicate FQN " + dups.front());
  return index;
}

inline RepoIndex load_index(const std::filesystem::path& file) {
  return index_from_json(text::read_file(file), file.string());
}

}  // namespace flexloc
