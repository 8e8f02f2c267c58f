#pragma once

// AnyLite: JSON plus // and /* */ comments, unquoted identifier keys,
// trailing commas and `=` as a key/value separator.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace aimsim::anyconf {

class Value;
using List = std::vector<Value>;
using Table = std::vector<std::pair<std::string, Value>>;

enum class Kind { Null, Bool, Number, Text, List, Table };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Null: return "null";
    case Kind::Bool: return "bool";
    case Kind::Number: return "number";
    case Kind::Text: return "text";
    case Kind::List: return "list";
    case Kind::Table: return "table";
  }
  return "?";
}

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed configuration value. Tables keep insertion order.
class Value {
 public:
  using Storage = std::variant<std::nullptr_t, bool, double, std::string, List, Table>;

  Value() = default;
  Value(std::nullptr_t) {}
  Value(bool b) : data_(b) {}
  template <class T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, bool>)
  Value(T n) : data_(static_cast<double>(n)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(std::string_view s) : data_(std::string(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(List l) : data_(std::move(l)) {}
  Value(Table t) : data_(std::move(t)) {}

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_null() const { return kind() == Kind::Null; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_number() const { return kind() == Kind::Number; }
  bool is_text() const { return kind() == Kind::Text; }
  bool is_list() const { return kind() == Kind::List; }
  bool is_table() const { return kind() == Kind::Table; }

  bool as_bool() const { return get<bool>(Kind::Bool); }
  double as_number() const { return get<double>(Kind::Number); }
  const std::string& as_text() const { return get<std::string>(Kind::Text); }
  const List& as_list() const { return get<List>(Kind::List); }
  const Table& as_table() const { return get<Table>(Kind::Table); }
  List& as_list() { return get<List>(Kind::List); }
  Table& as_table() { return get<Table>(Kind::Table); }

  /// Member lookup; nullptr when this is not a table or the key is absent.
  const Value* find(std::string_view key) const {
    if (!is_table()) return nullptr;
    for (const auto& [k, v] : as_table())
      if (k == key) return &v;
    return nullptr;
  }

  const Storage& storage() const { return data_; }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  template <class T>
  const T& get(Kind want) const {
    if (const T* p = std::get_if<T>(&data_)) return *p;
    throw TypeError(std::string("expected ") + kind_name(want) + ", found " + kind_name(kind()));
  }
  template <class T>
  T& get(Kind want) {
    if (T* p = std::get_if<T>(&data_)) return *p;
    throw TypeError(std::string("expected ") + kind_name(want) + ", found " + kind_name(kind()));
  }

  Storage data_;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  return os << d.line << ':' << d.column << ": "
            << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
}

struct ParseResult {
  std::optional<Value> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

namespace detail {

struct ParseFailure {
  std::size_t offset;
  std::string message;
};

inline bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Value document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_space();
    if (at_end()) fail("empty document");
    Value v = value(0);
    skip_space();
    if (!at_end()) fail("unexpected content after document");
    return v;
  }

 private:
  static constexpr int kMaxDepth = 512;

  [[noreturn]] void fail(std::string msg) const { throw ParseFailure{pos_, std::move(msg)}; }
  [[noreturn]] void fail_at(std::size_t at, std::string msg) const {
    throw ParseFailure{at, std::move(msg)};
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }

  void skip_space() {
    while (!at_end()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (!at_end() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        const std::size_t start = pos_;
        const auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) fail_at(start, "unterminated block comment");
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  Value value(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    const char c = peek();
    if (c == '{') return table(depth);
    if (c == '[') return list(depth);
    if (c == '"') return Value(string());
    if (c == '-' || is_digit(c)) return number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      const std::string_view word = identifier();
      if (word == "null") return Value(nullptr);
      if (word == "true") return Value(true);
      if (word == "false") return Value(false);
      if (word == "NaN" || word == "Infinity" || word == "inf" || word == "nan")
        fail_at(start, "non-finite numeric literal '" + std::string(word) + "'");
      fail_at(start, "unexpected identifier '" + std::string(word) + "'");
    }
    if (at_end()) fail("unexpected end of input, expected a value");
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view identifier() {
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(src_[pos_])) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  Value table(int depth) {
    ++pos_;  // {
    Table out;
    std::unordered_set<std::string> seen;
    skip_space();
    if (peek() == '}') {
      ++pos_;
      return Value(std::move(out));
    }
    while (true) {
      const std::size_t keyPos = pos_;
      std::string key;
      if (peek() == '"') {
        key = string();
      } else if (is_ident_start(peek())) {
        key = std::string(identifier());
      } else if (at_end()) {
        fail("unexpected end of input, expected a key");
      } else {
        fail("expected a key");
      }
      if (!seen.insert(key).second) fail_at(keyPos, "duplicate key '" + key + "'");
      skip_space();
      if (peek() != ':' && peek() != '=') fail("expected ':' or '=' after key");
      ++pos_;
      skip_space();
      Value v = value(depth + 1);
      out.emplace_back(std::move(key), std::move(v));
      skip_space();
      if (peek() == ',') {
        ++pos_;
        skip_space();
        if (peek() == '}') {
          ++pos_;
          break;
        }
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        break;
      }
      if (at_end()) fail("unterminated table, expected '}'");
      fail("expected ',' or '}'");
    }
    return Value(std::move(out));
  }

  Value list(int depth) {
    ++pos_;  // [
    List out;
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return Value(std::move(out));
    }
    while (true) {
      out.push_back(value(depth + 1));
      skip_space();
      if (peek() == ',') {
        ++pos_;
        skip_space();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        break;
      }
      if (at_end()) fail("unterminated list, expected ']'");
      fail("expected ',' or ']'");
    }
    return Value(std::move(out));
  }

  Value number() {
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (peek() == '0') {
      ++pos_;
    } else if (is_digit(peek())) {
      while (is_digit(peek())) ++pos_;
    } else {
      if (src_.substr(pos_, 8) == "Infinity") fail_at(start, "non-finite numeric literal");
      fail("expected digit");
    }
    if (peek() == '.') {
      ++pos_;
      if (!is_digit(peek())) fail("expected digit after decimal point");
      while (is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!is_digit(peek())) fail("expected digit in exponent");
      while (is_digit(peek())) ++pos_;
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc::result_out_of_range) {
      // from_chars reports both overflow and underflow here; strtod tells them apart.
      const std::string copy(text);
      v = std::strtod(copy.c_str(), nullptr);
      if (!std::isfinite(v)) fail_at(start, "non-finite numeric literal '" + copy + "'");
    } else if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail_at(start, "malformed number");
    }
    return Value(v);
  }

  unsigned hex4() {
    if (pos_ + 4 > src_.size()) fail("truncated \\u escape");
    unsigned v = 0;
    for (int i = 0; i < 4; ++i) {
      const char c = src_[pos_++];
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') v |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v |= static_cast<unsigned>(c - 'A' + 10);
      else fail_at(pos_ - 1, "invalid hex digit in \\u escape");
    }
    return v;
  }

  // Copies one raw UTF-8 sequence starting at pos_, validating it.
  void raw_utf8(std::string& out) {
    const auto b0 = static_cast<unsigned char>(src_[pos_]);
    int len = 0;
    std::uint32_t cp = 0;
    if (b0 < 0x80) {
      out += static_cast<char>(b0);
      ++pos_;
      return;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      fail("invalid UTF-8 byte");
    }
    if (pos_ + static_cast<std::size_t>(len) > src_.size()) fail("truncated UTF-8 sequence");
    for (int i = 1; i < len; ++i) {
      const auto b = static_cast<unsigned char>(src_[pos_ + static_cast<std::size_t>(i)]);
      if ((b & 0xC0) != 0x80) fail("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      fail("invalid UTF-8 sequence");
    out.append(src_.substr(pos_, static_cast<std::size_t>(len)));
    pos_ += static_cast<std::size_t>(len);
  }

  std::string string() {
    const std::size_t start = pos_;
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (at_end()) fail_at(start, "unterminated string");
      const char c = src_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (static_cast<unsigned char>(c) < 0x20) {
        if (c == '\n') fail_at(start, "unterminated string");
        fail("control character in string");
      }
      if (c != '\\') {
        raw_utf8(out);
        continue;
      }
      ++pos_;
      if (at_end()) fail_at(start, "unterminated string");
      const char e = src_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': {
          const std::size_t escPos = pos_ - 2;
          std::uint32_t cp = hex4();
          if (cp >= 0xD800 && cp <= 0xDBFF) {
            if (src_.substr(pos_, 2) != "\\u") fail_at(escPos, "unpaired surrogate in \\u escape");
            pos_ += 2;
            const std::uint32_t lo = hex4();
            if (lo < 0xDC00 || lo > 0xDFFF) fail_at(escPos, "unpaired surrogate in \\u escape");
            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
          } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
            fail_at(escPos, "unpaired surrogate in \\u escape");
          }
          append_utf8(out, cp);
          break;
        }
        default: fail_at(pos_ - 2, std::string("invalid escape '\\") + e + "'");
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// 1-based line and column (columns count code points) of a byte offset.
inline std::pair<int, int> position_of(std::string_view src, std::size_t offset) {
  int line = 1;
  int column = 1;
  offset = std::min(offset, src.size());
  for (std::size_t i = 0; i < offset; ++i) {
    const auto b = static_cast<unsigned char>(src[i]);
    if (b == '\n') {
      ++line;
      column = 1;
    } else if ((b & 0xC0) != 0x80) {
      ++column;
    }
  }
  return {line, column};
}

inline void write_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void write_string(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += "\\u00";
          out += kHex[(c >> 4) & 0xF];
          out += kHex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void write_value(std::string& out, const Value& v, int indent, int depth) {
  const auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.kind()) {
    case Kind::Null: out += "null"; break;
    case Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Kind::Number: write_number(out, v.as_number()); break;
    case Kind::Text: write_string(out, v.as_text()); break;
    case Kind::List: {
      const auto& l = v.as_list();
      out += '[';
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += indent > 0 ? "," : ", ";
        if (indent > 0) newline(depth + 1);
        write_value(out, l[i], indent, depth + 1);
      }
      if (indent > 0 && !l.empty()) newline(depth);
      out += ']';
      break;
    }
    case Kind::Table: {
      const auto& t = v.as_table();
      out += '{';
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += indent > 0 ? "," : ", ";
        if (indent > 0) newline(depth + 1);
        write_string(out, t[i].first);
        out += ": ";
        write_value(out, t[i].second, indent, depth + 1);
      }
      if (indent > 0 && !t.empty()) newline(depth);
      out += '}';
      break;
    }
  }
}

}  // namespace detail

/// Parses an AnyLite document. All-or-nothing: on failure `value` is empty
/// and at least one positioned error is reported.
inline ParseResult parse(std::string_view source) {
  ParseResult result;
  try {
    result.value = detail::Parser(source).document();
  } catch (const detail::ParseFailure& f) {
    const auto [line, column] = detail::position_of(source, f.offset);
    result.diagnostics.push_back({Severity::Error, line, column, f.message});
  }
  return result;
}

/// Canonical JSON text. `indent` = 0 gives a single line with ", " and ": "
/// separators; a positive indent pretty-prints.
inline std::string serialize(const Value& v, int indent = 0) {
  std::string out;
  detail::write_value(out, v, indent, 0);
  return out;
}

/// Appends or replaces a member, keeping insertion order.
inline void set(Table& table, std::string_view key, Value v) {
  for (auto& [k, existing] : table) {
    if (k == key) {
      existing = std::move(v);
      return;
    }
  }
  table.emplace_back(std::string(key), std::move(v));
}

}  // namespace aimsim::anyconf
