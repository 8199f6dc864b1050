#include <cctype>
#include <cstring>

#include "ast.hpp"

namespace minipy {

namespace {

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

void append_utf8(std::string& out, std::uint32_t cp) {
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

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool line_start = true;
    while (pos_ < src_.size()) {
      if (line_start && depth_ == 0) {
        if (!handle_indent()) continue;
        line_start = false;
      }
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        pos_ += src_[pos_ + 1] == '\r' && pos_ + 2 < src_.size() && src_[pos_ + 2] == '\n' ? 3 : 2;
        ++line_;
      } else if (c == '\n') {
        if (depth_ == 0) {
          push_newline();
          line_start = true;
        }
        ++pos_;
        ++line_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        number();
      } else if (is_name_start(static_cast<unsigned char>(c))) {
        name_or_string();
      } else if (c == '"' || c == '\'') {
        string(false, false);
      } else {
        op();
      }
    }
    push_newline();
    while (indents_.size() > 1) {
      indents_.pop_back();
      tokens_.push_back({Token::Type::dedent, "", line_});
    }
    tokens_.push_back({Token::Type::end, "", line_});
    return std::move(tokens_);
  }

 private:
  // Returns false when the line was blank (already consumed).
  bool handle_indent() {
    std::size_t col = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      col = src_[p] == '\t' ? (col / 8 + 1) * 8 : col + 1;
      ++p;
    }
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' || src_[p] == '\r') {
      while (p < src_.size() && src_[p] != '\n') ++p;
      if (p < src_.size()) {
        ++p;
        ++line_;
      }
      pos_ = p;
      return false;
    }
    pos_ = p;
    if (col > indents_.back()) {
      indents_.push_back(col);
      tokens_.push_back({Token::Type::indent, "", line_});
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        tokens_.push_back({Token::Type::dedent, "", line_});
      }
      if (col != indents_.back()) syntax_error(line_, "unindent does not match any outer indentation level");
    }
    return true;
  }

  void push_newline() {
    if (!tokens_.empty() && tokens_.back().type != Token::Type::newline && tokens_.back().type != Token::Type::indent &&
        tokens_.back().type != Token::Type::dedent) {
      tokens_.push_back({Token::Type::newline, "", line_});
    }
  }

  void number() {
    const std::size_t start = pos_;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) && src_[pos_ + 1] != 0) {
      pos_ += 2;
      while (pos_ < src_.size() && (std::isxdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    } else {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          pos_ = p;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) syntax_error(line_, "complex literals are not supported");
    }
    std::string text;
    for (std::size_t i = start; i < pos_; ++i) {
      if (src_[i] != '_') text += src_[i];
    }
    tokens_.push_back({Token::Type::number, text, line_});
  }

  void name_or_string() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_name_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string word(src_.substr(start, pos_ - start));
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && word.size() <= 2) {
      bool raw = false, fmt = false, ok = true;
      for (const char ch : word) {
        switch (std::tolower(static_cast<unsigned char>(ch))) {
          case 'r': raw = true; break;
          case 'f': fmt = true; break;
          case 'u':
          case 'b': break;
          default: ok = false;
        }
      }
      if (ok) {
        string(raw, fmt);
        return;
      }
    }
    tokens_.push_back({Token::Type::name, word, line_});
  }

  void string(bool raw, bool fmt) {
    const char quote = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    const int start_line = line_;
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) syntax_error(start_line, "unterminated string literal");
      const char c = src_[pos_];
      if (triple) {
        if (c == quote && pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          break;
        }
      } else {
        if (c == quote) {
          ++pos_;
          break;
        }
        if (c == '\n') syntax_error(start_line, "unterminated string literal");
      }
      if (c == '\n') ++line_;
      if (c == '\\' && pos_ + 1 < src_.size()) {
        if (raw) {
          out += c;
          out += src_[pos_ + 1];
          if (src_[pos_ + 1] == '\n') ++line_;
          pos_ += 2;
          continue;
        }
        escape(out);
        continue;
      }
      out += c;
      ++pos_;
    }
    tokens_.push_back({fmt ? Token::Type::fstring : Token::Type::string, out, start_line});
  }

  void escape(std::string& out) {
    const char e = src_[pos_ + 1];
    pos_ += 2;
    switch (e) {
      case '\n': ++line_; return;
      case 'n': out += '\n'; return;
      case 't': out += '\t'; return;
      case 'r': out += '\r'; return;
      case '0': out += '\0'; return;
      case 'a': out += '\a'; return;
      case 'b': out += '\b'; return;
      case 'f': out += '\f'; return;
      case 'v': out += '\v'; return;
      case '\\': out += '\\'; return;
      case '\'': out += '\''; return;
      case '"': out += '"'; return;
      case 'x':
      case 'u':
      case 'U': {
        const std::size_t digits = e == 'x' ? 2 : e == 'u' ? 4 : 8;
        if (pos_ + digits > src_.size()) syntax_error(line_, "truncated escape");
        std::uint32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
          const char h = src_[pos_ + i];
          if (!std::isxdigit(static_cast<unsigned char>(h))) syntax_error(line_, "bad escape");
          cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : std::tolower(h) - 'a' + 10);
        }
        pos_ += digits;
        append_utf8(out, cp);
        return;
      }
      default:
        out += '\\';
        out += e;
    }
  }

  void op() {
    static constexpr std::string_view three[] = {"**=", "//=", ">>=", "<<=", "..."};
    static constexpr std::string_view two[] = {"**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
                                               "->", "<<", ">>", "&=", "|=", "^=", ":="};
    const auto rest = src_.substr(pos_);
    for (const auto t : three) {
      if (rest.starts_with(t)) {
        tokens_.push_back({Token::Type::op, std::string(t), line_});
        pos_ += 3;
        return;
      }
    }
    for (const auto t : two) {
      if (rest.starts_with(t)) {
        tokens_.push_back({Token::Type::op, std::string(t), line_});
        pos_ += 2;
        return;
      }
    }
    const char c = src_[pos_];
    if (std::string_view("+-*/%<>=()[]{},:.;@&|^~").find(c) == std::string_view::npos) {
      syntax_error(line_, std::string("unexpected character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
    tokens_.push_back({Token::Type::op, std::string(1, c), line_});
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::vector<std::size_t> indents_;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace minipy
