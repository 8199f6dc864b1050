#include <charconv>
#include <cstdlib>

#include "ast.hpp"

namespace minipy {

namespace {

const std::vector<std::string_view> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=", "**=", "&=", "|=", "^=", "<<=", ">>="};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::shared_ptr<Block> module() {
    auto block = std::make_shared<Block>();
    while (!at(Token::Type::end)) {
      if (accept_type(Token::Type::newline)) continue;
      statement(*block);
    }
    return block;
  }

  ExprPtr lone_expression() {
    while (accept_type(Token::Type::newline)) {
    }
    auto e = exprlist();
    while (accept_type(Token::Type::newline)) {
    }
    if (!at(Token::Type::end)) syntax_error(peek().line, "unexpected token in expression");
    return e;
  }

 private:
  // --- token helpers -------------------------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Token::Type t) const { return peek().type == t; }
  bool at_op(std::string_view op) const { return peek().type == Token::Type::op && peek().text == op; }
  bool at_kw(std::string_view kw) const { return peek().type == Token::Type::name && peek().text == kw; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept_type(Token::Type t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }
  bool accept_op(std::string_view op) {
    if (!at_op(op)) return false;
    ++pos_;
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    ++pos_;
    return true;
  }
  void expect_op(std::string_view op) {
    if (!accept_op(op)) syntax_error(peek().line, "expected '" + std::string(op) + "'");
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) syntax_error(peek().line, "expected '" + std::string(kw) + "'");
  }
  std::string expect_name() {
    if (!at(Token::Type::name) || is_keyword(peek().text)) syntax_error(peek().line, "expected a name");
    return next().text;
  }
  static bool is_keyword(std::string_view w) {
    static const std::vector<std::string_view> kw = {
        "and", "as", "assert", "break", "class", "continue", "def", "del", "elif", "else", "except", "finally",
        "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise",
        "return", "try", "while", "with", "yield", "True", "False", "None"};
    return std::find(kw.begin(), kw.end(), w) != kw.end();
  }

  template <class T>
  std::shared_ptr<T> make(int line) {
    auto p = std::make_shared<T>();
    p->line = line;
    return p;
  }
  ExprPtr expr_node(Expr::Kind kind, int line) {
    auto e = make<Expr>(line);
    e->kind = kind;
    return e;
  }

  // --- statements ----------------------------------------------------------------------------

  void statement(Block& out) {
    const int line = peek().line;
    if (at_op("@")) {
      std::vector<ExprPtr> decorators;
      while (accept_op("@")) {
        decorators.push_back(test());
        if (!accept_type(Token::Type::newline)) syntax_error(line, "expected newline after decorator");
      }
      if (!at_kw("def")) syntax_error(peek().line, "decorators only apply to functions");
      auto def = function_def();
      def->decorators = std::move(decorators);
      return out.push_back(def);
    }
    if (at_kw("def")) return out.push_back(function_def());
    if (at_kw("if")) return out.push_back(if_statement());
    if (at_kw("while")) {
      next();
      auto s = make<Stmt>(line);
      s->kind = Stmt::while_;
      s->value = test();
      s->body = block();
      if (accept_kw("else")) s->orelse = *block();
      return out.push_back(s);
    }
    if (at_kw("for")) {
      next();
      auto s = make<Stmt>(line);
      s->kind = Stmt::for_;
      s->target = target_list();
      expect_kw("in");
      s->value = exprlist();
      s->body = block();
      if (accept_kw("else")) s->orelse = *block();
      return out.push_back(s);
    }
    if (at_kw("try")) return out.push_back(try_statement());
    if (at_kw("class") || at_kw("with") || at_kw("async")) syntax_error(line, "'" + peek().text + "' is not supported");
    simple_statements(out);
  }

  std::shared_ptr<Block> block() {
    expect_op(":");
    auto body = std::make_shared<Block>();
    if (accept_type(Token::Type::newline)) {
      if (!accept_type(Token::Type::indent)) syntax_error(peek().line, "expected an indented block");
      while (!accept_type(Token::Type::dedent)) {
        if (at(Token::Type::end)) break;
        if (accept_type(Token::Type::newline)) continue;
        statement(*body);
      }
    } else {
      simple_statements(*body);
    }
    return body;
  }

  StmtPtr function_def() {
    const int line = next().line;
    auto s = make<Stmt>(line);
    s->kind = Stmt::def;
    s->name = expect_name();
    expect_op("(");
    parameters(s->params, s->defaults, ")");
    expect_op(")");
    if (accept_op("->")) test();
    s->body = block();
    return s;
  }

  void parameters(std::vector<std::string>& params, std::vector<ExprPtr>& defaults, std::string_view close) {
    while (!at_op(close)) {
      if (at_op("*") || at_op("**") || at_op("/")) syntax_error(peek().line, "variadic parameters are not supported");
      params.push_back(expect_name());
      if (close == ")" && accept_op(":")) test();
      if (accept_op("=")) {
        defaults.push_back(test());
      } else if (!defaults.empty()) {
        syntax_error(peek().line, "non-default parameter follows default parameter");
      }
      if (!accept_op(",")) break;
    }
  }

  StmtPtr if_statement() {
    const int line = next().line;  // if / elif
    auto s = make<Stmt>(line);
    s->kind = Stmt::if_;
    s->value = test();
    s->body = block();
    if (at_kw("elif")) {
      s->orelse.push_back(if_statement());
    } else if (accept_kw("else")) {
      s->orelse = *block();
    }
    return s;
  }

  StmtPtr try_statement() {
    const int line = next().line;
    auto s = make<Stmt>(line);
    s->kind = Stmt::try_;
    s->body = block();
    while (at_kw("except")) {
      next();
      ExceptClause clause;
      if (!at_op(":")) {
        clause.type = test();
        if (accept_kw("as")) clause.name = expect_name();
      }
      clause.body = *block();
      s->handlers.push_back(std::move(clause));
    }
    if (accept_kw("else")) s->orelse = *block();
    if (accept_kw("finally")) s->finally = *block();
    if (s->handlers.empty() && s->finally.empty()) syntax_error(line, "try without except or finally");
    return s;
  }

  void simple_statements(Block& out) {
    out.push_back(small_statement());
    while (accept_op(";")) {
      if (at(Token::Type::newline) || at(Token::Type::end)) break;
      out.push_back(small_statement());
    }
    if (!accept_type(Token::Type::newline) && !at(Token::Type::end) && !at(Token::Type::dedent)) {
      syntax_error(peek().line, "invalid syntax near '" + peek().text + "'");
    }
  }

  bool at_statement_end() const { return at(Token::Type::newline) || at(Token::Type::end) || at_op(";") || at(Token::Type::dedent); }

  StmtPtr small_statement() {
    const int line = peek().line;
    auto s = make<Stmt>(line);
    if (accept_kw("pass")) return s;
    if (accept_kw("break")) {
      s->kind = Stmt::break_;
      return s;
    }
    if (accept_kw("continue")) {
      s->kind = Stmt::continue_;
      return s;
    }
    if (accept_kw("return")) {
      s->kind = Stmt::return_;
      if (!at_statement_end()) s->value = exprlist();
      return s;
    }
    if (accept_kw("raise")) {
      s->kind = Stmt::raise;
      if (!at_statement_end()) s->value = test();
      if (accept_kw("from")) test();
      return s;
    }
    if (accept_kw("assert")) {
      s->kind = Stmt::assert_;
      s->value = test();
      if (accept_op(",")) s->message = test();
      return s;
    }
    if (accept_kw("del")) {
      s->kind = Stmt::del;
      do {
        s->targets.push_back(or_expr());
      } while (accept_op(","));
      return s;
    }
    if (accept_kw("global") || accept_kw("nonlocal")) {
      s->kind = Stmt::global;
      do {
        s->params.push_back(expect_name());
      } while (accept_op(","));
      return s;
    }
    if (accept_kw("import")) {
      s->kind = Stmt::import;
      do {
        auto module = dotted_name();
        std::string bound = module.substr(0, module.find('.'));
        if (accept_kw("as")) bound = expect_name();
        s->imports.emplace_back(module, bound);
      } while (accept_op(","));
      return s;
    }
    if (accept_kw("from")) {
      s->kind = Stmt::import;
      const auto module = dotted_name();
      expect_kw("import");
      const bool paren = accept_op("(");
      if (accept_op("*")) syntax_error(line, "star imports are not supported");
      do {
        if (paren && at_op(")")) break;
        auto attr = expect_name();
        std::string bound = attr;
        if (accept_kw("as")) bound = expect_name();
        s->from_names.emplace_back(attr, bound);
      } while (accept_op(","));
      if (paren) expect_op(")");
      s->imports.emplace_back(module, "");
      return s;
    }

    auto first = exprlist();
    for (const auto op : kAugOps) {
      if (accept_op(op)) {
        s->kind = Stmt::aug_assign;
        s->op = std::string(op.substr(0, op.size() - 1));
        check_target(first, false);
        s->target = first;
        s->value = exprlist();
        return s;
      }
    }
    if (at_op(":") ) {
      // annotated assignment
      next();
      test();
      check_target(first, false);
      if (accept_op("=")) {
        s->kind = Stmt::assign;
        s->targets.push_back(first);
        s->value = exprlist();
      }
      return s;
    }
    if (at_op("=")) {
      s->kind = Stmt::assign;
      std::vector<ExprPtr> chain{first};
      while (accept_op("=")) chain.push_back(exprlist());
      s->value = chain.back();
      chain.pop_back();
      for (const auto& t : chain) check_target(t, true);
      s->targets = std::move(chain);
      return s;
    }
    s->kind = Stmt::expr;
    s->value = first;
    return s;
  }

  std::string dotted_name() {
    auto name = expect_name();
    while (accept_op(".")) name += "." + expect_name();
    return name;
  }

  void check_target(const ExprPtr& e, bool allow_tuple) {
    switch (e->kind) {
      case Expr::Kind::name:
      case Expr::Kind::subscript:
      case Expr::Kind::attribute: return;
      case Expr::Kind::tuple:
      case Expr::Kind::list:
        if (!allow_tuple) break;
        for (const auto& item : e->items) check_target(item, true);
        return;
      default: break;
    }
    syntax_error(e->line, "cannot assign to expression");
  }

  ExprPtr target_list() {
    const int line = peek().line;
    std::vector<ExprPtr> items{or_expr()};
    bool tuple = false;
    while (accept_op(",")) {
      tuple = true;
      if (at_kw("in")) break;
      items.push_back(or_expr());
    }
    ExprPtr target = items.front();
    if (tuple) {
      target = expr_node(Expr::Kind::tuple, line);
      target->items = std::move(items);
    }
    check_target(target, true);
    return target;
  }

  // --- expressions ---------------------------------------------------------------------------

  ExprPtr exprlist() {
    const int line = peek().line;
    auto first = test();
    if (!at_op(",")) return first;
    auto tuple = expr_node(Expr::Kind::tuple, line);
    tuple->items.push_back(first);
    while (accept_op(",")) {
      if (at_statement_end() || at_op("=") || at_op(")") || at_op(":")) break;
      bool aug = false;
      for (const auto op : kAugOps) aug = aug || at_op(op);
      if (aug) break;
      tuple->items.push_back(test());
    }
    return tuple;
  }

  ExprPtr test() {
    const int line = peek().line;
    if (accept_kw("lambda")) {
      auto e = expr_node(Expr::Kind::lambda, line);
      parameters(e->params, e->defaults, ":");
      expect_op(":");
      e->a = test();
      return e;
    }
    auto body = or_test();
    if (at_op(":=")) syntax_error(line, "assignment expressions are not supported");
    if (accept_kw("if")) {
      auto e = expr_node(Expr::Kind::ifexp, line);
      e->b = or_test();
      expect_kw("else");
      e->a = body;
      e->c = test();
      return e;
    }
    return body;
  }

  ExprPtr or_test() {
    auto left = and_test();
    while (at_kw("or")) {
      const int line = next().line;
      auto e = expr_node(Expr::Kind::boolop, line);
      e->name = "or";
      e->a = left;
      e->b = and_test();
      left = e;
    }
    return left;
  }

  ExprPtr and_test() {
    auto left = not_test();
    while (at_kw("and")) {
      const int line = next().line;
      auto e = expr_node(Expr::Kind::boolop, line);
      e->name = "and";
      e->a = left;
      e->b = not_test();
      left = e;
    }
    return left;
  }

  ExprPtr not_test() {
    if (at_kw("not")) {
      const int line = next().line;
      auto e = expr_node(Expr::Kind::unary, line);
      e->name = "not";
      e->a = not_test();
      return e;
    }
    return comparison();
  }

  ExprPtr comparison() {
    const int line = peek().line;
    auto first = or_expr();
    std::vector<std::string> ops;
    std::vector<ExprPtr> operands{first};
    while (true) {
      std::string op;
      if (at_op("<") || at_op(">") || at_op("==") || at_op("!=") || at_op("<=") || at_op(">=")) {
        op = next().text;
      } else if (at_kw("in")) {
        next();
        op = "in";
      } else if (at_kw("not") && peek(1).type == Token::Type::name && peek(1).text == "in") {
        pos_ += 2;
        op = "not in";
      } else if (at_kw("is")) {
        next();
        op = accept_kw("not") ? "is not" : "is";
      } else {
        break;
      }
      ops.push_back(op);
      operands.push_back(or_expr());
    }
    if (ops.empty()) return first;
    auto e = expr_node(Expr::Kind::compare, line);
    e->ops = std::move(ops);
    e->items = std::move(operands);
    return e;
  }

  ExprPtr binary_level(int level) {
    static const std::vector<std::vector<std::string_view>> levels = {
        {"|"}, {"^"}, {"&"}, {"<<", ">>"}, {"+", "-"}, {"*", "/", "//", "%", "@"}};
    if (level == static_cast<int>(levels.size())) return factor();
    auto left = binary_level(level + 1);
    while (true) {
      std::string op;
      for (const auto candidate : levels[static_cast<std::size_t>(level)]) {
        if (at_op(candidate)) op = std::string(candidate);
      }
      if (op.empty()) return left;
      const int line = next().line;
      auto e = expr_node(Expr::Kind::binary, line);
      e->name = op;
      e->a = left;
      e->b = binary_level(level + 1);
      left = e;
    }
  }

  ExprPtr or_expr() { return binary_level(0); }

  ExprPtr factor() {
    if (at_op("-") || at_op("+") || at_op("~")) {
      const auto& tok = next();
      auto e = expr_node(Expr::Kind::unary, tok.line);
      e->name = tok.text;
      e->a = factor();
      return e;
    }
    return power();
  }

  ExprPtr power() {
    auto base = primary();
    if (at_op("**")) {
      const int line = next().line;
      auto e = expr_node(Expr::Kind::binary, line);
      e->name = "**";
      e->a = base;
      e->b = factor();
      return e;
    }
    return base;
  }

  ExprPtr primary() {
    auto e = atom();
    while (true) {
      const int line = peek().line;
      if (accept_op("(")) {
        auto call = expr_node(Expr::Kind::call, line);
        call->a = e;
        call_arguments(*call);
        e = call;
      } else if (accept_op("[")) {
        auto sub = expr_node(Expr::Kind::subscript, line);
        sub->a = e;
        sub->b = subscript();
        expect_op("]");
        e = sub;
      } else if (accept_op(".")) {
        auto attr = expr_node(Expr::Kind::attribute, line);
        attr->a = e;
        attr->name = expect_name();
        e = attr;
      } else {
        return e;
      }
    }
  }

  void call_arguments(Expr& call) {
    while (!at_op(")")) {
      if (at_op("*") || at_op("**")) syntax_error(peek().line, "argument unpacking is not supported");
      if (peek().type == Token::Type::name && peek(1).type == Token::Type::op && peek(1).text == "=") {
        auto key = next().text;
        next();
        call.kwargs.emplace_back(std::move(key), test());
      } else {
        if (!call.kwargs.empty()) syntax_error(peek().line, "positional argument follows keyword argument");
        auto arg = test();
        if (at_kw("for")) arg = comprehension(Expr::Kind::list_comp, arg, nullptr);
        call.items.push_back(arg);
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
  }

  ExprPtr subscript() {
    const int line = peek().line;
    ExprPtr lower, upper, step;
    if (!at_op(":")) {
      lower = test();
      if (at_op(",")) {
        auto tuple = expr_node(Expr::Kind::tuple, line);
        tuple->items.push_back(lower);
        while (accept_op(",")) {
          if (at_op("]")) break;
          tuple->items.push_back(test());
        }
        return tuple;
      }
      if (!at_op(":")) return lower;
    }
    expect_op(":");
    if (!at_op("]") && !at_op(":")) upper = test();
    if (accept_op(":")) {
      if (!at_op("]")) step = test();
    }
    auto slice = expr_node(Expr::Kind::slice, line);
    slice->a = lower;
    slice->b = upper;
    slice->c = step;
    return slice;
  }

  ExprPtr comprehension(Expr::Kind kind, ExprPtr element, ExprPtr value) {
    auto e = expr_node(kind, element->line);
    e->a = element;
    e->b = value;
    while (accept_kw("for")) {
      Comprehension clause;
      clause.target = target_list();
      expect_kw("in");
      clause.iter = or_test();
      while (at_kw("if")) {
        next();
        clause.conditions.push_back(or_test());
      }
      e->clauses.push_back(std::move(clause));
    }
    return e;
  }

  ExprPtr atom() {
    const auto& tok = peek();
    const int line = tok.line;
    switch (tok.type) {
      case Token::Type::number: {
        next();
        auto e = expr_node(Expr::Kind::constant, line);
        e->constant = number_value(tok.text, line);
        return e;
      }
      case Token::Type::string:
      case Token::Type::fstring: return strings();
      case Token::Type::name: {
        if (tok.text == "True" || tok.text == "False" || tok.text == "None") {
          next();
          auto e = expr_node(Expr::Kind::constant, line);
          if (tok.text == "True") e->constant = true;
          if (tok.text == "False") e->constant = false;
          return e;
        }
        if (is_keyword(tok.text)) syntax_error(line, "unexpected keyword '" + tok.text + "'");
        next();
        auto e = expr_node(Expr::Kind::name, line);
        e->name = tok.text;
        return e;
      }
      case Token::Type::op: break;
      default: syntax_error(line, "unexpected end of line");
    }
    if (accept_op("(")) {
      if (accept_op(")")) return expr_node(Expr::Kind::tuple, line);
      auto first = test();
      if (at_kw("for")) {
        auto comp = comprehension(Expr::Kind::list_comp, first, nullptr);
        expect_op(")");
        return comp;
      }
      if (accept_op(")")) return first;
      auto tuple = expr_node(Expr::Kind::tuple, line);
      tuple->items.push_back(first);
      while (accept_op(",")) {
        if (at_op(")")) break;
        tuple->items.push_back(test());
      }
      expect_op(")");
      return tuple;
    }
    if (accept_op("[")) {
      auto list = expr_node(Expr::Kind::list, line);
      if (accept_op("]")) return list;
      auto first = test();
      if (at_kw("for")) {
        auto comp = comprehension(Expr::Kind::list_comp, first, nullptr);
        expect_op("]");
        return comp;
      }
      list->items.push_back(first);
      while (accept_op(",")) {
        if (at_op("]")) break;
        list->items.push_back(test());
      }
      expect_op("]");
      return list;
    }
    if (accept_op("{")) {
      if (accept_op("}")) return expr_node(Expr::Kind::dict, line);
      auto first = test();
      if (accept_op(":")) {
        auto value = test();
        if (at_kw("for")) {
          auto comp = comprehension(Expr::Kind::dict_comp, first, value);
          expect_op("}");
          return comp;
        }
        auto dict = expr_node(Expr::Kind::dict, line);
        dict->pairs.emplace_back(first, value);
        while (accept_op(",")) {
          if (at_op("}")) break;
          auto k = test();
          expect_op(":");
          dict->pairs.emplace_back(k, test());
        }
        expect_op("}");
        return dict;
      }
      if (at_kw("for")) {
        auto comp = comprehension(Expr::Kind::set_comp, first, nullptr);
        expect_op("}");
        return comp;
      }
      auto set = expr_node(Expr::Kind::set, line);
      set->items.push_back(first);
      while (accept_op(",")) {
        if (at_op("}")) break;
        set->items.push_back(test());
      }
      expect_op("}");
      return set;
    }
    syntax_error(line, "invalid syntax near '" + tok.text + "'");
  }

  static Value number_value(const std::string& text, int line) {
    if (text.size() > 2 && text[0] == '0' && std::isalpha(static_cast<unsigned char>(text[1]))) {
      const int base = std::tolower(text[1]) == 'x' ? 16 : std::tolower(text[1]) == 'o' ? 8 : 2;
      std::int64_t v = 0;
      const auto r = std::from_chars(text.data() + 2, text.data() + text.size(), v, base);
      if (r.ec != std::errc() || r.ptr != text.data() + text.size()) syntax_error(line, "invalid number '" + text + "'");
      return v;
    }
    if (text.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec == std::errc::result_out_of_range) throw PyError("OverflowError", "integer literal too large");
      if (r.ec != std::errc() || r.ptr != text.data() + text.size()) syntax_error(line, "invalid number '" + text + "'");
      return v;
    }
    return std::strtod(text.c_str(), nullptr);
  }

  // Adjacent literals concatenate; any f-string part makes the whole an f-string.
  ExprPtr strings() {
    const int line = peek().line;
    std::vector<FStringPart> parts;
    bool formatted = false;
    while (at(Token::Type::string) || at(Token::Type::fstring)) {
      const auto tok = next();
      if (tok.type == Token::Type::string) {
        if (!parts.empty() && !parts.back().expr) {
          parts.back().literal += tok.text;
        } else {
          parts.push_back({tok.text, nullptr, "", 0});
        }
      } else {
        formatted = true;
        split_fstring(tok.text, tok.line, parts);
      }
    }
    if (!formatted) {
      auto e = expr_node(Expr::Kind::constant, line);
      e->constant = parts.empty() ? std::string() : parts.front().literal;
      return e;
    }
    auto e = expr_node(Expr::Kind::fstring, line);
    e->parts = std::move(parts);
    return e;
  }

  static void split_fstring(const std::string& s, int line, std::vector<FStringPart>& parts) {
    const auto add_literal = [&](const std::string& lit) {
      if (lit.empty()) return;
      if (!parts.empty() && !parts.back().expr) {
        parts.back().literal += lit;
      } else {
        parts.push_back({lit, nullptr, "", 0});
      }
    };
    std::string literal;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
        literal += '{';
        i += 2;
      } else if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
        literal += '}';
        i += 2;
      } else if (c == '}') {
        syntax_error(line, "f-string: single '}' is not allowed");
      } else if (c == '{') {
        add_literal(literal);
        literal.clear();
        int depth = 0;
        char quote = 0;
        std::size_t j = i + 1;
        std::size_t colon = std::string::npos, bang = std::string::npos;
        for (; j < s.size(); ++j) {
          const char d = s[j];
          if (quote) {
            if (d == quote) quote = 0;
            continue;
          }
          if (d == '\'' || d == '"') {
            quote = d;
          } else if (d == '(' || d == '[' || d == '{') {
            ++depth;
          } else if (d == ')' || d == ']' || (d == '}' && depth > 0)) {
            --depth;
          } else if (d == '}' && depth == 0) {
            break;
          } else if (d == '!' && depth == 0 && colon == std::string::npos && j + 1 < s.size() && s[j + 1] != '=') {
            bang = j;
          } else if (d == ':' && depth == 0 && colon == std::string::npos) {
            colon = j;
          }
        }
        if (j >= s.size()) syntax_error(line, "f-string: expecting '}'");
        const std::size_t expr_end = bang != std::string::npos ? bang : colon != std::string::npos ? colon : j;
        FStringPart part;
        part.expr = parse_expression(s.substr(i + 1, expr_end - i - 1), line);
        if (bang != std::string::npos) part.conversion = s[bang + 1];
        if (colon != std::string::npos) part.spec = s.substr(colon + 1, j - colon - 1);
        parts.push_back(std::move(part));
        i = j + 1;
      } else {
        literal += c;
        ++i;
      }
    }
    add_literal(literal);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::shared_ptr<Block> parse_module(std::string_view source) { return Parser(tokenize(source)).module(); }

ExprPtr parse_expression(std::string_view source, int line) {
  try {
    return Parser(tokenize(source)).lone_expression();
  } catch (const PyError&) {
    syntax_error(line, "f-string: invalid expression");
  }
}

}  // namespace minipy
