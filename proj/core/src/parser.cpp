// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <cctype>
#include <charconv>

#include "lsth/errors.hpp"
#include "lsth/minisql/ast.hpp"

namespace lsth {
namespace minisql {

namespace {

enum class TokKind { kIdent, kNumber, kString, kSymbol, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;  // idents upper-cased separately for keyword checks
  std::string upper;
};

class Lexer {
 public:
  explicit Lexer(const std::string& sql) : s_(sql) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  bool accept_kw(const char* kw) {
    if (tok_.kind == TokKind::kIdent && tok_.upper == kw) {
      advance();
      return true;
    }
    return false;
  }

  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) throw ParseError(std::string("expected ") + kw + near());
  }

  bool accept_sym(char c) {
    if (tok_.kind == TokKind::kSymbol && tok_.text.size() == 1 && tok_.text[0] == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect_sym(char c) {
    if (!accept_sym(c)) throw ParseError(std::string("expected '") + c + "'" + near());
  }

  std::string expect_ident() {
    if (tok_.kind != TokKind::kIdent) throw ParseError("expected identifier" + near());
    return take().text;
  }

  std::string expect_string() {
    if (tok_.kind != TokKind::kString) throw ParseError("expected string literal" + near());
    return take().text;
  }

  int64_t expect_int() {
    if (tok_.kind != TokKind::kNumber || tok_.text.find('.') != std::string::npos) {
      throw ParseError("expected integer" + near());
    }
    int64_t v = 0;
    auto t = take().text;
    std::from_chars(t.data(), t.data() + t.size(), v);
    return v;
  }

  std::string near() const {
    return tok_.kind == TokKind::kEnd ? " at end of statement" : " near '" + tok_.text + "'";
  }

 private:
  void advance() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      if (c == '-' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '-') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= s_.size()) {
      tok_ = {TokKind::kEnd, "", ""};
      return;
    }
    char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      tok_.kind = TokKind::kIdent;
      tok_.text = s_.substr(start, pos_ - start);
      tok_.upper = tok_.text;
      for (auto& ch : tok_.upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
      size_t start = pos_;
      ++pos_;
      bool seen_dot = false;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                  (s_[pos_] == '.' && !seen_dot))) {
        if (s_[pos_] == '.') seen_dot = true;
        ++pos_;
      }
      tok_ = {TokKind::kNumber, s_.substr(start, pos_ - start), ""};
      return;
    }
    if (c == '\'') {
      ++pos_;
      std::string text;
      while (pos_ < s_.size()) {
        if (s_[pos_] == '\'') {
          if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '\'') {
            text += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          tok_ = {TokKind::kString, std::move(text), ""};
          return;
        }
        text += s_[pos_++];
      }
      throw ParseError("unterminated string literal");
    }
    tok_ = {TokKind::kSymbol, std::string(1, c), ""};
    ++pos_;
  }

  const std::string& s_;
  size_t pos_ = 0;
  Token tok_;
};

Value literal(Lexer& lex) {
  const Token& t = lex.peek();
  if (t.kind == TokKind::kNumber) {
    std::string text = lex.take().text;
    if (text.find('.') != std::string::npos) {
      return Value::parse(ColumnType::kDecimal, text);
    }
    return Value::parse(ColumnType::kInt64, text);
  }
  if (t.kind == TokKind::kString) {
    return Value::string(lex.take().text);
  }
  throw ParseError("expected literal" + lex.near());
}

std::string column_ref(Lexer& lex) {
  std::string name = lex.expect_ident();
  if (lex.accept_sym('.')) name += "." + lex.expect_ident();
  return name;
}

ColumnType column_type(Lexer& lex) {
  std::string t = lex.expect_ident();
  for (auto& ch : t) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  try {
    return column_type_from_string(t);
  } catch (const SchemaMismatch&) {
    throw ParseError("unknown column type '" + t + "'");
  }
}

Statement parse_create(Lexer& lex) {
  lex.expect_kw("TABLE");
  CreateTable stmt;
  stmt.desc.name = lex.expect_ident();
  lex.expect_sym('(');
  do {
    std::string col = lex.expect_ident();
    stmt.desc.schema.push_back({col, column_type(lex)});
  } while (lex.accept_sym(','));
  lex.expect_sym(')');
  lex.expect_kw("USING");
  try {
    stmt.desc.layout = engine::layout_from_string(lex.expect_ident());
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  lex.expect_kw("MODE");
  try {
    stmt.desc.write_mode = engine::write_mode_from_string(lex.expect_ident());
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  lex.expect_kw("KEY");
  stmt.desc.key_column = lex.expect_ident();
  lex.expect_kw("TARGET");
  stmt.desc.target_file_rows = lex.expect_int();
  return stmt;
}

Statement parse_select(Lexer& lex) {
  Select stmt;
  auto& req = stmt.request;
  if (lex.accept_sym('*')) {
    req.agg = engine::ScanRequest::Agg::kNone;
  } else if (lex.accept_kw("COUNT")) {
    lex.expect_sym('(');
    lex.expect_sym('*');
    lex.expect_sym(')');
    req.agg = engine::ScanRequest::Agg::kCount;
  } else if (lex.accept_kw("SUM")) {
    lex.expect_sym('(');
    req.agg_column = column_ref(lex);
    lex.expect_sym(')');
    req.agg = engine::ScanRequest::Agg::kSum;
  } else if (lex.accept_kw("MIN")) {
    lex.expect_sym('(');
    req.agg_column = column_ref(lex);
    lex.expect_sym(')');
    req.agg = engine::ScanRequest::Agg::kMin;
  } else if (lex.accept_kw("MAX")) {
    lex.expect_sym('(');
    req.agg_column = column_ref(lex);
    lex.expect_sym(')');
    req.agg = engine::ScanRequest::Agg::kMax;
  } else {
    throw ParseError("expected *, count(*), sum(col), min(col) or max(col)" + lex.near());
  }
  lex.expect_kw("FROM");
  stmt.table = lex.expect_ident();
  if (lex.accept_kw("JOIN")) {
    engine::ScanRequest::Join join;
    join.table = lex.expect_ident();
    lex.expect_kw("ON");
    join.left_column = column_ref(lex);
    lex.expect_sym('=');
    join.right_column = column_ref(lex);
    req.join = std::move(join);
  }
  if (lex.accept_kw("WHERE")) {
    engine::Predicate p;
    p.column = column_ref(lex);
    if (lex.accept_kw("BETWEEN")) {
      p.op = engine::Predicate::Op::kBetween;
      p.lo = literal(lex);
      lex.expect_kw("AND");
      p.hi = literal(lex);
    } else if (lex.accept_sym('=')) {
      p.op = engine::Predicate::Op::kEq;
      p.lo = literal(lex);
    } else if (lex.accept_sym('<')) {
      p.op = engine::Predicate::Op::kLt;
      p.lo = literal(lex);
    } else if (lex.accept_sym('>')) {
      p.op = engine::Predicate::Op::kGt;
      p.lo = literal(lex);
    } else {
      throw ParseError("expected =, <, > or BETWEEN" + lex.near());
    }
    req.predicate = std::move(p);
  }
  if (lex.accept_kw("GROUP")) {
    lex.expect_kw("BY");
    req.group_by = column_ref(lex);
  }
  if (lex.accept_kw("AS")) {
    lex.expect_kw("OF");
    lex.expect_kw("VERSION");
    req.asof = lex.expect_int();
  }
  return stmt;
}

}  // namespace

Statement parse_statement(const std::string& sql) {
  Lexer lex(sql);
  Statement stmt = [&]() -> Statement {
    if (lex.accept_kw("CREATE")) return parse_create(lex);
    if (lex.accept_kw("COPY")) {
      lex.expect_kw("INTO");
      CopyInto s;
      s.table = lex.expect_ident();
      lex.expect_kw("FROM");
      s.source_path = lex.expect_string();
      return s;
    }
    if (lex.accept_kw("MERGE")) {
      lex.expect_kw("INTO");
      MergeInto s;
      s.table = lex.expect_ident();
      lex.expect_kw("USING");
      s.source_path = lex.expect_string();
      return s;
    }
    if (lex.accept_kw("DELETE")) {
      lex.expect_kw("FROM");
      DeleteFrom s;
      s.table = lex.expect_ident();
      lex.expect_kw("WHERE");
      s.key_column = lex.expect_ident();
      lex.expect_kw("IN");
      lex.expect_sym('(');
      do {
        s.keys.push_back(literal(lex));
      } while (lex.accept_sym(','));
      lex.expect_sym(')');
      return s;
    }
    if (lex.accept_kw("SELECT")) return parse_select(lex);
    if (lex.accept_kw("OPTIMIZE")) {
      OptimizeTable s;
      s.table = lex.expect_ident();
      return s;
    }
    if (lex.accept_kw("VACUUM")) {
      VacuumTable s;
      s.table = lex.expect_ident();
      lex.expect_kw("RETAIN");
      s.retain_versions = lex.expect_int();
      lex.expect_kw("VERSIONS");
      return s;
    }
    throw ParseError("unknown statement" + lex.near());
  }();
  lex.accept_sym(';');
  if (lex.peek().kind != TokKind::kEnd) {
    throw ParseError("trailing input" + lex.near());
  }
  return stmt;
}

}  // namespace minisql
}  // namespace lsth
