#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "videx/catalog.hpp"
#include "videx/common.hpp"
#include "videx/range_cond.hpp"

namespace videx {

struct TableRef {
  std::string table;  // catalog name
  std::string alias;

  friend bool operator==(const TableRef&, const TableRef&) = default;
};

struct ColumnRef {
  std::size_t table = 0;  // position in LogicalQuery::tables
  std::string column;     // catalog name

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct JoinPredicate {
  ColumnRef left;
  ColumnRef right;

  friend bool operator==(const JoinPredicate&, const JoinPredicate&) = default;
};

struct Projection {
  enum class Kind { Star, CountStar, Column };
  Kind kind = Kind::Star;
  ColumnRef column;

  friend bool operator==(const Projection&, const Projection&) = default;
};

struct LogicalQuery {
  std::string sql;
  std::vector<TableRef> tables;
  std::vector<JoinPredicate> join_predicates;
  std::vector<std::vector<RangeCond>> filters;  // parallel to tables, unmerged
  std::vector<Projection> projections;
  std::optional<std::vector<ColumnRef>> group_by;

  std::optional<std::size_t> table_position(std::string_view alias) const {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (iequals(tables[i].alias, alias)) return i;
    }
    return std::nullopt;
  }

  /// Every column of table `pos` the query touches; `*` touches all of them.
  std::set<std::string> referenced_columns(std::size_t pos, const CatalogSnapshot& catalog) const {
    std::set<std::string> out;
    for (const auto& p : projections) {
      if (p.kind == Projection::Kind::Star) {
        if (const auto* t = catalog.table(tables[pos].table))
          for (const auto& c : t->columns) out.insert(to_lower(c.name));
      } else if (p.kind == Projection::Kind::Column && p.column.table == pos) {
        out.insert(to_lower(p.column.column));
      }
    }
    for (const auto& c : filters[pos]) out.insert(to_lower(c.col_name));
    for (const auto& j : join_predicates) {
      if (j.left.table == pos) out.insert(to_lower(j.left.column));
      if (j.right.table == pos) out.insert(to_lower(j.right.column));
    }
    if (group_by)
      for (const auto& g : *group_by)
        if (g.table == pos) out.insert(to_lower(g.column));
    return out;
  }

  friend bool operator==(const LogicalQuery&, const LogicalQuery&) = default;
};

namespace sql_detail {

enum class Tok { Ident, Int, Float, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;  // 1-based character offset

  bool is_symbol(std::string_view s) const { return kind == Tok::Symbol && text == s; }
  bool is_keyword(std::string_view k) const { return kind == Tok::Ident && iequals(text, k); }
  std::string display() const { return kind == Tok::End ? "end of input" : "'" + text + "'"; }
};

inline Error syntax_error(const Token& at, std::string_view expected) {
  return Error(Errc::SyntaxError,
               "expected " + std::string(expected) + " at position " + std::to_string(at.pos) + ", found " + at.display(),
               "position " + std::to_string(at.pos));
}

inline Error unsupported(const Token& at, std::string_view construct) {
  return Error(Errc::Unsupported, "unsupported construct: " + std::string(construct), "position " + std::to_string(at.pos));
}

inline std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < sql.size()) {
    char c = sql[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < sql.size() && sql[i + 1] == '-') {  // line comment
      while (i < sql.size() && sql[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.pos = i + 1;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < sql.size() && (is_ident_start(sql[j]) || is_digit(sql[j]))) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(sql.substr(i, j - i));
      i = j;
    } else if (c == '`' || c == '"') {
      std::size_t j = sql.find(c, i + 1);
      if (j == std::string_view::npos)
        throw Error(Errc::SyntaxError, "unterminated quoted identifier at position " + std::to_string(t.pos),
                    "position " + std::to_string(t.pos));
      t.kind = Tok::Ident;
      t.text = std::string(sql.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (is_digit(c) || (c == '.' && i + 1 < sql.size() && is_digit(sql[i + 1]))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < sql.size() && is_digit(sql[j])) ++j;
      if (j < sql.size() && sql[j] == '.') {
        is_float = true;
        ++j;
        while (j < sql.size() && is_digit(sql[j])) ++j;
      }
      if (j < sql.size() && (sql[j] == 'e' || sql[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < sql.size() && (sql[k] == '+' || sql[k] == '-')) ++k;
        if (k < sql.size() && is_digit(sql[k])) {
          is_float = true;
          j = k;
          while (j < sql.size() && is_digit(sql[j])) ++j;
        }
      }
      t.kind = is_float ? Tok::Float : Tok::Int;
      t.text = std::string(sql.substr(i, j - i));
      i = j;
    } else if (c == '\'') {
      std::string s;
      std::size_t j = i + 1;
      while (true) {
        if (j >= sql.size())
          throw Error(Errc::SyntaxError, "unterminated string literal at position " + std::to_string(t.pos),
                      "position " + std::to_string(t.pos));
        if (sql[j] == '\'') {
          if (j + 1 < sql.size() && sql[j + 1] == '\'') {
            s.push_back('\'');
            j += 2;
            continue;
          }
          break;
        }
        s.push_back(sql[j++]);
      }
      t.kind = Tok::String;
      t.text = std::move(s);
      i = j + 1;
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "<>", "!=", "||"};
      t.kind = Tok::Symbol;
      bool matched = false;
      for (auto s : two) {
        if (sql.substr(i, 2) == s) {
          t.text = std::string(s);
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        static constexpr std::string_view one = "=<>,.()*;+-/%";
        if (one.find(c) == std::string_view::npos)
          throw Error(Errc::SyntaxError,
                      "unexpected character '" + std::string(1, c) + "' at position " + std::to_string(t.pos),
                      "position " + std::to_string(t.pos));
        t.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = sql.size() + 1;
  out.push_back(end);
  return out;
}

struct RawColumn {
  std::optional<std::string> qualifier;
  std::string name;
  std::size_t pos = 0;
};

struct Literal {
  enum class Kind { Int, Float, String, Date } kind = Kind::Int;
  std::int64_t i = 0;
  double f = 0;
  std::string s;
  std::size_t pos = 0;
};

struct Operand {
  std::optional<RawColumn> column;
  std::optional<Literal> literal;
};

struct RawPredicate {
  enum class Kind { Compare, Between } kind = Kind::Compare;
  Operand lhs;
  std::string op;  // = < <= > >=
  Operand rhs;
  Literal lo, hi;  // BETWEEN
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view sql, const CatalogSnapshot& catalog) : sql_(sql), catalog_(catalog), toks_(tokenize(sql)) {}

  LogicalQuery parse() {
    expect_keyword("SELECT");
    if (peek().is_keyword("DISTINCT")) throw unsupported(peek(), "DISTINCT");
    parse_select_list();
    expect_keyword("FROM");
    parse_table_ref();
    while (true) {
      if (peek().is_symbol(",")) {
        next();
        parse_table_ref();
      } else if (peek().is_keyword("JOIN") || peek().is_keyword("INNER")) {
        if (peek().is_keyword("INNER")) next();
        expect_keyword("JOIN");
        parse_table_ref();
        expect_keyword("ON");
        parse_join_condition();
      } else if (peek().is_keyword("LEFT") || peek().is_keyword("RIGHT") || peek().is_keyword("FULL") ||
                 peek().is_keyword("OUTER") || peek().is_keyword("CROSS") || peek().is_keyword("NATURAL")) {
        throw unsupported(peek(), "outer/cross/natural join");
      } else {
        break;
      }
    }
    if (peek().is_keyword("WHERE")) {
      next();
      parse_conjunction();
    }
    if (peek().is_keyword("GROUP")) {
      next();
      expect_keyword("BY");
      group_by_.emplace();
      group_by_->push_back(parse_column());
      while (peek().is_symbol(",")) {
        next();
        group_by_->push_back(parse_column());
      }
    }
    for (auto k : {"HAVING", "ORDER", "LIMIT", "UNION", "INTERSECT", "EXCEPT", "OFFSET"}) {
      if (peek().is_keyword(k)) throw unsupported(peek(), k);
    }
    if (peek().is_symbol(";")) next();
    if (peek().kind != Tok::End) {
      if (peek().is_keyword("OR")) throw unsupported(peek(), "OR");
      throw syntax_error(peek(), "end of statement");
    }
    return resolve();
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  void expect_keyword(std::string_view k) {
    if (!peek().is_keyword(k)) throw syntax_error(peek(), std::string(k));
    next();
  }
  void expect_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) throw syntax_error(peek(), "'" + std::string(s) + "'");
    next();
  }

  static bool is_reserved(const Token& t) {
    static constexpr std::string_view kReserved[] = {
        "SELECT", "FROM",  "WHERE", "JOIN",   "INNER", "ON",    "AND",    "OR",     "NOT",   "BETWEEN",
        "GROUP",  "BY",    "AS",    "LEFT",   "RIGHT", "FULL",  "OUTER",  "CROSS",  "ORDER", "LIMIT",
        "HAVING", "UNION", "LIKE",  "IN",     "IS",    "NULL",  "EXISTS", "DISTINCT", "NATURAL", "OFFSET",
        "INTERSECT", "EXCEPT"};
    if (t.kind != Tok::Ident) return false;
    for (auto k : kReserved)
      if (iequals(t.text, k)) return true;
    return false;
  }

  std::string expect_identifier(std::string_view what) {
    if (peek().kind != Tok::Ident || is_reserved(peek())) throw syntax_error(peek(), what);
    return next().text;
  }

  void parse_select_list() {
    do {
      if (!projections_raw_.empty()) next();  // the comma
      const Token& t = peek();
      if (t.is_symbol("*")) {
        next();
        projections_raw_.push_back({Projection::Kind::Star, {}});
      } else if (t.kind == Tok::Ident && peek(1).is_symbol("(")) {
        if (!t.is_keyword("COUNT")) throw unsupported(t, "function " + t.text);
        next();
        next();
        if (!peek().is_symbol("*")) throw unsupported(peek(), "COUNT over an expression");
        next();
        expect_symbol(")");
        projections_raw_.push_back({Projection::Kind::CountStar, {}});
      } else {
        RawColumn c = parse_column();
        if (peek().is_symbol("+") || peek().is_symbol("-") || peek().is_symbol("/") || peek().is_symbol("*") ||
            peek().is_symbol("%") || peek().is_symbol("||"))
          throw unsupported(peek(), "arithmetic expression");
        projections_raw_.push_back({Projection::Kind::Column, std::move(c)});
      }
      if (peek().is_keyword("AS")) throw unsupported(peek(), "column alias");
    } while (peek().is_symbol(","));
  }

  void parse_table_ref() {
    if (peek().is_symbol("(")) throw unsupported(peek(), peek(1).is_keyword("SELECT") ? "subquery" : "derived table");
    const Token& name_tok = peek();
    std::string name = expect_identifier("table name");
    const TableEntry* t = catalog_.table(name);
    if (!t) throw Error(Errc::UnknownTable, "unknown table " + name, "position " + std::to_string(name_tok.pos));
    std::string alias = t->name;
    if (peek().is_keyword("AS")) {
      next();
      alias = expect_identifier("alias");
    } else if (peek().kind == Tok::Ident && !is_reserved(peek())) {
      alias = next().text;
    }
    for (const auto& existing : tables_) {
      if (iequals(existing.alias, alias))
        throw Error(Errc::AmbiguousColumn, "duplicate table alias " + alias, "position " + std::to_string(name_tok.pos));
    }
    tables_.push_back({t->name, alias});
  }

  RawColumn parse_column() {
    RawColumn c;
    c.pos = peek().pos;
    if (peek().is_symbol("(")) throw unsupported(peek(), peek(1).is_keyword("SELECT") ? "subquery" : "expression");
    std::string first = expect_identifier("column");
    if (peek().is_symbol(".")) {
      next();
      c.qualifier = first;
      c.name = expect_identifier("column");
    } else {
      c.name = first;
    }
    return c;
  }

  void parse_join_condition() {
    do {
      if (peek().is_keyword("AND")) next();
      RawColumn l = parse_column();
      if (!peek().is_symbol("=")) {
        if (peek().kind == Tok::Symbol) throw unsupported(peek(), "non-equality join condition");
        throw syntax_error(peek(), "'='");
      }
      std::size_t pos = next().pos;
      RawColumn r = parse_column();
      RawPredicate p;
      p.lhs.column = std::move(l);
      p.op = "=";
      p.rhs.column = std::move(r);
      p.pos = pos;
      preds_.push_back(std::move(p));
      if (peek().is_keyword("OR")) throw unsupported(peek(), "OR");
    } while (peek().is_keyword("AND"));
  }

  Literal parse_literal() {
    Literal lit;
    lit.pos = peek().pos;
    bool negative = false;
    if (peek().is_symbol("-") || peek().is_symbol("+")) {
      negative = peek().is_symbol("-");
      next();
      if (peek().kind != Tok::Int && peek().kind != Tok::Float) throw unsupported(peek(), "arithmetic expression");
    }
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        lit.kind = Literal::Kind::Int;
        std::string text = (negative ? "-" : "") + t.text;
        auto r = std::from_chars(text.data(), text.data() + text.size(), lit.i);
        if (r.ec != std::errc{}) {
          lit.kind = Literal::Kind::Float;
          lit.f = std::strtod(text.c_str(), nullptr);
        }
        next();
        break;
      }
      case Tok::Float:
        lit.kind = Literal::Kind::Float;
        lit.f = std::strtod(t.text.c_str(), nullptr) * (negative ? -1.0 : 1.0);
        next();
        break;
      case Tok::String:
        lit.kind = Literal::Kind::String;
        lit.s = t.text;
        next();
        break;
      case Tok::Ident:
        if (t.is_keyword("DATE") && peek(1).kind == Tok::String) {
          next();
          lit.kind = Literal::Kind::Date;
          lit.s = next().text;
          break;
        }
        if (t.is_keyword("NULL")) throw unsupported(t, "NULL predicate");
        throw syntax_error(t, "literal");
      default:
        throw syntax_error(t, "literal");
    }
    if (peek().is_symbol("+") || peek().is_symbol("-") || peek().is_symbol("*") || peek().is_symbol("/") ||
        peek().is_symbol("%") || peek().is_symbol("||"))
      throw unsupported(peek(), "arithmetic expression");
    return lit;
  }

  bool at_literal() const {
    const Token& t = peek();
    return t.kind == Tok::Int || t.kind == Tok::Float || t.kind == Tok::String || t.is_symbol("-") ||
           t.is_symbol("+") || (t.is_keyword("DATE") && peek(1).kind == Tok::String) || t.is_keyword("NULL");
  }

  Operand parse_operand() {
    Operand o;
    if (peek().is_keyword("NOT")) throw unsupported(peek(), "NOT");
    if (peek().is_keyword("EXISTS")) throw unsupported(peek(), "subquery");
    if (at_literal()) {
      o.literal = parse_literal();
    } else {
      o.column = parse_column();
      if (peek().is_symbol("(")) throw unsupported(peek(), "function call");
      if (peek().is_symbol("+") || peek().is_symbol("-") || peek().is_symbol("*") || peek().is_symbol("/") ||
          peek().is_symbol("%") || peek().is_symbol("||"))
        throw unsupported(peek(), "arithmetic expression");
    }
    return o;
  }

  void parse_predicate() {
    if (peek().is_symbol("(")) {
      if (peek(1).is_keyword("SELECT")) throw unsupported(peek(), "subquery");
      next();
      parse_conjunction();
      expect_symbol(")");
      return;
    }
    RawPredicate p;
    p.pos = peek().pos;
    p.lhs = parse_operand();
    const Token& op = peek();
    if (op.is_keyword("BETWEEN")) {
      next();
      if (!p.lhs.column) throw unsupported(op, "BETWEEN on a literal");
      p.kind = RawPredicate::Kind::Between;
      p.lo = parse_literal();
      expect_keyword("AND");
      p.hi = parse_literal();
      preds_.push_back(std::move(p));
      return;
    }
    if (op.is_keyword("LIKE")) throw unsupported(op, "LIKE");
    if (op.is_keyword("IN")) throw unsupported(op, "IN list");
    if (op.is_keyword("IS")) throw unsupported(op, "IS NULL");
    if (op.is_keyword("NOT")) throw unsupported(op, "NOT");
    if (op.is_symbol("<>") || op.is_symbol("!=")) throw unsupported(op, "not-equal predicate");
    if (!(op.is_symbol("=") || op.is_symbol("<") || op.is_symbol("<=") || op.is_symbol(">") || op.is_symbol(">=")))
      throw syntax_error(op, "comparison operator or BETWEEN");
    p.op = next().text;
    if (peek().is_keyword("ANY") || peek().is_keyword("ALL") || peek().is_keyword("SOME"))
      throw unsupported(peek(), "subquery");
    if (peek().is_symbol("(") && peek(1).is_keyword("SELECT")) throw unsupported(peek(), "subquery");
    p.rhs = parse_operand();
    preds_.push_back(std::move(p));
  }

  void parse_conjunction() {
    parse_predicate();
    while (true) {
      if (peek().is_keyword("AND")) {
        next();
        parse_predicate();
      } else if (peek().is_keyword("OR")) {
        throw unsupported(peek(), "OR");
      } else {
        break;
      }
    }
  }

  // --- resolution --------------------------------------------------------

  ColumnRef resolve(const RawColumn& c) const {
    auto where = "position " + std::to_string(c.pos);
    std::optional<ColumnRef> found;
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      if (c.qualifier && !iequals(*c.qualifier, tables_[i].alias)) continue;
      const TableEntry* t = catalog_.table(tables_[i].table);
      if (const ColumnDef* col = t->column(c.name)) {
        if (found) throw Error(Errc::AmbiguousColumn, "ambiguous column " + c.name, where);
        found = ColumnRef{i, col->name};
      }
    }
    if (!found) {
      if (c.qualifier && !std::any_of(tables_.begin(), tables_.end(),
                                      [&](const TableRef& t) { return iequals(t.alias, *c.qualifier); }))
        throw Error(Errc::UnknownTable, "unknown table or alias " + *c.qualifier, where);
      throw Error(Errc::UnknownColumn, "unknown column " + (c.qualifier ? *c.qualifier + "." : "") + c.name, where);
    }
    return *found;
  }

  DataType column_type(const ColumnRef& c) const {
    return catalog_.table(tables_[c.table].table)->column(c.column)->type;
  }

  // Coerces a literal to the column type for the given bound direction.
  // Non-integral numbers against int columns round toward the interior.
  // Returns nullopt when an equality can never match.
  struct Bound {
    Scalar value;
    bool inclusive = true;
  };
  enum class Side { Lower, Upper, Equal };

  std::optional<Bound> coerce(const Literal& lit, DataType type, Side side, bool inclusive) const {
    auto where = "position " + std::to_string(lit.pos);
    auto mismatch = [&] {
      return Error(Errc::TypeMismatch, "literal type does not match column type " +
                                           std::string(data_type_name(type)), where);
    };
    switch (type) {
      case DataType::Int:
        if (lit.kind == Literal::Kind::Int) return Bound{Scalar::of_int(lit.i), inclusive};
        if (lit.kind == Literal::Kind::Float) {
          if (!std::isfinite(lit.f) || std::abs(lit.f) > 9.0e18) throw mismatch();
          if (lit.f == std::floor(lit.f)) return Bound{Scalar::of_int(static_cast<std::int64_t>(lit.f)), inclusive};
          if (side == Side::Equal) return std::nullopt;
          if (side == Side::Lower) return Bound{Scalar::of_int(static_cast<std::int64_t>(std::ceil(lit.f))), true};
          return Bound{Scalar::of_int(static_cast<std::int64_t>(std::floor(lit.f))), true};
        }
        throw mismatch();
      case DataType::Float:
        if (lit.kind == Literal::Kind::Int) return Bound{Scalar::of_float(static_cast<double>(lit.i)), inclusive};
        if (lit.kind == Literal::Kind::Float) return Bound{Scalar::of_float(lit.f), inclusive};
        throw mismatch();
      case DataType::Date:
        if (lit.kind == Literal::Kind::String || lit.kind == Literal::Kind::Date) {
          auto d = parse_date(lit.s);
          if (!d) throw Error(Errc::TypeMismatch, "invalid date literal '" + lit.s + "'", where);
          return Bound{Scalar::of_date(*d), inclusive};
        }
        throw mismatch();
      case DataType::String:
        if (lit.kind == Literal::Kind::String) return Bound{Scalar::of_string(lit.s), inclusive};
        throw mismatch();
    }
    throw mismatch();
  }

  static std::string flip(const std::string& op) {
    if (op == "<") return ">";
    if (op == "<=") return ">=";
    if (op == ">") return "<";
    if (op == ">=") return "<=";
    return op;
  }

  RangeCond make_cond(const ColumnRef& col, DataType type, const std::string& op, const Literal& lit) const {
    if (op == "=") {
      auto b = coerce(lit, type, Side::Equal, true);
      if (!b) {
        auto near = coerce(lit, type, Side::Lower, true);
        return RangeCond::empty_marker(col.column, near->value);
      }
      return RangeCond::equal(col.column, b->value);
    }
    bool lower = op == ">" || op == ">=";
    bool inclusive = op == ">=" || op == "<=";
    auto b = coerce(lit, type, lower ? Side::Lower : Side::Upper, inclusive);
    return lower ? RangeCond::lower(col.column, b->value, b->inclusive)
                 : RangeCond::upper(col.column, b->value, b->inclusive);
  }

  LogicalQuery resolve() {
    LogicalQuery q;
    q.sql = std::string(sql_);
    q.tables = tables_;
    q.filters.resize(tables_.size());
    for (const auto& rp : projections_raw_) {
      Projection p;
      p.kind = rp.kind;
      if (rp.kind == Projection::Kind::Column) p.column = resolve(*rp.column);
      q.projections.push_back(std::move(p));
    }
    for (const auto& p : preds_) {
      Token at;
      at.pos = p.pos;
      if (p.kind == RawPredicate::Kind::Between) {
        ColumnRef c = resolve(*p.lhs.column);
        DataType type = column_type(c);
        auto lo = coerce(p.lo, type, Side::Lower, true);
        auto hi = coerce(p.hi, type, Side::Upper, true);
        RangeCond rc{c.column, type, lo->value, hi->value, ">=", "<="};
        if (rc.is_empty()) rc = RangeCond::empty_marker(c.column, lo->value);
        q.filters[c.table].push_back(std::move(rc));
        continue;
      }
      if (p.lhs.column && p.rhs.column) {
        ColumnRef l = resolve(*p.lhs.column), r = resolve(*p.rhs.column);
        if (p.op != "=") throw unsupported(at, "non-equality column comparison");
        if (l.table == r.table) throw unsupported(at, "comparison of two columns of one table");
        q.join_predicates.push_back({l, r});
        continue;
      }
      if (p.lhs.literal && p.rhs.literal) throw unsupported(at, "constant predicate");
      const RawColumn& rc = p.lhs.column ? *p.lhs.column : *p.rhs.column;
      const Literal& lit = p.lhs.literal ? *p.lhs.literal : *p.rhs.literal;
      std::string op = p.lhs.column ? p.op : flip(p.op);
      ColumnRef c = resolve(rc);
      q.filters[c.table].push_back(make_cond(c, column_type(c), op, lit));
    }
    if (group_by_) {
      q.group_by.emplace();
      for (const auto& g : *group_by_) q.group_by->push_back(resolve(g));
    }
    return q;
  }

  struct RawProjection {
    Projection::Kind kind;
    std::optional<RawColumn> column;
  };

  std::string_view sql_;
  const CatalogSnapshot& catalog_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<RawProjection> projections_raw_;
  std::vector<TableRef> tables_;
  std::vector<RawPredicate> preds_;
  std::optional<std::vector<RawColumn>> group_by_;
};

}  // namespace sql_detail

/// Parses the supported SELECT subset and resolves names against `catalog`.
/// Errors: SYNTAX_ERROR (position, expected token), UNKNOWN_TABLE,
/// UNKNOWN_COLUMN, AMBIGUOUS_COLUMN, TYPE_MISMATCH, UNSUPPORTED (construct named).
inline LogicalQuery parse(std::string_view sql, const CatalogSnapshot& catalog) {
  return sql_detail::Parser(sql, catalog).parse();
}

inline ConditionSet extract_range_conditions(const LogicalQuery& query, std::size_t table_pos) {
  return merge_conditions(query.filters.at(table_pos));
}

inline ConditionSet extract_range_conditions(const LogicalQuery& query, std::string_view alias) {
  auto pos = query.table_position(alias);
  if (!pos) throw Error(Errc::UnknownTable, "table not in query: " + std::string(alias), std::string(alias));
  return extract_range_conditions(query, *pos);
}

}  // namespace videx
