#pragma once

// Structured text formats: the polynomial expression grammar shared by all
// inputs, and the block grammars for triples, truncated algebras, module
// presentations, gluing data, and integral points. Errors carry line/column.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/models.hpp"

namespace gluekit {

namespace parse_detail {

struct Token {
  enum Kind { ident, number, punct, end } kind = end;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(ErrorKind::ParseError, msg + " at line " + std::to_string(tok_.line) + ", column " +
                                     std::to_string(tok_.col));
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{Token::end, "", line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::ident;
      tok_.text = src_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      tok_.kind = Token::number;
      tok_.text = src_.substr(start, pos_ - start);
    } else {
      tok_.kind = Token::punct;
      // two-character operators first
      if (pos_ + 1 < src_.size()) {
        std::string two = src_.substr(pos_, 2);
        if (two == "->" || two == "<=") {
          tok_.text = two;
          pos_ += 2;
          col_ += 2;
          return;
        }
      }
      tok_.text = std::string(1, c);
      ++pos_;
    }
    col_ += static_cast<int>(tok_.text.size());
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string src) : lex_(std::move(src)) {}

  bool at_end() const { return lex_.peek().kind == Token::end; }
  const Token& peek() const { return lex_.peek(); }
  Token next() { return lex_.next(); }
  [[noreturn]] void fail(const std::string& msg) const { lex_.fail(msg); }

  bool accept_punct(const std::string& s) {
    if (lex_.peek().kind == Token::punct && lex_.peek().text == s) {
      lex_.next();
      return true;
    }
    return false;
  }
  void expect_punct(const std::string& s) {
    if (!accept_punct(s)) fail("expected '" + s + "'");
  }
  bool accept_keyword(const std::string& s) {
    if (lex_.peek().kind == Token::ident && lex_.peek().text == s) {
      lex_.next();
      return true;
    }
    return false;
  }
  void expect_keyword(const std::string& s) {
    if (!accept_keyword(s)) fail("expected '" + s + "'");
  }
  std::string expect_ident() {
    if (lex_.peek().kind != Token::ident) fail("expected an identifier");
    return lex_.next().text;
  }
  long expect_nat() {
    if (lex_.peek().kind != Token::number) fail("expected a number");
    return std::stol(lex_.next().text);
  }

  // ---- polynomial expressions ----
  // expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
  // factor := '-' factor | number | ident ('^' nat)? | '(' expr ')' ('^' nat)?
  // The identifier "p" (arithmetic profile) or "t" (geometric) denotes pi
  // unless it is a declared variable; division requires a constant divisor.
  Polynomial parse_poly(const PolyContext& ctx) {
    Polynomial lhs = parse_poly_term(ctx);
    while (true) {
      if (accept_punct("+"))
        lhs = lhs + parse_poly_term(ctx);
      else if (accept_punct("-"))
        lhs = lhs - parse_poly_term(ctx);
      else
        return lhs;
    }
  }

 private:
  Polynomial parse_poly_term(const PolyContext& ctx) {
    Polynomial lhs = parse_poly_factor(ctx);
    while (true) {
      if (accept_punct("*")) {
        lhs = lhs * parse_poly_factor(ctx);
      } else if (lex_.peek().kind == Token::punct && lex_.peek().text == "/") {
        lex_.next();
        Polynomial d = parse_poly_factor(ctx);
        auto c = constant_value(d);
        if (!c || c->is_zero()) fail("division requires a nonzero constant divisor");
        lhs = lhs * (Scalar::one(ctx.base.profile) / *c);
      } else {
        return lhs;
      }
    }
  }

  static std::optional<Scalar> constant_value(const Polynomial& p) {
    if (p.is_zero()) return Scalar::zero(p.ctx().base.profile);
    if (p.terms().size() != 1) return std::nullopt;
    const auto& [e, c] = *p.terms().begin();
    if (total_degree(e) != 0) return std::nullopt;
    return c;
  }

  Polynomial parse_poly_factor(const PolyContext& ctx) {
    if (accept_punct("-")) return -parse_poly_factor(ctx);
    if (accept_punct("(")) {
      Polynomial inner = parse_poly(ctx);
      expect_punct(")");
      return maybe_power(ctx, std::move(inner));
    }
    if (lex_.peek().kind == Token::number) {
      mpq_class q(lex_.next().text);
      return Polynomial::constant(ctx, ctx.base.profile == Profile::arithmetic
                                           ? Scalar::rational(q)
                                           : Scalar::ratfun(UniPoly(q), UniPoly(mpq_class(1))));
    }
    if (lex_.peek().kind == Token::ident) {
      Token t = lex_.next();
      for (std::size_t i = 0; i < ctx.vars.size(); ++i)
        if (ctx.vars[i] == t.text)
          return maybe_power(ctx, Polynomial::variable(ctx, i));
      const char* pi_name = ctx.base.profile == Profile::arithmetic ? "p" : "t";
      if (t.text == pi_name)
        return maybe_power(ctx, Polynomial::constant(ctx, Scalar::pi(ctx.base)));
      fail("unknown variable '" + t.text + "'");
    }
    fail("expected a polynomial factor");
  }

  Polynomial maybe_power(const PolyContext& ctx, Polynomial base) {
    (void)ctx;
    if (accept_punct("^")) {
      long e = expect_nat();
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Lexer lex_;
};

}  // namespace parse_detail

// parse a single polynomial expression over the given context
inline Polynomial parse_polynomial(const std::string& text, const PolyContext& ctx) {
  parse_detail::Parser p(text);
  Polynomial out = p.parse_poly(ctx);
  if (!p.at_end()) p.fail("trailing input after polynomial");
  return out;
}

namespace parse_detail {

inline BasePair parse_base(Parser& p) {
  std::string kind = p.expect_ident();
  if (kind == "Zp") {
    p.expect_punct("(");
    long prime = p.expect_nat();
    p.expect_punct(")");
    return BasePair::arithmetic_base(prime);
  }
  if (kind == "Qt") return BasePair::geometric_base();
  p.fail("expected base 'Zp(<prime>)' or 'Qt'");
}

inline std::vector<std::string> parse_var_list(Parser& p) {
  std::vector<std::string> vars;
  while (p.peek().kind == Token::ident && p.peek().text != "rels") {
    vars.push_back(p.next().text);
    p.accept_punct(",");
  }
  return vars;
}

// reinterpret a field-regime polynomial with integral coefficients over R
inline Polynomial to_exact(Parser& p, const Polynomial& f) {
  if (!(f.gauss_valuation() >= Valuation::of(0)))
    p.fail("relation has a pi-denominator but must be integral");
  PolyContext rctx{f.ctx().base, Regime::R(), f.ctx().vars};
  Polynomial out(rctx);
  for (const auto& [e, c] : f.terms()) out.add_term(e, c);
  return out;
}

inline std::vector<Polynomial> parse_rels(Parser& p, const PolyContext& ctx) {
  std::vector<Polynomial> rels;
  while (!(p.peek().kind == Token::punct && p.peek().text == ";")) {
    rels.push_back(p.parse_poly(ctx));
    if (!p.accept_punct(",")) break;
  }
  p.expect_punct(";");
  return rels;
}

inline AlgebraFactor parse_factor(Parser& p, const BasePair& base) {
  p.expect_keyword("factor");
  std::string name = p.expect_ident();
  p.expect_punct(":");
  p.expect_keyword("vars");
  std::vector<std::string> vars = parse_var_list(p);
  p.expect_punct(";");
  std::vector<Polynomial> rels;
  if (p.accept_keyword("rels")) {
    PolyContext fctx{base, Regime::R_inv_pi(), vars};
    for (const Polynomial& r : parse_rels(p, fctx)) rels.push_back(to_exact(p, r));
  }
  return AlgebraFactor{name, vars, rels};
}

}  // namespace parse_detail

// "triple T { base Zp(5); A vars x rels ; B { factor d0: vars u; ... };
//  j x -> (u | v + 1/p); domain |p*x| <= 1 on d0, ...; }"
struct ParsedTriple {
  std::string name;
  AffineGluingTriple triple;
};

inline ParsedTriple parse_triple(const std::string& text) {
  using namespace parse_detail;
  Parser p(text);
  p.expect_keyword("triple");
  std::string name = p.expect_ident();
  p.expect_punct("{");
  p.expect_keyword("base");
  BasePair base = parse_base(p);
  p.expect_punct(";");
  p.expect_keyword("A");
  p.expect_keyword("vars");
  std::vector<std::string> avars = parse_var_list(p);
  std::vector<Polynomial> arels;
  PolyContext actx{base, Regime::R_inv_pi(), avars};
  if (p.accept_keyword("rels"))
    arels = parse_rels(p, actx);
  else
    p.expect_punct(";");
  p.expect_keyword("B");
  p.expect_punct("{");
  std::vector<AlgebraFactor> factors;
  while (!(p.peek().kind == Token::punct && p.peek().text == "}"))
    factors.push_back(parse_factor(p, base));
  p.expect_punct("}");
  p.expect_punct(";");
  AffineAlgebra A(base, Regime::R_inv_pi(), avars, arels);
  std::vector<std::vector<Polynomial>> jstar(
      avars.size(), std::vector<Polynomial>(factors.size(), Polynomial(actx)));
  std::vector<bool> seen(avars.size(), false);
  while (p.accept_keyword("j")) {
    std::string gen = p.expect_ident();
    std::size_t gi = avars.size();
    for (std::size_t i = 0; i < avars.size(); ++i)
      if (avars[i] == gen) gi = i;
    if (gi == avars.size()) p.fail("j clause for unknown generator '" + gen + "'");
    p.expect_punct("->");
    p.expect_punct("(");
    for (std::size_t f = 0; f < factors.size(); ++f) {
      PolyContext fctx{base, Regime::R_inv_pi(), factors[f].vars};
      jstar[gi][f] = p.parse_poly(fctx);
      if (f + 1 < factors.size()) p.expect_punct("|");
    }
    p.expect_punct(")");
    p.expect_punct(";");
    seen[gi] = true;
  }
  for (std::size_t i = 0; i < avars.size(); ++i)
    if (!seen[i]) p.fail("missing j clause for generator '" + avars[i] + "'");
  std::vector<SubdomainInequality> dom;
  if (p.accept_keyword("domain")) {
    while (true) {
      p.expect_punct("|");
      Polynomial g = p.parse_poly(actx);
      p.expect_punct("|");
      p.expect_punct("<=");
      if (p.expect_nat() != 1) p.fail("domain bounds must be |g| <= 1");
      p.expect_keyword("on");
      std::string fname = p.expect_ident();
      std::size_t fi = factors.size();
      for (std::size_t f = 0; f < factors.size(); ++f)
        if (factors[f].name == fname) fi = f;
      if (fi == factors.size()) p.fail("domain bound on unknown factor '" + fname + "'");
      dom.push_back(SubdomainInequality{g, fi});
      if (!p.accept_punct(",")) break;
    }
    p.expect_punct(";");
  }
  p.expect_punct("}");
  if (!p.at_end()) p.fail("trailing input after triple block");
  return ParsedTriple{name, AffineGluingTriple(std::move(A), std::move(factors), std::move(jstar),
                                               std::move(dom))};
}

// "algebra B over Zp(5) prec 8 { factor d0: vars u; rels ; ... }" followed by
// optional module and datum blocks referring to it:
//   "module M over B { gens 2; rel [x, -1]; rel [0, p^2]; }"
//   "datum D over B { F gens 1; F rel [...]; N gens 1; N rel [...];
//    iota [[1]]; iota_inv [[1]]; }"
struct ParsedModuleFile {
  BasePair base;
  int prec = 8;
  std::string algebra_name;
  AffineAlgebra ring;  // over R, the single declared factor
  std::optional<ModulePresentation> module;
  std::string module_name;
  std::optional<ModuleGluingDatum> datum;
  std::string datum_name;
};

namespace parse_detail {

inline std::vector<Polynomial> parse_rel_column(Parser& p, const PolyContext& ctx,
                                                std::size_t arity) {
  p.expect_punct("[");
  std::vector<Polynomial> col;
  while (!(p.peek().kind == Token::punct && p.peek().text == "]")) {
    col.push_back(p.parse_poly(ctx));
    if (!p.accept_punct(",")) break;
  }
  p.expect_punct("]");
  if (col.size() != arity) p.fail("relation column has the wrong number of entries");
  return col;
}

inline std::vector<std::vector<Polynomial>> parse_matrix(Parser& p, const PolyContext& ctx) {
  p.expect_punct("[");
  std::vector<std::vector<Polynomial>> rows;
  while (!(p.peek().kind == Token::punct && p.peek().text == "]")) {
    p.expect_punct("[");
    std::vector<Polynomial> row;
    while (!(p.peek().kind == Token::punct && p.peek().text == "]")) {
      row.push_back(p.parse_poly(ctx));
      if (!p.accept_punct(",")) break;
    }
    p.expect_punct("]");
    rows.push_back(std::move(row));
    if (!p.accept_punct(",")) break;
  }
  p.expect_punct("]");
  return rows;
}

}  // namespace parse_detail

inline ParsedModuleFile parse_module_file(const std::string& text) {
  using namespace parse_detail;
  Parser p(text);
  p.expect_keyword("algebra");
  ParsedModuleFile out{BasePair::arithmetic_base(2), 8, "", AffineAlgebra(
      BasePair::arithmetic_base(2), Regime::R(), {}, {})};
  out.algebra_name = p.expect_ident();
  p.expect_keyword("over");
  out.base = parse_base(p);
  if (p.accept_keyword("prec")) out.prec = static_cast<int>(p.expect_nat());
  p.expect_punct("{");
  std::vector<AlgebraFactor> factors;
  while (!(p.peek().kind == Token::punct && p.peek().text == "}"))
    factors.push_back(parse_factor(p, out.base));
  p.expect_punct("}");
  if (factors.size() != 1)
    p.fail("module files need exactly one factor as the ambient ring");
  out.ring = AffineAlgebra(out.base, Regime::R(), factors[0].vars, factors[0].rels);
  PolyContext rctx = out.ring.ctx();
  PolyContext fctx{out.base, Regime::R_inv_pi(), factors[0].vars};
  while (!p.at_end()) {
    if (p.accept_keyword("module")) {
      out.module_name = p.expect_ident();
      p.expect_keyword("over");
      if (p.expect_ident() != out.algebra_name) p.fail("module over undeclared algebra");
      p.expect_punct("{");
      p.expect_keyword("gens");
      std::size_t n = static_cast<std::size_t>(p.expect_nat());
      p.expect_punct(";");
      std::vector<std::vector<Polynomial>> cols;
      while (p.accept_keyword("rel")) {
        std::vector<Polynomial> col;
        for (Polynomial& e : parse_rel_column(p, fctx, n)) col.push_back(to_exact(p, e));
        cols.push_back(std::move(col));
        p.expect_punct(";");
      }
      p.expect_punct("}");
      out.module = ModulePresentation(out.ring, n, std::move(cols));
    } else if (p.accept_keyword("datum")) {
      out.datum_name = p.expect_ident();
      p.expect_keyword("over");
      if (p.expect_ident() != out.algebra_name) p.fail("datum over undeclared algebra");
      p.expect_punct("{");
      p.expect_keyword("F");
      p.expect_keyword("gens");
      std::size_t nf = static_cast<std::size_t>(p.expect_nat());
      p.expect_punct(";");
      std::vector<std::vector<Polynomial>> fcols;
      while (p.peek().kind == Token::ident && p.peek().text == "F") {
        p.next();
        p.expect_keyword("rel");
        fcols.push_back(parse_rel_column(p, fctx, nf));
        p.expect_punct(";");
      }
      p.expect_keyword("N");
      p.expect_keyword("gens");
      std::size_t nn = static_cast<std::size_t>(p.expect_nat());
      p.expect_punct(";");
      PolyContext nctx{out.base, Regime::R_mod_piN(out.prec), factors[0].vars};
      std::vector<std::vector<Polynomial>> ncols;
      while (p.peek().kind == Token::ident && p.peek().text == "N") {
        p.next();
        p.expect_keyword("rel");
        std::vector<Polynomial> col;
        for (Polynomial& e : parse_rel_column(p, fctx, nn))
          col.push_back(to_exact(p, e).with_regime(Regime::R_mod_piN(out.prec)));
        ncols.push_back(std::move(col));
        p.expect_punct(";");
      }
      p.expect_keyword("iota");
      std::vector<std::vector<Polynomial>> iota = parse_matrix(p, fctx);
      p.expect_punct(";");
      p.expect_keyword("iota_inv");
      std::vector<std::vector<Polynomial>> iota_inv = parse_matrix(p, fctx);
      p.expect_punct(";");
      p.expect_punct("}");
      if (iota.size() != nn || (nn && iota[0].size() != nf))
        p.fail("iota must be an (N gens) x (F gens) matrix");
      if (iota_inv.size() != nf || (nf && iota_inv[0].size() != nn))
        p.fail("iota_inv must be an (F gens) x (N gens) matrix");
      ModulePresentation F(out.ring.with_regime(Regime::R_inv_pi()), nf, std::move(fcols));
      ModulePresentation N(out.ring.with_regime(Regime::R_mod_piN(out.prec)), nn,
                           std::move(ncols));
      out.datum = ModuleGluingDatum{out.ring, std::move(F), std::move(N), std::move(iota),
                                    std::move(iota_inv), out.prec};
    } else {
      p.fail("expected a module or datum block");
    }
  }
  return out;
}

// "point P over Zp(5) { matrix [[1, 5], [1, 1]]; }": a GL_2 point given by
// its matrix, with the inverse-determinant coordinate filled in
struct ParsedPoint {
  std::string name;
  BasePair base;
  Mat matrix;
};

inline ParsedPoint parse_point(const std::string& text) {
  using namespace parse_detail;
  Parser p(text);
  p.expect_keyword("point");
  std::string name = p.expect_ident();
  p.expect_keyword("over");
  BasePair base = parse_base(p);
  p.expect_punct("{");
  p.expect_keyword("matrix");
  PolyContext cctx{base, Regime::R_inv_pi(), {}};
  std::vector<std::vector<Polynomial>> rows = parse_matrix(p, cctx);
  p.expect_punct(";");
  p.expect_punct("}");
  if (!p.at_end()) p.fail("trailing input after point block");
  Mat m;
  for (const auto& row : rows) {
    Vec v;
    for (const auto& e : row) {
      if (!e.is_zero() && (e.terms().size() != 1 || total_degree(e.terms().begin()->first) != 0))
        raise(ErrorKind::ParseError, "matrix entries must be constants");
      v.push_back(e.is_zero() ? Scalar::zero(base.profile) : e.terms().begin()->second);
    }
    m.push_back(std::move(v));
  }
  for (const auto& row : m)
    if (row.size() != m.size()) raise(ErrorKind::ParseError, "matrix must be square");
  return ParsedPoint{name, base, std::move(m)};
}

}  // namespace gluekit
