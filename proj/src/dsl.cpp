#include "thick/dsl.hpp"

#include "thick/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace thick::dsl {

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::eval:
      return "eval";
    case Command::derive:
      return "derive";
    case Command::project:
      return "project";
    case Command::expand:
      return "expand";
    case Command::check:
      return "check";
  }
  return "";
}

std::optional<Command> command_from_name(std::string_view name) {
  for (Command c : {Command::eval, Command::derive, Command::project, Command::expand, Command::check})
    if (command_name(c) == name) return c;
  return std::nullopt;
}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
  number,
  ident,
  dstar,  // d*
  lparen,
  rparen,
  lbrack,
  rbrack,
  comma,
  plus,
  minus,
  star,
  caret,
  bar,
  dot,  // U+00B7
  equals,
  sep,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
  size_t begin;
  size_t end;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  size_t line_start = 0;
  size_t i = 0;
  auto push = [&](Tok kind, size_t begin, size_t end) {
    out.push_back({kind, std::string(text.substr(begin, end - begin)), line,
                   static_cast<int>(begin - line_start) + 1, begin, end});
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      push(Tok::sep, i, i + 1);
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      const size_t begin = i;
      bool decimal = false;
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i < text.size() && text[i] == '.') {
        decimal = true;
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && is_digit(text[j])) {
          decimal = true;
          i = j;
          while (i < text.size() && is_digit(text[i])) ++i;
        }
      }
      if (!decimal && i + 1 < text.size() && text[i] == '/' && is_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      push(Tok::number, begin, i);
      continue;
    }
    if (is_ident_start(c)) {
      const size_t begin = i;
      while (i < text.size() && is_ident_char(text[i])) ++i;
      if (i - begin == 1 && c == 'd' && i < text.size() && text[i] == '*') {
        ++i;
        push(Tok::dstar, begin, i);
      } else {
        push(Tok::ident, begin, i);
      }
      continue;
    }
    if (static_cast<unsigned char>(c) == 0xC2 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xB7) {
      push(Tok::dot, i, i + 2);
      i += 2;
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case '[': kind = Tok::lbrack; break;
      case ']': kind = Tok::rbrack; break;
      case ',': kind = Tok::comma; break;
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '*': kind = Tok::star; break;
      case '^': kind = Tok::caret; break;
      case '|': kind = Tok::bar; break;
      case '=': kind = Tok::equals; break;
      case ';': kind = Tok::sep; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line,
                         static_cast<int>(i - line_start) + 1);
    }
    push(kind, i, i + 1);
    ++i;
  }
  out.push_back({Tok::end, "", line, static_cast<int>(i - line_start) + 1, i, i});
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::end:
      return "end of input";
    case Tok::sep:
      return "end of statement";
    default:
      return "'" + t.text + "'";
  }
}

// ---------------------------------------------------------------- errors

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ThickPointMismatch*>(&e)) return "thick-point-mismatch";
  if (dynamic_cast<const InsufficientOrder*>(&e)) return "insufficient-order";
  if (dynamic_cast<const QuadratureError*>(&e)) return "quadrature";
  if (dynamic_cast<const InvariantViolation*>(&e)) return "invariant";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "evaluation";
}

const std::set<std::string, std::less<>>& reserved_names() {
  static const std::set<std::string, std::less<>> names = {
      "Pf",    "delta", "dstar", "glambda", "translate", "dilate", "bump", "mono",  "poly",
      "rpow",  "H",     "sided", "const",   "x",         "zero",   "D",    "stretch", "shift",
      "abs",   "pair",  "r",     "d",       "eval",      "derive", "project", "expand", "check",
      "dist",  "test",  "mult"};
  return names;
}

// ---------------------------------------------------------------- parser

struct Number {
  Rational exact;
  double value;
  bool decimal;
};

// A test-function expression before it is committed to a space.
struct TValue {
  NodePtr node;
  double a = 0.0;
};

bool same_point(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::map<std::string, Binding, std::less<>>& env)
      : tokens_(std::move(tokens)), env_(env) {}

  std::optional<Failure>& failure() { return failure_; }
  std::vector<std::string>& warnings() { return warnings_; }

  const Token& peek(size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  bool at(Tok kind, size_t k = 0) const { return peek(k).kind == kind; }
  bool at_ident(std::string_view name, size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == name;
  }
  bool at_end() const { return at(Tok::end) || at(Tok::sep); }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& message, const Token& t) const {
    throw ParseError(message, t.line, t.column);
  }
  [[noreturn]] void fail(const std::string& message) const { fail(message, peek()); }

  void expect(Tok kind, const char* what) {
    if (!accept(kind)) fail(std::string("expected ") + what + ", found " + describe(peek()));
  }
  void expect_ident(std::string_view name) {
    if (!at_ident(name)) fail("expected '" + std::string(name) + "', found " + describe(peek()));
    advance();
  }
  void next_argument(std::string_view fn, int arity) {
    if (at(Tok::rparen) || at(Tok::rbrack))
      fail(std::string(fn) + " takes " + std::to_string(arity) + " argument" + (arity == 1 ? "" : "s"));
    expect(Tok::comma, "','");
  }
  void close_call(std::string_view fn, int arity) {
    if (at(Tok::comma))
      fail(std::string(fn) + " takes " + std::to_string(arity) + " argument" + (arity == 1 ? "" : "s"));
    expect(Tok::rparen, "')'");
  }
  void finish_statement() {
    if (!at_end()) fail("unexpected " + describe(peek()));
  }

  // Runs a library constructor; errors become the statement's failure and a
  // placeholder keeps the parse going so that later syntax errors still surface.
  template <class F, class T>
  T attempt(F&& build, T fallback) {
    try {
      return build();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (!failure_) failure_ = Failure{error_kind(e), e.what()};
      return fallback;
    }
  }

  // ------------------------------------------------------------ numbers

  Number number() {
    bool negative = false;
    if (accept(Tok::minus))
      negative = true;
    else
      accept(Tok::plus);
    if (!at(Tok::number)) fail("expected a number, found " + describe(peek()));
    const Token& t = advance();
    Number n;
    n.decimal = t.text.find_first_of(".eE") != std::string::npos;
    try {
      n.exact = parse_rational(t.text);
    } catch (const Error& e) {
      fail(e.what(), t);
    }
    if (negative) n.exact = -n.exact;
    // Decimals take the correctly rounded double of their text.
    n.value = n.decimal ? std::strtod(t.text.c_str(), nullptr) : to_double(n.exact);
    if (negative && n.decimal) n.value = -n.value;
    return n;
  }

  Rational rational() { return number().exact; }

  int integer() {
    const Token& t = peek();
    const Number n = number();
    if (n.decimal || !is_integer(n.exact)) fail("expected an integer", t);
    if (abs(n.exact) > 1000000) fail("integer out of range", t);
    return static_cast<int>(numerator(n.exact));
  }

  double real() { return number().value; }

  Exponent exponent() {
    const bool parens = accept(Tok::lparen);
    const Number n = number();
    if (parens) expect(Tok::rparen, "')'");
    if (n.decimal) return Exponent::floating(n.value);
    return Exponent(n.exact);
  }

  bool at_signed_number(size_t k = 0) const {
    return at(Tok::number, k) || ((at(Tok::minus, k) || at(Tok::plus, k)) && at(Tok::number, k + 1));
  }

  // pair(p, q) | (p|q) | number
  SpherePair sphere_function() {
    if (at_ident("pair")) {
      advance();
      expect(Tok::lparen, "'('");
      Rational p = rational();
      next_argument("pair", 2);
      Rational q = rational();
      close_call("pair", 2);
      return {p, q};
    }
    if (at(Tok::lparen)) {
      advance();
      Rational p = rational();
      expect(Tok::bar, "'|'");
      Rational q = rational();
      expect(Tok::rparen, "')'");
      return {p, q};
    }
    if (at_signed_number()) return SpherePair::constant(rational());
    fail("expected a function on S0: pair(p, q), (p|q) or a number");
  }

  void expect_x_argument() {
    expect(Tok::lparen, "'('");
    expect_ident("x");
    expect(Tok::rparen, "')'");
  }

  // ------------------------------------------------------------ bindings

  const Binding& lookup(const Token& t) {
    auto it = env_.find(t.text);
    if (it == env_.end()) fail("unbound name '" + t.text + "'", t);
    const Binding& b = it->second;
    if (b.failure && !failure_)
      failure_ = Failure{b.failure->kind, "binding '" + t.text + "' failed: " + b.failure->message};
    return b;
  }

  template <class T>
  bool bound_as(size_t k = 0) const {
    if (!at(Tok::ident, k)) return false;
    auto it = env_.find(peek(k).text);
    return it != env_.end() && it->second.value && std::holds_alternative<T>(*it->second.value);
  }

  static std::string kind_name(const Value& v) {
    if (std::holds_alternative<ThickDistribution>(v)) return "a distribution";
    if (std::holds_alternative<ThickTestFunction>(v)) return "a test function";
    return "a multiplier";
  }

  // ------------------------------------------------------------ multipliers

  bool at_multiplier() const {
    return (at_ident("H") && at(Tok::lparen, 1)) || at_ident("x") || at(Tok::lbrack) ||
           bound_as<Multiplier>();
  }

  Multiplier multiplier() {
    const Token& t = peek();
    if (at_ident("H")) {
      advance();
      expect_x_argument();
      return heaviside_multiplier();
    }
    if (at_ident("x")) {
      advance();
      int k = 1;
      if (accept(Tok::caret)) k = integer();
      return attempt([&] { return power_multiplier(k); }, Multiplier(expr::zero()));
    }
    if (accept(Tok::lbrack)) {
      const TValue v = test_expression();
      expect(Tok::rbrack, "']'");
      return Multiplier(v.node, v.a);
    }
    if (at(Tok::ident)) {
      advance();
      const Binding& b = lookup(t);
      if (!b.value) return Multiplier(expr::zero());
      if (const auto* m = std::get_if<Multiplier>(&*b.value)) return *m;
      fail("'" + t.text + "' is " + kind_name(*b.value) + ", expected a multiplier", t);
    }
    fail("expected a multiplier: H(x), x^k, [test expression] or a name");
  }

  // ------------------------------------------------------------ distributions

  ThickDistribution placeholder_dist() const { return zero_distribution(); }

  ThickDistribution dist_expression() {
    std::vector<std::pair<Rational, ThickDistribution>> terms;
    bool bare = true;
    for (bool first = true;; first = false) {
      Rational sign = 1;
      if (first) {
        if (accept(Tok::minus)) {
          sign = -1;
          bare = false;
        }
      } else if (accept(Tok::minus)) {
        sign = -1;
        bare = false;
      } else if (accept(Tok::plus)) {
        bare = false;
      } else {
        break;
      }
      Rational coefficient = 1;
      if (at_signed_number() && at(Tok::star, at(Tok::number) ? 1 : 2)) {
        coefficient = rational();
        advance();  // '*'
        bare = false;
      }
      terms.emplace_back(sign * coefficient, dist_term());
    }
    if (bare && terms.size() == 1) return terms.front().second;
    const double a = terms.front().second.thick_point();
    return attempt([&] { return linear_combination(terms, a); }, placeholder_dist());
  }

  ThickDistribution dist_term() {
    if (at_multiplier()) {
      const Multiplier psi = multiplier();
      expect(Tok::star, "'*' after a multiplier");
      const ThickDistribution f = dist_term();
      return multiply(psi.at_thick_point(f.thick_point()), f);
    }
    return dist_atom();
  }

  ThickDistribution dist_atom() {
    const Token& t = peek();
    if (at_ident("Pf")) {
      advance();
      expect(Tok::lparen, "'('");
      ThickDistribution f = density();
      close_call("Pf", 1);
      return f;
    }
    if (at_ident("delta")) {
      advance();
      expect(Tok::lbrack, "'['");
      const int q = integer();
      expect(Tok::rbrack, "']'");
      expect(Tok::lparen, "'('");
      const SpherePair g = sphere_function();
      close_call("delta", 1);
      return thick_delta({g}, q);
    }
    if (at_ident("dstar")) {
      advance();
      return delta_star();
    }
    if (at_ident("glambda")) {
      advance();
      expect(Tok::lparen, "'('");
      const Token& lt = peek();
      const Rational lambda = rational();
      close_call("glambda", 1);
      int q = 0;
      const bool dotted = at(Tok::dot);
      const bool starred = at(Tok::star) && at_ident("delta", 1) && at(Tok::lbrack, 2) && !at(Tok::lparen, 5);
      if (dotted || starred) {
        advance();
        expect_ident("delta");
        expect(Tok::lbrack, "'['");
        q = integer();
        expect(Tok::rbrack, "']'");
      }
      if (lambda_outside_unit_interval(lambda))
        warnings_.push_back("glambda(" + to_string(lambda) + ") at " + std::to_string(lt.line) + ":" +
                            std::to_string(lt.column) + ": lambda lies outside [0, 1]");
      return g_lambda_delta(lambda, q);
    }
    if (at(Tok::dstar)) {
      advance();
      expect(Tok::lparen, "'('");
      ThickDistribution f = dist_expression();
      close_call("d*", 1);
      return d_star(f);
    }
    if (at_ident("translate") || at_ident("dilate")) {
      const bool is_translate = t.text == "translate";
      advance();
      expect(Tok::lparen, "'('");
      ThickDistribution f = dist_expression();
      next_argument(t.text, 2);
      const Rational c = rational();
      close_call(t.text, 2);
      if (is_translate) return translate(f, c);
      return attempt([&] { return dilate(f, c); }, placeholder_dist());
    }
    if (accept(Tok::lparen)) {
      ThickDistribution f = dist_expression();
      expect(Tok::rparen, "')'");
      return f;
    }
    if (at(Tok::number)) {
      if (t.text == "0") {
        advance();
        return zero_distribution();
      }
      fail("expected a distribution; a coefficient needs '*'");
    }
    if (at(Tok::ident) && !reserved_names().contains(t.text)) {
      advance();
      const Binding& b = lookup(t);
      if (!b.value) return placeholder_dist();
      if (const auto* f = std::get_if<ThickDistribution>(&*b.value)) return *f;
      fail("'" + t.text + "' is " + kind_name(*b.value) + ", expected a distribution", t);
    }
    fail("expected a distribution, found " + describe(t));
  }

  // abs(x)^l | H(x) | pair(p, q) * r^l | (p|q) * r^l | r^l
  ThickDistribution density() {
    if (at_ident("abs")) {
      advance();
      expect_x_argument();
      expect(Tok::caret, "'^'");
      return pf_power(exponent());
    }
    if (at_ident("H")) {
      advance();
      expect_x_argument();
      return pf_heaviside();
    }
    SpherePair c = SpherePair::constant(1);
    if (!at_ident("r")) {
      if (!at_ident("pair") && !at(Tok::lparen))
        fail("expected a density: abs(x)^l, H(x) or pair(p, q) * r^l");
      c = sphere_function();
      expect(Tok::star, "'*'");
    }
    expect_ident("r");
    expect(Tok::caret, "'^'");
    return pf_density(c, exponent());
  }

  // ------------------------------------------------------------ test functions

  TValue combine_points(const TValue& x, const TValue& y, NodePtr node) {
    if (!same_point(x.a, y.a)) {
      attempt(
          [&]() -> int {
            throw ThickPointMismatch("thick points differ: " + print_number(x.a) + " vs " + print_number(y.a));
          },
          0);
    }
    return {std::move(node), x.a};
  }

  TValue test_expression() {
    std::vector<TValue> terms;
    for (bool first = true;; first = false) {
      bool negative = false;
      if (first) {
        negative = accept(Tok::minus);
      } else if (accept(Tok::minus)) {
        negative = true;
      } else if (!accept(Tok::plus)) {
        break;
      }
      terms.push_back(test_term(negative));
    }
    if (terms.size() == 1) return terms.front();
    std::vector<NodePtr> nodes;
    for (const auto& t : terms) {
      nodes.push_back(t.node);
      if (!same_point(t.a, terms.front().a)) combine_points(terms.front(), t, nullptr);
    }
    return {expr::sum(std::move(nodes)), terms.front().a};
  }

  TValue test_term(bool negative) {
    Rational coefficient = 1;
    bool scaled = negative;
    if (at_signed_number() && at(Tok::star, at(Tok::number) ? 1 : 2)) {
      coefficient = rational();
      advance();
      scaled = true;
    }
    TValue v = test_product();
    if (negative) coefficient = -coefficient;
    if (scaled) v.node = expr::scale(coefficient, v.node);
    return v;
  }

  TValue test_product() {
    TValue v = test_factor();
    while (accept(Tok::star)) {
      const TValue w = test_factor();
      v = combine_points(v, w, expr::product(v.node, w.node));
    }
    return v;
  }

  NodePtr cutoff_node(double radius) {
    return attempt([&] { return expr::cutoff(radius); }, expr::zero());
  }

  TValue test_factor() {
    const Token& t = peek();
    if (at(Tok::ident) && at(Tok::lparen, 1)) {
      const std::string& fn = t.text;
      if (fn == "bump") {
        advance();
        advance();
        const double radius = real();
        close_call(fn, 1);
        return {cutoff_node(radius)};
      }
      if (fn == "mono") {
        advance();
        advance();
        const int j = integer();
        next_argument(fn, 3);
        const SpherePair c = sphere_function();
        next_argument(fn, 3);
        const double radius = real();
        close_call(fn, 3);
        return {expr::product(expr::power(j, c), cutoff_node(radius))};
      }
      if (fn == "poly") {
        advance();
        advance();
        expect(Tok::lbrack, "'['");
        std::vector<Rational> coeffs;
        if (!at(Tok::rbrack)) {
          coeffs.push_back(rational());
          while (accept(Tok::comma)) coeffs.push_back(rational());
        }
        expect(Tok::rbrack, "']'");
        NodePtr p = expr::polynomial(std::move(coeffs));
        if (accept(Tok::comma)) {
          const double radius = real();
          p = expr::product(p, cutoff_node(radius));
        }
        close_call(fn, 2);
        return {p};
      }
      if (fn == "rpow") {
        advance();
        advance();
        const int j = integer();
        next_argument(fn, 2);
        const SpherePair c = sphere_function();
        close_call(fn, 2);
        return {expr::power(j, c)};
      }
      if (fn == "H") {
        advance();
        expect_x_argument();
        return {expr::heaviside()};
      }
      if (fn == "sided") {
        advance();
        advance();
        const Rational p = rational();
        next_argument(fn, 2);
        const Rational q = rational();
        close_call(fn, 2);
        return {expr::sided({p, q})};
      }
      if (fn == "const") {
        advance();
        advance();
        const Rational c = rational();
        close_call(fn, 1);
        return {expr::constant(c)};
      }
      if (fn == "D") {
        advance();
        advance();
        TValue v = test_expression();
        close_call(fn, 1);
        return {expr::derivative(v.node), v.a};
      }
      if (fn == "stretch" || fn == "shift") {
        advance();
        advance();
        TValue v = test_expression();
        next_argument(fn, 2);
        const Number c = number();
        close_call(fn, 2);
        if (fn == "shift") return {v.node, v.a + c.value};
        return {attempt([&] { return expr::stretch(c.exact, v.node); }, expr::zero()), v.a * c.value};
      }
    }
    if (at_ident("x")) {
      advance();
      int k = 1;
      if (accept(Tok::caret)) k = integer();
      if (k < 0) fail("x^k needs k >= 0; use rpow for negative orders", t);
      std::vector<Rational> coeffs(static_cast<size_t>(k) + 1);
      coeffs.back() = 1;
      return {expr::polynomial(std::move(coeffs))};
    }
    if (at_ident("zero")) {
      advance();
      return {expr::zero()};
    }
    if (accept(Tok::lparen)) {
      TValue v = test_expression();
      expect(Tok::rparen, "')'");
      return v;
    }
    if (at_signed_number()) return {expr::constant(rational())};
    if (at(Tok::ident) && !reserved_names().contains(t.text)) {
      advance();
      const Binding& b = lookup(t);
      if (!b.value) return {expr::zero()};
      if (const auto* phi = std::get_if<ThickTestFunction>(&*b.value)) return {phi->body(), phi->thick_point()};
      if (const auto* psi = std::get_if<Multiplier>(&*b.value)) return {psi->body(), psi->thick_point()};
      fail("'" + t.text + "' is a distribution, expected a test function", t);
    }
    fail("expected a test function, found " + describe(t));
  }

  ThickTestFunction test_function() {
    const TValue v = test_expression();
    return attempt([&] { return ThickTestFunction(v.node, v.a); }, ThickTestFunction(expr::zero(), v.a));
  }

  size_t position() const { return pos_; }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::map<std::string, Binding, std::less<>>& env_;
  std::optional<Failure> failure_;
  std::vector<std::string> warnings_;
};

// Splits the token stream into statements (without separators).
std::vector<std::vector<Token>> statements(const std::vector<Token>& tokens) {
  std::vector<std::vector<Token>> out;
  std::vector<Token> current;
  for (const Token& t : tokens) {
    if (t.kind == Tok::sep || t.kind == Tok::end) {
      if (!current.empty()) {
        Token end = t;
        end.kind = Tok::end;
        current.push_back(end);
        out.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    current.push_back(t);
  }
  return out;
}

std::string warn_order(const ThickTestFunction& phi) {
  return "test function has expansion order m = " + std::to_string(phi.expansion().start()) +
         " < 0; it lies outside the one-sided test space";
}

template <class F>
auto parse_single(std::string_view text, F&& body) {
  std::map<std::string, Binding, std::less<>> env;
  auto tokens = lex(text);
  std::erase_if(tokens, [](const Token& t) { return t.kind == Tok::sep; });
  Parser p(std::move(tokens), env);
  auto value = body(p);
  p.finish_statement();
  if (p.failure()) throw DomainError(p.failure()->message);
  return value;
}

}  // namespace

Program parse(std::string_view text, std::optional<Command> default_command) {
  Program program;
  std::map<std::string, Binding, std::less<>> env;
  const auto tokens = lex(text);
  for (auto& stmt : statements(tokens)) {
    const Token first = stmt.front();
    const size_t begin = first.begin;
    const size_t end = stmt[stmt.size() - 2].end;
    const std::string source(text.substr(begin, end - begin));
    Parser p(stmt, env);

    const bool binding = first.kind == Tok::ident &&
                         (first.text == "dist" || first.text == "test" || first.text == "mult") &&
                         p.at(Tok::ident, 1) && p.at(Tok::equals, 2);
    if (binding) {
      p.advance();
      const Token& name = p.advance();
      if (reserved_names().contains(name.text)) p.fail("'" + name.text + "' is reserved", name);
      p.advance();
      Binding b{name.text, std::nullopt, std::nullopt};
      Value value = first.text == "dist"   ? Value(p.dist_expression())
                    : first.text == "test" ? Value(p.test_function())
                                           : Value(p.multiplier());
      p.finish_statement();
      if (p.failure())
        b.failure = p.failure();
      else
        b.value = std::move(value);
      env.insert_or_assign(name.text, b);
      program.bindings.push_back(std::move(b));
      continue;
    }

    std::optional<Command> command;
    if (first.kind == Tok::ident) command = command_from_name(first.text);
    const bool explicit_command = command.has_value();
    if (explicit_command) {
      p.advance();
    } else {
      command = default_command;
      if (!command) p.fail("expected a command (eval, derive, project, expand, check) or a binding");
    }

    Query q;
    q.command = *command;
    q.line = first.line;
    q.source = explicit_command ? source : std::string(command_name(*command)) + " " + source;
    switch (q.command) {
      case Command::eval:
      case Command::project: {
        q.dist = p.dist_expression();
        p.expect(Tok::comma, "',' between the distribution and the test function");
        q.test = p.test_function();
        if (!p.failure() && q.test->expansion().start() < 0) p.warnings().push_back(warn_order(*q.test));
        break;
      }
      case Command::derive:
        q.dist = p.dist_expression();
        break;
      case Command::expand:
        q.test = p.test_function();
        p.expect(Tok::comma, "',' between the test function and the order");
        q.order = p.integer();
        break;
      case Command::check: {
        const Token& at = p.peek();
        while (!p.at_end()) q.suite += p.advance().text;
        if (!q.suite.empty()) {
          const auto& names = suite_names();
          if (std::find(names.begin(), names.end(), q.suite) == names.end())
            p.fail("unknown suite '" + q.suite + "'", at);
        }
        break;
      }
    }
    p.finish_statement();
    q.failure = p.failure();
    q.warnings = std::move(p.warnings());
    program.queries.push_back(std::move(q));
  }
  return program;
}

ThickDistribution parse_distribution(std::string_view text) {
  return parse_single(text, [](Parser& p) { return p.dist_expression(); });
}

ThickTestFunction parse_test_function(std::string_view text) {
  return parse_single(text, [](Parser& p) { return p.test_function(); });
}

Multiplier parse_multiplier(std::string_view text) {
  return parse_single(text, [](Parser& p) { return p.multiplier(); });
}

// ---------------------------------------------------------------- printer

std::string print_number(double v) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string print_exponent(const Exponent& e) {
  if (e.is_exact()) return to_string(e.exact());
  std::string s = print_number(e.value());
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string print_pair(const SpherePair& c) {
  return "pair(" + to_string(c.plus) + ", " + to_string(c.minus) + ")";
}

bool is_monomial_polynomial(const Node& n) {
  if (n.kind != NodeKind::polynomial || n.coeffs.back() != 1) return false;
  for (size_t k = 0; k + 1 < n.coeffs.size(); ++k)
    if (n.coeffs[k] != 0) return false;
  return true;
}

std::string print_coeff_list(const std::vector<Rational>& coeffs) {
  std::string s = "[";
  for (size_t k = 0; k < coeffs.size(); ++k) s += (k ? ", " : "") + to_string(coeffs[k]);
  return s + "]";
}

bool is_plain_cutoff(const Node& n) { return n.kind == NodeKind::cutoff && n.order == 0; }

// Products printed as a single mono(...) or poly(..., R) call.
bool is_cutoff_sugar(const Node& n) {
  return n.kind == NodeKind::product && is_plain_cutoff(*n.children[1]) &&
         (n.children[0]->kind == NodeKind::power || n.children[0]->kind == NodeKind::polynomial);
}

std::string parenthesised(const Node& n) { return "(" + print_node(n) + ")"; }

}  // namespace

std::string print_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::zero:
      return "zero";
    case NodeKind::sided:
      if (n.pair == SpherePair(1, 0)) return "H(x)";
      if (n.pair.is_even()) return "const(" + to_string(n.pair.plus) + ")";
      return "sided(" + to_string(n.pair.plus) + ", " + to_string(n.pair.minus) + ")";
    case NodeKind::power:
      return "rpow(" + std::to_string(n.order) + ", " + print_pair(n.pair) + ")";
    case NodeKind::polynomial:
      return "poly(" + print_coeff_list(n.coeffs) + ")";
    case NodeKind::cutoff: {
      std::string s = "bump(" + print_number(n.radius) + ")";
      for (int k = 0; k < n.order; ++k) s = "D(" + s + ")";
      return s;
    }
    case NodeKind::sum: {
      std::string s;
      for (size_t i = 0; i < n.children.size(); ++i) {
        const Node& c = *n.children[i];
        if (c.kind == NodeKind::sum) {
          s += (i ? " + " : "") + parenthesised(c);
        } else if (i && c.kind == NodeKind::scale && c.factor < 0) {
          const Node& inner = *c.children[0];
          const bool wrap = inner.kind == NodeKind::sum || inner.kind == NodeKind::scale;
          s += " - " + to_string(Rational(-c.factor)) + " * " + (wrap ? parenthesised(inner) : print_node(inner));
        } else {
          s += (i ? " + " : "") + print_node(c);
        }
      }
      return s;
    }
    case NodeKind::product: {
      const Node& a = *n.children[0];
      const Node& b = *n.children[1];
      if (is_plain_cutoff(b)) {
        if (a.kind == NodeKind::power)
          return "mono(" + std::to_string(a.order) + ", " + print_pair(a.pair) + ", " + print_number(b.radius) + ")";
        if (a.kind == NodeKind::polynomial)
          return "poly(" + print_coeff_list(a.coeffs) + ", " + print_number(b.radius) + ")";
      }
      const bool wrap_a = a.kind == NodeKind::sum || a.kind == NodeKind::scale;
      const bool wrap_b = b.kind == NodeKind::sum || b.kind == NodeKind::scale ||
                          (b.kind == NodeKind::product && !is_cutoff_sugar(b));
      return (wrap_a ? parenthesised(a) : print_node(a)) + " * " + (wrap_b ? parenthesised(b) : print_node(b));
    }
    case NodeKind::scale: {
      const Node& c = *n.children[0];
      const bool wrap = c.kind == NodeKind::sum || c.kind == NodeKind::scale;
      return to_string(n.factor) + " * " + (wrap ? parenthesised(c) : print_node(c));
    }
    case NodeKind::stretch:
      return "stretch(" + print_node(*n.children[0]) + ", " + to_string(n.factor) + ")";
  }
  return "zero";
}

std::string print(const ThickTestFunction& phi) {
  const std::string body = print_node(*phi.body());
  if (phi.thick_point() == 0.0) return body;
  return "shift(" + body + ", " + print_number(phi.thick_point()) + ")";
}

std::string print(const Multiplier& psi) {
  const Node& n = *psi.body();
  if (n.kind == NodeKind::sided && n.pair == SpherePair(1, 0)) return "H(x)";
  if (is_monomial_polynomial(n)) return "x^" + std::to_string(n.coeffs.size() - 1);
  return "[" + print_node(n) + "]";
}

namespace {

std::string print_dist_operand(const ThickDistribution& f) {
  if (std::holds_alternative<LinearCombination>(f.node().body)) return "(" + print(f) + ")";
  return print(f);
}

}  // namespace

std::string print(const ThickDistribution& f) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PfDensity>) {
          if (node.density == SpherePair(1, 1)) return "Pf(abs(x)^" + print_exponent(node.exponent) + ")";
          if (node.density == SpherePair(1, 0) && node.exponent.is_exact() && node.exponent.exact() == 0)
            return "Pf(H(x))";
          return "Pf(" + print_pair(node.density) + " * r^" + print_exponent(node.exponent) + ")";
        } else if constexpr (std::is_same_v<T, ThickDelta>) {
          const SpherePair& w = node.g.weights;
          if (w == SpherePair(1, 1) && node.degree == 0) return "dstar";
          if (w.plus + w.minus == 2)
            return "glambda(" + to_string(w.plus / 2) + ")·delta[" + std::to_string(node.degree) + "]";
          return "delta[" + std::to_string(node.degree) + "](" + print_pair(w) + ")";
        } else if constexpr (std::is_same_v<T, Derivative>) {
          return "d*(" + print(node.f) + ")";
        } else if constexpr (std::is_same_v<T, MultiplierProduct>) {
          return print(node.psi) + " * " + print_dist_operand(node.f);
        } else if constexpr (std::is_same_v<T, LinearCombination>) {
          if (node.terms.empty()) return "0";
          std::string s;
          for (size_t i = 0; i < node.terms.size(); ++i) {
            const auto& [c, g] = node.terms[i];
            const std::string operand = print_dist_operand(g);
            if (i == 0) {
              if (c == -1)
                s = "-" + operand;
              else if (c == 1 && node.terms.size() > 1)
                s = operand;
              else
                s = to_string(c) + " * " + operand;
            } else if (c == 1) {
              s += " + " + operand;
            } else if (c == -1) {
              s += " - " + operand;
            } else if (c < 0) {
              s += " - " + to_string(Rational(-c)) + " * " + operand;
            } else {
              s += " + " + to_string(c) + " * " + operand;
            }
          }
          return s;
        } else if constexpr (std::is_same_v<T, Translate>) {
          return "translate(" + print(node.f) + ", " + to_string(node.shift) + ")";
        } else {
          return "dilate(" + print(node.f) + ", " + to_string(node.factor) + ")";
        }
      },
      f.node().body);
}

// ---------------------------------------------------------------- runner

namespace {

std::string query_input(const Query& q) {
  std::string s(command_name(q.command));
  switch (q.command) {
    case Command::eval:
    case Command::project:
      return s + " " + print(*q.dist) + ", " + print(*q.test);
    case Command::derive:
      return s + " " + print(*q.dist);
    case Command::expand:
      return s + " " + print(*q.test) + ", " + std::to_string(q.order);
    case Command::check:
      return q.suite.empty() ? s : s + " " + q.suite;
  }
  return s;
}

}  // namespace

Report run(const Program& program, const QuadratureConfig& cfg) {
  Report report;
  for (const Query& q : program.queries) {
    Record r;
    r.command = q.command;
    r.warnings = q.warnings;
    r.input = q.failure ? q.source : query_input(q);
    if (q.failure) {
      r.error = q.failure;
      report.records.push_back(std::move(r));
      continue;
    }
    try {
      switch (q.command) {
        case Command::eval:
          r.pairing = pair(*q.dist, *q.test, cfg);
          r.output = print_number(r.pairing->value);
          break;
        case Command::project:
          r.pairing = pair(project(*q.dist), *q.test, cfg);
          r.output = print_number(r.pairing->value);
          break;
        case Command::derive:
          r.output = print(simplify(d_star(*q.dist)));
          break;
        case Command::expand:
          r.output = render(q.test->expansion().truncated(q.order));
          break;
        case Command::check: {
          std::vector<std::string> suites;
          if (q.suite.empty())
            suites = suite_names();
          else
            suites = {q.suite};
          for (const auto& s : suites)
            for (auto& c : run_suite(s, cfg)) {
              if (q.suite.empty()) c.name = s + ": " + c.name;
              r.checks.push_back(std::move(c));
            }
          const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.pass; });
          r.output = std::to_string(passed) + "/" + std::to_string(r.checks.size()) + " passed";
          break;
        }
      }
    } catch (const Error& e) {
      r.error = Failure{error_kind(e), e.what()};
    }
    report.records.push_back(std::move(r));
  }
  return report;
}

bool Report::any_check_failed() const {
  return std::any_of(records.begin(), records.end(), [](const Record& r) {
    return std::any_of(r.checks.begin(), r.checks.end(), [](const CheckOutcome& c) { return !c.pass; });
  });
}

bool Report::any_error() const {
  return std::any_of(records.begin(), records.end(), [](const Record& r) { return r.error.has_value(); });
}

std::string Report::text() const {
  std::ostringstream out;
  for (const Record& r : records) {
    out << r.input << "\n";
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
    if (r.error) {
      out << "  error[" << r.error->kind << "]: " << r.error->message << "\n";
      continue;
    }
    if (r.pairing) {
      const PairingResult& p = *r.pairing;
      out << "  value: " << print_number(p.value) << "\n";
      if (p.exact) out << "  exact: " << to_string(*p.exact) << "\n";
      if (!p.exact) {
        out << "  split_radius: " << print_number(p.split_radius) << "\n";
        out << "  quad_error: " << print_number(p.quad_error) << "\n";
        for (const auto& t : p.series_terms)
          out << "  series[" << t.order << "]: " << print_number(t.contribution) << "\n";
        if (p.log_term != 0.0) out << "  log_term: " << print_number(p.log_term) << "\n";
      }
      continue;
    }
    for (const auto& c : r.checks)
      out << "  " << (c.pass ? "PASS" : "FAIL") << " " << c.name << "  observed " << print_number(c.observed)
          << ", expected " << print_number(c.expected) << ", tol " << print_number(c.tolerance) << "\n";
    out << "  = " << r.output << "\n";
  }
  return out.str();
}

namespace {

// Drops the sign of zero so that reports never show -0.
double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

std::string Report::json() const {
  using nlohmann::ordered_json;
  std::string out;
  for (const Record& r : records) {
    ordered_json j;
    j["command"] = command_name(r.command);
    j["input"] = r.input;
    if (r.error) {
      j["error"] = {{"kind", r.error->kind}, {"message", r.error->message}};
    } else if (r.pairing) {
      const PairingResult& p = *r.pairing;
      j["value"] = unsigned_zero(p.value);
      j["exact"] = p.exact ? ordered_json(to_string(*p.exact)) : ordered_json(nullptr);
      j["split_radius"] = p.split_radius;
      j["quad_error"] = unsigned_zero(p.quad_error);
      ordered_json terms = ordered_json::array();
      for (const auto& t : p.series_terms) terms.push_back({{"order", t.order}, {"contribution", unsigned_zero(t.contribution)}});
      j["series_terms"] = std::move(terms);
      j["log_term"] = unsigned_zero(p.log_term);
    } else {
      j["output"] = r.output;
    }
    if (r.command == Command::check && !r.error) {
      ordered_json checks = ordered_json::array();
      bool all = true;
      for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"observed", unsigned_zero(c.observed)},
                          {"expected", unsigned_zero(c.expected)},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
        all = all && c.pass;
      }
      j["checks"] = std::move(checks);
      j["pass"] = all;
    }
    j["warnings"] = r.warnings;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace thick::dsl
