#include "thick/expansion.hpp"

#include "thick/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace thick {

namespace {

std::optional<int> min_window(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// Builds a canonical expansion from a sparse order -> coefficient map.
Expansion from_map(const std::map<int, SpherePair>& terms, std::optional<int> window) {
  if (terms.empty()) return Expansion(0, {}, window);
  const int lo = terms.begin()->first;
  int hi = terms.rbegin()->first;
  if (window) hi = std::min(hi, *window);
  if (hi < lo) return Expansion(0, {}, window);
  std::vector<SpherePair> coeffs(static_cast<size_t>(hi - lo + 1));
  for (const auto& [order, c] : terms)
    if (order <= hi) coeffs[static_cast<size_t>(order - lo)] = c;
  return Expansion(lo, std::move(coeffs), window);
}

}  // namespace

Expansion::Expansion(int start, std::vector<SpherePair> coeffs, std::optional<int> reliable_to)
    : start_(start), coeffs_(std::move(coeffs)), reliable_to_(reliable_to) {
  canonicalize();
}

void Expansion::canonicalize() {
  if (reliable_to_ && !coeffs_.empty() && last_order() > *reliable_to_) {
    const int keep = *reliable_to_ - start_ + 1;
    coeffs_.resize(static_cast<size_t>(std::max(keep, 0)));
  }
  size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead].is_zero()) ++lead;
  if (lead == coeffs_.size()) {
    coeffs_.clear();
    start_ = 0;
    return;
  }
  coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
  start_ += static_cast<int>(lead);
  // Trailing zeros carry no information: coefficients past the stored range
  // are zero up to the reliable window either way.
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Expansion Expansion::term(int order, SpherePair c) { return Expansion(order, {std::move(c)}); }

Expansion Expansion::constant(const Rational& c) { return term(0, SpherePair::constant(c)); }

int Expansion::start() const {
  if (!coeffs_.empty()) return start_;
  return reliable_to_ ? *reliable_to_ + 1 : 0;
}

SpherePair Expansion::coeff(int order) const {
  if (!known(order))
    throw InsufficientOrder("expansion coefficient of order " + std::to_string(order) +
                            " requested, but the expansion is only reliable through order " +
                            std::to_string(*reliable_to_));
  if (coeffs_.empty() || order < start_ || order > last_order()) return {};
  return coeffs_[static_cast<size_t>(order - start_)];
}

Expansion Expansion::truncated(int order) const {
  if (coeffs_.empty() || last_order() <= order) {
    return Expansion(start_, coeffs_, min_window(reliable_to_, exact() ? std::nullopt
                                                                         : std::optional(order)));
  }
  return Expansion(start_, coeffs_, min_window(reliable_to_, order));
}

Expansion Expansion::scaled(const Rational& s) const {
  std::vector<SpherePair> out = coeffs_;
  for (auto& c : out) c *= s;
  return Expansion(start_, std::move(out), reliable_to_);
}

Expansion add(const Expansion& a, const Expansion& b) {
  std::map<int, SpherePair> terms;
  for (const Expansion* e : {&a, &b}) {
    if (e->empty()) continue;
    for (int j = e->start(); j <= e->last_order(); ++j) terms[j] += e->coeff(j);
  }
  return from_map(terms, min_window(a.reliable_to(), b.reliable_to()));
}

Expansion multiply(const Expansion& a, const Expansion& b) {
  // c_k = sum_{i+j=k} a_i b_j is known for k <= min(m_a + M_b, m_b + M_a).
  std::optional<int> window;
  if (b.reliable_to()) window = a.start() + *b.reliable_to();
  if (a.reliable_to()) window = min_window(window, b.start() + *a.reliable_to());
  std::map<int, SpherePair> terms;
  if (!a.empty() && !b.empty()) {
    for (int i = a.start(); i <= a.last_order(); ++i)
      for (int j = b.start(); j <= b.last_order(); ++j)
        terms[i + j] += a.coeff(i) * b.coeff(j);
  }
  return from_map(terms, window);
}

Expansion differentiate(const Expansion& e) {
  std::map<int, SpherePair> terms;
  if (!e.empty()) {
    for (int j = e.start(); j <= e.last_order(); ++j) {
      if (j == 0) continue;
      const SpherePair& c = e.coeff(j);
      terms[j - 1] = SpherePair(Rational(j) * c.plus, Rational(-j) * c.minus);
    }
  }
  std::optional<int> window;
  if (e.reliable_to()) window = *e.reliable_to() - 1;
  return from_map(terms, window);
}

Expansion from_taylor(const std::vector<Rational>& taylor, bool polynomial) {
  std::vector<SpherePair> coeffs;
  coeffs.reserve(taylor.size());
  for (size_t j = 0; j < taylor.size(); ++j)
    coeffs.emplace_back(taylor[j], j % 2 == 0 ? taylor[j] : Rational(-taylor[j]));
  std::optional<int> window;
  if (!polynomial) window = static_cast<int>(taylor.size()) - 1;
  return Expansion(0, std::move(coeffs), window);
}

double evaluate(const Expansion& e, Side w, double r) {
  if (e.empty()) return 0.0;
  double sum = 0.0;
  for (int j = e.last_order(); j >= e.start(); --j) sum += to_double(e.coeff(j).at(w)) * std::pow(r, j);
  return sum;
}

std::string render(const Expansion& e) {
  std::string out;
  if (!e.empty()) {
    for (int j = e.start(); j <= e.last_order(); ++j) {
      const SpherePair c = e.coeff(j);
      if (c.is_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "(" + to_string(c.plus) + "|" + to_string(c.minus) + ")·r^" + std::to_string(j);
    }
  }
  if (!e.exact()) {
    const std::string tail = "O(r^" + std::to_string(*e.reliable_to() + 1) + ")";
    out = out.empty() ? tail : out + " + " + tail;
  }
  return out.empty() ? "0" : out;
}

namespace {

class ExpansionReader {
 public:
  explicit ExpansionReader(std::string_view text) : text_(text) {}

  Expansion read() {
    skip_space();
    if (consume("0")) {
      skip_space();
      expect_end();
      return Expansion::zero();
    }
    std::map<int, SpherePair> terms;
    std::optional<int> window;
    while (true) {
      skip_space();
      if (consume("O(r^")) {
        window = read_int() - 1;
        expect(")");
        skip_space();
        expect_end();
        break;
      }
      expect("(");
      Rational p = parse_rational(read_until('|'));
      expect("|");
      Rational q = parse_rational(read_until(')'));
      expect(")");
      if (!consume("·") && !consume("*")) fail("expected '·'");
      expect("r^");
      const int j = read_int();
      if (terms.count(j)) fail("repeated order " + std::to_string(j));
      terms[j] = SpherePair(std::move(p), std::move(q));
      skip_space();
      if (pos_ == text_.size()) break;
      expect("+");
    }
    return from_map(terms, window);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("cannot parse expansion at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }
  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }
  void expect_end() const {
    if (pos_ != text_.size()) fail("trailing characters");
  }
  std::string_view read_until(char stop) {
    const size_t end = text_.find(stop, pos_);
    if (end == std::string_view::npos) fail(std::string("missing '") + stop + "'");
    std::string_view out = text_.substr(pos_, end - pos_);
    pos_ = end;
    return out;
  }
  int read_int() {
    const size_t begin = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == begin) fail("expected an integer");
    return std::stoi(std::string(text_.substr(begin, pos_ - begin)));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

Expansion parse_expansion(std::string_view text) { return ExpansionReader(text).read(); }

}  // namespace thick
