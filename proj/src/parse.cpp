#include "pdo/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdo/error.hpp"

namespace pdo {

namespace {

[[noreturn]] void fail(std::size_t pos, const std::string& expected, std::string_view text) {
  std::string found = pos < text.size() ? "'" + std::string(1, text[pos]) + "'" : "end of input";
  throw SyntaxError("position " + std::to_string(pos) + ": expected " + expected + ", found " + found);
}

class ExprParser {
 public:
  ExprParser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != text_.size()) fail(pos_, "operator or end of input", text_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(pos_, std::string("'") + c + "'", text_);
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+')) e = e + product();
      else if (accept('-')) e = e - product();
      else return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    const Expr exponent = unary();
    if (!exponent.is_constant() || exponent.value().imag() != 0.0) fail(at, "a real constant exponent", text_);
    return pow(base, exponent.value().real());
  }

  Expr atom() {
    skip();
    if (pos_ >= text_.size()) fail(pos_, "operand", text_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (c == '|') {
      const std::size_t at = pos_;
      if (text_.substr(pos_, 4) != "|xi|") fail(at, "|xi|", text_);
      if (dim_ < 1) throw SyntaxError("position " + std::to_string(at) + ": |xi| needs a known dimension");
      pos_ += 4;
      return Expr::norm_xi(dim_);
    }
    fail(pos_, "operand", text_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail(start, "number", text_);
    return Expr(value);
  }

  Expr word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    const std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string digits(text_.substr(digits_start, pos_ - digits_start));

    if (digits.empty()) {
      if (name == "i") return Expr::imag_unit();
      Expr (*fn)(const Expr&) = nullptr;
      if (name == "sin") fn = sin;
      else if (name == "cos") fn = cos;
      else if (name == "exp") fn = exp;
      else if (name == "sqrt") fn = sqrt;
      if (!fn) fail(start, "variable, function or i", text_);
      expect('(');
      Expr arg = sum();
      expect(')');
      return fn(arg);
    }
    if (name != "x" && name != "xi") fail(start, "variable x1..x9 or xi1..xi9", text_);
    const int index = std::stoi(digits);
    if (digits.size() != 1 || index < 1) fail(start, "variable index 1..9", text_);
    if (dim_ > 0 && index > dim_)
      throw SyntaxError("position " + std::to_string(start) + ": variable " + name + digits + " exceeds dimension " +
                        std::to_string(dim_));
    return name == "x" ? Expr::x(index - 1) : Expr::xi(index - 1);
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

// Tokenizer for symbol documents.
class DocLexer {
 public:
  explicit DocLexer(std::string_view text) : text_(text) {}

  std::size_t pos() const { return pos_; }
  std::string_view text() const { return text_; }

  void skip() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }

  bool peek_word(std::string_view w) {
    skip();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    return end >= text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_');
  }

  void word(std::string_view w) {
    if (!peek_word(w)) fail(pos_, "'" + std::string(w) + "'", text_);
    pos_ += w.size();
  }

  void punct(char c) {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(pos_, std::string("'") + c + "'", text_);
    ++pos_;
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '-' || text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail(start, "symbol name", text_);
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    if (pos_ < text_.size() && text_[pos_] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
    if (ec != std::errc() || !std::isfinite(value)) fail(start, "number", text_);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  int integer() {
    const std::size_t start = (skip(), pos_);
    const double v = number();
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(start, "integer", text_);
    return static_cast<int>(v);
  }

  // Returns the quoted text and the position of its first character.
  std::pair<std::string, std::size_t> quoted() {
    punct('"');
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
    if (pos_ >= text_.size()) fail(pos_, "closing '\"'", text_);
    std::string body(text_.substr(start, pos_ - start));
    ++pos_;
    return {body, start};
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw SyntaxError("bad number for " + what + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw SyntaxError("bad integer for " + what + ": '" + s + "'");
  return v;
}

}  // namespace

Expr parse_expression(std::string_view text, int dim) { return ExprParser(text, dim).parse(); }

SymbolDocument parse_symbol_document(std::string_view text) {
  DocLexer lex(text);
  SymbolDocument doc;
  lex.word("symbol");
  doc.name = lex.identifier();
  lex.punct('{');
  bool have_dim = false, have_order = false, have_trunc = false;
  std::vector<std::size_t> term_starts;
  for (;;) {
    if (lex.peek_word("dim")) {
      lex.word("dim");
      lex.punct('=');
      doc.dim = lex.integer();
      have_dim = true;
    } else if (lex.peek_word("order")) {
      lex.word("order");
      lex.punct('=');
      doc.order = lex.number();
      have_order = true;
    } else if (lex.peek_word("trunc")) {
      lex.word("trunc");
      lex.punct('=');
      doc.truncation = lex.integer();
      have_trunc = true;
    } else if (lex.peek_word("term")) {
      lex.word("term");
      const double degree = lex.number();
      lex.punct(':');
      auto [body, at] = lex.quoted();
      doc.terms.emplace_back(degree, body);
      term_starts.push_back(at);
    } else {
      break;
    }
  }
  lex.punct('}');
  lex.skip();
  if (lex.pos() != text.size()) fail(lex.pos(), "end of input", text);
  if (!have_dim || !have_order || !have_trunc) throw SyntaxError("symbol header needs dim, order and trunc");
  if (doc.dim < 1 || doc.dim > 9) throw SyntaxError("dim must lie in 1..9");
  if (doc.truncation < 1) throw SyntaxError("trunc must be positive");
  for (std::size_t t = 0; t < doc.terms.size(); ++t) {
    try {
      parse_expression(doc.terms[t].second, doc.dim);
    } catch (const SyntaxError& e) {
      // Re-anchor the position to the document.
      const std::string msg = e.what();
      const auto p = msg.find("position ");
      if (p == std::string::npos) throw;
      std::size_t end = p + 9;
      while (end < msg.size() && std::isdigit(static_cast<unsigned char>(msg[end]))) ++end;
      const std::size_t inner = std::stoul(msg.substr(p + 9, end - p - 9));
      throw SyntaxError("position " + std::to_string(term_starts[t] + inner) + msg.substr(end));
    }
  }
  return doc;
}

ClassicalSymbol to_symbol(const SymbolDocument& doc) {
  ClassicalSymbol p(doc.dim, doc.order, doc.truncation);
  double previous = 0.0;
  for (std::size_t t = 0; t < doc.terms.size(); ++t) {
    const auto& [degree, text] = doc.terms[t];
    if (degree > doc.order + kDegreeTol)
      throw DegreeOrderError("term degree " + format_number(degree) + " exceeds order " + format_number(doc.order));
    if (degree <= doc.order - doc.truncation + kDegreeTol)
      throw DegreeOrderError("term degree " + format_number(degree) + " is at or below the truncation degree " +
                             format_number(doc.order - doc.truncation));
    if (t > 0 && !(degree < previous - kDegreeTol))
      throw DegreeOrderError("term degrees must strictly decrease (" + format_number(previous) + " then " +
                             format_number(degree) + ")");
    previous = degree;
    const HomogeneousTerm term{parse_expression(text, doc.dim), degree, doc.dim};
    const HomogeneityReport h = check_homogeneity(term);
    if (!h.accepted)
      throw HomogeneityError("term of degree " + format_number(degree) + " fails the Euler relation (residual " +
                             format_number(h.residual) + ")");
    p.add(term);
  }
  return p;
}

ClassicalSymbol parse_symbol_text(std::string_view text) { return to_symbol(parse_symbol_document(text)); }

std::string format_symbol_document(const ClassicalSymbol& p, const std::string& name) {
  std::ostringstream out;
  out << "symbol " << name << " {\n  dim=" << p.dim() << " order=" << format_number(p.order())
      << " trunc=" << p.truncation() << "\n";
  for (const auto& t : p.terms()) out << "  term " << format_number(t.degree) << ": \"" << t.expr.to_string() << "\"\n";
  out << "}\n";
  return out.str();
}

const std::string& Report::at(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw SyntaxError("report has no entry '" + std::string(key) + "'");
}

bool Report::has(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return true;
  return false;
}

std::string format_report(const Report& r) {
  std::string out = "# " + r.title + "\n";
  for (const auto& [k, v] : r.entries) out += k + ": " + v + "\n";
  return out;
}

Report parse_report(std::string_view text) {
  Report r;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool titled = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (!titled) {
        r.title = trim(std::string_view(t).substr(1));
        titled = true;
      }
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw SyntaxError("line " + std::to_string(number) + ": expected 'key: value'");
    r.add(trim(std::string_view(t).substr(0, colon)), trim(std::string_view(t).substr(colon + 1)));
  }
  return r;
}

Report symbol_report(const ClassicalSymbol& p, const std::string& title) {
  Report r;
  r.title = title;
  r.add("dim", std::to_string(p.dim()));
  r.add("order", format_number(p.order()));
  r.add("trunc", std::to_string(p.truncation()));
  for (const auto& t : p.terms()) r.add("degree " + format_number(t.degree), t.expr.to_string());
  return r;
}

ClassicalSymbol symbol_from_report(const Report& r) {
  const int dim = parse_int(r.at("dim"), "dim");
  if (dim < 1 || dim > 9) throw SyntaxError("dim must lie in 1..9");
  ClassicalSymbol p(dim, parse_double(r.at("order"), "order"), parse_int(r.at("trunc"), "trunc"));
  for (const auto& [k, v] : r.entries) {
    if (k.rfind("degree ", 0) != 0) continue;
    p.add(parse_expression(v, dim), parse_double(k.substr(7), k));
  }
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace pdo
