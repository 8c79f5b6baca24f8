#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

/// Grammar: sums, products, quotients, unary minus and right-associative ^
/// over numbers, `i`, x1..x9, xi1..xi9, sin/cos/exp/sqrt(...) and |xi|.
/// Variables must not exceed `dim`; |xi| needs dim >= 1. dim = 0 only
/// checks the 1..9 range and rejects |xi|. Exponents must be real constants.
/// Errors are SyntaxError with the 0-based position in the text.
Expr parse_expression(std::string_view text, int dim = 0);

/// symbol NAME { dim=N order=M trunc=T term DEG: "EXPR" ... }, with `#`
/// comments running to end of line.
struct SymbolDocument {
  std::string name;
  int dim = 1;
  double order = 0.0;
  int truncation = 1;
  std::vector<std::pair<double, std::string>> terms;
};

SymbolDocument parse_symbol_document(std::string_view text);
/// Parses every term, checks degrees strictly decrease within
/// (order - trunc, order] and runs the Euler check on each term.
ClassicalSymbol to_symbol(const SymbolDocument& doc);
ClassicalSymbol parse_symbol_text(std::string_view text);
/// Inverse of parse_symbol_text.
std::string format_symbol_document(const ClassicalSymbol& p, const std::string& name);

/// Plain-text report: a `# title` line then `key: value` lines.
struct Report {
  std::string title;
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  /// First value under key; throws SyntaxError when absent.
  const std::string& at(std::string_view key) const;
  bool has(std::string_view key) const;
};

std::string format_report(const Report& r);
Report parse_report(std::string_view text);

/// dim, order, trunc, then one `degree D` entry per term.
Report symbol_report(const ClassicalSymbol& p, const std::string& title);
ClassicalSymbol symbol_from_report(const Report& r);

/// Reads a file into a string; throws DomainError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace pdo
