#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relloc/model.hpp"

namespace relloc {

enum class TokenKind { Identifier, Keyword, Operator, Integer, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceSpan span;
  bool newline_before = false;  // first token on its line
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  std::string str() const;
};

/// Raised by every frontend stage; carries all diagnostics collected.
class FrontendError : public std::runtime_error {
 public:
  explicit FrontendError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

std::vector<Token> tokenize(std::string_view source, const std::string& file = "");

/// Builds the unresolved model. Each fact/pred line becomes one conjunct;
/// a formula continues onto the next line only while a parenthesis is open
/// or the line ends in the middle of an expression.
Model parse(const std::vector<Token>& tokens);

/// Binds names, computes arities and quantifier variable types, validates
/// commands. Returns a fresh model; the input is left untouched.
Model resolve(const Model& unresolved);

/// tokenize + parse + resolve.
Model load_model(std::string_view source, const std::string& file = "");
Model load_model_file(const std::string& path);

/// Parses and resolves a single formula against an existing resolved model.
FormPtr parse_formula(const Model& m, std::string_view source);

}  // namespace relloc
