#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace fastreact {

class ExpressionError : public std::runtime_error {
 public:
  explicit ExpressionError(const std::string& what) : std::runtime_error(what) {}
};

/// Arithmetic expression in one variable x, for initial-data profiles:
/// numbers, pi, + - * / ^ (right associative), unary sign, parentheses,
/// sin, cos, exp.
class Expression {
 public:
  /// Throws ExpressionError with the offending position on malformed input.
  static Expression parse(const std::string& text);

  double operator()(double x) const;

  struct Node;  // defined in the implementation

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace fastreact
