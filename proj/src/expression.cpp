#include "fastreact/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace fastreact {

struct Expression::Node {
  enum class Kind { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kExp };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double x) const {
    switch (kind) {
      case Kind::kConst: return value;
      case Kind::kVar: return x;
      case Kind::kAdd: return a->eval(x) + b->eval(x);
      case Kind::kSub: return a->eval(x) - b->eval(x);
      case Kind::kMul: return a->eval(x) * b->eval(x);
      case Kind::kDiv: return a->eval(x) / b->eval(x);
      case Kind::kPow: return std::pow(a->eval(x), b->eval(x));
      case Kind::kNeg: return -a->eval(x);
      case Kind::kSin: return std::sin(a->eval(x));
      case Kind::kCos: return std::cos(a->eval(x));
      case Kind::kExp: return std::exp(a->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : src_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression: " + msg + " at position " +
                          std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (eat('+'))
        e = make(Kind::kAdd, e, term());
      else if (eat('-'))
        e = make(Kind::kSub, e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = factor();
    for (;;) {
      if (eat('*'))
        e = make(Kind::kMul, e, factor());
      else if (eat('/'))
        e = make(Kind::kDiv, e, factor());
      else
        return e;
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    if (eat('^')) return make(Kind::kPow, base, factor());
    return base;
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::kNeg, unary());
    if (eat('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      if (end == start) fail("malformed number");
      pos_ += std::size_t(end - start);
      return make(Kind::kConst, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t len = 0;
      while (pos_ + len < src_.size() &&
             std::isalpha(static_cast<unsigned char>(src_[pos_ + len])))
        ++len;
      const std::string name = src_.substr(pos_, len);
      pos_ += len;
      if (name == "x") return make(Kind::kVar);
      if (name == "pi") return make(Kind::kConst, nullptr, nullptr, M_PI);
      Kind k;
      if (name == "sin")
        k = Kind::kSin;
      else if (name == "cos")
        k = Kind::kCos;
      else if (name == "exp")
        k = Kind::kExp;
      else
        fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      NodePtr arg = expr();
      if (!eat(')')) fail("missing ')'");
      return make(k, arg);
    }
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  return e;
}

double Expression::operator()(double x) const {
  if (!root_) throw ExpressionError("expression: evaluating an empty expression");
  return root_->eval(x);
}

}  // namespace fastreact
