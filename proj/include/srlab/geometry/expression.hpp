#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/geometry/grid.hpp"

namespace srlab::geometry {

/// Arithmetic over (x, y, z): + - * / ^, unary minus, sin cos exp,
/// constants pi and sqrt2pi. ^ is right-associative and binds tighter than unary minus.
class Expression {
public:
  Expression() : Expression("0") {}
  explicit Expression(std::string source, int line = 0) : source_(std::move(source)) {
    Parser p{source_, line};
    root_ = p.parse();
  }

  double operator()(const Point& q) const { return eval(*root_, q); }
  double operator()(double x, double y, double z) const { return eval(*root_, {x, y, z}); }
  const std::string& source() const noexcept { return source_; }

  PointFunction function() const {
    auto self = std::make_shared<Expression>(*this);
    return [self](const Point& q) { return (*self)(q); };
  }

private:
  enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
  struct Node {
    Op op;
    double value = 0;
    int var = 0;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static double eval(const Node& n, const Point& q) {
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::Var: return q[static_cast<std::size_t>(n.var)];
      case Op::Neg: return -eval(*n.a, q);
      case Op::Add: return eval(*n.a, q) + eval(*n.b, q);
      case Op::Sub: return eval(*n.a, q) - eval(*n.b, q);
      case Op::Mul: return eval(*n.a, q) * eval(*n.b, q);
      case Op::Div: return eval(*n.a, q) / eval(*n.b, q);
      case Op::Pow: return std::pow(eval(*n.a, q), eval(*n.b, q));
      case Op::Sin: return std::sin(eval(*n.a, q));
      case Op::Cos: return std::cos(eval(*n.a, q));
      case Op::Exp: return std::exp(eval(*n.a, q));
    }
    return 0;
  }

  struct Parser {
    std::string_view s;
    int line;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
      throw ConfigError(msg, line, static_cast<int>(at) + 1);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
      return std::make_shared<const Node>(Node{op, 0, 0, std::move(a), std::move(b)});
    }

    NodePtr parse() {
      skip();
      if (pos == s.size()) fail("empty expression", pos);
      auto n = expr();
      skip();
      if (pos != s.size()) fail(std::string("unexpected '") + s[pos] + "'", pos);
      return n;
    }
    NodePtr expr() {
      auto n = term();
      for (;;) {
        if (eat('+')) n = make(Op::Add, n, term());
        else if (eat('-')) n = make(Op::Sub, n, term());
        else return n;
      }
    }
    NodePtr term() {
      auto n = unary();
      for (;;) {
        if (eat('*')) n = make(Op::Mul, n, unary());
        else if (eat('/')) n = make(Op::Div, n, unary());
        else return n;
      }
    }
    NodePtr unary() {
      if (eat('-')) return make(Op::Neg, unary());
      if (eat('+')) return unary();
      return power();
    }
    NodePtr power() {
      auto base = primary();
      if (eat('^')) return make(Op::Pow, base, unary());
      return base;
    }
    NodePtr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of expression", pos);
      const std::size_t start = pos;
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        auto n = expr();
        if (!eat(')')) fail("expected ')'", pos);
        return n;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::string rest(s.substr(pos));
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(rest, &used);
        } catch (const std::exception&) {
          fail("malformed number", start);
        }
        pos += used;
        auto n = std::make_shared<Node>(Node{Op::Num, v, 0, nullptr, nullptr});
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string id(s.substr(start, pos - start));
        if (id == "x" || id == "y" || id == "z") {
          auto n = std::make_shared<Node>(Node{Op::Var, 0, id[0] - 'x', nullptr, nullptr});
          return n;
        }
        if (id == "pi") return std::make_shared<Node>(Node{Op::Num, std::numbers::pi, 0, nullptr, nullptr});
        if (id == "sqrt2pi")
          return std::make_shared<Node>(Node{Op::Num, std::sqrt(2 * std::numbers::pi), 0, nullptr, nullptr});
        Op op;
        if (id == "sin") op = Op::Sin;
        else if (id == "cos") op = Op::Cos;
        else if (id == "exp") op = Op::Exp;
        else fail("unknown identifier '" + id + "'", start);
        if (!eat('(')) fail("expected '(' after " + id, pos);
        auto arg = expr();
        if (!eat(')')) fail("expected ')'", pos);
        return make(op, arg);
      }
      fail(std::string("unexpected '") + c + "'", start);
    }
  };

  std::string source_;
  NodePtr root_;
};

}  // namespace srlab::geometry
