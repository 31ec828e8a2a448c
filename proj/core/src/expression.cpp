#include "varex/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace varex {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kExp, kLog, kAbs, kMin, kMax };

struct Expression::Node {
  Op op;
  double value = 0.0;  // kConst
  int slot = -1;       // kVar
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
  const std::string& src;
  const std::vector<std::string>& vars;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("expression error at position " + std::to_string(pos) + " in \"" + src +
                    "\": " + what);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (eat('+'))
        lhs = make(Op::kAdd, lhs, parse_term());
      else if (eat('-'))
        lhs = make(Op::kSub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (true) {
      if (eat('*'))
        lhs = make(Op::kMul, lhs, parse_factor());
      else if (eat('/'))
        lhs = make(Op::kDiv, lhs, parse_factor());
      else
        return lhs;
    }
  }

  // Unary minus binds looser than ^, so -x^2 is -(x^2).
  NodePtr parse_factor() {
    if (eat('-')) return make(Op::kNeg, parse_factor());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) return make(Op::kPow, base, parse_factor());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    const char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* start = src.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos += static_cast<std::size_t>(end - start);
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::kConst;
    n->value = v;
    return n;
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    const std::string name = src.substr(start, pos - start);

    if (peek() == '(') {
      Op op;
      int arity = 1;
      if (name == "sin") op = Op::kSin;
      else if (name == "cos") op = Op::kCos;
      else if (name == "exp") op = Op::kExp;
      else if (name == "log") op = Op::kLog;
      else if (name == "abs") op = Op::kAbs;
      else if (name == "min") { op = Op::kMin; arity = 2; }
      else if (name == "max") { op = Op::kMax; arity = 2; }
      else fail("unknown function '" + name + "'");
      eat('(');
      NodePtr a = parse_expr();
      NodePtr b;
      if (arity == 2) {
        if (!eat(',')) fail("function '" + name + "' expects two arguments");
        b = parse_expr();
      }
      if (!eat(')')) fail("expected ')'");
      return make(op, a, b);
    }

    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == name) {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::kVar;
        n->slot = static_cast<int>(i);
        return n;
      }
    }
    fail("unknown symbol '" + name + "'");
  }
};

double eval_node(const Expression::Node& n, std::span<const double> v) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return v[static_cast<std::size_t>(n.slot)];
    case Op::kAdd: return eval_node(*n.a, v) + eval_node(*n.b, v);
    case Op::kSub: return eval_node(*n.a, v) - eval_node(*n.b, v);
    case Op::kMul: return eval_node(*n.a, v) * eval_node(*n.b, v);
    case Op::kDiv: return eval_node(*n.a, v) / eval_node(*n.b, v);
    case Op::kPow: return std::pow(eval_node(*n.a, v), eval_node(*n.b, v));
    case Op::kNeg: return -eval_node(*n.a, v);
    case Op::kSin: return std::sin(eval_node(*n.a, v));
    case Op::kCos: return std::cos(eval_node(*n.a, v));
    case Op::kExp: return std::exp(eval_node(*n.a, v));
    case Op::kLog: return std::log(eval_node(*n.a, v));
    case Op::kAbs: return std::abs(eval_node(*n.a, v));
    case Op::kMin: return std::min(eval_node(*n.a, v), eval_node(*n.b, v));
    case Op::kMax: return std::max(eval_node(*n.a, v), eval_node(*n.b, v));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& src, const std::vector<std::string>& variables) {
  Parser p{src, variables};
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("trailing input");
  Expression e;
  e.root_ = std::move(root);
  e.vars_ = variables;
  e.src_ = src;
  return e;
}

double Expression::eval(std::span<const double> values) const {
  if (values.size() != vars_.size())
    throw ExprError("expression expects " + std::to_string(vars_.size()) + " values, got " +
                    std::to_string(values.size()));
  return eval_node(*root_, values);
}

}  // namespace varex
