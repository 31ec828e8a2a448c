#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "varex/errors.hpp"

namespace varex {

/// Compiled arithmetic expression over a fixed set of named variables.
/// Grammar: + - * / ^ (right-assoc), unary minus, parentheses, numeric
/// literals, and the functions sin cos exp log abs min max. Evaluation
/// binds values positionally to the variable list given at parse time.
class Expression {
 public:
  static Expression parse(const std::string& src, const std::vector<std::string>& variables);

  double eval(std::span<const double> values) const;

  const std::vector<std::string>& variables() const { return vars_; }
  const std::string& source() const { return src_; }

  struct Node;  // exposed for the parser implementation

 private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> vars_;
  std::string src_;
};

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace varex
