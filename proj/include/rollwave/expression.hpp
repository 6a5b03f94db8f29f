#pragma once

#include <map>
#include <memory>
#include <string>

namespace rollwave {

// Small arithmetic grammar for prescribed fields f(x, t):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := primary ('^' unary)?
//   primary:= number | identifier | func '(' expr ')' | '(' expr ')'
// Identifiers are x, t, pi and any caller-supplied constants; functions are
// sin, cos, exp, tanh, sqrt.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text, const std::map<std::string, double>& constants = {});

    double operator()(double x, double t) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace rollwave
