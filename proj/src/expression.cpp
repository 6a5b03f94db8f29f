#include "rollwave/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "rollwave/error.hpp"

namespace rollwave {

struct Expression::Node {
    enum class Kind { Number, X, T, Unary, Binary, Call } kind = Kind::Number;
    double value = 0.0;
    char op = 0;
    std::string func;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double x, double t) const {
        switch (kind) {
            case Kind::Number:
                return value;
            case Kind::X:
                return x;
            case Kind::T:
                return t;
            case Kind::Unary:
                return -args[0]->eval(x, t);
            case Kind::Binary: {
                const double a = args[0]->eval(x, t), b = args[1]->eval(x, t);
                switch (op) {
                    case '+': return a + b;
                    case '-': return a - b;
                    case '*': return a * b;
                    case '/': return a / b;
                    default: return std::pow(a, b);
                }
            }
            case Kind::Call: {
                const double a = args[0]->eval(x, t);
                if (func == "sin") return std::sin(a);
                if (func == "cos") return std::cos(a);
                if (func == "exp") return std::exp(a);
                if (func == "tanh") return std::tanh(a);
                return std::sqrt(a);
            }
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    Parser(const std::string& s, const std::map<std::string, double>& c) : src_(s), constants_(c) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

private:
    const std::string& src_;
    const std::map<std::string, double>& constants_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw DomainError("expression '" + src_ + "': " + what + " at position " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->args = {std::move(a), std::move(b)};
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = binary('+', lhs, term());
            else if (accept('-'))
                lhs = binary('-', lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = binary('*', lhs, unary());
            else if (accept('/'))
                lhs = binary('/', lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('+')) return unary();
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Unary;
            n->args = {unary()};
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end");
        const char c = src_[pos_];
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string name = src_.substr(start, pos_ - start);
            auto n = std::make_shared<Node>();
            if (name == "sin" || name == "cos" || name == "exp" || name == "tanh" || name == "sqrt") {
                if (!accept('(')) fail("expected '(' after " + name);
                n->kind = Node::Kind::Call;
                n->func = name;
                n->args = {expr()};
                if (!accept(')')) fail("missing ')'");
                return n;
            }
            if (name == "x") {
                n->kind = Node::Kind::X;
            } else if (name == "t") {
                n->kind = Node::Kind::T;
            } else if (name == "pi") {
                n->value = std::numbers::pi;
            } else if (auto it = constants_.find(name); it != constants_.end()) {
                n->value = it->second;
            } else {
                fail("unknown identifier '" + name + "'");
            }
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::map<std::string, double>& constants) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text, constants).parse();
    return e;
}

double Expression::operator()(double x, double t) const { return root_->eval(x, t); }

}  // namespace rollwave
