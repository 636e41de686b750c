#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zblow/error.hpp"

namespace zblow {

/// Initial-data expressions in x built from
///   constant(c), gaussian(width[, centre]), polynomial(c0, c1, ...)
/// and numbers, combined with + - * and parentheses.
/// gaussian(w, c) = exp(-((x - c)/w)^2), polynomial(c0, c1, ...) = c0 + c1 x + ...
class Expression {
public:
    static Expression parse(std::string_view text) {
        Parser p{text, 0};
        Expression e;
        e.root_ = p.expr();
        p.skip();
        if (p.pos != text.size())
            throw ConfigError("unexpected '" + std::string(text.substr(p.pos, 1)) + "' in expression at " +
                              std::to_string(p.pos));
        e.text_ = std::string(text);
        return e;
    }

    double operator()(double x) const { return root_ ? root_->eval(x) : 0.0; }
    const std::string& text() const { return text_; }

private:
    struct Node {
        enum Kind { Number, Gaussian, Poly, Add, Sub, Mul, Neg } kind = Number;
        std::vector<double> args;
        std::shared_ptr<const Node> lhs, rhs;

        double eval(double x) const {
            switch (kind) {
            case Number: return args[0];
            case Gaussian: {
                const double r = (x - args[1]) / args[0];
                return std::exp(-r * r);
            }
            case Poly: {
                double acc = 0.0;
                for (auto it = args.rbegin(); it != args.rend(); ++it) acc = acc * x + *it;
                return acc;
            }
            case Add: return lhs->eval(x) + rhs->eval(x);
            case Sub: return lhs->eval(x) - rhs->eval(x);
            case Mul: return lhs->eval(x) * rhs->eval(x);
            case Neg: return -lhs->eval(x);
            }
            return 0.0;
        }
    };
    using NodePtr = std::shared_ptr<const Node>;

    static NodePtr binary(Node::Kind k, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    struct Parser {
        std::string_view s;
        std::size_t pos;

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
        [[noreturn]] void fail(const std::string& what) const {
            throw ConfigError(what + " in expression at " + std::to_string(pos));
        }

        NodePtr expr() {
            NodePtr l = term();
            while (true) {
                if (eat('+')) l = binary(Node::Add, l, term());
                else if (eat('-')) l = binary(Node::Sub, l, term());
                else return l;
            }
        }
        NodePtr term() {
            NodePtr l = unary();
            while (eat('*')) l = binary(Node::Mul, l, unary());
            return l;
        }
        NodePtr unary() {
            if (eat('-')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Neg;
                n->lhs = unary();
                return n;
            }
            return primary();
        }
        double number() {
            skip();
            double v = 0.0;
            auto res = std::from_chars(s.data() + pos, s.data() + s.size(), v);
            if (res.ec != std::errc()) fail("expected a number");
            pos = static_cast<std::size_t>(res.ptr - s.data());
            return v;
        }
        std::vector<double> arguments() {
            if (!eat('(')) fail("expected '('");
            std::vector<double> a;
            if (eat(')')) return a;
            do {
                double sign = eat('-') ? -1.0 : 1.0;
                a.push_back(sign * number());
            } while (eat(','));
            if (!eat(')')) fail("expected ')'");
            return a;
        }
        NodePtr primary() {
            skip();
            if (eat('(')) {
                NodePtr e = expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            std::size_t start = pos;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
            const std::string_view name = s.substr(start, pos - start);
            auto n = std::make_shared<Node>();
            if (name.empty()) {
                n->kind = Node::Number;
                n->args = {number()};
            } else if (name == "constant") {
                n->kind = Node::Number;
                n->args = arguments();
                if (n->args.size() != 1) fail("constant takes one argument");
            } else if (name == "gaussian") {
                n->kind = Node::Gaussian;
                n->args = arguments();
                if (n->args.size() == 1) n->args.push_back(0.0);
                if (n->args.size() != 2) fail("gaussian takes a width and an optional centre");
                if (!(n->args[0] > 0.0)) fail("gaussian width must be positive");
            } else if (name == "polynomial") {
                n->kind = Node::Poly;
                n->args = arguments();
                if (n->args.empty()) fail("polynomial needs at least one coefficient");
            } else {
                fail("unknown primitive '" + std::string(name) + "'");
            }
            return n;
        }
    };

    NodePtr root_;
    std::string text_;
};

} // namespace zblow
