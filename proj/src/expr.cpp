#include "relucoll/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "relucoll/errors.hpp"

namespace rc {

struct Expr::Node {
    enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call } op;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double f_sin(double x) { return std::sin(x); }
double f_cos(double x) { return std::cos(x); }
double f_tan(double x) { return std::tan(x); }
double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sqrt(double x) { return std::sqrt(x); }
double f_abs(double x) { return std::abs(x); }

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodeP parse() {
        NodeP n = sum();
        skip();
        if (i_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression \"" + s_ + "\": " + what + " at position " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    NodeP sum() {
        NodeP n = product();
        for (;;) {
            if (eat('+'))
                n = make(Op::Add, n, product());
            else if (eat('-'))
                n = make(Op::Sub, n, product());
            else
                return n;
        }
    }
    NodeP product() {
        NodeP n = unary();
        for (;;) {
            if (eat('*'))
                n = make(Op::Mul, n, unary());
            else if (eat('/'))
                n = make(Op::Div, n, unary());
            else
                return n;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = atom();
        if (eat('^')) return make(Op::Pow, base, unary());  // right-associative
        return base;
    }
    NodeP atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            NodeP n = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + i_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            i_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Expr::Node>();
            n->op = Op::Num;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) ++j;
            const std::string id = s_.substr(i_, j - i_);
            i_ = j;
            if (id == "x") return make(Op::Var);
            if (id == "pi" || id == "e") {
                auto n = std::make_shared<Expr::Node>();
                n->op = Op::Num;
                n->value = id == "pi" ? std::numbers::pi : std::numbers::e;
                return n;
            }
            double (*fn)(double) = nullptr;
            if (id == "sin") fn = f_sin;
            else if (id == "cos") fn = f_cos;
            else if (id == "tan") fn = f_tan;
            else if (id == "exp") fn = f_exp;
            else if (id == "log") fn = f_log;
            else if (id == "sqrt") fn = f_sqrt;
            else if (id == "abs") fn = f_abs;
            else fail("unknown identifier '" + id + "'");
            if (!eat('(')) fail("expected '(' after " + id);
            NodeP arg = sum();
            if (!eat(')')) fail("expected ')'");
            auto n = std::make_shared<Expr::Node>();
            n->op = Op::Call;
            n->fn = fn;
            n->a = arg;
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

double eval(const Expr::Node& n, double x) {
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var: return x;
        case Op::Neg: return -eval(*n.a, x);
        case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
        case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
        case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
        case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
        case Op::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
        case Op::Call: return n.fn(eval(*n.a, x));
    }
    return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.text_ = text;
    e.root_ = Parser(text).parse();
    return e;
}

double Expr::operator()(double x) const {
    if (!root_) throw DomainError("empty expression");
    return eval(*root_, x);
}

}  // namespace rc
