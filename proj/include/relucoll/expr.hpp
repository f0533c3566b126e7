#pragma once
// Scalar expressions in one variable x, for right-hand sides given in
// configuration files.  Grammar: + - * / ^, unary minus, parentheses,
// numbers, the constants pi and e, and sin cos tan exp log sqrt abs.

#include <memory>
#include <string>
#include <vector>

namespace rc {

class Expr {
public:
    // Throws ConfigError with the offending position on a syntax error.
    static Expr parse(const std::string& text);

    double operator()(double x) const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace rc
