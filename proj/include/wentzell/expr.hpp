#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wentzell::expr {

enum class NodeKind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

/// Built-in functions. min/max accept two or more arguments, the rest exactly one.
enum class Function { Exp, Log, Sin, Cos, Sqrt, Abs, Min, Max, Tanh };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;            // Number
    char variable = 0;             // Variable: 'x' or 'y'
    Function function = Function::Exp;
    std::vector<NodePtr> children; // operands / call arguments
};

/**
 * Immutable parsed scalar expression over the variables `x` and `y`.
 *
 * Copies share the underlying tree; evaluation never mutates it, so a single
 * Expression may be evaluated from several threads at once.
 */
class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root);

    const Node& root() const { return *root_; }
    bool empty() const { return root_ == nullptr; }

    /// Variables referenced anywhere in the tree.
    const std::set<char>& free_variables() const { return free_; }
    bool uses(char var) const { return free_.count(var) != 0; }

    /// Throws EvalError if the expression references a variable outside `allowed`.
    void require_only(std::string_view allowed, std::string_view context = {}) const;

    /// Evaluate with `x` bound and `y` optionally bound.
    double evaluate(double x, std::optional<double> y = std::nullopt) const;

    /// Fully parenthesized text that parses back to an identical tree.
    std::string to_string() const;

private:
    NodePtr root_;
    std::set<char> free_;
};

/// Parse per the grammar
///   expr  := term (("+"|"-") term)*
///   term  := unary (("*"|"/") unary)*
///   unary := "-" unary | power
///   power := atom ("^" unary)?
///   atom  := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
/// so that `^` is right-associative and binds tighter than unary minus.
Expression parse(std::string_view text);

/// Convenience: parse then evaluate.
double evaluate(const Expression& e, double x, std::optional<double> y = std::nullopt);

} // namespace wentzell::expr
