#include "wentzell/expr.hpp"

#include "wentzell/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace wentzell::expr {

namespace {

struct FunctionInfo {
    std::string_view name;
    Function id;
    std::size_t min_args;
    std::size_t max_args; // 0 means unbounded
};

constexpr FunctionInfo kFunctions[] = {
    {"exp", Function::Exp, 1, 1},   {"log", Function::Log, 1, 1},
    {"sin", Function::Sin, 1, 1},   {"cos", Function::Cos, 1, 1},
    {"sqrt", Function::Sqrt, 1, 1}, {"abs", Function::Abs, 1, 1},
    {"min", Function::Min, 2, 0},   {"max", Function::Max, 2, 0},
    {"tanh", Function::Tanh, 1, 1},
};

const FunctionInfo* find_function(std::string_view name)
{
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

std::string_view function_name(Function f)
{
    for (const auto& info : kFunctions)
        if (info.id == f) return info.name;
    return "?";
}

NodePtr make_number(double v)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Number;
    n->value = v;
    return n;
}

NodePtr make_variable(char v)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->variable = v;
    return n;
}

NodePtr make_op(NodeKind kind, std::vector<NodePtr> children)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = std::move(children);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all()
    {
        skip_ws();
        if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
        auto root = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected '" + std::string(1, text_[pos_]) +
                                 "', expected one of {+, -, *, /, ^, end of input}",
                             pos_);
        return root;
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_expected(std::string_view expected)
    {
        std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'"
                                                : std::string("end of input");
        throw ParseError("unexpected " + found + ", expected one of {" + std::string(expected) + "}",
                         pos_);
    }

    NodePtr parse_expr()
    {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_op(NodeKind::Add, {lhs, parse_term()});
            else if (accept('-'))
                lhs = make_op(NodeKind::Sub, {lhs, parse_term()});
            else
                return lhs;
        }
    }

    NodePtr parse_term()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_op(NodeKind::Mul, {lhs, parse_unary()});
            else if (accept('/'))
                lhs = make_op(NodeKind::Div, {lhs, parse_unary()});
            else
                return lhs;
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-')) return make_op(NodeKind::Negate, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power()
    {
        auto base = parse_atom();
        if (accept('^')) return make_op(NodeKind::Pow, {base, parse_unary()});
        return base;
    }

    NodePtr parse_atom()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail_expected("number, identifier, -, (");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) fail_expected(")");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail_expected("number, identifier, -, (");
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
        if (ec != std::errc() || ptr == first) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(ptr - first);
        return make_number(value);
    }

    NodePtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            const FunctionInfo* info = find_function(name);
            if (!info) throw ParseError("unknown function '" + std::string(name) + "'", start);
            ++pos_;
            std::vector<NodePtr> args;
            args.push_back(parse_expr());
            while (accept(',')) args.push_back(parse_expr());
            if (!accept(')')) fail_expected(",, )");
            if (args.size() < info->min_args || (info->max_args && args.size() > info->max_args))
                throw ParseError("wrong number of arguments to '" + std::string(name) + "'", start);
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Call;
            n->function = info->id;
            n->children = std::move(args);
            return n;
        }

        if (name == "x" || name == "y") return make_variable(name[0]);
        if (name == "pi") return make_number(std::numbers::pi);
        if (name == "e") return make_number(std::numbers::e);
        if (find_function(name))
            throw ParseError("function '" + std::string(name) + "' requires arguments", start);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void collect_variables(const Node& n, std::set<char>& out)
{
    if (n.kind == NodeKind::Variable) out.insert(n.variable);
    for (const auto& c : n.children) collect_variables(*c, out);
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Node& n, std::string& out)
{
    switch (n.kind) {
    case NodeKind::Number:
        // Negative literals only arise from constant folding, which we never do,
        // but keep them parseable anyway.
        if (n.value < 0) out += "(" + format_number(n.value) + ")";
        else out += format_number(n.value);
        return;
    case NodeKind::Variable:
        out += n.variable;
        return;
    case NodeKind::Negate:
        out += "(-";
        print(*n.children[0], out);
        out += ")";
        return;
    case NodeKind::Call: {
        out += function_name(n.function);
        out += "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out += ", ";
            print(*n.children[i], out);
        }
        out += ")";
        return;
    }
    default:
        break;
    }
    const char* op = n.kind == NodeKind::Add   ? " + "
                     : n.kind == NodeKind::Sub ? " - "
                     : n.kind == NodeKind::Mul ? " * "
                     : n.kind == NodeKind::Div ? " / "
                                               : " ^ ";
    out += "(";
    print(*n.children[0], out);
    out += op;
    print(*n.children[1], out);
    out += ")";
}

std::string describe(const Node& n)
{
    std::string s;
    print(n, s);
    return s;
}

struct Bindings {
    double x;
    std::optional<double> y;
};

double eval(const Node& n, const Bindings& b)
{
    switch (n.kind) {
    case NodeKind::Number:
        return n.value;
    case NodeKind::Variable:
        if (n.variable == 'x') return b.x;
        if (!b.y) throw EvalError("unbound variable 'y'");
        return *b.y;
    case NodeKind::Negate:
        return -eval(*n.children[0], b);
    case NodeKind::Add:
        return eval(*n.children[0], b) + eval(*n.children[1], b);
    case NodeKind::Sub:
        return eval(*n.children[0], b) - eval(*n.children[1], b);
    case NodeKind::Mul:
        return eval(*n.children[0], b) * eval(*n.children[1], b);
    case NodeKind::Div:
        return eval(*n.children[0], b) / eval(*n.children[1], b);
    case NodeKind::Pow:
        return std::pow(eval(*n.children[0], b), eval(*n.children[1], b));
    case NodeKind::Call:
        break;
    }

    const double a = eval(*n.children[0], b);
    switch (n.function) {
    case Function::Exp:
        return std::exp(a);
    case Function::Log:
        if (!(a > 0.0))
            throw EvalError("domain error: log of non-positive value " + format_number(a) + " in " +
                            describe(n));
        return std::log(a);
    case Function::Sin:
        return std::sin(a);
    case Function::Cos:
        return std::cos(a);
    case Function::Sqrt:
        if (a < 0.0)
            throw EvalError("domain error: sqrt of negative value " + format_number(a) + " in " +
                            describe(n));
        return std::sqrt(a);
    case Function::Abs:
        return std::abs(a);
    case Function::Tanh:
        return std::tanh(a);
    case Function::Min:
    case Function::Max: {
        double r = a;
        for (std::size_t i = 1; i < n.children.size(); ++i) {
            const double v = eval(*n.children[i], b);
            r = n.function == Function::Min ? std::min(r, v) : std::max(r, v);
        }
        return r;
    }
    }
    return 0.0;
}

} // namespace

Expression::Expression(NodePtr root) : root_(std::move(root))
{
    if (root_) collect_variables(*root_, free_);
}

void Expression::require_only(std::string_view allowed, std::string_view context) const
{
    for (char v : free_) {
        if (allowed.find(v) == std::string_view::npos) {
            std::string msg = "unbound variable '" + std::string(1, v) + "'";
            if (!context.empty()) msg += " in " + std::string(context);
            throw EvalError(msg);
        }
    }
}

double Expression::evaluate(double x, std::optional<double> y) const
{
    if (!root_) throw EvalError("evaluating an empty expression");
    if (!y && uses('y')) throw EvalError("unbound variable 'y'");
    return eval(*root_, Bindings{x, y});
}

std::string Expression::to_string() const
{
    std::string out;
    if (root_) print(*root_, out);
    return out;
}

Expression parse(std::string_view text)
{
    return Expression(Parser(text).parse_all());
}

double evaluate(const Expression& e, double x, std::optional<double> y)
{
    return e.evaluate(x, y);
}

} // namespace wentzell::expr
