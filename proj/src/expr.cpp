#include "curvelab/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>

namespace curvelab {

namespace {

NodePtr make_literal(cplx c) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Literal;
    n->literal = c;
    return n;
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(operand);
    return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

bool same_tree(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Literal: return a.literal == b.literal;
        case NodeKind::Variable: return true;
        case NodeKind::Parameter: return a.name == b.name;
        case NodeKind::Negate: return same_tree(*a.lhs, *b.lhs);
        case NodeKind::Pow: return a.exponent == b.exponent && same_tree(*a.lhs, *b.lhs);
        case NodeKind::Call: return a.function == b.function && same_tree(*a.lhs, *b.lhs);
        default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
    }
}

void collect_params(const Node& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::Parameter) out.insert(n.name);
    if (n.lhs) collect_params(*n.lhs, out);
    if (n.rhs) collect_params(*n.rhs, out);
}

bool depends_on_z(const Node& n) {
    if (n.kind == NodeKind::Variable) return true;
    return (n.lhs && depends_on_z(*n.lhs)) || (n.rhs && depends_on_z(*n.rhs));
}

// ---- printing --------------------------------------------------------------

// Binding strength used to decide where parentheses are needed.
int precedence(const Node& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Negate: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

std::string format_literal(cplx c) {
    // + 0.0 turns a signed zero into 0
    const double re = c.real() + 0.0;
    const double im = c.imag() + 0.0;
    if (im == 0.0) {
        if (re < 0.0) return "(" + format_double(re) + ")";
        return format_double(re);
    }
    if (re == 0.0) {
        if (im < 0.0) return "(" + format_double(im) + "i)";
        return format_double(im) + "i";
    }
    return "(" + format_double(re) + (im < 0.0 ? " - " : " + ") + format_double(std::abs(im)) + "i)";
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Literal: out += format_literal(n.literal); return;
        case NodeKind::Variable: out += 'z'; return;
        case NodeKind::Parameter: out += n.name; return;
        case NodeKind::Negate:
            out += '-';
            print_child(*n.lhs, precedence(*n.lhs) < 3, out);
            return;
        case NodeKind::Pow:
            print_child(*n.lhs, precedence(*n.lhs) < 5, out);
            out += '^';
            if (n.exponent < 0) {
                out += "(" + std::to_string(n.exponent) + ")";
            } else {
                out += std::to_string(n.exponent);
            }
            return;
        case NodeKind::Call:
            out += function_name(n.function);
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            return;
        default: break;
    }
    const int p = precedence(n);
    const char* op = n.kind == NodeKind::Add ? " + " : n.kind == NodeKind::Sub ? " - " : n.kind == NodeKind::Mul ? " * " : " / ";
    // Left-associative: an equal-precedence right operand keeps its parentheses.
    print_child(*n.lhs, precedence(*n.lhs) < p, out);
    out += op;
    print_child(*n.rhs, precedence(*n.rhs) <= p, out);
}

NodePtr substitute_node(const NodePtr& n, const NodePtr& replacement) {
    switch (n->kind) {
        case NodeKind::Variable: return replacement;
        case NodeKind::Literal:
        case NodeKind::Parameter: return n;
        default: break;
    }
    auto copy = std::make_shared<Node>(*n);
    if (n->lhs) copy->lhs = substitute_node(n->lhs, replacement);
    if (n->rhs) copy->rhs = substitute_node(n->rhs, replacement);
    return copy;
}

}  // namespace

std::string_view function_name(Function f) {
    switch (f) {
        case Function::Exp: return "exp";
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Tan: return "tan";
        case Function::Log: return "log";
        case Function::Sqrt: return "sqrt";
    }
    return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
    for (Function f : {Function::Exp, Function::Sin, Function::Cos, Function::Tan, Function::Log, Function::Sqrt}) {
        if (function_name(f) == name) return f;
    }
    return std::nullopt;
}

Expr::Expr() : root_{make_literal(cplx{})} {}

Expr::Expr(NodePtr root) : root_{std::move(root)} {}

Expr Expr::constant(cplx c) { return Expr{make_literal(c)}; }

Expr Expr::variable() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    return Expr{std::move(n)};
}

Expr Expr::parameter(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Parameter;
    n->name = std::move(name);
    return Expr{std::move(n)};
}

std::set<std::string> Expr::free_params() const {
    std::set<std::string> out;
    collect_params(*root_, out);
    return out;
}

bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

// A negated literal folds, so "-2" and the printed "(-2)" are the same tree.
Expr operator-(const Expr& a) {
    if (a.is_literal()) return Expr::constant(-a.root_->literal);
    return Expr{make_unary(NodeKind::Negate, a.root_)};
}
// Sums of literals fold too; otherwise "(1 - 2i)" would print the same as the literal 1 - 2i.
Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_literal() && b.is_literal()) return Expr::constant(a.root_->literal + b.root_->literal);
    return Expr{make_binary(NodeKind::Add, a.root_, b.root_)};
}
Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_literal() && b.is_literal()) return Expr::constant(a.root_->literal - b.root_->literal);
    return Expr{make_binary(NodeKind::Sub, a.root_, b.root_)};
}
Expr operator*(const Expr& a, const Expr& b) { return Expr{make_binary(NodeKind::Mul, a.root_, b.root_)}; }
Expr operator/(const Expr& a, const Expr& b) { return Expr{make_binary(NodeKind::Div, a.root_, b.root_)}; }

Expr pow(const Expr& base, long long exponent) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Pow;
    n->exponent = exponent;
    n->lhs = base.root_;
    return Expr{std::move(n)};
}

Expr apply(Function f, const Expr& arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->function = f;
    n->lhs = arg.root_;
    return Expr{std::move(n)};
}

std::string print_expr(const Expr& e) {
    std::string out;
    print_node(e.root(), out);
    return out;
}

Expr substitute(const Expr& e, const Expr& replacement) {
    return Expr{substitute_node(e.node(), replacement.node())};
}

Expr rescale(const Expr& e, cplx center, cplx scale) {
    return substitute(e, Expr::constant(center) + Expr::constant(scale) * Expr::variable());
}

// ---- compiled evaluation ---------------------------------------------------

namespace {

constexpr std::size_t kInlineStack = 64;

Jet apply_function(Function f, const Jet& x) {
    switch (f) {
        case Function::Exp: return exp(x);
        case Function::Sin: return sin(x);
        case Function::Cos: return cos(x);
        case Function::Tan: return tan(x);
        case Function::Log: return log(x);
        case Function::Sqrt: return sqrt(x);
    }
    return x;
}

Jet eval_tree(const Node& n, const Jet& z, const ParamMap& params) {
    switch (n.kind) {
        case NodeKind::Literal: return Jet{n.literal};
        case NodeKind::Variable: return z;
        case NodeKind::Parameter: {
            auto it = params.find(n.name);
            if (it == params.end()) throw EvalError("unbound parameter '" + n.name + "'");
            return Jet{it->second};
        }
        case NodeKind::Negate: return -eval_tree(*n.lhs, z, params);
        case NodeKind::Add: return eval_tree(*n.lhs, z, params) + eval_tree(*n.rhs, z, params);
        case NodeKind::Sub: return eval_tree(*n.lhs, z, params) - eval_tree(*n.rhs, z, params);
        case NodeKind::Mul: return eval_tree(*n.lhs, z, params) * eval_tree(*n.rhs, z, params);
        case NodeKind::Div: return eval_tree(*n.lhs, z, params) / eval_tree(*n.rhs, z, params);
        case NodeKind::Pow: return pow(eval_tree(*n.lhs, z, params), n.exponent);
        case NodeKind::Call: return apply_function(n.function, eval_tree(*n.lhs, z, params));
    }
    return {};
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const ParamMap& params) {
    for (const auto& name : e.free_params()) {
        if (params.find(name) == params.end()) throw EvalError("unbound parameter '" + name + "'");
    }
    emit(e.root(), params);
    std::size_t depth = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Push:
            case Op::Var: max_depth_ = std::max(max_depth_, ++depth); break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div: --depth; break;
            default: break;
        }
    }
}

void CompiledExpr::emit(const Node& n, const ParamMap& params) {
    if (!depends_on_z(n)) {
        // Parameters are frozen, so any z-free subtree folds to one constant.
        code_.push_back({Op::Push, eval_tree(n, Jet{}, params).value, 0});
        return;
    }
    switch (n.kind) {
        case NodeKind::Variable: code_.push_back({Op::Var}); return;
        case NodeKind::Negate: emit(*n.lhs, params); code_.push_back({Op::Neg}); return;
        case NodeKind::Pow:
            emit(*n.lhs, params);
            code_.push_back({Op::Pow, {}, n.exponent});
            return;
        case NodeKind::Call: {
            emit(*n.lhs, params);
            static constexpr std::array<Op, 6> ops{Op::Exp, Op::Sin, Op::Cos, Op::Tan, Op::Log, Op::Sqrt};
            code_.push_back({ops[static_cast<std::size_t>(n.function)]});
            return;
        }
        default: break;
    }
    emit(*n.lhs, params);
    emit(*n.rhs, params);
    switch (n.kind) {
        case NodeKind::Add: code_.push_back({Op::Add}); break;
        case NodeKind::Sub: code_.push_back({Op::Sub}); break;
        case NodeKind::Mul: code_.push_back({Op::Mul}); break;
        default: code_.push_back({Op::Div}); break;
    }
}

bool CompiledExpr::is_constant() const { return code_.size() == 1 && code_.front().op == Op::Push; }

Jet CompiledExpr::eval(cplx z) const {
    if (code_.empty()) return Jet{};
    std::array<Jet, kInlineStack> inline_stack;
    std::vector<Jet> heap_stack;
    Jet* stack = inline_stack.data();
    if (max_depth_ > kInlineStack) {
        heap_stack.resize(max_depth_);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Push: stack[top++] = Jet{ins.constant}; break;
            case Op::Var: stack[top++] = Jet::variable(z); break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
            case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
            case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
            case Op::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
            case Op::Pow: stack[top - 1] = pow(stack[top - 1], ins.exponent); break;
            case Op::Exp: stack[top - 1] = exp(stack[top - 1]); break;
            case Op::Sin: stack[top - 1] = sin(stack[top - 1]); break;
            case Op::Cos: stack[top - 1] = cos(stack[top - 1]); break;
            case Op::Tan: stack[top - 1] = tan(stack[top - 1]); break;
            case Op::Log: stack[top - 1] = log(stack[top - 1]); break;
            case Op::Sqrt: stack[top - 1] = sqrt(stack[top - 1]); break;
        }
    }
    return stack[0];
}

Jet eval_jet(const Expr& e, cplx z, const ParamMap& params) {
    return eval_tree(e.root(), Jet::variable(z), params);
}

}  // namespace curvelab
