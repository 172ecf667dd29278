#pragma once

// Holomorphic expression trees over the variable `z` and named parameters.
//
// Trees are immutable and shared; every builder returns a fresh root that may
// alias subtrees of its arguments. Parameters are complex constants bound at
// evaluation time, so a family {f_n} is one expression plus a schedule of n.
// The accepted grammar is described in docs/expr-grammar.md.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "curvelab/jet.hpp"

namespace curvelab {

enum class NodeKind { Literal, Variable, Parameter, Negate, Add, Sub, Mul, Div, Pow, Call };

enum class Function { Exp, Sin, Cos, Tan, Log, Sqrt };

std::string_view function_name(Function f);
std::optional<Function> function_from_name(std::string_view name);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    cplx literal{};          // Literal
    std::string name;        // Parameter
    Function function{};     // Call
    long long exponent = 0;  // Pow
    NodePtr lhs;             // unary operand, call argument, or left operand
    NodePtr rhs;             // right operand of binary operators
};

using ParamMap = std::map<std::string, cplx, std::less<>>;

class Expr {
public:
    /// The literal 0.
    Expr();

    static Expr constant(cplx c);
    static Expr variable();
    static Expr parameter(std::string name);

    const Node& root() const { return *root_; }
    const NodePtr& node() const { return root_; }

    /// Names of every parameter that occurs in the tree.
    std::set<std::string> free_params() const;

    /// True when the tree is a bare literal.
    bool is_literal() const { return root_->kind == NodeKind::Literal; }

    /// Structural identity of trees (literal values compared with ==).
    friend bool operator==(const Expr& a, const Expr& b);

    friend Expr operator-(const Expr& a);
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr pow(const Expr& base, long long exponent);
    friend Expr apply(Function f, const Expr& arg);

    explicit Expr(NodePtr root);

private:
    NodePtr root_;
};

struct ParseOptions {
    /// When set, identifiers outside this set (other than z, i, pi) are rejected.
    std::optional<std::set<std::string>> allowed_params;
};

/// Parses expression text. Throws ParseError carrying the byte offset of the fault.
Expr parse_expr(std::string_view text, const ParseOptions& options = {});

/// Canonical text form; parse_expr(print_expr(e)) == e.
std::string print_expr(const Expr& e);

/// Replaces every occurrence of `z` by `replacement`.
Expr substitute(const Expr& e, const Expr& replacement);

/// The affine rescaling z -> center + scale * z, done on the tree.
Expr rescale(const Expr& e, cplx center, cplx scale);

/// An expression with its parameters frozen to constants, flattened into a
/// postfix program. Evaluation is pure and allocation-free apart from a small
/// stack, so one instance may be shared across threads.
class CompiledExpr {
public:
    CompiledExpr() = default;
    /// Throws EvalError when a free parameter is missing from `params`.
    CompiledExpr(const Expr& e, const ParamMap& params);

    Jet eval(cplx z) const;
    cplx value(cplx z) const { return eval(z).value; }

    /// True when the program is a single constant (no dependence on z).
    bool is_constant() const;

private:
    enum class Op : unsigned char { Push, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Tan, Log, Sqrt };
    struct Instr {
        Op op;
        cplx constant{};
        long long exponent = 0;
    };
    void emit(const Node& n, const ParamMap& params);

    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

/// One-shot evaluation of (f(z), f'(z)).
Jet eval_jet(const Expr& e, cplx z, const ParamMap& params = {});

}  // namespace curvelab
