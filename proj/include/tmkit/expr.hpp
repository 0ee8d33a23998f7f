#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmkit {

/// Arithmetic expression over model variables: + - * /, unary minus,
/// parentheses, decimal literals and variable names.
class Expr {
public:
    enum class Op : std::uint8_t { Number, Variable, Negate, Add, Sub, Mul, Div };

    static Expr number(double value);
    static Expr variable(std::string name);
    static Expr negate(Expr operand);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    Op op() const noexcept { return op_; }
    double value() const noexcept { return value_; }
    const std::string& name() const noexcept { return name_; }
    const Expr& lhs() const { return *lhs_; }
    const Expr& rhs() const { return *rhs_; }
    const Expr& operand() const { return *lhs_; }

    /// Variable names referenced, in first-occurrence order.
    std::vector<std::string> variables() const;

    /// Evaluates left to right as written. Throws Error(DivisionByZero).
    double evaluate(const std::function<double(const std::string&)>& lookup) const;

    /// Canonical text with the minimum parentheses needed to re-parse to the same tree.
    std::string to_string() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    Op op_ = Op::Number;
    double value_ = 0.0;
    std::string name_;
    std::shared_ptr<const Expr> lhs_;
    std::shared_ptr<const Expr> rhs_;
};

/// Formats a double with the shortest text that round-trips exactly.
std::string format_number(double value);

}  // namespace tmkit
