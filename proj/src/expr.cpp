#include "tmkit/expr.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace tmkit {

Expr Expr::number(double value) {
    Expr e;
    e.op_ = Op::Number;
    e.value_ = value;
    return e;
}

Expr Expr::variable(std::string name) {
    Expr e;
    e.op_ = Op::Variable;
    e.name_ = std::move(name);
    return e;
}

Expr Expr::negate(Expr operand) {
    Expr e;
    e.op_ = Op::Negate;
    e.lhs_ = std::make_shared<const Expr>(std::move(operand));
    return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    Expr e;
    e.op_ = op;
    e.lhs_ = std::make_shared<const Expr>(std::move(lhs));
    e.rhs_ = std::make_shared<const Expr>(std::move(rhs));
    return e;
}

namespace {

void collect(const Expr& e, std::vector<std::string>& out) {
    switch (e.op()) {
    case Expr::Op::Number:
        return;
    case Expr::Op::Variable:
        if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
        return;
    case Expr::Op::Negate:
        collect(e.operand(), out);
        return;
    default:
        collect(e.lhs(), out);
        collect(e.rhs(), out);
    }
}

int precedence(Expr::Op op) {
    switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub:
        return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div:
        return 2;
    case Expr::Op::Negate:
        return 3;
    default:
        return 4;
    }
}

char symbol(Expr::Op op) {
    switch (op) {
    case Expr::Op::Add: return '+';
    case Expr::Op::Sub: return '-';
    case Expr::Op::Mul: return '*';
    default: return '/';
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.op()) {
    case Expr::Op::Number:
        out += format_number(e.value());
        return;
    case Expr::Op::Variable:
        out += e.name();
        return;
    case Expr::Op::Negate: {
        out += '-';
        const bool wrap = precedence(e.operand().op()) < precedence(Expr::Op::Negate) ||
                          e.operand().op() == Expr::Op::Number ||
                          e.operand().op() == Expr::Op::Negate;
        if (wrap) out += '(';
        print(e.operand(), out);
        if (wrap) out += ')';
        return;
    }
    default: {
        const int p = precedence(e.op());
        const bool wrap_lhs = precedence(e.lhs().op()) < p;
        // Left-associative: an equal-precedence right operand needs parentheses.
        const bool wrap_rhs = precedence(e.rhs().op()) <= p;
        if (wrap_lhs) out += '(';
        print(e.lhs(), out);
        if (wrap_lhs) out += ')';
        out += ' ';
        out += symbol(e.op());
        out += ' ';
        if (wrap_rhs) out += '(';
        print(e.rhs(), out);
        if (wrap_rhs) out += ')';
    }
    }
}

}  // namespace

std::vector<std::string> Expr::variables() const {
    std::vector<std::string> out;
    collect(*this, out);
    return out;
}

double Expr::evaluate(const std::function<double(const std::string&)>& lookup) const {
    switch (op_) {
    case Op::Number:
        return value_;
    case Op::Variable:
        return lookup(name_);
    case Op::Negate:
        return -lhs_->evaluate(lookup);
    case Op::Add: {
        const double a = lhs_->evaluate(lookup);
        return a + rhs_->evaluate(lookup);
    }
    case Op::Sub: {
        const double a = lhs_->evaluate(lookup);
        return a - rhs_->evaluate(lookup);
    }
    case Op::Mul: {
        const double a = lhs_->evaluate(lookup);
        return a * rhs_->evaluate(lookup);
    }
    case Op::Div: {
        const double a = lhs_->evaluate(lookup);
        const double b = rhs_->evaluate(lookup);
        if (b == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero in '" + to_string() + "'");
        return a / b;
    }
    }
    return 0.0;
}

std::string Expr::to_string() const {
    std::string out;
    print(*this, out);
    return out;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.op_ != b.op_) return false;
    switch (a.op_) {
    case Expr::Op::Number:
        // Bitwise so that -0.0 and 0.0 stay distinct across a round trip.
        return std::signbit(a.value_) == std::signbit(b.value_) && a.value_ == b.value_;
    case Expr::Op::Variable:
        return a.name_ == b.name_;
    case Expr::Op::Negate:
        return *a.lhs_ == *b.lhs_;
    default:
        return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    }
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

}  // namespace tmkit
