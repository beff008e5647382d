#include "kte/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "kte/error.hpp"

namespace kte {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    RadialExpr run() {
        RadialExpr e;
        out_ = &e;
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) error("unexpected trailing input");
        return e;
    }

private:
    using Node = RadialExpr::Node;
    using Op = RadialExpr::Op;

    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorCode::Parse, what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) error(std::string("expected '") + c + "'");
    }

    bool at_number() {
        skip_ws();
        return pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.');
    }

    double number() {
        skip_ws();
        double v = 0.0;
        auto first = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
        if (ec != std::errc() || ptr == first) error("expected number");
        pos_ += static_cast<std::size_t>(ptr - first);
        if (!std::isfinite(v)) error("non-finite number");
        return v;
    }

    int push(Node n) {
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_term();
        while (accept('+')) lhs = push({Op::Sum, 0.0, lhs, parse_term()});
        return lhs;
    }

    // [number '*'] atom ['*' number]
    int parse_term() {
        double scale = 1.0;
        if (at_number()) {
            scale = number();
            if (!(scale > 0.0)) error("multiples must be positive");
            expect('*');
        }
        int atom = parse_atom();
        while (accept('*')) {
            if (!at_number()) error("only positive scalar multiples are allowed");
            double k = number();
            if (!(k > 0.0)) error("multiples must be positive");
            scale *= k;
        }
        if (scale != 1.0) atom = push({Op::Scale, scale, atom, -1});
        return atom;
    }

    int parse_atom() {
        skip_ws();
        if (accept('(')) {
            int inner = parse_sum();
            expect(')');
            return inner;
        }
        if (text_.substr(pos_, 3) == "max") {
            pos_ += 3;
            expect('(');
            int lhs = parse_sum();
            expect(',');
            lhs = push({Op::Max, 0.0, lhs, parse_sum()});
            while (accept(',')) lhs = push({Op::Max, 0.0, lhs, parse_sum()});
            expect(')');
            return lhs;
        }
        if (pos_ < text_.size() && text_[pos_] == 's') {
            ++pos_;
            double a = 1.0;
            if (accept('^')) {
                if (accept('(')) {
                    a = number();
                    expect(')');
                } else {
                    a = number();
                }
            }
            if (!(a >= 1.0)) error("exponents must be >= 1");
            return push({Op::Pow, a, -1, -1});
        }
        error("expected 's', 'max(' or '('");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    RadialExpr* out_ = nullptr;
};

RadialExpr RadialExpr::parse(std::string_view text) { return ExprParser(text).run(); }

double RadialExpr::value(double s) const { return eval(root_, s).value; }

RadialExpr::Jet RadialExpr::jet(double s) const { return eval(root_, s); }

namespace {

double ipow(double s, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= s;
    return r;
}

RadialExpr::Jet power_jet(double s, double a) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a == 1.0) return {s, 1.0, 0.0};
    if (s == 0.0) {
        double d2 = a == 2.0 ? 2.0 : (a < 2.0 ? inf : 0.0);
        return {0.0, 0.0, d2};
    }
    double k = std::floor(a);
    if (a == k && a <= 12.0) {
        int n = static_cast<int>(k);
        double sm2 = ipow(s, n - 2);
        double sm1 = sm2 * s;
        return {sm1 * s, a * sm1, a * (a - 1.0) * sm2};
    }
    double sm2 = std::pow(s, a - 2.0);
    return {sm2 * s * s, a * sm2 * s, a * (a - 1.0) * sm2};
}

}  // namespace

RadialExpr::Jet RadialExpr::eval(int idx, double s) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::Pow: return power_jet(s, n.param);
        case Op::Scale: {
            Jet j = eval(n.lhs, s);
            return {n.param * j.value, n.param * j.d1, n.param * j.d2};
        }
        case Op::Sum: {
            Jet a = eval(n.lhs, s), b = eval(n.rhs, s);
            return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
        }
        case Op::Max: {
            Jet a = eval(n.lhs, s), b = eval(n.rhs, s);
            if (a.value != b.value) return a.value > b.value ? a : b;
            if (a.d1 != b.d1) return a.d1 > b.d1 ? a : b;
            return a.d2 >= b.d2 ? a : b;
        }
    }
    return {0.0, 0.0, 0.0};
}

double RadialExpr::min_exponent() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Node& n : nodes_)
        if (n.op == Op::Pow) m = std::min(m, n.param);
    return m;
}

double RadialExpr::max_exponent() const {
    double m = 0.0;
    for (const Node& n : nodes_)
        if (n.op == Op::Pow) m = std::max(m, n.param);
    return m;
}

namespace {

std::string fmt_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string RadialExpr::render(int idx, int parent_prec) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::Pow: return n.param == 1.0 ? "s" : "s^" + fmt_number(n.param);
        case Op::Scale: {
            std::string inner = render(n.lhs, 2);
            return fmt_number(n.param) + "*" + inner;
        }
        case Op::Sum: {
            std::string s = render(n.lhs, 1) + "+" + render(n.rhs, 1);
            return parent_prec > 1 ? "(" + s + ")" : s;
        }
        case Op::Max: {
            std::vector<int> args;
            int cur = idx;
            while (nodes_[static_cast<std::size_t>(cur)].op == Op::Max) {
                args.push_back(nodes_[static_cast<std::size_t>(cur)].rhs);
                cur = nodes_[static_cast<std::size_t>(cur)].lhs;
            }
            args.push_back(cur);
            std::string s = "max(";
            for (auto it = args.rbegin(); it != args.rend(); ++it) {
                if (it != args.rbegin()) s += ",";
                s += render(*it, 0);
            }
            return s + ")";
        }
    }
    return {};
}

std::string RadialExpr::str() const { return render(root_, 0); }

}  // namespace kte
