#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kte {

// Scalar profile V(s), s >= 0, built from s^a (a >= 1), positive multiples,
// sums and max. Text form: "s^2+s^4", "3*s^2", "max(s^2, 0.5*s^3)".
class RadialExpr {
public:
    struct Jet {
        double value;
        double d1;  // right derivative
        double d2;  // right second derivative
    };

    static RadialExpr parse(std::string_view text);

    double value(double s) const;
    Jet jet(double s) const;

    // Smallest and largest exponent appearing in the tree.
    double min_exponent() const;
    double max_exponent() const;

    // V grows linearly at infinity (no exponent above 1).
    bool linear_at_infinity() const { return max_exponent() <= 1.0; }

    std::string str() const;

private:
    enum class Op { Pow, Scale, Sum, Max };
    struct Node {
        Op op;
        double param;
        int lhs;
        int rhs;
    };

    friend class ExprParser;

    Jet eval(int node, double s) const;
    std::string render(int node, int parent_prec) const;

    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace kte
