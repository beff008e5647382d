#include "kte/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kte/error.hpp"

namespace kte {

Grid Grid::line(double lo, double hi, std::size_t count) {
    require(count >= 2 && hi > lo, ErrorCode::InvalidArgument, "grid needs hi > lo and at least 2 nodes");
    Grid g;
    g.dim = 1;
    g.origin = {lo, 0.0};
    g.h = {(hi - lo) / static_cast<double>(count - 1), 1.0};
    g.n = {count, 1};
    return g;
}

Grid Grid::plane(double lo0, double hi0, std::size_t n0, double lo1, double hi1, std::size_t n1) {
    require(n0 >= 2 && n1 >= 2 && hi0 > lo0 && hi1 > lo1, ErrorCode::InvalidArgument,
            "grid needs hi > lo and at least 2 nodes per axis");
    Grid g;
    g.dim = 2;
    g.origin = {lo0, lo1};
    g.h = {(hi0 - lo0) / static_cast<double>(n0 - 1), (hi1 - lo1) / static_cast<double>(n1 - 1)};
    g.n = {n0, n1};
    return g;
}

void Grid::validate() const {
    require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
    for (std::size_t a = 0; a < dim; ++a) {
        require(std::isfinite(origin[a]), ErrorCode::InvalidArgument, "grid origin must be finite");
        require(h[a] > 0.0 && std::isfinite(h[a]), ErrorCode::InvalidArgument, "grid spacing must be positive");
        require(n[a] >= 2, ErrorCode::InvalidArgument, "grid needs at least 2 nodes per axis");
    }
}

std::array<double, 2> Grid::point(std::size_t k) const {
    auto m = multi(k);
    return {coord(0, m[0]), dim == 2 ? coord(1, m[1]) : 0.0};
}

GridField::GridField(Grid grid, std::vector<double> values, std::size_t components)
    : grid_(grid), values_(std::move(values)), components_(components) {
    grid_.validate();
    require(components_ >= 1, ErrorCode::InvalidArgument, "field needs at least one component");
    require(values_.size() == grid_.size() * components_, ErrorCode::InvalidArgument,
            "field size does not match grid");
    sup_abs_ = 0.0;
    inf_ = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) {
        require(std::isfinite(v), ErrorCode::InvalidArgument, "field values must be finite");
        sup_abs_ = std::fmax(sup_abs_, std::fabs(v));
        inf_ = std::fmin(inf_, v);
    }
    double lip = 0.0;
    const std::size_t n0 = grid_.n[0], n1 = grid_.dim == 2 ? grid_.n[1] : 1;
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            std::size_t k = grid_.flat(i, j);
            for (std::size_t c = 0; c < components_; ++c) {
                double v = values_[k * components_ + c];
                if (i + 1 < n0)
                    lip = std::fmax(lip, std::fabs(values_[grid_.flat(i + 1, j) * components_ + c] - v) / grid_.h[0]);
                if (grid_.dim == 2 && j + 1 < n1)
                    lip = std::fmax(lip, std::fabs(values_[grid_.flat(i, j + 1) * components_ + c] - v) / grid_.h[1]);
            }
        }
    lipschitz_ = lip;
}

bool GridField::contains(std::span<const double> x) const {
    constexpr double slack = 1e-12;
    for (std::size_t a = 0; a < grid_.dim; ++a) {
        double span = grid_.hi(a) - grid_.lo(a);
        if (x[a] < grid_.lo(a) - slack * span || x[a] > grid_.hi(a) + slack * span) return false;
    }
    return true;
}

namespace {

// Cell index and local coordinate, clamped onto the grid.
std::pair<std::size_t, double> locate(const Grid& g, std::size_t axis, double x) {
    double u = (x - g.origin[axis]) / g.h[axis];
    double last = static_cast<double>(g.n[axis] - 1);
    if (u <= 0.0) return {0, 0.0};
    if (u >= last) return {g.n[axis] - 2, 1.0};
    double c = std::floor(u);
    return {static_cast<std::size_t>(c), u - c};
}

}  // namespace

double GridField::interpolate(std::span<const double> x, std::size_t c) const {
    auto [i, s] = locate(grid_, 0, x[0]);
    if (grid_.dim == 1) return (1.0 - s) * at(i, c) + s * at(i + 1, c);
    auto [j, t] = locate(grid_, 1, x[1]);
    double v00 = at(grid_.flat(i, j), c), v01 = at(grid_.flat(i, j + 1), c);
    double v10 = at(grid_.flat(i + 1, j), c), v11 = at(grid_.flat(i + 1, j + 1), c);
    return (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11);
}

GridField central_gradient(const GridField& f) {
    require(f.components() == 1, ErrorCode::InvalidArgument, "gradient needs a scalar field");
    const Grid& g = f.grid();
    const std::size_t d = g.dim;
    std::vector<double> out(g.size() * d);
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto m = g.multi(k);
        for (std::size_t a = 0; a < d; ++a) {
            std::size_t i = m[a], n = g.n[a];
            auto node = [&](std::size_t ii) { return a == 0 ? g.flat(ii, m[1]) : g.flat(m[0], ii); };
            double v;
            if (i == 0)
                v = (f[node(1)] - f[node(0)]) / g.h[a];
            else if (i + 1 == n)
                v = (f[node(n - 1)] - f[node(n - 2)]) / g.h[a];
            else
                v = (f[node(i + 1)] - f[node(i - 1)]) / (2.0 * g.h[a]);
            out[k * d + a] = v;
        }
    }
    return GridField(g, std::move(out), d);
}

void write_csv(std::ostream& os, const GridField& f) {
    const Grid& g = f.grid();
    os << "axis0_origin,axis0_h,axis0_n";
    if (g.dim == 2) os << ",axis1_origin,axis1_h,axis1_n";
    if (f.components() > 1) os << ",components";
    os << '\n' << std::setprecision(17);
    os << g.origin[0] << ',' << g.h[0] << ',' << g.n[0];
    if (g.dim == 2) os << ',' << g.origin[1] << ',' << g.h[1] << ',' << g.n[1];
    if (f.components() > 1) os << ',' << f.components();
    os << '\n';
    for (std::size_t k = 0; k < f.size(); ++k) {
        for (std::size_t c = 0; c < f.components(); ++c) {
            if (c) os << ',';
            os << f.at(k, c);
        }
        os << '\n';
    }
}

namespace {

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "not a number: '" + cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

bool is_numeric_row(const std::string& line) {
    for (char ch : line)
        if (std::isalpha(static_cast<unsigned char>(ch)) && ch != 'e' && ch != 'E') return false;
    return true;
}

}  // namespace

GridField read_csv(std::istream& is) {
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    require(!lines.empty(), ErrorCode::Parse, "empty grid CSV");
    std::size_t at = 0;
    std::size_t names = 0;
    if (!is_numeric_row(lines[0])) {
        names = static_cast<std::size_t>(std::count(lines[0].begin(), lines[0].end(), ',')) + 1;
        ++at;
    }
    require(at < lines.size(), ErrorCode::Parse, "grid CSV missing axis parameters");
    auto params = parse_row(lines[at++]);
    require(names == 0 || params.size() == names, ErrorCode::Parse, "grid CSV header and parameters disagree");
    require(params.size() == 3 || params.size() == 4 || params.size() == 6 || params.size() == 7, ErrorCode::Parse,
            "grid CSV needs 3 or 6 axis parameters (optionally followed by a component count)");
    Grid g;
    g.dim = params.size() >= 6 ? 2 : 1;
    auto count = [](double v) {
        require(v >= 2 && v == std::floor(v), ErrorCode::Parse, "axis count must be an integer >= 2");
        return static_cast<std::size_t>(v);
    };
    g.origin[0] = params[0];
    g.h[0] = params[1];
    g.n[0] = count(params[2]);
    if (g.dim == 2) {
        g.origin[1] = params[3];
        g.h[1] = params[4];
        g.n[1] = count(params[5]);
    }
    std::size_t comps = 1;
    if (params.size() == 4 || params.size() == 7) {
        double c = params.back();
        require(c >= 1 && c == std::floor(c), ErrorCode::Parse, "component count must be a positive integer");
        comps = static_cast<std::size_t>(c);
    }
    g.validate();
    std::vector<double> values;
    values.reserve(g.size() * comps);
    for (; at < lines.size(); ++at) {
        auto row = parse_row(lines[at]);
        values.insert(values.end(), row.begin(), row.end());
    }
    require(values.size() == g.size() * comps, ErrorCode::Parse, "grid CSV has the wrong number of values");
    return GridField(g, std::move(values), comps);
}

GridField read_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open " + path);
    return read_csv(in);
}

void write_csv_file(const std::string& path, const GridField& f) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + path);
    write_csv(out, f);
}

}  // namespace kte
