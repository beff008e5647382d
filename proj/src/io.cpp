#include "kte/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "kte/error.hpp"

namespace kte::io {

namespace {

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorCode::Parse, std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorCode::Parse, std::string("bad field \"") + key + "\": " + e.what());
    }
}

std::size_t dim_of(const json& j) { return j.contains("dim") ? field<std::size_t>(j, "dim") : 1; }

std::vector<double> numbers(const json& j, const char* key) { return field<std::vector<double>>(j, key); }

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorCode::Parse, "not a number: " + std::string(s));
    return v;
}

}  // namespace

json to_json(const Grid& g) {
    json j;
    j["dim"] = g.dim;
    j["origin"] = std::vector<double>(g.origin.begin(), g.origin.begin() + static_cast<long>(g.dim));
    j["h"] = std::vector<double>(g.h.begin(), g.h.begin() + static_cast<long>(g.dim));
    j["n"] = std::vector<std::size_t>(g.n.begin(), g.n.begin() + static_cast<long>(g.dim));
    return j;
}

Grid grid_from_json(const json& j) {
    if (j.contains("range")) {
        const json& n = j.at("N");
        const json& r = j.at("range");
        if (n.is_array()) {
            auto ns = field<std::vector<std::size_t>>(j, "N");
            auto rs = field<std::vector<std::vector<double>>>(j, "range");
            require(ns.size() == 2 && rs.size() == 2 && rs[0].size() == 2 && rs[1].size() == 2, ErrorCode::Parse,
                    "2D grid needs N:[n0,n1] and range:[[lo,hi],[lo,hi]]");
            return Grid::plane(rs[0][0], rs[0][1], ns[0], rs[1][0], rs[1][1], ns[1]);
        }
        auto lohi = r.get<std::vector<double>>();
        require(lohi.size() == 2, ErrorCode::Parse, "range must be [lo, hi]");
        std::size_t count = n.get<std::size_t>();
        if (dim_of(j) == 2) return Grid::plane(lohi[0], lohi[1], count, lohi[0], lohi[1], count);
        return Grid::line(lohi[0], lohi[1], count);
    }
    Grid g;
    g.dim = dim_of(j);
    auto o = numbers(j, "origin"), h = numbers(j, "h");
    auto n = field<std::vector<std::size_t>>(j, "n");
    require(o.size() == g.dim && h.size() == g.dim && n.size() == g.dim, ErrorCode::Parse,
            "grid origin, h and n need one entry per axis");
    for (std::size_t a = 0; a < g.dim; ++a) g.origin[a] = o[a], g.h[a] = h[a], g.n[a] = n[a];
    g.validate();
    return g;
}

json to_json(const CostSpec& spec) {
    json j;
    switch (spec.kind()) {
        case CostKind::Power:
            j["kind"] = "power";
            j["p"] = spec.exponent();
            if (spec.norm() == PowerNorm::WeightedLp) {
                j["norm"] = "weighted_lp";
                j["weights"] = std::vector<double>(spec.weights().begin(), spec.weights().end());
            } else {
                j["norm"] = "euclidean";
            }
            break;
        case CostKind::Radial:
            j["kind"] = "radial";
            j["V"] = spec.profile().str();
            break;
        case CostKind::BlackBox:
            j["kind"] = "blackbox";
            j["grid"] = to_json(spec.table().grid());
            j["values"] = std::vector<double>(spec.table().values().begin(), spec.table().values().end());
            j["convex"] = spec.convex_flag();
            break;
    }
    j["dim"] = spec.dim();
    return j;
}

CostSpec cost_from_json(const json& j, const std::string& base_dir) {
    auto kind = field<std::string>(j, "kind");
    if (kind == "power") {
        std::string norm = j.contains("norm") ? field<std::string>(j, "norm") : "euclidean";
        if (norm == "euclidean") return CostSpec::power(field<double>(j, "p"), dim_of(j));
        if (norm == "weighted_lp")
            return CostSpec::power(field<double>(j, "p"), dim_of(j), PowerNorm::WeightedLp, numbers(j, "weights"));
        fail(ErrorCode::Parse, "unknown power norm \"" + norm + "\"");
    }
    if (kind == "radial") return CostSpec::radial(field<std::string>(j, "V"), dim_of(j));
    if (kind == "blackbox") {
        bool convex = j.contains("convex") ? field<bool>(j, "convex") : true;
        if (j.contains("table")) {
            std::string path = field<std::string>(j, "table");
            if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
            return CostSpec::blackbox(read_csv_file(path), convex);
        }
        return CostSpec::blackbox(GridField(grid_from_json(j.at("grid")), numbers(j, "values")), convex);
    }
    fail(ErrorCode::Parse, "unknown cost kind \"" + kind + "\"");
}

json to_json(const DiscreteMeasure& m) {
    json pts = json::array();
    for (std::size_t i = 0; i < m.size(); ++i)
        pts.push_back(std::vector<double>(m.point(i).begin(), m.point(i).end()));
    return {{"dim", m.dim()}, {"points", pts}, {"weights", std::vector<double>(m.weights().begin(), m.weights().end())}};
}

DiscreteMeasure measure_from_json(const json& j) {
    std::size_t dim = dim_of(j);
    auto rows = field<std::vector<std::vector<double>>>(j, "points");
    std::vector<double> flat;
    for (const auto& r : rows) {
        require(r.size() == dim, ErrorCode::Parse, "measure point has the wrong dimension");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return DiscreteMeasure(dim, std::move(flat), numbers(j, "weights"));
}

json to_json(const DualNormProblem& p) {
    return {{"grid", to_json(p.grid)}, {"mu", p.mu}, {"nu", p.nu}, {"lam", p.lam}, {"cost", to_json(p.spec)}};
}

DualNormProblem problem_from_json(const json& j, const std::string& base_dir) {
    DualNormProblem p;
    p.grid = grid_from_json(j.at("grid"));
    p.mu = numbers(j, "mu");
    p.nu = numbers(j, "nu");
    p.lam = j.contains("lam") ? numbers(j, "lam") : p.mu;
    p.spec = j.contains("cost") ? cost_from_json(j.at("cost"), base_dir) : CostSpec::power(2.0, p.grid.dim);
    p.validate();
    return p;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Parse, path + ": " + e.what());
    }
}

std::string parent_dir(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string() : path.substr(0, pos);
}

Grid parse_grid_arg(std::string_view text) {
    std::size_t n = 0, dim = 1;
    double lo = 0.0, hi = 0.0;
    bool have_n = false, have_range = false;
    while (!text.empty()) {
        auto eq = text.find('=');
        require(eq != std::string_view::npos, ErrorCode::Parse, "grid argument needs key=value pairs");
        auto key = text.substr(0, eq);
        text.remove_prefix(eq + 1);
        std::string_view value;
        if (!text.empty() && text.front() == '[') {
            auto close = text.find(']');
            require(close != std::string_view::npos, ErrorCode::Parse, "unclosed range bracket");
            value = text.substr(0, close + 1);
            text.remove_prefix(close + 1);
        } else {
            auto comma = text.find(',');
            value = text.substr(0, comma);
            text.remove_prefix(comma == std::string_view::npos ? text.size() : comma);
        }
        if (!text.empty() && text.front() == ',') text.remove_prefix(1);
        if (key == "N") {
            n = static_cast<std::size_t>(parse_number(value));
            have_n = true;
        } else if (key == "dim") {
            dim = static_cast<std::size_t>(parse_number(value));
        } else if (key == "range") {
            require(value.size() >= 2 && value.front() == '[' && value.back() == ']', ErrorCode::Parse,
                    "range must look like [lo,hi]");
            auto inner = value.substr(1, value.size() - 2);
            auto comma = inner.find(',');
            require(comma != std::string_view::npos, ErrorCode::Parse, "range must look like [lo,hi]");
            lo = parse_number(inner.substr(0, comma));
            hi = parse_number(inner.substr(comma + 1));
            have_range = true;
        } else {
            fail(ErrorCode::Parse, "unknown grid key \"" + std::string(key) + "\"");
        }
    }
    require(have_n && have_range, ErrorCode::Parse, "grid argument needs N and range");
    require(dim == 1 || dim == 2, ErrorCode::Parse, "grid dim must be 1 or 2");
    return dim == 1 ? Grid::line(lo, hi, n) : Grid::plane(lo, hi, n, lo, hi, n);
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    auto as_int = [](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            fail(ErrorCode::Parse, "bad seed \"" + std::string(s) + "\"");
        return v;
    };
    std::vector<std::uint64_t> out;
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        std::uint64_t a = as_int(text.substr(0, dots)), b = as_int(text.substr(dots + 2));
        require(a <= b, ErrorCode::Parse, "seed range must be ascending");
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        return out;
    }
    while (!text.empty()) {
        auto comma = text.find(',');
        out.push_back(as_int(text.substr(0, comma)));
        text.remove_prefix(comma == std::string_view::npos ? text.size() : comma + 1);
    }
    require(!out.empty(), ErrorCode::Parse, "empty seed list");
    return out;
}

void write_plan_csv(std::ostream& os, const std::vector<PlanEntry>& plan) {
    os << "i,j,mass\n" << std::setprecision(17);
    for (const auto& e : plan) os << e.i << ',' << e.j << ',' << e.mass << '\n';
}

}  // namespace kte::io
