#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kte/cost.hpp"
#include "kte/grid.hpp"
#include "kte/measure.hpp"
#include "kte/sobolev_dual.hpp"
#include "kte/transport.hpp"

namespace kte::io {

using json = nlohmann::json;

// {"dim":1,"origin":[a],"h":[h],"n":[N]}; also accepts {"N":256,"range":[-2,2]}
// and its 2D form {"N":[n0,n1],"range":[[lo0,hi0],[lo1,hi1]]}.
json to_json(const Grid& g);
Grid grid_from_json(const json& j);

// {"kind":"power","p":2,"norm":"euclidean","dim":1}
// {"kind":"power","p":2,"norm":"weighted_lp","weights":[1,2],"dim":2}
// {"kind":"radial","V":"s^2+s^4","dim":2}
// {"kind":"blackbox","grid":{...},"values":[...]} or {"kind":"blackbox","table":"file.csv"};
// table paths are resolved against base_dir.
json to_json(const CostSpec& spec);
CostSpec cost_from_json(const json& j, const std::string& base_dir = "");

// {"dim":n,"points":[[...],...],"weights":[...]}
json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

// {"grid":...,"mu":[...],"nu":[...],"lam":[...],"cost":{...}}; lam defaults to mu.
json to_json(const DualNormProblem& p);
DualNormProblem problem_from_json(const json& j, const std::string& base_dir = "");

json read_json_file(const std::string& path);
// Directory part of a path, empty when there is none.
std::string parent_dir(const std::string& path);

// "N=256,range=[-2,2]" with optional "dim=2" for a square grid.
Grid parse_grid_arg(std::string_view text);
// "0..99", "7" or "1,4,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

// Rows i,j,mass after a header line.
void write_plan_csv(std::ostream& os, const std::vector<PlanEntry>& plan);

}  // namespace kte::io
