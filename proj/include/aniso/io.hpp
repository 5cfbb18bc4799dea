#pragma once

#include <json.hpp>
#include <string>

#include "aniso/estimates.hpp"
#include "aniso/experiments.hpp"

namespace aniso {

using json = nlohmann::json;

// serialization; field names are part of the file-format contract
json spec_to_json(const OperatorSpec& spec);      // {"dims":[...],"s":[...],"a":[...]}
OperatorSpec spec_from_json(const json& j);
json box_to_json(const AnisotropicBox& box);      // {"d":[...],"kappa":...}
AnisotropicBox box_from_json(const json& j);
json quad_to_json(const QuadratureSpec& quad);    // {"r0","Rcut","ppd","hloc","rtol"}
QuadratureSpec quad_from_json(const json& j);

json report_to_json(const EstimateReport& rep);

/// Instantiates a catalog field from {"name": ..., "params": {...}}.
ScalarField field_from_json(const json& j, int dim);

/// Certified ring-norm envelope derived from a catalog field declaration
/// (valid upper bounds by construction).
RingNorms ring_norms_for_field(const json& j);

/// Constants table for a spec: per block c_{N_i,s_i} and eta_i, plus
/// Ctilde, C_o, sigma, s_min/s_max, a_min/a_max.
json constants_table(const OperatorSpec& spec);
std::string format_constants_table(const json& table);

/// Catalog as JSON (for list-builtins).
json catalog_to_json();

struct RunOutcome {
  json report;
  std::string series_csv;
  bool all_pass = false;
};

/// Executes the experiment named in a v1 run configuration.  Throws
/// std::invalid_argument for malformed configurations.
RunOutcome run_config(const json& config, int jobs = 1);

void write_text_atomic(const std::string& path, const std::string& content);
std::string timestamp_now();

}  // namespace aniso
