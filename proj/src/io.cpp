#include "aniso/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "aniso/fields.hpp"
#include "aniso/special.hpp"

namespace aniso {

namespace {

std::vector<double> doubles_from(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw std::invalid_argument("config: missing array field '" + key + "'");
  return j[key].get<std::vector<double>>();
}

std::vector<int> ints_from(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw std::invalid_argument("config: missing array field '" + key + "'");
  return j[key].get<std::vector<int>>();
}

double number_from(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument("config: missing numeric field '" + key + "'");
  return j[key].get<double>();
}

}  // namespace

json spec_to_json(const OperatorSpec& spec) {
  return json{{"dims", spec.grouping.dims}, {"s", spec.s}, {"a", spec.a}};
}

OperatorSpec spec_from_json(const json& j) {
  if (!j.contains("dims") || !j.contains("s") || !j.contains("a"))
    throw std::invalid_argument("operator spec: fields dims, s, a are required");
  return OperatorSpec::make(j["dims"].get<std::vector<int>>(),
                            j["s"].get<std::vector<double>>(),
                            j["a"].get<std::vector<double>>());
}

json box_to_json(const AnisotropicBox& box) {
  return json{{"d", box.d}, {"kappa", box.kappa}};
}

AnisotropicBox box_from_json(const json& j) {
  return AnisotropicBox::make(doubles_from(j, "d"),
                              j.contains("kappa") ? number_from(j, "kappa") : 1.0);
}

json quad_to_json(const QuadratureSpec& quad) {
  return json{{"r0", quad.singular_radius},
              {"Rcut", quad.truncation_radius},
              {"ppd", quad.panels_per_decade},
              {"hloc", quad.local_step},
              {"rtol", quad.target_rel_tol}};
}

QuadratureSpec quad_from_json(const json& j) {
  QuadratureSpec q;
  if (j.contains("r0")) q.singular_radius = number_from(j, "r0");
  if (j.contains("Rcut")) q.truncation_radius = number_from(j, "Rcut");
  if (j.contains("ppd")) q.panels_per_decade = static_cast<int>(number_from(j, "ppd"));
  if (j.contains("hloc")) q.local_step = number_from(j, "hloc");
  if (j.contains("rtol")) q.target_rel_tol = number_from(j, "rtol");
  q.validate();
  return q;
}

json report_to_json(const EstimateReport& rep) {
  json j;
  j["name"] = rep.name;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["slack"] = rep.slack;
  j["verdict"] = rep.verdict ? "pass" : "fail";
  j["provenance"] = json::object();
  for (const auto& [k, v] : rep.provenance) j["provenance"][k] = v;
  j["notes"] = rep.notes;
  return j;
}

ScalarField field_from_json(const json& j, int dim) {
  if (!j.contains("name") || !j["name"].is_string())
    throw std::invalid_argument("field: 'name' is required");
  std::map<std::string, double> params;
  if (j.contains("params")) {
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_number())
        throw std::invalid_argument("field parameter '" + k + "' must be numeric");
      params[k] = v.get<double>();
    }
  }
  return make_builtin(j["name"].get<std::string>(), params, dim);
}

RingNorms ring_norms_for_field(const json& j) {
  const std::string name = j.value("name", "");
  const json params = j.value("params", json::object());
  const double amp = std::abs(params.value("amp", 1.0));
  if (name == "zero") return RingNorms::constant(0.0);
  if (name == "annulus") {
    const double ri = params.at("r_inner").get<double>();
    const double ro = params.at("r_outer").get<double>();
    RingNorms rings;
    rings.growth_coeff = amp;
    rings.growth_exp = 0.0;
    rings.support_max = 2.0 * ro;  // rings with rho/2 > r_outer miss the support
    rings.norm = [amp, ri, ro](double rho) {
      return (2.0 * rho >= ri && 0.5 * rho <= ro) ? amp : 0.0;
    };
    return rings;
  }
  if (name == "growing_annulus") {
    const double ri = params.at("r_inner").get<double>();
    const double ro = params.at("r_outer").get<double>();
    const double growth = params.value("growth", 0.0);
    RingNorms rings;
    rings.growth_coeff = amp * std::pow(2.0, std::max(growth, 0.0));
    rings.growth_exp = growth;
    rings.support_max = 2.0 * ro;
    rings.norm = [amp, ri, ro, growth](double rho) {
      if (!(2.0 * rho >= ri && 0.5 * rho <= ro)) return 0.0;
      const double reach = std::min(2.0 * rho, ro);  // envelope over the ring
      return amp * std::pow(growth >= 0.0 ? reach : std::max(0.5 * rho, ri), growth);
    };
    return rings;
  }
  if (name == "axis_annulus") {
    const double ri = params.at("r_inner").get<double>();
    RingNorms rings;
    rings.growth_coeff = amp;
    rings.growth_exp = 0.0;
    rings.norm = [amp, ri](double rho) { return 2.0 * rho >= ri ? amp : 0.0; };
    return rings;
  }
  // any other bounded field: constant envelope
  if (name == "constant" || name == "cosine" || name == "gaussian" ||
      name == "axis_bump")
    return RingNorms::constant(amp);
  if (name == "bump" || name == "odd_bump" || name == "power_bump") {
    RingNorms rings = RingNorms::constant(amp);
    const double radius = params.value("radius", 1.0);
    rings.support_max = 2.0 * radius;
    rings.norm = [amp, radius](double rho) { return 0.5 * rho <= radius ? amp : 0.0; };
    rings.pure_power = false;
    return rings;
  }
  throw std::invalid_argument("ring norms unavailable for field '" + name + "'");
}

json constants_table(const OperatorSpec& spec) {
  json blocks = json::array();
  for (int i = 0; i < spec.m(); ++i) {
    json b;
    b["i"] = i + 1;
    b["N"] = spec.grouping.dims[i];
    b["s"] = spec.s[i];
    b["a"] = spec.a[i];
    b["eta"] = eta(spec.grouping.dims[i], spec.s[i]);
    if (spec.s[i] < 1.0)
      b["c"] = kernel_constant(spec.grouping.dims[i], spec.s[i]);
    blocks.push_back(b);
  }
  json out;
  out["blocks"] = blocks;
  out["ctilde"] = ctilde(spec);
  out["C_o"] = tail_constant(spec);
  out["sigma"] = 2.0 * spec.s_min() - 1.0;
  out["s_min"] = spec.s_min();
  out["s_max"] = spec.s_max();
  out["a_min"] = spec.a_min();
  out["a_max"] = spec.a_max();
  return out;
}

std::string format_constants_table(const json& table) {
  std::ostringstream out;
  out.precision(12);
  out << "block  N      s        a        eta            c\n";
  for (const auto& b : table["blocks"]) {
    out << "  " << b["i"].get<int>() << "    " << b["N"].get<int>() << "   "
        << b["s"].get<double>() << "   " << b["a"].get<double>() << "   "
        << b["eta"].get<double>() << "   ";
    if (b.contains("c"))
      out << b["c"].get<double>();
    else
      out << "-";
    out << "\n";
  }
  out << "ctilde = " << table["ctilde"].get<double>() << "\n";
  out << "C_o    = " << table["C_o"].get<double>() << "\n";
  out << "sigma  = " << table["sigma"].get<double>() << "\n";
  out << "s_min  = " << table["s_min"].get<double>()
      << "   s_max = " << table["s_max"].get<double>() << "\n";
  out << "a_min  = " << table["a_min"].get<double>()
      << "   a_max = " << table["a_max"].get<double>() << "\n";
  return out.str();
}

json catalog_to_json() {
  json out = json::array();
  for (const auto& b : builtin_catalog()) {
    json params = json::object();
    for (const auto& p : b.params) {
      params[p.name] = {{"default", p.default_value},
                        {"required", p.required},
                        {"doc", p.doc}};
    }
    out.push_back({{"name", b.name}, {"doc", b.doc}, {"params", params}});
  }
  return out;
}

namespace {

LipschitzCase lipschitz_case_from_json(const json& jc) {
  LipschitzCase c;
  c.label = jc.value("label", "directional-lipschitz");
  c.spec = spec_from_json(jc.at("operator"));
  c.d = doubles_from(jc, "d");
  c.counts = ints_from(jc, "counts");
  c.quad = jc.contains("quadrature") ? quad_from_json(jc["quadrature"]) : QuadratureSpec{};
  c.osc_density = static_cast<int>(jc.value("osc_density", 48.0));
  c.f = field_from_json(jc.at("f"), c.spec.n());
  c.exterior = field_from_json(jc.at("exterior"), c.spec.n());
  return c;
}

TailCase tail_case_from_json(const json& jc) {
  TailCase c;
  c.label = jc.value("label", "ring-tail-bound");
  c.spec = spec_from_json(jc.at("operator"));
  c.R = number_from(jc, "R");
  c.quad = jc.contains("quadrature") ? quad_from_json(jc["quadrature"]) : QuadratureSpec{};
  c.sample_density = static_cast<int>(jc.value("sample_density", 33.0));
  c.w = field_from_json(jc.at("w"), c.spec.n());
  c.rings = ring_norms_for_field(jc.at("w"));
  return c;
}

RunOutcome run_bump_identity(const json& config) {
  std::vector<BumpIdentityCase> cases;
  for (const auto& jc : config.at("cases")) {
    BumpIdentityCase c;
    c.N = static_cast<int>(number_from(jc, "N"));
    c.s = number_from(jc, "s");
    c.d = number_from(jc, "d");
    c.tol = jc.value("tol", 1e-3);
    cases.push_back(c);
  }
  const json params = config.value("params", json::object());
  const int points = static_cast<int>(params.value("points_per_case", 10.0));
  const std::uint64_t seed = static_cast<std::uint64_t>(params.value("seed", 20240811.0));
  QuadratureSpec quad = config.contains("quadrature")
                            ? quad_from_json(config["quadrature"])
                            : QuadratureSpec{};

  EstimateReport rep = verify_bump_identity(cases, points, seed, quad);

  RunOutcome out;
  out.all_pass = rep.verdict;
  out.report["reports"] = json::array({report_to_json(rep)});
  std::ostringstream csv;
  csv << "case,deviation\n";
  csv.precision(17);
  for (const auto& [k, v] : rep.provenance)
    if (k.rfind("dev_", 0) == 0) csv << k << "," << v << "\n";
  out.series_csv = csv.str();
  return out;
}

template <typename Case, typename Fn>
std::vector<EstimateReport> run_cases(const std::vector<Case>& cases, Fn&& fn, int jobs) {
  std::vector<EstimateReport> reports(cases.size());
  if (jobs <= 1 || cases.size() <= 1) {
    for (size_t i = 0; i < cases.size(); ++i) reports[i] = fn(cases[i]);
    return reports;
  }
  std::vector<std::future<EstimateReport>> futures;
  futures.reserve(cases.size());
  for (size_t i = 0; i < cases.size(); ++i)
    futures.push_back(std::async(std::launch::async, fn, std::cref(cases[i])));
  for (size_t i = 0; i < cases.size(); ++i) reports[i] = futures[i].get();
  return reports;
}

RunOutcome reports_outcome(const std::vector<EstimateReport>& reports) {
  RunOutcome out;
  out.all_pass = true;
  out.report["reports"] = json::array();
  std::ostringstream csv;
  csv << EstimateReport::csv_header() << "\n";
  for (const auto& rep : reports) {
    out.report["reports"].push_back(report_to_json(rep));
    csv << rep.csv_row() << "\n";
    out.all_pass = out.all_pass && rep.verdict;
  }
  out.series_csv = csv.str();
  return out;
}

RunOutcome run_lipschitz(const json& config, int jobs) {
  std::vector<LipschitzCase> cases;
  for (const auto& jc : config.at("cases")) cases.push_back(lipschitz_case_from_json(jc));
  return reports_outcome(
      run_cases(cases, [](const LipschitzCase& c) { return verify_lipschitz(c); }, jobs));
}

RunOutcome run_tail(const json& config, int jobs) {
  std::vector<TailCase> cases;
  for (const auto& jc : config.at("cases")) cases.push_back(tail_case_from_json(jc));
  return reports_outcome(
      run_cases(cases, [](const TailCase& c) { return verify_tail(c); }, jobs));
}

RunOutcome run_rigidity(const json& config) {
  SweepConfig cfg;
  cfg.spec = spec_from_json(config.at("operator"));
  cfg.R_list = doubles_from(config, "R");
  for (const auto& jc : config.at("counts")) cfg.counts.push_back(jc.get<std::vector<int>>());
  cfg.quad = config.contains("quadrature") ? quad_from_json(config["quadrature"])
                                           : QuadratureSpec{};
  cfg.f = field_from_json(config.at("f"), cfg.spec.n());
  cfg.exterior = field_from_json(config.at("exterior"), cfg.spec.n());

  SweepResult res = rigidity_sweep(cfg);

  RunOutcome out;
  json entries = json::array();
  std::ostringstream csv;
  csv << "R,quotient,rhs_bound,slack\n";
  csv.precision(17);
  for (const auto& e : res.entries) {
    entries.push_back({{"R", e.R},
                       {"quotient", e.quotient},
                       {"rhs_bound", e.rhs_bound},
                       {"slack", e.slack}});
    csv << e.R << "," << e.quotient << "," << e.rhs_bound << "," << e.slack << "\n";
  }
  out.report["entries"] = entries;
  out.report["fitted_exponent"] = res.fitted_exponent;
  out.report["quotient_decreasing"] = res.quotient_decreasing;
  out.report["bound_decreasing"] = res.bound_decreasing;
  out.report["notes"] = res.notes;
  out.series_csv = csv.str();
  out.all_pass = res.quotient_decreasing && res.bound_decreasing;
  return out;
}

RunOutcome run_second_derivative(const json& config) {
  SecondDerivativeCase cfg;
  cfg.spec = spec_from_json(config.at("operator"));
  cfg.counts = ints_from(config, "counts");
  cfg.quad = config.contains("quadrature") ? quad_from_json(config["quadrature"])
                                           : QuadratureSpec{};
  cfg.f = field_from_json(config.at("f"), cfg.spec.n());
  cfg.exterior = field_from_json(config.at("exterior"), cfg.spec.n());
  if (config.contains("f_dxn_lipschitz"))
    cfg.f_dxn_lipschitz = number_from(config, "f_dxn_lipschitz");
  EstimateReport rep = second_derivative_bound(cfg);
  return reports_outcome({rep});
}

RunOutcome run_non_additivity(const json& config) {
  const json params = config.value("params", json::object());
  const double s = params.value("s", 0.5);
  QuadratureSpec quad = config.contains("quadrature")
                            ? quad_from_json(config["quadrature"])
                            : QuadratureSpec{};
  ScalarField field = field_from_json(config.at("field"), 2);
  NonAdditivityReport rep = non_additivity_demo(s, field, quad);

  RunOutcome out;
  out.all_pass = rep.pass;
  out.report["reports"] = json::array({json{{"name", "non-additivity"},
                                            {"directional_sum", rep.directional_sum},
                                            {"isotropic", rep.isotropic},
                                            {"gap", rep.gap},
                                            {"uncertainty", rep.uncertainty},
                                            {"ratio", rep.ratio},
                                            {"verdict", rep.pass ? "pass" : "fail"}}});
  std::ostringstream csv;
  csv.precision(17);
  csv << "name,gap,uncertainty,ratio,verdict\n";
  csv << "non-additivity," << rep.gap << "," << rep.uncertainty << "," << rep.ratio << ","
      << (rep.pass ? "pass" : "fail") << "\n";
  out.series_csv = csv.str();
  return out;
}

}  // namespace

RunOutcome run_config(const json& config, int jobs) {
  if (!config.is_object()) throw std::invalid_argument("config: object expected");
  if (config.value("v", 0) != 1)
    throw std::invalid_argument("config: schema version field \"v\": 1 required");
  const std::string experiment = config.value("experiment", "");

  RunOutcome out;
  if (experiment == "bump-identity")
    out = run_bump_identity(config);
  else if (experiment == "lipschitz")
    out = run_lipschitz(config, jobs);
  else if (experiment == "tail")
    out = run_tail(config, jobs);
  else if (experiment == "rigidity")
    out = run_rigidity(config);
  else if (experiment == "second-derivative")
    out = run_second_derivative(config);
  else if (experiment == "non-additivity")
    out = run_non_additivity(config);
  else
    throw std::invalid_argument("config: unknown experiment '" + experiment + "'");

  out.report["v"] = 1;
  out.report["experiment"] = experiment;
  out.report["all_pass"] = out.all_pass;
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " to " + path);
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace aniso
