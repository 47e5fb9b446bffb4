#include "wrinkle/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wrinkle {

namespace {

json dump_array(const ArrayXd& a) {
  json out = json::array();
  for (int i = 0; i < a.size(); ++i) out.push_back(a[i]);
  return out;
}

ArrayXd load_array(const json& j) {
  ArrayXd out(j.size());
  for (size_t i = 0; i < j.size(); ++i) out[i] = j[i].get<double>();
  return out;
}

// modes-major (row-major with one row per mode)
json dump_matrix(const ArrayXXd& m) {
  json out = json::array();
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) out.push_back(m(r, c));
  return out;
}

ArrayXXd load_matrix(const json& j, int rows, int cols) {
  if (static_cast<int>(j.size()) != rows * cols)
    throw std::invalid_argument("matrix payload has wrong length");
  ArrayXXd m(rows, cols);
  size_t idx = 0;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = j[idx++].get<double>();
  return m;
}

}  // namespace

json to_json(const CoefficientField& f) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["L"] = f.freq().half_period();
  j["mode_cap"] = f.freq().mode_cap();
  j["x_nodes"] = dump_array(f.grid().nodes());
  j["modes"] = f.modes();
  j["amplitudes"] = dump_matrix(f.amp());
  return j;
}

CoefficientField coefficient_field_from_json(const json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("unsupported schema version");
  FrequencyGrid freq(j.at("L").get<double>(), j.at("mode_cap").get<int>());
  const ArrayXd nodes = load_array(j.at("x_nodes"));
  XGrid grid = XGrid::from_nodes({nodes.data(), nodes.data() + nodes.size()});
  std::vector<int> modes = j.at("modes").get<std::vector<int>>();
  ArrayXXd amp = load_matrix(j.at("amplitudes"), grid.size(),
                             static_cast<int>(modes.size()));
  return CoefficientField(freq, grid, std::move(modes), std::move(amp));
}

json to_json(const EnergySample& e) {
  json j;
  j["total"] = e.total;
  j["membrane"] = e.membrane;
  j["bending"] = e.bending;
  j["density"] = dump_array(e.density);
  return j;
}

json to_json(const MuTable& t) {
  json j;
  j["modes"] = t.modes;
  j["values"] = dump_matrix(t.value);
  json act = json::array();
  for (int c = 0; c < t.active.cols(); ++c)
    for (int r = 0; r < t.active.rows(); ++r) act.push_back(t.active(r, c) ? 1 : 0);
  j["active"] = act;
  return j;
}

json to_json(const MultiplierRecovery& r) {
  json j;
  j["lambda"] = dump_array(r.lambda);
  j["mu_atom"] = r.mu_atom;
  j["mu_atom_spread"] = r.mu_atom_spread;
  j["skipped_nodes"] = r.skipped_nodes;
  json per = json::array();
  for (const auto& [m, mu] : r.per_mode_mu1) per.push_back({{"mode", m}, {"mu", mu}});
  j["per_mode_mu1"] = per;
  return j;
}

json to_json(const ElResidual& r) {
  json j;
  j["interior_aggregate"] = r.interior_aggregate;
  j["boundary_aggregate"] = r.boundary_aggregate;
  json per = json::array();
  for (const auto& m : r.per_mode)
    per.push_back({{"mode", m.mode},
                   {"interior_rel", m.interior_rel},
                   {"boundary_rel", m.boundary_rel},
                   {"mass", m.mass}});
  j["per_mode"] = per;
  return j;
}

json to_json(const SolveResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["field"] = to_json(r.field);
  j["sigma_estimate"] = r.sigma_estimate;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["grad_norm"] = r.grad_norm;
  j["constraint_max"] = r.constraint_max;
  j["restarts_used"] = r.restarts_used;
  j["init_source"] = r.init_source;
  j["multiplier"] = to_json(r.multiplier);
  j["mu"] = to_json(r.mu);
  j["el"] = to_json(r.el);
  return j;
}

SolveResult solve_result_from_json(const json& j) {
  SolveResult r{coefficient_field_from_json(j.at("field"))};
  r.sigma_estimate = j.at("sigma_estimate").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.constraint_max = j.at("constraint_max").get<double>();
  r.restarts_used = j.at("restarts_used").get<int>();
  r.init_source = j.at("init_source").get<std::string>();
  r.multiplier.lambda = load_array(j.at("multiplier").at("lambda"));
  r.multiplier.mu_atom = j.at("multiplier").at("mu_atom").get<double>();
  r.multiplier.mu_atom_spread = j.at("multiplier").at("mu_atom_spread").get<double>();
  r.mu = compute_mu(r.field);
  r.el = el_residual(r.field, r.multiplier.lambda, r.multiplier.mu_atom);
  return r;
}

json to_json(const CheckReport& r) {
  json items = json::array();
  for (const auto& it : r.items)
    items.push_back({{"name", it.name},
                     {"pass", it.pass},
                     {"margin", it.margin},
                     {"observed", it.observed},
                     {"detail", it.detail}});
  return json{{"schema_version", kSchemaVersion}, {"items", items},
              {"all_pass", r.all_pass()}};
}

json to_json(const RegularityReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"moment", e.name},
                       {"envelope", e.envelope},
                       {"fitted_constant", e.fitted_constant},
                       {"at_x", e.at_x}});
  return json{{"schema_version", kSchemaVersion}, {"x_lo", r.x_lo},
              {"entries", entries}};
}

json to_json(const EnergyBreakdown& e) {
  return json{{"t1a", e.t1a}, {"t1b", e.t1b}, {"t1c", e.t1c}, {"t2", e.t2},
              {"t3", e.t3},   {"t4", e.t4},   {"t5", e.t5},
              {"total", e.total()}};
}

json to_json(const DeformationField& d) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["L"] = d.L;
  j["Lp"] = d.Lp;
  j["nx"] = d.nx();
  j["ny"] = d.ny();
  j["k_max_hint"] = d.k_max_hint;
  j["w1"] = dump_matrix(d.w1);
  j["w2"] = dump_matrix(d.w2);
  j["u3"] = dump_matrix(d.u3);
  return j;
}

DeformationField deformation_from_json(const json& j) {
  DeformationField d;
  d.L = j.at("L").get<double>();
  d.Lp = j.at("Lp").get<double>();
  const int nx = j.at("nx").get<int>();
  const int ny = j.at("ny").get<int>();
  d.k_max_hint = j.at("k_max_hint").get<double>();
  d.x.setLinSpaced(nx + 1, -1.0, 1.0);
  d.y.setLinSpaced(ny + 1, -d.Lp, d.Lp);
  d.w1 = load_matrix(j.at("w1"), nx + 1, ny + 1);
  d.w2 = load_matrix(j.at("w2"), nx + 1, ny + 1);
  d.u3 = load_matrix(j.at("u3"), nx + 1, ny + 1);
  return d;
}

json to_json(const RepairBudget& b) {
  json j;
  j["eta"] = b.eta;
  j["penalty"] = b.penalty_value;
  j["energy_in"] = b.energy_in;
  j["energy_c"] = b.energy_c;
  j["energy_d"] = b.energy_d;
  j["energy_out"] = b.energy_out;
  j["delta_hat"] = b.delta_hat;
  j["deficit_max"] = b.deficit_max;
  j["deficit_fit"] = b.deficit_fit;
  j["feasibility_margin"] = b.feasibility_margin;
  j["comp_l_eta_32"] = b.comp_l_eta_32;
  j["comp_eta_23"] = b.comp_eta_23;
  j["comp_l_eta_56"] = b.comp_l_eta_56;
  return j;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace wrinkle
