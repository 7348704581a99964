#include "napp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace napp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, LossFamily family) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file: " + path);
  const auto header = split_csv_line(line);

  int y_col = -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == "y") y_col = static_cast<int>(i);
  if (y_col < 0)
    throw std::runtime_error("dataset CSV needs an outcome column named y");

  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) throw std::runtime_error("dataset CSV has no feature columns");

  std::vector<double> ys;
  std::vector<double> xs;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("row " + std::to_string(row) +
                               " has wrong field count");
    for (size_t i = 0; i < fields.size(); ++i) {
      const double v = std::stod(fields[i]);
      if (static_cast<int>(i) == y_col)
        ys.push_back(v);
      else
        xs.push_back(v);
    }
  }
  if (ys.empty()) throw std::runtime_error("dataset CSV has no data rows");

  Dataset out;
  out.family = family;
  const int n = static_cast<int>(ys.size());
  out.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  out.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) out.X(i, j) = xs[i * p + j];
  validate_outcomes(out);
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  out << "y";
  for (Eigen::Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
  out << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", data.y(i));
    out << buf;
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

FlatConfig FlatConfig::parse_string(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section noise
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    // strip optional quotes and brackets
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']')
      value = trim(value.substr(1, value.size() - 2));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    cfg.entries_[key] = value;
  }
  return cfg;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool FlatConfig::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string FlatConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::runtime_error("missing config key: " + key);
  return it->second;
}

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double FlatConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(v);
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long FlatConfig::get_int(const std::string& key) const {
  return std::stol(get_string(key));
}

long FlatConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config key " + key + " is not a boolean");
}

std::vector<std::string> FlatConfig::get_strings(
    const std::string& key) const {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(get_string(key));
  while (in >> token) {
    while (!token.empty() && (token.back() == ',')) token.pop_back();
    std::string t = token;
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
      t = t.substr(1, t.size() - 2);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<double> FlatConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : get_strings(key)) {
    if (s == "inf")
      out.push_back(std::numeric_limits<double>::infinity());
    else
      out.push_back(std::stod(s));
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json budget_to_json(const PrivacyBudget& b) {
  json j;
  j["epsilon"] = std::isfinite(b.epsilon) ? json(b.epsilon) : json("inf");
  j["delta"] = b.delta;
  j["r"] = b.r;
  j["delta_eps"] = b.delta_eps;
  return j;
}

PrivacyBudget budget_from_json(const json& j) {
  PrivacyBudget b;
  b.epsilon = j["epsilon"].is_string()
                  ? std::numeric_limits<double>::infinity()
                  : j["epsilon"].get<double>();
  b.delta = j["delta"].get<double>();
  b.r = j["r"].get<double>();
  b.delta_eps = j.value("delta_eps", 0.0);
  return b;
}

json regularizer_to_json(const RegularizerTarget& r) {
  json j;
  j["kind"] = penalty_name(r.kind);
  j["gamma"] = r.gamma;
  j["kappa"] = r.kappa;
  j["lambda"] = r.lambda;
  j["lambda0"] = r.lambda0;
  j["moor"] = r.moor;
  return j;
}

RegularizerTarget regularizer_from_json(const json& j) {
  RegularizerTarget r;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ridge")
    r.kind = PenaltyKind::ridge;
  else if (kind == "bridge")
    r.kind = PenaltyKind::bridge;
  else if (kind == "elastic_net")
    r.kind = PenaltyKind::elastic_net;
  else
    throw std::runtime_error("unknown penalty kind: " + kind);
  r.gamma = j["gamma"].get<double>();
  r.kappa = j["kappa"].get<double>();
  r.lambda = j["lambda"].get<double>();
  r.lambda0 = j["lambda0"].get<double>();
  r.moor = j["moor"].get<bool>();
  return r;
}

json solver_config_to_json(const SolverConfig& c) {
  json j;
  j["max_outer"] = c.max_outer;
  j["inner_tol"] = c.inner_tol;
  j["inner_max"] = c.inner_max;
  j["outer_tol"] = c.outer_tol;
  j["window"] = c.window;
  j["mode"] = fit_mode_name(c.mode);
  j["tau_zero"] = c.tau_zero;
  if (std::isnan(c.trunc_c))
    j["trunc_c"] = nullptr;
  else if (std::isinf(c.trunc_c))
    j["trunc_c"] = "-inf";
  else
    j["trunc_c"] = c.trunc_c;
  return j;
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig c;
  c.max_outer = j["max_outer"].get<int>();
  c.inner_tol = j["inner_tol"].get<double>();
  c.inner_max = j["inner_max"].get<int>();
  c.outer_tol = j["outer_tol"].get<double>();
  c.window = j["window"].get<int>();
  c.mode = fit_mode_from_name(j["mode"].get<std::string>());
  c.tau_zero = j["tau_zero"].get<double>();
  if (j["trunc_c"].is_null())
    c.trunc_c = std::numeric_limits<double>::quiet_NaN();
  else if (j["trunc_c"].is_string())
    c.trunc_c = -std::numeric_limits<double>::infinity();
  else
    c.trunc_c = j["trunc_c"].get<double>();
  return c;
}

json fit_result_to_json(const FitResult& fit) {
  json j;
  j["theta_hat"] = to_json(fit.theta_hat);
  j["converged"] = fit.converged;
  j["iterations_used"] = fit.iterations_used;
  json trace = json::array();
  for (const auto& rec : fit.trace) {
    json t;
    t["loss"] = rec.loss;
    t["theta"] = to_json(rec.theta);
    trace.push_back(std::move(t));
  }
  j["trace"] = std::move(trace);
  j["budget"] = budget_to_json(fit.budget);

  json noise;
  noise["mechanism"] = mechanism_name(fit.noise.mechanism);
  if (std::isnan(fit.noise.trunc_c))
    noise["trunc_c"] = nullptr;
  else if (std::isinf(fit.noise.trunc_c))
    noise["trunc_c"] = "-inf";
  else
    noise["trunc_c"] = fit.noise.trunc_c;
  noise["scale"] = fit.noise.scale;
  noise["b"] = to_json(fit.noise.b);
  noise["e_star_base"] = to_json(fit.noise.e_star_base);
  noise["seed"] = fit.noise.seed;
  noise["stream"] = fit.noise.stream;
  j["noise"] = std::move(noise);

  j["v_final"] = to_json(fit.v_final);
  j["lp0"] = fit.lp0;
  j["lpp0"] = fit.lpp0;
  j["e_y"] = fit.e_y;
  j["n_e"] = fit.n_e;
  j["mode"] = fit_mode_name(fit.mode);
  return j;
}

FitResult fit_result_from_json(const json& j) {
  FitResult fit;
  fit.theta_hat = vector_from_json(j["theta_hat"]);
  fit.converged = j["converged"].get<bool>();
  fit.iterations_used = j["iterations_used"].get<int>();
  for (const auto& t : j["trace"]) {
    IterationRecord rec;
    rec.loss = t["loss"].get<double>();
    rec.theta = vector_from_json(t["theta"]);
    fit.trace.push_back(std::move(rec));
  }
  fit.budget = budget_from_json(j["budget"]);
  const auto& noise = j["noise"];
  fit.noise.mechanism =
      mechanism_from_name(noise["mechanism"].get<std::string>());
  if (noise["trunc_c"].is_null())
    fit.noise.trunc_c = std::numeric_limits<double>::quiet_NaN();
  else if (noise["trunc_c"].is_string())
    fit.noise.trunc_c = -std::numeric_limits<double>::infinity();
  else
    fit.noise.trunc_c = noise["trunc_c"].get<double>();
  fit.noise.scale = noise["scale"].get<double>();
  fit.noise.b = vector_from_json(noise["b"]);
  fit.noise.e_star_base = vector_from_json(noise["e_star_base"]);
  fit.noise.seed = noise["seed"].get<std::uint64_t>();
  fit.noise.stream = noise["stream"].get<std::uint64_t>();
  fit.v_final = vector_from_json(j["v_final"]);
  fit.lp0 = j["lp0"].get<double>();
  fit.lpp0 = j["lpp0"].get<double>();
  fit.e_y = j["e_y"].get<double>();
  fit.n_e = j["n_e"].get<int>();
  fit.mode = fit_mode_from_name(j["mode"].get<std::string>());
  return fit;
}

json retrieval_report_to_json(const RetrievalReport& r) {
  json j;
  json rounds = json::array();
  for (const auto& rd : r.rounds) {
    json q;
    q["delta_eps"] = rd.delta_eps;
    q["lambda0_before"] = rd.lambda0_before;
    q["lambda0_after"] = rd.lambda0_after;
    q["e_star_norm"] = rd.e_star_norm;
    q["iterations"] = rd.iterations;
    q["converged"] = rd.converged;
    rounds.push_back(std::move(q));
  }
  j["rounds"] = std::move(rounds);
  j["delta_eps_cumulative"] = r.delta_eps_cumulative;
  j["choice"] = recycle_choice_name(r.choice);
  j["final_theta"] = to_json(r.final_theta);
  j["warning_nonconverged"] = r.warning_nonconverged;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace napp
