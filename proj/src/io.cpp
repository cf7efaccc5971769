#include "karcher/io.hpp"

#include <fstream>
#include <sstream>

namespace karcher {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw InputError(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

}  // namespace

Json to_json(const SymMatrix& m) {
  const int n = m.dim();
  Json data = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) data.push_back(m(i, j));
  return Json{{"n", n}, {"data", std::move(data)}};
}

Json to_json(const SpdMatrix& m) { return to_json(m.sym()); }

Json to_json(const DiscreteMeasure& mu) {
  Json atoms = Json::array();
  for (const SpdMatrix& a : mu.atoms()) atoms.push_back(to_json(a));
  return Json{{"atoms", std::move(atoms)}, {"weights", mu.weights()}};
}

Json to_json(const SolveReport& r) {
  Json j{{"iterations", r.iterations}, {"residual", r.residual}};
  j["certified_bound"] = r.certified_bound ? Json(*r.certified_bound) : Json(nullptr);
  return j;
}

Json to_json(const SolverConfig& cfg) {
  return Json{{"tol", cfg.tol},
              {"max_iter", cfg.max_iter},
              {"power_t_start", cfg.power_t_start},
              {"power_t_shrink", cfg.power_t_shrink},
              {"damping", cfg.damping}};
}

Json to_json(const FlowResult& r) {
  return Json{{"state", to_json(r.state)}, {"n_used", r.n_used}, {"error_bound", r.error_bound}};
}

Json to_json(const W1Result& r) {
  Json plan = Json::array();
  for (Eigen::Index i = 0; i < r.coupling.plan.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < r.coupling.plan.cols(); ++j) row.push_back(r.coupling.plan(i, j));
    plan.push_back(std::move(row));
  }
  return Json{{"w1", r.cost}, {"coupling", std::move(plan)}};
}

Json to_json(const SpdLaw& law) {
  if (law.is_finite()) return Json{{"kind", "finite"}, {"measure", to_json(law.as_finite().measure)}};
  const LogGaussianLaw& g = law.as_log_gaussian();
  return Json{{"kind", "log_gaussian"}, {"base", to_json(g.base)}, {"scale", g.scale}};
}

SymMatrix sym_from_json(const Json& j) {
  const Json& jn = field(j, "n");
  if (!jn.is_number_integer() || jn.get<long long>() <= 0) {
    throw InputError("matrix field \"n\" must be a positive integer");
  }
  const long long n = jn.get<long long>();
  if (n > 4096) throw InputError("matrix dimension is unreasonably large");
  const Json& data = field(j, "data");
  if (!data.is_array()) throw InputError("matrix field \"data\" must be an array");
  if (data.size() != static_cast<std::size_t>(n * n)) {
    throw InputError("matrix field \"data\" has " + std::to_string(data.size()) +
                     " entries, expected " + std::to_string(n * n));
  }
  std::vector<double> values;
  values.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    values.push_back(number(data[k], "matrix entry " + std::to_string(k)));
  }
  Matrix m(n, n);
  for (long long r = 0; r < n; ++r)
    for (long long c = 0; c < n; ++c) m(r, c) = values[static_cast<std::size_t>(r * n + c)];
  try {
    return SymMatrix(m);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

SpdMatrix spd_from_json(const Json& j) {
  try {
    return SpdMatrix(sym_from_json(j));
  } catch (const NotPositiveDefinite& e) {
    throw InputError(e.what());
  }
}

DiscreteMeasure measure_from_json(const Json& j) {
  const Json& atoms = field(j, "atoms");
  if (!atoms.is_array() || atoms.empty()) throw InputError("\"atoms\" must be a nonempty array");
  std::vector<SpdMatrix> mats;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    try {
      mats.push_back(spd_from_json(atoms[k]));
    } catch (const InputError& e) {
      throw InputError("atom " + std::to_string(k) + ": " + e.what());
    }
  }
  std::vector<double> weights(mats.size(), 1.0);
  if (j.contains("weights")) {
    const Json& w = j["weights"];
    if (!w.is_array() || w.size() != mats.size()) {
      throw InputError("\"weights\" must be an array with one entry per atom");
    }
    for (std::size_t k = 0; k < w.size(); ++k) weights[k] = number(w[k], "weight " + std::to_string(k));
  }
  try {
    return DiscreteMeasure(std::move(mats), std::move(weights));
  } catch (const DimensionMismatch& e) {
    throw InputError(e.what());
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

SpdLaw law_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (kind == "finite") return SpdLaw::finite(measure_from_json(field(j, "measure")));
  if (kind == "log_gaussian") {
    SpdMatrix base = [&] {
      try {
        return spd_from_json(field(j, "base"));
      } catch (const InputError& e) {
        throw InputError(std::string("base: ") + e.what());
      }
    }();
    const double scale = number(field(j, "scale"), "scale");
    try {
      return SpdLaw::log_gaussian(std::move(base), scale);
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }
  throw InputError("law field \"kind\" must be \"finite\" or \"log_gaussian\"");
}

SolverConfig config_from_json(const Json& j, SolverConfig base) {
  if (!j.is_object()) throw InputError("solver config must be a JSON object");
  if (j.contains("tol")) base.tol = number(j["tol"], "tol");
  if (j.contains("max_iter")) {
    if (!j["max_iter"].is_number_integer()) throw InputError("max_iter must be an integer");
    base.max_iter = j["max_iter"].get<int>();
  }
  if (j.contains("power_t_start")) base.power_t_start = number(j["power_t_start"], "power_t_start");
  if (j.contains("power_t_shrink")) base.power_t_shrink = number(j["power_t_shrink"], "power_t_shrink");
  if (j.contains("damping")) base.damping = number(j["damping"], "damping");
  try {
    base.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return base;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::string msg = e.what();
    // Drop the library's own "[json.exception.parse_error.101] parse error at ..." prefix.
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

}  // namespace karcher
