#include "tnconf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace tnconf {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

const Json& array_field(const Json& j, const char* key, const std::string& where) {
  const Json& a = field(j, key, where);
  if (!a.is_array()) throw SchemaError(where + "." + key + ": expected an array");
  return a;
}

std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

Json bools(const std::vector<bool>& v) {
  Json out = Json::array();
  for (bool b : v) out.push_back(b);
  return out;
}

Json index_or_null(const std::optional<std::size_t>& i) {
  return i ? Json(*i + 1) : Json(nullptr);
}

}  // namespace

Json rat_to_json(const Rat& r) { return to_string(r); }

Rat rat_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return parse_rat(std::to_string(j.get<long long>()));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": expected a rational string or an integer");
}

Json vector_to_json(const RatVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(rat_to_json(x));
  return out;
}

RatVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  RatVector out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rat_from_json(j[i], at(where, i)));
  return out;
}

Json matrix_to_json(const RatMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i)));
  return out;
}

RatMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw SchemaError(where + ": rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  RatMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    RatVector row = vector_from_json(j[i], at(where, i));
    if (row.size() != cols) throw SchemaError(at(where, i) + ": ragged row");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = row[c];
  }
  return m;
}

Json matrices_to_json(const std::vector<RatMatrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<RatMatrix> matrices_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of matrices");
  std::vector<RatMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], at(where, i)));
  return out;
}

Json tn_config_to_json(const TNConfig& cfg) {
  return Json{{"N", cfg.N()}, {"P", matrix_to_json(cfg.P)}, {"C", matrices_to_json(cfg.C)}, {"k", vector_to_json(cfg.k)}};
}

TNConfig tn_config_from_json(const Json& j) {
  TNConfig cfg;
  cfg.P = matrix_from_json(field(j, "P", "config"), "config.P");
  cfg.C = matrices_from_json(array_field(j, "C", "config"), "config.C");
  cfg.k = vector_from_json(field(j, "k", "config"), "config.k");
  if (j.contains("N") && (!j["N"].is_number_unsigned() || j["N"].get<std::size_t>() != cfg.N())) {
    throw SchemaError("config.N disagrees with the number of arms");
  }
  try {
    cfg.check_shape();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return cfg;
}

Json points_to_json(const TNPointSet& points) { return Json{{"X", matrices_to_json(points.X)}}; }

TNPointSet points_from_json(const Json& j) {
  TNPointSet p;
  p.X = matrices_from_json(array_field(j, "X", "points"), "points.X");
  for (std::size_t i = 1; i < p.X.size(); ++i) {
    if (!p.X[i].same_shape(p.X[0])) throw SchemaError("points.X: matrices of different shapes");
  }
  return p;
}

Json stacked_to_json(const StackedMatrix& s) {
  return Json{{"X", matrix_to_json(s.X)}, {"Y", matrix_to_json(s.Y)}, {"Z", matrix_to_json(s.Z)}};
}

StackedMatrix stacked_from_json(const Json& j, const std::string& where) {
  StackedMatrix s{matrix_from_json(field(j, "X", where), where + ".X"),
                  matrix_from_json(field(j, "Y", where), where + ".Y"),
                  matrix_from_json(field(j, "Z", where), where + ".Z")};
  try {
    s.check_shape();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return s;
}

Json witness_to_json(const WaveConeWitness& w) { return Json{{"u", vector_to_json(w.u)}, {"xi", vector_to_json(w.xi)}}; }

WaveConeWitness witness_from_json(const Json& j, const std::string& where) {
  return WaveConeWitness{vector_from_json(field(j, "xi", where), where + ".xi"),
                         vector_from_json(field(j, "u", where), where + ".u")};
}

Json tnprime_to_json(const TNPrimeConfig& cfg) {
  Json arms = Json::array(), wit = Json::array();
  for (const auto& a : cfg.arms) arms.push_back(stacked_to_json(a));
  for (const auto& w : cfg.witnesses) wit.push_back(witness_to_json(w));
  return Json{{"N", cfg.N()}, {"base", stacked_to_json(cfg.base)}, {"arms", arms}, {"k", vector_to_json(cfg.k)},
              {"witnesses", wit}};
}

TNPrimeConfig tnprime_from_json(const Json& j) {
  TNPrimeConfig cfg;
  cfg.base = stacked_from_json(field(j, "base", "tnprime"), "tnprime.base");
  const Json& arms = array_field(j, "arms", "tnprime");
  for (std::size_t i = 0; i < arms.size(); ++i) cfg.arms.push_back(stacked_from_json(arms[i], at("tnprime.arms", i)));
  cfg.k = vector_from_json(field(j, "k", "tnprime"), "tnprime.k");
  if (j.contains("witnesses")) {
    const Json& w = array_field(j, "witnesses", "tnprime");
    for (std::size_t i = 0; i < w.size(); ++i) cfg.witnesses.push_back(witness_from_json(w[i], at("tnprime.witnesses", i)));
  }
  try {
    cfg.check_shape();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("tnprime: ") + e.what());
  }
  return cfg;
}

Json energy_to_json(const PolyconvexEnergy& e) {
  Json out{{"family", family_name(e.family())}, {"shape", Json::array({e.rows(), e.cols()})}};
  if (e.family() == EnergyFamily::quad_minors) {
    out["epsilon"] = rat_to_json(e.epsilon());
    Json alpha = Json::object();
    for (const auto& [z, a] : e.alpha()) alpha[z.key()] = rat_to_json(a);
    out["alpha"] = alpha;
  }
  return out;
}

PolyconvexEnergy energy_from_json(const Json& j, std::size_t n, std::size_t m) {
  const Json& fam = field(j, "family", "energy");
  if (!fam.is_string()) throw SchemaError("energy.family: expected a string");
  if (j.contains("shape")) {
    const Json& s = j["shape"];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned()) {
      throw SchemaError("energy.shape: expected [n, m]");
    }
    n = s[0].get<std::size_t>();
    m = s[1].get<std::size_t>();
  }
  if (n == 0 || m == 0) throw SchemaError("energy: shape unknown");
  const std::string name = fam.get<std::string>();
  if (name == "quadratic") return PolyconvexEnergy::quadratic(n, m);
  if (name == "area") return PolyconvexEnergy::area(n, m);
  if (name == "quad_minors") {
    Rat eps = rat_from_json(field(j, "epsilon", "energy"), "energy.epsilon");
    std::map<MultiIndex, Rat> alpha;
    if (j.contains("alpha")) {
      if (!j["alpha"].is_object()) throw SchemaError("energy.alpha: expected an object");
      for (const auto& [key, value] : j["alpha"].items()) {
        try {
          alpha[MultiIndex::parse_key(key)] = rat_from_json(value, "energy.alpha." + key);
        } catch (const std::invalid_argument& e) {
          throw SchemaError("energy.alpha: bad key '" + key + "': " + e.what());
        }
      }
    }
    try {
      return PolyconvexEnergy::quad_minors(n, m, eps, alpha);
    } catch (const std::exception& e) {
      throw SchemaError(std::string("energy: ") + e.what());
    }
  }
  throw SchemaError("energy.family: unknown family '" + name + "'");
}

PolyconvexEnergy energy_from_json(const Json& j) { return energy_from_json(j, 0, 0); }

Json tn_verdict_to_json(const TNVerdict& v) {
  Json rel = Json::array();
  for (const auto& r : v.relation_residuals) rel.push_back(matrix_to_json(r));
  Json out{{"arm_rank_one", bools(v.arm_rank_one)},
           {"closing_residual", matrix_to_json(v.closing_residual)},
           {"relation_residuals", rel},
           {"k_above_one", bools(v.k_above_one)},
           {"nondegenerate", v.nondegenerate},
           {"two_arm", v.two_arm},
           {"first_failed_relation", index_or_null(v.first_failed_relation())},
           {"passed", v.passed()}};
  out["distinct"] = v.distinct ? Json(*v.distinct) : Json(nullptr);
  return out;
}

Json kernel_check_to_json(const KernelCheck& k) {
  Json out{{"passed", k.passed}, {"minors_checked", k.minors_checked}};
  if (k.first_failure) {
    out["first_failure"] = k.first_failure->key();
    out["failure_product"] = vector_to_json(k.failure_product);
  } else {
    out["first_failure"] = nullptr;
  }
  return out;
}

Json tnprime_verdict_to_json(const TNPrimeVerdict& v) {
  Json rel = Json::array();
  for (const auto& r : v.relation_residuals) rel.push_back(stacked_to_json(r));
  return Json{{"relation_residuals", rel},
              {"closing_residual", stacked_to_json(v.closing_residual)},
              {"arm_in_cone", bools(v.arm_in_cone)},
              {"cone_reason", v.cone_reason},
              {"witness_valid", bools(v.witness_valid)},
              {"k_above_one", bools(v.k_above_one)},
              {"stacked_distinct", v.stacked_distinct},
              {"x_blocks_distinct", v.x_blocks_distinct},
              {"nondegenerate", v.nondegenerate},
              {"first_failed_relation", index_or_null(v.first_failed_relation())},
              {"first_cone_failure", index_or_null(v.first_cone_failure())},
              {"passed", v.passed()}};
}

Json structural_to_json(const StructuralVerdict& v) {
  Json out{{"arm_factorizes", bools(v.arm_factorizes)},
           {"orthogonality", vector_to_json(v.orthogonality)},
           {"passed", v.passed()}};
  out["x_blocks_induce_tn"] = v.x_blocks_induce_tn ? Json(*v.x_blocks_induce_tn) : Json(nullptr);
  return out;
}

Json certificate_to_json(const Certificate& c) {
  Json a = Json::array(), basis = Json::array();
  for (auto i : c.A) a.push_back(i + 1);
  for (const auto& b : c.basis) basis.push_back(vector_to_json(b));
  return Json{{"verdict", verdict_name(c.verdict)},
              {"detail", c.detail},
              {"A", a},
              {"xi", vector_to_json(c.xi)},
              {"nu", vector_to_json(c.nu)},
              {"c", vector_to_json(c.c)},
              {"basis", basis},
              {"representation", c.representation.rows() ? matrix_to_json(c.representation) : Json::array()},
              {"weighted_sum", rat_to_json(c.weighted_sum)},
              {"trace_r", rat_to_json(c.trace_r)},
              {"trace_residual", rat_to_json(c.trace_residual)},
              {"triangular", c.triangular},
              {"normalized_input", c.normalized_input},
              {"all_nu_positive", c.all_nu_positive()}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump(j);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tnconf
