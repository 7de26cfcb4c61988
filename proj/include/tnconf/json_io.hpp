#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tnconf/obstruction.hpp"
#include "tnconf/polyconvex.hpp"

namespace tnconf {

using Json = nlohmann::json;

/// Malformed or incomplete input document.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rationals travel as "p/q" or integer strings; plain JSON integers are
/// accepted on input.
Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j, const std::string& where);
Json vector_to_json(const RatVector& v);
RatVector vector_from_json(const Json& j, const std::string& where);
/// Row-major nested arrays.
Json matrix_to_json(const RatMatrix& m);
RatMatrix matrix_from_json(const Json& j, const std::string& where);
Json matrices_to_json(const std::vector<RatMatrix>& ms);
std::vector<RatMatrix> matrices_from_json(const Json& j, const std::string& where);

/// {"N", "P", "C", "k"}.
Json tn_config_to_json(const TNConfig& cfg);
TNConfig tn_config_from_json(const Json& j);
/// {"X": [...]}.
Json points_to_json(const TNPointSet& points);
TNPointSet points_from_json(const Json& j);

/// {"X", "Y", "Z"}.
Json stacked_to_json(const StackedMatrix& s);
StackedMatrix stacked_from_json(const Json& j, const std::string& where);
/// {"xi", "u"}.
Json witness_to_json(const WaveConeWitness& w);
WaveConeWitness witness_from_json(const Json& j, const std::string& where);
/// {"N", "base", "arms", "k", "witnesses"}.
Json tnprime_to_json(const TNPrimeConfig& cfg);
TNPrimeConfig tnprime_from_json(const Json& j);

/// {"family", "shape", "epsilon", "alpha": {"I:J": "p/q"}}. The shape in the
/// document wins over the fallback.
Json energy_to_json(const PolyconvexEnergy& e);
PolyconvexEnergy energy_from_json(const Json& j, std::size_t n, std::size_t m);
PolyconvexEnergy energy_from_json(const Json& j);

Json tn_verdict_to_json(const TNVerdict& v);
Json kernel_check_to_json(const KernelCheck& k);
Json tnprime_verdict_to_json(const TNPrimeVerdict& v);
Json structural_to_json(const StructuralVerdict& v);
Json certificate_to_json(const Certificate& c);

/// Throws std::runtime_error on I/O failure and SchemaError on bad JSON.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
/// Two-space indented dump with a trailing newline; keys are sorted.
std::string dump(const Json& j);

}  // namespace tnconf
