#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tstat/functionals.hpp"
#include "tstat/leading_terms.hpp"
#include "tstat/simulation.hpp"

namespace tstat {

struct GridSpec {
  double min = -10.0;
  double max = 10.0;
  double step = 0.005;
};

// A complete, reproducible experiment description. Serialized as JSON; the
// round trip json -> manifest -> json is lossless. `seed` may be omitted
// only when every step has an exact-enumeration path.
struct ExperimentManifest {
  int schema_version = 1;
  std::string distribution = "all";  // catalog name, or "all"
  std::vector<std::int64_t> n_list;
  double alpha = default_alpha;
  std::int64_t replicates = 100000;
  std::optional<std::uint64_t> seed;
  Variant variant = Variant::raw;
  GridSpec grid;
  double x0 = 2.0;
  double x1 = 0.0;
  std::vector<std::string> terms = {"ln", "mn1", "mn2", "qn1"};
  std::string out_dir = ".";
};

ExperimentManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const ExperimentManifest& m);
ExperimentManifest load_manifest(const std::string& path);

// FNV-1a of the canonical serialization; stamped into every output header.
std::uint64_t manifest_hash(const ExperimentManifest& m);

// Produces functionals.csv, curves.csv, rates.csv and summary.json in
// m.out_dir (created if missing). Returns the paths written. Output bodies
// are byte-identical across re-runs of the same manifest; only the metadata
// header line carries the timestamp.
std::vector<std::string> run_manifest(const ExperimentManifest& m,
                                      const CurveOptions& opts = {});

}  // namespace tstat
