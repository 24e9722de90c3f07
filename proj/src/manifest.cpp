#include "tstat/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <utility>

#include "tstat/io.hpp"
#include "tstat/rates.hpp"

namespace tstat {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& name, const std::string& why) {
  throw std::invalid_argument(name + ": " + why);
}

const json& require(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) bad_field(name, "missing");
  return *it;
}

double as_number(const json& j, const char* name) {
  if (!j.is_number()) bad_field(name, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const char* name) {
  if (!j.is_string()) bad_field(name, "expected a string");
  return j.get<std::string>();
}

std::int64_t as_integer(const json& j, const char* name) {
  if (!j.is_number_integer()) bad_field(name, "expected an integer");
  return j.get<std::int64_t>();
}

void validate(const ExperimentManifest& m) {
  if (m.schema_version != 1) bad_field("schema_version", "unsupported version");
  if (m.distribution != "all") find_distribution(m.distribution);
  if (m.n_list.empty()) bad_field("n_list", "must be non-empty");
  for (std::int64_t n : m.n_list)
    if (n < 2) bad_field("n_list", "every n must be >= 2");
  if (!(m.alpha > 0.0 && m.alpha <= 1.0)) bad_field("alpha", "must be in (0, 1]");
  if (m.replicates < 1) bad_field("replicates", "must be >= 1");
  if (!(m.grid.min < m.grid.max)) bad_field("grid.min", "must be below grid.max");
  if (!(m.grid.step > 0.0)) bad_field("grid.step", "must be > 0");
  if ((m.grid.max - m.grid.min) / m.grid.step > 1e7)
    bad_field("grid.step", "too small for the grid span");
  if (!(m.x0 > std::sqrt(3.0))) bad_field("x0", "must exceed sqrt(3)");
  if (m.x1 == m.x0 || m.x1 == -m.x0)
    bad_field("x1", "must differ from both -x0 and x0");
  if (m.terms.empty()) bad_field("terms", "must be non-empty");
  for (const auto& t : m.terms) {
    TermKind k;
    try {
      k = parse_term(t);
    } catch (const std::invalid_argument&) {
      bad_field("terms", "unknown term '" + t + "'");
    }
    if (k == TermKind::empirical_cdf)
      bad_field("terms", "'empirical_cdf' is not a curve term");
  }
  if (m.out_dir.empty()) bad_field("out_dir", "must be non-empty");
}

std::vector<DistPtr> resolve_distributions(const ExperimentManifest& m) {
  if (m.distribution == "all") return catalog();
  return {find_distribution(m.distribution)};
}

}  // namespace

ExperimentManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("manifest: expected an object");
  ExperimentManifest m;
  m.schema_version =
      static_cast<int>(as_integer(require(j, "schema_version"), "schema_version"));
  m.distribution = as_string(require(j, "distribution"), "distribution");
  m.n_list.clear();
  const json& nl = require(j, "n_list");
  if (!nl.is_array()) bad_field("n_list", "expected an array");
  for (const auto& v : nl) m.n_list.push_back(as_integer(v, "n_list"));
  if (auto it = j.find("alpha"); it != j.end()) m.alpha = as_number(*it, "alpha");
  if (auto it = j.find("replicates"); it != j.end())
    m.replicates = as_integer(*it, "replicates");
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      bad_field("seed", "expected an integer");
    m.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("variant"); it != j.end())
    m.variant = parse_variant(as_string(*it, "variant"));
  if (auto it = j.find("grid"); it != j.end()) {
    if (!it->is_object()) bad_field("grid", "expected an object");
    m.grid.min = as_number(require(*it, "min"), "grid.min");
    m.grid.max = as_number(require(*it, "max"), "grid.max");
    m.grid.step = as_number(require(*it, "step"), "grid.step");
  }
  if (auto it = j.find("x0"); it != j.end()) m.x0 = as_number(*it, "x0");
  if (auto it = j.find("x1"); it != j.end()) m.x1 = as_number(*it, "x1");
  if (auto it = j.find("terms"); it != j.end()) {
    if (!it->is_array()) bad_field("terms", "expected an array");
    m.terms.clear();
    for (const auto& v : *it) m.terms.push_back(as_string(v, "terms"));
  }
  if (auto it = j.find("out_dir"); it != j.end())
    m.out_dir = as_string(*it, "out_dir");
  validate(m);
  return m;
}

json manifest_to_json(const ExperimentManifest& m) {
  json j{{"schema_version", m.schema_version},
         {"distribution", m.distribution},
         {"n_list", m.n_list},
         {"alpha", m.alpha},
         {"replicates", m.replicates},
         {"variant", variant_name(m.variant)},
         {"grid", {{"min", m.grid.min}, {"max", m.grid.max}, {"step", m.grid.step}}},
         {"x0", m.x0},
         {"x1", m.x1},
         {"terms", m.terms},
         {"out_dir", m.out_dir}};
  if (m.seed) j["seed"] = *m.seed;
  return j;
}

ExperimentManifest load_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("manifest: invalid JSON: ") + e.what());
  }
  return manifest_from_json(j);
}

std::uint64_t manifest_hash(const ExperimentManifest& m) {
  return fnv1a64(manifest_to_json(m).dump());
}

std::vector<std::string> run_manifest(const ExperimentManifest& m,
                                      const CurveOptions& opts) {
  validate(m);
  const std::vector<DistPtr> dists = resolve_distributions(m);

  bool needs_mc = false;
  for (const auto& d : dists)
    for (std::int64_t n : m.n_list)
      if (!exact_T_feasible(*d, n)) needs_mc = true;
  if (needs_mc && !m.seed)
    throw std::invalid_argument("seed: required when Monte Carlo is used");

  std::vector<TermKind> terms;
  for (const auto& t : m.terms) terms.push_back(parse_term(t));
  for (TermKind k : terms)
    if (k == TermKind::edgeworth_student || k == TermKind::edgeworth_plain)
      for (const auto& d : dists)
        if (!d->third_moment())
          throw std::invalid_argument("terms: '" + std::string(term_name(k)) +
                                      "' needs a finite third moment, which '" +
                                      d->name() + "' lacks");

  std::filesystem::create_directories(m.out_dir);
  const auto out_path = [&](const char* f) {
    return (std::filesystem::path(m.out_dir) / f).string();
  };

  json meta{{"manifest_hash", hash_hex(manifest_hash(m))},
            {"seed", m.seed ? json(*m.seed) : json(nullptr)},
            {"timestamp", iso8601_utc_now()}};

  std::vector<std::int64_t> n_list = m.n_list;
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());

  const std::vector<double> base_grid =
      default_grid(m.grid.min, m.grid.max, m.grid.step);

  std::map<std::pair<std::string, std::int64_t>, TruncationFunctionals> funs;
  for (const auto& d : dists)
    for (std::int64_t n : n_list)
      funs.emplace(std::make_pair(d->name(), n),
                   compute_functionals(*d, n, m.alpha));

  Csv fcsv;
  fcsv.metadata = meta;
  fcsv.columns = {"dist", "n",        "alpha", "b_n",  "d1", "d2",
                  "d3",   "d4",       "delta_n", "nu", "tau2", "sigma_n2",
                  "B_n2", "rho_n",    "u1",    "u2",   "u3", "u4"};
  for (const auto& d : dists)
    for (std::int64_t n : n_list) {
      const auto& f = funs.at({d->name(), n});
      fcsv.add_row({d->name(), std::to_string(n), format_double(f.alpha),
                    format_double(f.b_n), format_double(f.d1),
                    format_double(f.d2), format_double(f.d3),
                    format_double(f.d4), format_double(f.delta_n),
                    format_double(f.nu), format_double(f.tau2),
                    format_double(f.sigma_n2), format_double(f.B_n2),
                    format_double(f.rho_n), format_double(f.u[0]),
                    format_double(f.u[1]), format_double(f.u[2]),
                    format_double(f.u[3])});
    }

  Csv ccsv;
  ccsv.metadata = meta;
  ccsv.columns = {"dist", "n", "alpha", "term", "x", "value"};
  const auto emit_curve = [&](const Curve& c) {
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      ccsv.add_row({c.dist_name, std::to_string(c.n), format_double(m.alpha),
                    term_name(c.kind), format_double(c.grid[i]),
                    format_double(c.values[i])});
  };
  for (const auto& d : dists)
    for (std::int64_t n : n_list) {
      const auto& f = funs.at({d->name(), n});
      bool split_done = false;
      std::pair<Curve, Curve> split;
      for (TermKind k : terms) {
        switch (k) {
          case TermKind::ln:
            emit_curve(eval_ln(*d, f, base_grid, opts));
            break;
          case TermKind::mn1:
          case TermKind::mn2:
            if (!split_done) {
              split = eval_mn_split(*d, f, base_grid, opts);
              split_done = true;
            }
            emit_curve(k == TermKind::mn1 ? split.first : split.second);
            break;
          case TermKind::qn1:
            emit_curve(eval_qn1(f, d->name(), base_grid));
            break;
          case TermKind::ln1:
            emit_curve(eval_ln1(*d, f, base_grid, opts));
            break;
          case TermKind::ln2:
            emit_curve(eval_ln2(*d, f, base_grid, opts));
            break;
          case TermKind::edgeworth_student: {
            Curve c = eval_edgeworth_student(*d->third_moment(), n, base_grid);
            c.dist_name = d->name();
            emit_curve(c);
            break;
          }
          case TermKind::edgeworth_plain: {
            Curve c = eval_edgeworth_plain(*d->third_moment(), n, base_grid);
            c.dist_name = d->name();
            emit_curve(c);
            break;
          }
          case TermKind::empirical_cdf:
            break;  // rejected by validate()
        }
      }
    }

  Csv rcsv;
  rcsv.metadata = meta;
  rcsv.columns = {"dist",   "statistic",       "variant",
                  "n",      "delta_n",         "sup_plain",
                  "sup_corrected", "sup_ln",   "three_point_sup",
                  "ratio_25", "ratio_3pt",     "mc_half_width",
                  "source"};
  json summary_rates = json::object();
  for (const auto& d : dists) {
    const RateReport rep =
        build_rate_report(*d, n_list, m.replicates, m.seed.value_or(0), m.x0,
                          m.x1, m.alpha, m.variant, opts, base_grid);
    double min3 = 1.0, max3 = 0.0, minr = 0.0, maxr = 0.0, minm = 0.0, maxm = 0.0;
    bool first = true;
    for (const auto& r : rep.rows) {
      rcsv.add_row({rep.dist_name, rep.statistic, variant_name(rep.variant),
                    std::to_string(r.n), format_double(r.delta_n),
                    format_double(r.sup_plain), format_double(r.sup_corrected),
                    format_double(r.sup_ln), format_double(r.three_point_sup),
                    format_double(r.ratio_25), format_double(r.ratio_3pt),
                    format_double(r.mc_half_width),
                    r.source == Source::exact ? "exact" : "monte_carlo"});
      const double mag = r.delta_n > 0.0 ? r.sup_ln / r.delta_n : 0.0;
      if (first) {
        min3 = max3 = r.ratio_3pt;
        minr = maxr = r.ratio_25;
        minm = maxm = mag;
        first = false;
      } else {
        min3 = std::min(min3, r.ratio_3pt);
        max3 = std::max(max3, r.ratio_3pt);
        minr = std::min(minr, r.ratio_25);
        maxr = std::max(maxr, r.ratio_25);
        minm = std::min(minm, mag);
        maxm = std::max(maxm, mag);
      }
    }
    summary_rates[d->name()] = {
        {"ratio_3pt", {{"min", min3}, {"max", max3}}},
        {"ratio_25", {{"min", minr}, {"max", maxr}}},
        {"sup_ln_over_delta", {{"min", minm}, {"max", maxm}}}};
  }

  json summary{{"manifest_hash", hash_hex(manifest_hash(m))},
               {"rates", summary_rates}};

  std::vector<std::string> written;
  write_text_file(out_path("functionals.csv"), fcsv.to_string());
  written.push_back(out_path("functionals.csv"));
  write_text_file(out_path("curves.csv"), ccsv.to_string());
  written.push_back(out_path("curves.csv"));
  write_text_file(out_path("rates.csv"), rcsv.to_string());
  written.push_back(out_path("rates.csv"));
  write_text_file(out_path("summary.json"), summary.dump(2) + "\n");
  written.push_back(out_path("summary.json"));
  return written;
}

}  // namespace tstat
