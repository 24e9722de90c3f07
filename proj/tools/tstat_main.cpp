// Command-line front end. Every subcommand validates its inputs, computes
// through the library, and emits either a human-readable table or CSV with a
// single "# {json}" metadata line. Exit codes: 0 success, 1 invalid input,
// 2 numerical failure (quadrature could not reach its error target),
// 3 unexpected.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tstat/distributions.hpp"
#include "tstat/functionals.hpp"
#include "tstat/io.hpp"
#include "tstat/leading_terms.hpp"
#include "tstat/manifest.hpp"
#include "tstat/quadrature.hpp"
#include "tstat/rates.hpp"
#include "tstat/simulation.hpp"

namespace {

using nlohmann::json;

void emit_error(const std::string& kind, const std::string& message) {
  json rec{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << rec.dump() << "\n";
}

void deliver(const tstat::Csv& csv, const std::string& out) {
  if (out.empty())
    std::cout << csv.to_string();
  else
    tstat::write_text_file(out, csv.to_string());
}

json dist_json(const tstat::Distribution& d) {
  json j{{"name", d.name()},
         {"kind", d.kind() == tstat::Kind::discrete ? "discrete" : "continuous"},
         {"symmetric", d.symmetric()},
         {"finite_variance", d.has_finite_variance()},
         {"third_moment", d.third_moment() ? json(*d.third_moment()) : json(nullptr)},
         {"support", {d.support().lo, d.support().hi}}};
  if (!d.atoms().empty()) {
    json atoms = json::array();
    for (const auto& a : d.atoms()) atoms.push_back({{"x", a.x}, {"p", a.p}});
    j["atoms"] = atoms;
  }
  return j;
}

void cmd_dist_list(bool as_json) {
  if (as_json) {
    json out = json::array();
    for (const auto& d : tstat::catalog()) out.push_back(dist_json(*d));
    std::cout << out.dump(2) << "\n";
    return;
  }
  std::printf("%-22s %-11s %-9s %-9s %-12s support\n", "name", "kind",
              "symmetric", "variance", "E[X^3]");
  for (const auto& d : tstat::catalog()) {
    std::string skew = d->third_moment()
                           ? tstat::format_double(*d->third_moment())
                           : std::string("undefined");
    std::printf("%-22s %-11s %-9s %-9s %-12s [%g, %g]\n", d->name().c_str(),
                d->kind() == tstat::Kind::discrete ? "discrete" : "continuous",
                d->symmetric() ? "yes" : "no",
                d->has_finite_variance() ? "finite" : "infinite", skew.c_str(),
                d->support().lo, d->support().hi);
  }
}

json functionals_json(const tstat::TruncationFunctionals& f,
                      const std::string& dist) {
  return json{{"dist", dist},   {"n", f.n},
              {"alpha", f.alpha}, {"b_n", f.b_n},
              {"d1", f.d1},     {"d2", f.d2},
              {"d3", f.d3},     {"d4", f.d4},
              {"delta_n", f.delta_n}, {"nu", f.nu},
              {"tau2", f.tau2}, {"sigma_n2", f.sigma_n2},
              {"B_n2", f.B_n2}, {"rho_n", f.rho_n},
              {"u1", f.u[0]},   {"u2", f.u[1]},
              {"u3", f.u[2]},   {"u4", f.u[3]}};
}

void cmd_functionals(const std::string& dist_name, std::int64_t n, double alpha,
                     bool as_json, const std::string& out) {
  auto d = tstat::find_distribution(dist_name);
  const auto f = tstat::compute_functionals(*d, n, alpha);
  const json j = functionals_json(f, d->name());
  if (!out.empty()) {
    tstat::Csv csv;
    csv.metadata = {{"command", "functionals"},
                    {"timestamp", tstat::iso8601_utc_now()}};
    for (auto it = j.begin(); it != j.end(); ++it) csv.columns.push_back(it.key());
    std::vector<std::string> row;
    for (auto it = j.begin(); it != j.end(); ++it)
      row.push_back(it->is_string() ? it->get<std::string>()
                                    : it->is_number_integer()
                                          ? std::to_string(it->get<std::int64_t>())
                                          : tstat::format_double(it->get<double>()));
    csv.add_row(std::move(row));
    deliver(csv, out);
    return;
  }
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v = it->is_string() ? it->get<std::string>()
                    : it->is_number_integer()
                        ? std::to_string(it->get<std::int64_t>())
                        : tstat::format_double(it->get<double>());
    std::printf("%-9s %s\n", it.key().c_str(), v.c_str());
  }
}

void cmd_leading_term(const std::string& dist_name, std::int64_t n, double alpha,
                      const std::string& term, double gmin, double gmax,
                      double gstep, double tol_factor, const std::string& out) {
  auto d = tstat::find_distribution(dist_name);
  const tstat::TermKind kind = tstat::parse_term(term);
  if (kind == tstat::TermKind::empirical_cdf)
    throw std::invalid_argument(
        "term: 'empirical_cdf' comes from simulate or oracle, not leading-term");
  if (!(gmin < gmax)) throw std::invalid_argument("grid-min: must be below grid-max");
  if (!(gstep > 0.0)) throw std::invalid_argument("grid-step: must be > 0");
  const auto grid = tstat::default_grid(gmin, gmax, gstep);
  tstat::CurveOptions opts;
  opts.tol_factor = tol_factor;

  tstat::Curve c;
  if (kind == tstat::TermKind::edgeworth_student ||
      kind == tstat::TermKind::edgeworth_plain) {
    if (!d->third_moment())
      throw std::invalid_argument("term: '" + term +
                                  "' needs a finite third moment, which '" +
                                  d->name() + "' lacks");
    c = kind == tstat::TermKind::edgeworth_student
            ? tstat::eval_edgeworth_student(*d->third_moment(), n, grid)
            : tstat::eval_edgeworth_plain(*d->third_moment(), n, grid);
    c.dist_name = d->name();
  } else {
    const auto f = tstat::compute_functionals(*d, n, alpha);
    switch (kind) {
      case tstat::TermKind::ln:
        c = tstat::eval_ln(*d, f, grid, opts);
        break;
      case tstat::TermKind::mn1:
        c = tstat::eval_mn_split(*d, f, grid, opts).first;
        break;
      case tstat::TermKind::mn2:
        c = tstat::eval_mn_split(*d, f, grid, opts).second;
        break;
      case tstat::TermKind::qn1:
        c = tstat::eval_qn1(f, d->name(), grid);
        break;
      case tstat::TermKind::ln1:
        c = tstat::eval_ln1(*d, f, grid, opts);
        break;
      case tstat::TermKind::ln2:
        c = tstat::eval_ln2(*d, f, grid, opts);
        break;
      default:
        break;
    }
  }

  tstat::Csv csv;
  csv.metadata = {{"command", "leading-term"}, {"dist", d->name()},
                  {"n", n},                    {"alpha", alpha},
                  {"term", term},              {"tol_factor", tol_factor},
                  {"timestamp", tstat::iso8601_utc_now()}};
  csv.columns = {"x", "value"};
  for (std::size_t i = 0; i < c.grid.size(); ++i)
    csv.add_row({tstat::format_double(c.grid[i]), tstat::format_double(c.values[i])});
  deliver(csv, out);
}

void cmd_simulate(const std::string& dist_name, std::int64_t n,
                  std::int64_t replicates, std::uint64_t seed,
                  const std::string& variant, double cmin, double cmax,
                  double cstep, const std::string& out) {
  auto d = tstat::find_distribution(dist_name);
  const auto v = tstat::parse_variant(variant);
  const auto e = tstat::simulate_T(*d, n, replicates, seed, v);
  if (!(cmin < cmax)) throw std::invalid_argument("cdf-min: must be below cdf-max");
  if (!(cstep > 0.0)) throw std::invalid_argument("cdf-step: must be > 0");
  const auto grid = tstat::default_grid(cmin, cmax, cstep);
  const auto F = tstat::empirical_cdf(e, grid);

  tstat::Csv csv;
  csv.metadata = {{"command", "simulate"},
                  {"dist", d->name()},
                  {"n", n},
                  {"replicates", replicates},
                  {"seed", seed},
                  {"variant", tstat::variant_name(v)},
                  {"mass_neg_inf", e.mass_neg_inf},
                  {"mass_pos_inf", e.mass_pos_inf},
                  {"dkw_half_width", tstat::dkw_half_width(replicates)},
                  {"timestamp", tstat::iso8601_utc_now()}};
  csv.columns = {"x", "cdf"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv.add_row({tstat::format_double(grid[i]), tstat::format_double(F[i])});
  deliver(csv, out);
}

void cmd_oracle(const std::string& dist_name, std::int64_t n,
                const std::string& variant, const std::string& out) {
  auto d = tstat::find_distribution(dist_name);
  const auto v = tstat::parse_variant(variant);
  const auto e = tstat::exact_T_distribution(*d, n, v);

  tstat::Csv csv;
  csv.metadata = {{"command", "oracle"},
                  {"dist", d->name()},
                  {"n", n},
                  {"variant", tstat::variant_name(v)},
                  {"mass_neg_inf", e.mass_neg_inf},
                  {"mass_pos_inf", e.mass_pos_inf},
                  {"outcomes", e.values.size()},
                  {"timestamp", tstat::iso8601_utc_now()}};
  csv.columns = {"value", "probability"};
  for (std::size_t i = 0; i < e.values.size(); ++i)
    csv.add_row({tstat::format_double(e.values[i]),
                 tstat::format_double(e.weights[i])});
  deliver(csv, out);
}

void append_report(tstat::Csv& csv, const tstat::RateReport& rep) {
  for (const auto& r : rep.rows)
    csv.add_row({rep.dist_name, rep.statistic,
                 tstat::variant_name(rep.variant), std::to_string(r.n),
                 tstat::format_double(r.delta_n),
                 tstat::format_double(r.sup_plain),
                 tstat::format_double(r.sup_corrected),
                 tstat::format_double(r.sup_ln),
                 tstat::format_double(r.three_point_sup),
                 tstat::format_double(r.ratio_25),
                 tstat::format_double(r.ratio_3pt),
                 tstat::format_double(r.mc_half_width),
                 r.source == tstat::Source::exact ? "exact" : "monte_carlo"});
}

void cmd_rates(const std::string& dist_name, std::vector<std::int64_t> n_list,
               std::int64_t replicates, std::uint64_t seed, double x0, double x1,
               double alpha, const std::string& variant,
               const std::string& statistic, const std::string& out) {
  auto d = tstat::find_distribution(dist_name);
  const auto v = tstat::parse_variant(variant);

  tstat::RateReport rep;
  if (statistic == "t") {
    rep = tstat::build_rate_report(*d, std::move(n_list), replicates, seed, x0,
                                   x1, alpha, v);
  } else if (statistic == "sum-bn" || statistic == "sum-sigma") {
    rep = tstat::nonstudentized_report(
        *d, std::move(n_list), replicates, seed,
        statistic == "sum-bn" ? tstat::SumScale::bn : tstat::SumScale::sigma, x0,
        x1);
  } else {
    throw std::invalid_argument("statistic: expected t, sum-bn or sum-sigma");
  }

  tstat::Csv csv;
  csv.metadata = {{"command", "rates"},
                  {"dist", d->name()},
                  {"statistic", rep.statistic},
                  {"replicates", replicates},
                  {"seed", seed},
                  {"x0", x0},
                  {"x1", x1},
                  {"alpha", alpha},
                  {"variant", tstat::variant_name(v)},
                  {"timestamp", tstat::iso8601_utc_now()}};
  csv.columns = {"dist",   "statistic",     "variant", "n",
                 "delta_n", "sup_plain",    "sup_corrected", "sup_ln",
                 "three_point_sup", "ratio_25", "ratio_3pt", "mc_half_width",
                 "source"};
  append_report(csv, rep);
  deliver(csv, out);
}

void cmd_run(const std::string& manifest_path, const std::string& out_dir) {
  if (!std::filesystem::exists(manifest_path))
    throw std::invalid_argument("manifest: no such file '" + manifest_path + "'");
  tstat::ExperimentManifest m = tstat::load_manifest(manifest_path);
  if (!out_dir.empty()) m.out_dir = out_dir;
  for (const auto& p : tstat::run_manifest(m)) std::cout << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leading-term corrections and convergence rates for the "
               "Studentized mean"};
  app.require_subcommand(1);

  // dist list
  auto* dist = app.add_subcommand("dist", "Catalog of available laws");
  dist->require_subcommand(1);
  auto* dist_list = dist->add_subcommand("list", "List the catalog");
  bool dist_json_flag = false;
  dist_list->add_flag("--json", dist_json_flag, "JSON output");
  dist_list->callback([&] { cmd_dist_list(dist_json_flag); });

  std::string f_dist, f_out;
  std::int64_t f_n = 0;
  double f_alpha = tstat::default_alpha;
  bool f_json = false;
  auto* fun = app.add_subcommand(
      "functionals", "Truncation radius and rate functional for (dist, n)");
  fun->add_option("--dist", f_dist, "Catalog name")->required();
  fun->add_option("--n", f_n, "Sample size")->required();
  fun->add_option("--alpha", f_alpha, "Inner truncation fraction, in (0, 1]");
  fun->add_flag("--json", f_json, "JSON output");
  fun->add_option("--out", f_out, "Write single-row CSV to this path");
  fun->callback([&] { cmd_functionals(f_dist, f_n, f_alpha, f_json, f_out); });

  std::string lt_dist, lt_term, lt_out;
  std::int64_t lt_n = 0;
  double lt_alpha = tstat::default_alpha;
  double lt_gmin = -10.0, lt_gmax = 10.0, lt_gstep = 0.005;
  double lt_tol = 1e-3;
  auto* lt = app.add_subcommand("leading-term",
                                "Evaluate a correction term on a grid");
  lt->add_option("--dist", lt_dist, "Catalog name")->required();
  lt->add_option("--n", lt_n, "Sample size")->required();
  lt->add_option("--term", lt_term,
                 "ln, mn1, mn2, qn1, ln1, ln2, edgeworth_student or "
                 "edgeworth_plain")
      ->required();
  lt->add_option("--alpha", lt_alpha, "Inner truncation fraction");
  lt->add_option("--grid-min", lt_gmin, "Grid start");
  lt->add_option("--grid-max", lt_gmax, "Grid end");
  lt->add_option("--grid-step", lt_gstep, "Grid spacing");
  lt->add_option("--tol-factor", lt_tol,
                 "Curve error target as a multiple of delta_n");
  lt->add_option("--out", lt_out, "Write CSV to this path");
  lt->callback([&] {
    cmd_leading_term(lt_dist, lt_n, lt_alpha, lt_term, lt_gmin, lt_gmax,
                     lt_gstep, lt_tol, lt_out);
  });

  std::string s_dist, s_variant = "raw", s_out;
  std::int64_t s_n = 0, s_reps = 0;
  std::uint64_t s_seed = 0;
  double s_cmin = -10.0, s_cmax = 10.0, s_cstep = 0.05;
  auto* sim = app.add_subcommand(
      "simulate", "Monte Carlo empirical CDF of the Studentized statistic");
  sim->add_option("--dist", s_dist, "Catalog name")->required();
  sim->add_option("--n", s_n, "Sample size")->required();
  sim->add_option("--replicates", s_reps, "Monte Carlo replicates")->required();
  sim->add_option("--seed", s_seed, "RNG seed (required: runs must be reproducible)")
      ->required();
  sim->add_option("--variant", s_variant, "raw or classical");
  sim->add_option("--cdf-min", s_cmin, "CDF grid start");
  sim->add_option("--cdf-max", s_cmax, "CDF grid end");
  sim->add_option("--cdf-step", s_cstep, "CDF grid spacing");
  sim->add_option("--out", s_out, "Write CSV to this path");
  sim->callback([&] {
    cmd_simulate(s_dist, s_n, s_reps, s_seed, s_variant, s_cmin, s_cmax,
                 s_cstep, s_out);
  });

  std::string o_dist, o_variant = "raw", o_out;
  std::int64_t o_n = 0;
  auto* ora = app.add_subcommand(
      "oracle", "Exact finite-sample law of the statistic (small discrete cases)");
  ora->add_option("--dist", o_dist, "Catalog name")->required();
  ora->add_option("--n", o_n, "Sample size (at most 14)")->required();
  ora->add_option("--variant", o_variant, "raw or classical");
  ora->add_option("--out", o_out, "Write CSV to this path");
  ora->callback([&] { cmd_oracle(o_dist, o_n, o_variant, o_out); });

  std::string r_dist, r_variant = "raw", r_statistic = "t", r_out;
  std::vector<std::int64_t> r_nlist;
  std::int64_t r_reps = 100000;
  std::uint64_t r_seed = 0;
  double r_x0 = 2.0, r_x1 = 0.0, r_alpha = tstat::default_alpha;
  auto* rat = app.add_subcommand(
      "rates", "Uncorrected vs corrected CDF discrepancy across sample sizes");
  rat->add_option("--dist", r_dist, "Catalog name")->required();
  rat->add_option("--n-list", r_nlist, "Comma-separated sample sizes")
      ->required()
      ->delimiter(',');
  rat->add_option("--replicates", r_reps, "Monte Carlo replicates");
  rat->add_option("--seed", r_seed, "RNG seed (required: runs must be reproducible)")
      ->required();
  rat->add_option("--x0", r_x0, "Outer evaluation point, > sqrt(3)");
  rat->add_option("--x1", r_x1, "Inner evaluation point, not +-x0");
  rat->add_option("--alpha", r_alpha, "Inner truncation fraction");
  rat->add_option("--variant", r_variant, "raw or classical");
  rat->add_option("--statistic", r_statistic, "t, sum-bn or sum-sigma");
  rat->add_option("--out", r_out, "Write CSV to this path");
  rat->callback([&] {
    cmd_rates(r_dist, r_nlist, r_reps, r_seed, r_x0, r_x1, r_alpha, r_variant,
              r_statistic, r_out);
  });

  std::string m_path, m_out_dir;
  auto* run = app.add_subcommand("run", "Execute a JSON experiment manifest");
  run->add_option("--manifest", m_path, "Manifest path")->required();
  run->add_option("--out-dir", m_out_dir, "Override the manifest out_dir");
  run->callback([&] { cmd_run(m_path, m_out_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    emit_error("validation", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    emit_error("validation", e.what());
    return 1;
  } catch (const tstat::QuadratureError& e) {
    emit_error("numerical", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 0;
}
