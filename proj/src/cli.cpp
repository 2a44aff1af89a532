#include "cantor/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

// Half-width of the box searched first around a seed point.
const Rational kSeedRadius(1, 9);

Box seed_region(const std::pair<Rational, Rational>& seed, const Box& region) {
  auto clip = [](const Rational& c, const Interval& range) {
    const double lo = (c - kSeedRadius).convert_to<double>();
    const double hi = (c + kSeedRadius).convert_to<double>();
    return Interval(std::max(lo, range.lo()), std::min(hi, range.hi()));
  };
  return Box{clip(seed.first, region.x), clip(seed.second, region.y)};
}

Json region_json(const Box& b) { return Json::array({b.x.lo(), b.x.hi(), b.y.lo(), b.y.hi()}); }

// Depth of the certify workflow's hit test: 12 where the lattice stays small,
// shallower for coarse squares.
unsigned hit_test_depth(unsigned rank) { return std::max(rank, std::min(12u, rank + 9u)); }

// cover never searches, so only its depth is checked against the cap.
void validate(const RunConfig& config, bool searches = true) {
  if (searches && config.max_rank > rank_cap())
    throw RankCapExceeded("max rank " + std::to_string(config.max_rank) + " exceeds the rank cap " +
                          std::to_string(rank_cap()));
  if (config.oracle_depth > rank_cap())
    throw RankCapExceeded("oracle depth " + std::to_string(config.oracle_depth) + " exceeds the rank cap " +
                          std::to_string(rank_cap()));
}

}  // namespace

CertifyRun run_certify(const RunConfig& config) {
  CertifyRun run;
  Json& rep = run.report;
  rep["schema"] = kReportSchema;
  rep["expression"] = config.expression;
  try {
    validate(config);
    const Expr f = parse(config.expression);
    const GradTriple g = differentiate(f);
    rep["derivatives"] = Json{{"fx", print(g.fx)}, {"fy", print(g.fy)}};
    rep["region"] = region_json(config.region);

    SearchOptions opts;
    opts.region = config.region;
    opts.max_rank = config.max_rank;
    opts.budget = config.budget;
    opts.workers = config.workers;

    std::optional<SearchOutcome> outcome;
    if (config.seed) {
      const auto& [x0, y0] = *config.seed;
      if (x0 < 0 || x0 > 1 || y0 < 0 || y0 > 1 || !cantor_membership(x0) || !cantor_membership(y0))
        throw DomainError("seed point " + rational_str(x0) + ", " + rational_str(y0) + " is not in C×C");
      rep["seed"] = to_json(point_condition(g, x0, y0));
      SearchOptions local = opts;
      local.region = seed_region(*config.seed, config.region);
      outcome = search(g, local);
      rep["seed"]["hint_region"] = region_json(local.region);
      rep["seed"]["used"] = outcome->found();
      if (!outcome->found()) outcome.reset();
    } else {
      rep["seed"] = nullptr;
    }
    if (!outcome) outcome = search(g, opts);
    rep["search"] = to_json(outcome->stats);

    if (!outcome->found()) {
      rep["status"] = "no-certificate";
      rep["certificate"] = nullptr;
      rep["oracle"] = nullptr;
      run.exit_code = kExitNoCertificate;
      return run;
    }

    const Certificate& cert = outcome->certificate();
    run.certificate = cert;
    rep["certificate"] = to_json(cert);

    OracleOptions oopts;
    oopts.workers = config.workers;
    bool contained = true;
    Json depths = Json::array();
    for (const auto& cover : cover_series(f, config.oracle_depth, config.region, oopts)) {
      if (cover.depth == 0) continue;
      contained = contained && subset_with_slack(cert.image, cover.cover, 0.0);
      depths.push_back(cover.depth);
    }
    const unsigned m = hit_test_depth(cert.square.rank());
    const bool hits = hit_test(cert, f, m, kHitTestGrid);
    const unsigned rdepth = std::min(kRecursionDepth, rank_cap() - cert.square.rank());
    const bool recursion = verify_recursion(cert, g, rdepth);
    rep["oracle"] = Json{{"cover_contained", contained},
                         {"hit_test", hits},
                         {"recursion_ok", recursion},
                         {"depths", depths},
                         {"hit_test_depth", m},
                         {"hit_test_grid", kHitTestGrid},
                         {"recursion_depth", rdepth}};
    const bool ok = contained && hits && recursion;
    rep["status"] = ok ? "certified" : "validation-failed";
    run.exit_code = ok ? kExitOk : kExitError;
    if (!ok) run.error = "certificate failed oracle validation";
  } catch (const Error& e) {
    run.exit_code = kExitError;
    run.error = e.what();
    rep["status"] = "error";
    rep["error"] = e.what();
  }
  return run;
}

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const CertifyRun run = run_certify(config);
  if (!run.error.empty()) err << "error: " << run.error << '\n';
  if (config.format == OutputFormat::Csv) {
    out << "status,rank,x_word,y_word,image_lo,image_hi\n";
    out << run.report.value("status", "error");
    if (run.certificate) {
      const auto& c = *run.certificate;
      out << ',' << c.square.rank() << ',' << c.square.x().word().str() << ',' << c.square.y().word().str() << ','
          << format_double(c.image.lo()) << ',' << format_double(c.image.hi());
    } else {
      out << ",,,,,";
    }
    out << '\n';
  } else {
    out << run.report.dump(2) << '\n';
  }
  return run.exit_code;
}

int cmd_cover(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config, false);
    const Expr f = parse(config.expression);
    OracleOptions opts;
    opts.workers = config.workers;
    const auto series = cover_series(f, config.oracle_depth, config.region, opts);
    if (config.format == OutputFormat::Csv) {
      out << cover_csv(series.back());
      return kExitOk;
    }
    Json rep;
    rep["schema"] = kReportSchema;
    rep["expression"] = config.expression;
    rep["region"] = region_json(config.region);
    Json measures = Json::array();
    for (const auto& c : series)
      measures.push_back(Json{{"depth", c.depth}, {"measure", c.measure}, {"parts", c.cover.size()},
                              {"squares_visited", c.squares_visited}});
    rep["series"] = std::move(measures);
    rep["cover"] = to_json(series.back());
    out << rep.dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

namespace {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string image_str(const Certificate& c) {
  std::ostringstream os;
  os << "rank " << c.square.rank() << " square " << c.square.x().word().str() << "x" << c.square.y().word().str()
     << " image " << c.image;
  return os.str();
}

RunConfig with_expr(const RunConfig& base, const std::string& expr) {
  RunConfig c = base;
  c.expression = expr;
  c.seed.reset();
  return c;
}

Check steinhaus(const RunConfig& base, const std::string& expr, double lo, double hi, int sy) {
  const auto t0 = std::chrono::steady_clock::now();
  const CertifyRun run = run_certify(with_expr(base, expr));
  const double secs = seconds_since(t0);
  Check chk{expr, false, run.error};
  if (run.exit_code != kExitOk || !run.certificate) return chk;
  const Certificate& c = *run.certificate;
  const bool exact_corners = c.min_value.is_point() && c.max_value.is_point() && c.min_value.lo() == lo &&
                             c.max_value.lo() == hi;
  chk.pass = c.square.rank() == 0 && exact_corners && std::fabs(c.image.lo() - lo) <= 1e-12 &&
             std::fabs(c.image.hi() - hi) <= 1e-12 && c.signature.sy == sy && secs < 1.0;
  std::ostringstream os;
  os << image_str(c) << " corners (" << c.min_corner.first.str() << ", " << c.min_corner.second.str() << ") -> ("
     << c.max_corner.first.str() << ", " << c.max_corner.second.str() << ") sy=" << c.signature.sy << " in "
     << std::fixed << std::setprecision(3) << secs << "s";
  chk.detail = os.str();
  return chk;
}

std::vector<Check> reproduce_product(const RunConfig& base) {
  std::vector<Check> checks;
  const CertifyRun run = run_certify(with_expr(base, "x*y"));
  Check cert{"x*y certificate", false, run.error};
  if (run.exit_code == kExitOk && run.certificate) {
    cert.pass = run.certificate->square.rank() <= 4;
    cert.detail = image_str(*run.certificate);
  }
  checks.push_back(cert);

  const auto series = cover_measure_series(parse("x*y"), base.oracle_depth, base.region);
  const double floor = 17.0 / 21.0;
  bool above = true;
  bool monotone = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < series.size(); ++i) {
    above = above && series[i].second >= floor;
    if (i > 0) {
      double slack = series[i - 1].second;
      for (int k = 0; k < 8; ++k) slack = rounding::next_up(slack);
      monotone = monotone && series[i].second <= slack;
    }
    os << (i ? " " : "") << std::setprecision(6) << series[i].second;
  }
  const bool start_ok = !series.empty() && series[0].second == 1.0 &&
                        (series.size() < 2 || std::fabs(series[1].second - 8.0 / 9.0) <= 1e-12);
  checks.push_back(Check{"x*y cover measures >= 17/21", above && monotone && start_ok, os.str()});
  return checks;
}

struct SuiteCase {
  const char* expr;
  std::optional<std::pair<Rational, Rational>> seed;
};

std::vector<Check> reproduce_corollary(const RunConfig& base) {
  const std::vector<SuiteCase> cases = {
      {"x^2*y", std::nullopt},
      {"x^2 + y^2", std::nullopt},
      {"x^2 - y^2", std::nullopt},
      {"x + y^2", std::make_pair(Rational(8, 9), Rational(1, 3))},
      {"x - y^2", std::make_pair(Rational(8, 9), Rational(1, 3))},
      {"sin(x)*cos(y)", std::make_pair(Rational(2, 3), Rational(2, 3))},
  };
  std::vector<Check> checks;
  for (const auto& c : cases) {
    RunConfig cfg = with_expr(base, c.expr);
    cfg.seed = c.seed;
    const CertifyRun run = run_certify(cfg);
    Check chk{c.expr, run.exit_code == kExitOk && run.certificate.has_value(), run.error};
    if (run.certificate) chk.detail = image_str(*run.certificate);
    if (c.seed) {
      const auto& s = run.report["seed"];
      chk.detail += " seed (" + s.value("x", "") + ", " + s.value("y", "") + ") " + s.value("case", "");
    }
    checks.push_back(chk);
  }
  return checks;
}

}  // namespace

int cmd_reproduce(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<Check> checks;
  try {
    if (name == "steinhaus-sum") checks.push_back(steinhaus(config, "x + y", 0.0, 2.0, 1));
    else if (name == "steinhaus-diff") checks.push_back(steinhaus(config, "x - y", -1.0, 1.0, -1));
    else if (name == "product") checks = reproduce_product(config);
    else if (name == "corollary") checks = reproduce_corollary(config);
    else {
      err << "error: unknown reproduction '" << name << "'\n";
      return kExitError;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  std::size_t passed = 0;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(30) << c.name << ' ' << c.detail << '\n';
    passed += c.pass;
  }
  out << name << ": " << passed << "/" << checks.size() << " passed\n";
  return passed == checks.size() ? kExitOk : kExitError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* cap = std::getenv("CANTOR_RANK_CAP")) {
    try {
      set_rank_cap(static_cast<unsigned>(std::stoul(cap)));
    } catch (const std::exception&) {
      err << "error: CANTOR_RANK_CAP must be a non-negative integer\n";
      return kExitError;
    }
  }

  CLI::App app{"Certify intervals inside f(C x C) for the middle-third Cantor set C", "cantor-cert"};
  app.require_subcommand(1);

  RunConfig config;
  std::vector<double> region;
  std::vector<std::string> seed;
  std::string format = "json";
  std::string out_path;
  std::string reproduce_name;

  auto add_common = [&](CLI::App* sub, bool needs_expr) {
    auto* expr = sub->add_option("--expr", config.expression, "expression in x and y");
    if (needs_expr) expr->required();
    sub->add_option("--region", region, "x0 x1 y0 y1")->expected(4);
    sub->add_option("--max-rank", config.max_rank, "deepest square rank searched");
    sub->add_option("--budget", config.budget, "search node budget");
    sub->add_option("--oracle-depth,--depth", config.oracle_depth, "deepest oracle cover");
    sub->add_option("--seed", seed, "seed point p/q p/q")->expected(2);
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", config.workers, "worker threads");
    sub->add_option("--out", out_path, "write the report to FILE");
  };

  auto* certify_cmd = app.add_subcommand("certify", "search for a certified interval and validate it");
  add_common(certify_cmd, true);
  auto* cover_cmd = app.add_subcommand("cover", "outer covers of the image and their measures");
  add_common(cover_cmd, true);
  auto* reproduce_cmd = app.add_subcommand("reproduce", "run a built-in reproduction suite");
  add_common(reproduce_cmd, false);
  reproduce_cmd->add_option("name", reproduce_name, "steinhaus-sum | steinhaus-diff | product | corollary")
      ->required()
      ->check(CLI::IsMember({"steinhaus-sum", "steinhaus-diff", "product", "corollary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (!region.empty()) config.region = Box{Interval(region[0], region[1]), Interval(region[2], region[3])};
    if (!seed.empty()) config.seed = std::make_pair(parse_rational(seed[0]), parse_rational(seed[1]));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  config.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      err << "error: cannot open " << out_path << '\n';
      return kExitError;
    }
  }
  std::ostream& sink = out_path.empty() ? out : file;

  if (certify_cmd->parsed()) return cmd_certify(config, sink, err);
  if (cover_cmd->parsed()) return cmd_cover(config, sink, err);
  return cmd_reproduce(reproduce_name, config, sink, err);
}

}  // namespace cantor
