#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlgeom/constants.hpp"
#include "nlgeom/curvature.hpp"
#include "nlgeom/density.hpp"
#include "nlgeom/parallel.hpp"
#include "nlgeom/suites.hpp"
#include "plot.hpp"

#ifndef NLGEOM_VERSION
#define NLGEOM_VERSION "unknown"
#endif

using nlohmann::json;
using namespace nlgeom;

namespace {

constexpr int kExitUsage = 64;

// Thrown for bad input files and flag values; maps to exit 64.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenePath;
  std::string kernelPath;
  std::string configPath;
  std::string outPath;
  std::string plotPath;
  std::uint64_t seed = 1;
  int workers = 0;

  // curvature
  std::string points = "anchor";
  std::string method = "pv";

  // verify
  std::string suite;
  std::vector<double> R;
  int trials = 20;
  int suitePoints = 16;

  // constants / ledger inputs
  int dim = 2;
  double s = 0.5;
  double lambda = 1.0;
  double Lambda = 1.0;
  double M = 0.0;
  std::string format = "csv";

  // density
  std::string center = "origin";
  std::string radii = "1e-3:1e3:13";
  std::string target;
};

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json readJsonFile(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string(what) + " file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string(what) + " " + path + ": " + e.what());
  }
}

// CLI runs on unbounded scenes, so the far field reaches far enough for the tail bound to vanish.
QuadConfig loadConfig(const Options& o) {
  json j = {{"outerRadius", 1e12}, {"kMax", 40}};
  if (!o.configPath.empty()) j.update(readJsonFile(o.configPath, "config"));
  j["seed"] = o.seed;
  try {
    QuadConfig c = QuadConfig::fromJson(j);
    c.exec = workerCount() > 1 ? Exec::Parallel : Exec::Serial;
    return c;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json loadSceneJson(const Options& o) {
  if (o.scenePath.empty()) throw UsageError("--scene is required");
  return readJsonFile(o.scenePath, "scene");
}

RegionSet sceneOf(const json& j, const std::string& path) {
  try {
    return sceneFromJson(j);
  } catch (const std::invalid_argument& e) {
    throw UsageError("scene " + path + ": " + e.what());
  }
}

KernelSpec kernelOf(const Options& o, int dim) {
  if (o.kernelPath.empty()) return fractionalKernel(dim, o.s);
  try {
    return kernelFromJson(readJsonFile(o.kernelPath, "kernel"), dim);
  } catch (const std::invalid_argument& e) {
    throw UsageError("kernel " + o.kernelPath + ": " + e.what());
  }
}

std::vector<double> parseNumbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
  }
  return out;
}

Point pointOf(const std::vector<double>& v, int dim, const std::string& text) {
  if (static_cast<int>(v.size()) != dim) {
    throw UsageError("point '" + text + "' has " + std::to_string(v.size()) + " coordinates, scene dim is " +
                     std::to_string(dim));
  }
  return Point(std::span<const double>(v));
}

// origin | anchor | <name from the scene's "points"> | <count> | x,y;x,y
std::vector<Point> resolvePoints(const std::string& spec, const RegionSet& set, const json& scene,
                                 std::uint64_t seed) {
  const int d = set.dim();
  if (spec == "origin") return {Point(d)};
  if (spec == "anchor") return {set.anchor()};
  if (scene.contains("points") && scene.at("points").contains(spec)) {
    const auto v = scene.at("points").at(spec).get<std::vector<double>>();
    return {pointOf(v, d, spec)};
  }
  if (!spec.empty() && spec.find_first_not_of("0123456789") == std::string::npos) {
    const int n = std::stoi(spec);
    if (n < 1) throw UsageError("--points count must be >= 1");
    Rng rng(deriveSeed(seed, 0x9017));
    const BallRegion window{set.anchor(), 1.0};
    std::vector<Point> out;
    for (int tries = 0; static_cast<int>(out.size()) < n; ++tries) {
      if (tries > 1000 * n) throw std::runtime_error("could not sample boundary points near the anchor");
      if (auto p = set.sampleBoundary(rng, window)) out.push_back(*p);
    }
    return out;
  }
  std::vector<Point> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok.empty()) continue;
    if (tok.find_first_not_of("0123456789+-.eE,") != std::string::npos) {
      throw UsageError("unknown point '" + tok + "' (use origin, anchor, a scene point name, a count or x,y;...)");
    }
    out.push_back(pointOf(parseNumbers(tok, ','), d, tok));
  }
  if (out.empty()) throw UsageError("--points is empty");
  return out;
}

std::vector<double> resolveRadii(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    const auto v = parseNumbers(spec, ':');
    if (v.size() != 3 || !(v[0] > 0.0) || !(v[1] > v[0]) || v[2] < 2 || v[2] != std::floor(v[2])) {
      throw UsageError("--radii a:b:n needs 0 < a < b and integer n >= 2");
    }
    std::vector<double> out;
    const int n = static_cast<int>(v[2]);
    for (int i = 0; i < n; ++i) out.push_back(v[0] * std::pow(v[1] / v[0], static_cast<double>(i) / (n - 1)));
    return out;
  }
  auto v = parseNumbers(spec, ',');
  if (v.empty()) throw UsageError("--radii is empty");
  return v;
}

ConstantLedger ledgerFor(const Options& o, int dim, const std::optional<KernelSpec>& k) {
  try {
    if (k) return buildLedger(dim, k->s(), k->lambda(), k->Lambda(), o.M);
    return buildLedger(dim, o.s, o.lambda, o.Lambda, o.M);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json runConfig(const std::string& command, const Options& o, const QuadConfig* cfg) {
  json j = {{"command", command},
            {"scene", o.scenePath},
            {"kernel", o.kernelPath},
            {"config", o.configPath},
            {"out", o.outPath},
            {"seed", o.seed},
            {"workers", workerCount()}};
  if (cfg) j["quad"] = cfg->toJson();
  if (command == "curvature") j["options"] = {{"points", o.points}, {"method", o.method}};
  if (command == "verify") {
    j["options"] = {{"suite", o.suite}, {"R", o.R}, {"trials", o.trials}, {"points", o.suitePoints},
                    {"dim", o.dim},     {"s", o.s}, {"M", o.M}};
  }
  if (command == "constants") {
    j["options"] = {{"dim", o.dim}, {"s", o.s}, {"lambda", o.lambda}, {"Lambda", o.Lambda}, {"M", o.M}};
  }
  if (command == "density") {
    j["options"] = {{"center", o.center}, {"radii", o.radii}, {"target", o.target}, {"s", o.s}, {"M", o.M}};
  }
  return j;
}

std::string csvHeader(const json& rc, double wall) {
  std::ostringstream h;
  h << "# version: " << NLGEOM_VERSION << "\n";
  h << "# runConfig: " << rc.dump() << "\n";
  h << "# seed: " << rc.at("seed").get<std::uint64_t>() << "\n";
  h << "# wallTimeSeconds: " << wall << "\n";
  return h.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

double secondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pointCsv(const Point& p) {
  std::string out;
  for (int i = 0; i < p.dim(); ++i) out += (i ? ";" : "") + fmt17(p[i]);
  return out;
}

int cmdCurvature(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json sj = loadSceneJson(o);
  const RegionSet set = sceneOf(sj, o.scenePath);
  const KernelSpec k = kernelOf(o, set.dim());
  const QuadConfig cfg = loadConfig(o);
  if (o.method != "pv" && o.method != "ball") throw UsageError("--method must be pv or ball");
  const auto points = resolvePoints(o.points, set, sj, o.seed);

  std::ostringstream body;
  body << "point,method,verdict,value,errorBound,farField,farFieldError,tail,innerRemainder\n";
  bool allConverged = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& x = points[i];
    if (!set.onBoundary(x)) throw UsageError("point " + pointCsv(x) + " is not on the boundary of the scene");
    QuadConfig c = cfg;
    c.seed = deriveSeed(o.seed, 0xc0, i);
    PvEstimate pv;
    if (o.method == "pv") {
      pv = curvaturePV(set, k, x, c);
    } else {
      ExteriorBallOptions eb;
      eb.seed = deriveSeed(o.seed, 0xc1, i);
      const auto found = findExteriorBall(set, x, 1.0, eb);
      if (!found.ball) {
        allConverged = false;
        body << pointCsv(x) << ",ball,NotApplicable,nan,nan,nan,nan,nan,nan\n";
        continue;
      }
      pv = curvatureViaTouchingBall(set, k, *found.ball, c);
    }
    allConverged = allConverged && pv.verdict == Verdict::Converged;
    body << pointCsv(x) << "," << o.method << "," << verdictName(pv.verdict) << "," << fmt17(pv.value) << ","
         << fmt17(pv.errorBound) << "," << fmt17(pv.farField) << "," << fmt17(pv.farFieldError) << ","
         << fmt17(pv.tail) << "," << fmt17(pv.innerRemainder) << "\n";
  }
  emit(csvHeader(runConfig("curvature", o, &cfg), secondsSince(t0)) + body.str(), o.outPath);
  return allConverged ? 0 : 3;
}

void blowupPlot(const SuiteReport& rep, const std::string& path) {
  if (!rep.details.contains("points") || rep.details.at("points").empty()) {
    throw UsageError("--plot: suite " + rep.suite + " has no blow-up fit to plot");
  }
  const json& first = rep.details.at("points").at(0);
  cli::Series val{"integral", {}, {}, "#1f77b4"};
  cli::Series env{"envelope", {}, {}, "#d62728", false, true};
  for (const auto& row : first.at("rows")) {
    val.x.push_back(row.at("r").get<double>());
    val.y.push_back(row.at("value").at("value").get<double>());
    env.x.push_back(row.at("r").get<double>());
    env.y.push_back(row.at("envelope").get<double>());
  }
  cli::PlotSpec spec{"blow-up fit, slope " + (first.at("slope").is_null() ? std::string("n/a")
                                                                          : fmt17(first.at("slope").get<double>())),
                     "r", "truncated integral", true, true, {val, env}};
  emit(cli::renderSvg(spec), path);
}

int cmdVerify(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& names = suiteNames();
  if (std::find(names.begin(), names.end(), o.suite) == names.end()) throw UsageError("unknown suite '" + o.suite + "'");
  SuiteParams p;
  p.dim = o.dim;
  p.s = o.s;
  p.M = o.M;
  p.radii = o.R;
  p.trials = o.trials;
  p.points = o.suitePoints;
  p.seed = o.seed;
  p.cfg = loadConfig(o);
  if (!o.scenePath.empty()) p.scene = sceneOf(loadSceneJson(o), o.scenePath);
  if (!o.kernelPath.empty()) p.kernel = kernelOf(o, p.scene ? p.scene->dim() : o.dim);
  SuiteReport rep;
  try {
    rep = runSuite(o.suite, p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& line : rep.lines) std::cout << line << "\n";
  std::cout << o.suite << ": " << checkVerdictName(rep.verdict) << "\n";
  const json out = {{"version", NLGEOM_VERSION},
                    {"runConfig", runConfig("verify", o, &p.cfg)},
                    {"seed", o.seed},
                    {"wallTimeSeconds", secondsSince(t0)},
                    {"report", rep.toJson()}};
  if (!o.outPath.empty()) emit(out.dump(2) + "\n", o.outPath);
  if (!o.plotPath.empty()) blowupPlot(rep, o.plotPath);
  return exitCodeFor(rep.verdict);
}

int cmdConstants(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConstantLedger L = ledgerFor(o, o.dim, std::nullopt);
  if (o.format == "text") {
    emit(ledgerText(L), o.outPath);
  } else if (o.format == "csv") {
    emit(csvHeader(runConfig("constants", o, nullptr), secondsSince(t0)) + ledgerToCsv(L), o.outPath);
  } else {
    throw UsageError("--format must be csv or text");
  }
  return 0;
}

int cmdDensity(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const json sj = loadSceneJson(o);
  const RegionSet set = sceneOf(sj, o.scenePath);
  const QuadConfig cfg = loadConfig(o);
  const auto centers = resolvePoints(o.center, set, sj, o.seed);
  if (centers.size() != 1) throw UsageError("--center must name one point");
  const auto radii = resolveRadii(o.radii);
  std::optional<double> target;
  if (o.target == "ledger") {
    std::optional<KernelSpec> k;
    if (!o.kernelPath.empty()) k = kernelOf(o, set.dim());
    target = ledgerFor(o, set.dim(), k).delta12;
  } else if (!o.target.empty()) {
    const auto v = parseNumbers(o.target, ',');
    if (v.size() != 1) throw UsageError("--target must be a number or 'ledger'");
    target = v[0];
  }
  DensityReport rep;
  try {
    rep = densityProfile(set, centers[0], radii, cfg, target);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream body;
  body << "r,fraction,fractionError,boundaryFraction,boundaryFractionError,target,pass\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    body << fmt17(radii[i]) << "," << fmt17(rep.fractions[i].value) << "," << fmt17(rep.fractions[i].error) << ","
         << fmt17(rep.boundaryFractions[i].value) << "," << fmt17(rep.boundaryFractions[i].error) << ","
         << (target ? fmt17(*target) : "") << "," << (target ? (rep.passes[i] ? "true" : "false") : "") << "\n";
  }
  emit(csvHeader(runConfig("density", o, &cfg), secondsSince(t0)) + body.str(), o.outPath);
  if (!o.plotPath.empty()) {
    cli::Series frac{"|E cap B_r| / |B_r|", radii, {}, "#1f77b4"};
    for (const auto& f : rep.fractions) frac.y.push_back(f.value);
    cli::PlotSpec spec{"density profile", "r", "volume fraction", true, false, {frac}};
    if (target) spec.series.push_back({"target", radii, std::vector<double>(radii.size(), *target), "#d62728", false, true});
    emit(cli::renderSvg(spec), o.plotPath);
  }
  if (!target) return 0;
  return rep.allPass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Nonlocal perimeters, nonlocal mean curvature and density-estimate verifiers"};
  app.set_version_flag("--version", std::string(NLGEOM_VERSION));
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--config", o.configPath, "QuadConfig JSON (overrides the CLI defaults)");
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--workers", o.workers, "worker threads (fallback: NONLOCAL_GEOM_WORKERS)");
    c->add_option("--out", o.outPath, "output file (default stdout)");
  };

  auto* curv = app.add_subcommand("curvature", "nonlocal mean curvature at boundary points (CSV)");
  common(curv);
  curv->add_option("--scene", o.scenePath, "scene JSON")->required();
  curv->add_option("--kernel", o.kernelPath, "kernel JSON (default fractional, --s)");
  curv->add_option("--s", o.s, "order of the default fractional kernel");
  curv->add_option("--points", o.points, "origin | anchor | scene point name | count | x,y;x,y");
  curv->add_option("--method", o.method, "pv or ball (touching ball)");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  common(verify);
  verify->add_option("suite", o.suite, "suite name")->required();
  verify->add_option("--scene", o.scenePath, "scene JSON");
  verify->add_option("--kernel", o.kernelPath, "kernel JSON");
  verify->add_option("--dim", o.dim, "dimension when no scene is given");
  verify->add_option("--s", o.s, "order when no kernel is given");
  verify->add_option("--M", o.M, "curvature bound M");
  verify->add_option("--R", o.R, "radius sweep");
  verify->add_option("--trials", o.trials, "random instances");
  verify->add_option("--points", o.suitePoints, "sampled points");
  verify->add_option("--plot", o.plotPath, "SVG of the first blow-up fit (lemma42, thm16)");

  auto* constants = app.add_subcommand("constants", "explicit constant ledger");
  common(constants);
  constants->add_option("--dim", o.dim, "dimension");
  constants->add_option("--s", o.s, "order");
  constants->add_option("--lambda", o.lambda, "kernel lower bound");
  constants->add_option("--Lambda", o.Lambda, "kernel upper bound");
  constants->add_option("--M", o.M, "curvature bound");
  constants->add_option("--format", o.format, "csv or text");

  auto* density = app.add_subcommand("density", "volume fraction profile (CSV, optional SVG)");
  common(density);
  density->add_option("--scene", o.scenePath, "scene JSON")->required();
  density->add_option("--kernel", o.kernelPath, "kernel JSON, for --target ledger");
  density->add_option("--center", o.center, "origin | anchor | scene point name | x,y");
  density->add_option("--radii", o.radii, "a:b:n (log spaced) or r1,r2,...");
  density->add_option("--target", o.target, "number or 'ledger' (delta from the constant ledger)");
  density->add_option("--s", o.s, "order for --target ledger without a kernel");
  density->add_option("--M", o.M, "curvature bound for --target ledger");
  density->add_option("--plot", o.plotPath, "SVG of density vs radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (o.workers <= 0) {
    if (const char* env = std::getenv("NONLOCAL_GEOM_WORKERS")) o.workers = std::atoi(env);
  }
  if (o.workers > 0) setWorkerCount(o.workers);

  try {
    if (curv->parsed()) return cmdCurvature(o);
    if (verify->parsed()) return cmdVerify(o);
    if (constants->parsed()) return cmdConstants(o);
    if (density->parsed()) return cmdDensity(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
