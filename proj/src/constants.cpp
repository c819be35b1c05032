#include "nlgeom/constants.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nlgeom/curvature.hpp"
#include "nlgeom/measure.hpp"

namespace nlgeom {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csvField(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parseDouble(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("ledger csv: bad number for " + what + ": '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("ledger csv: trailing characters in " + what + ": '" + text + "'");
  return v;
}

}  // namespace

ConstantLedger buildLedger(int d, double s, double lambda, double Lambda, double M) {
  if (d < 1 || d > 8) throw std::invalid_argument("buildLedger: d must lie in [1, 8]");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("buildLedger: s must lie in (0, 1)");
  if (!(lambda > 0.0) || !(Lambda >= lambda) || !std::isfinite(Lambda)) {
    throw std::invalid_argument("buildLedger: need 0 < lambda <= Lambda");
  }
  if (!(M >= 0.0) || !std::isfinite(M)) throw std::invalid_argument("buildLedger: M must be a finite number >= 0");
  ConstantLedger L;
  L.d = d;
  L.s = s;
  L.lambda = lambda;
  L.Lambda = Lambda;
  L.M = M;
  const double B1 = unitBallVolume(d);
  L.Hball = ballCurvatureExact(d, s);
  L.C1 = Lambda * L.Hball;
  L.C4 = lambda * d * B1 / (2.0 * s);
  L.C2 = L.C4;
  L.C3 = std::pow(2.0, -s - s / d);
  L.beta = std::pow(L.C2 * L.C3 / (M + 1.0 + L.C1 + L.C2), d / s);
  L.CHL = std::pow(3.0, d);
  L.theta = 0.5 / (std::pow(4.0, d) * L.CHL);
  L.C1shell = lambda * d * B1 * (std::pow(2.0, s) - 1.0) / s;
  L.C2shell = Lambda * B1 * std::pow(2.0, d + s);
  L.gamma = L.C1shell / (2.0 * L.C2shell);
  L.Cshell = L.C1shell / 2.0;
  L.alphaThm12 = L.beta;
  L.alphaThm16 = std::min(L.beta, L.gamma);
  L.delta12 = L.theta * L.alphaThm12;
  L.delta16 = L.theta * L.alphaThm16;
  for (const LedgerRow& row : ledgerReport(L)) {
    if (!(row.value > 0.0) || !std::isfinite(row.value)) {
      throw std::runtime_error("buildLedger: " + row.name + " = " + fmt(row.value) + " is not positive");
    }
  }
  if (!(L.alphaThm12 < 1.0) || !(L.alphaThm16 < 1.0)) {
    throw std::runtime_error("buildLedger: alpha = " + fmt(L.alphaThm12) + " is not below 1");
  }
  return L;
}

std::vector<LedgerRow> ledgerReport(const ConstantLedger& L) {
  return {
      {"Hball", L.Hball, "2^(1-s) pi^((d-1)/2) Gamma((1-s)/2) / (s Gamma((d-s)/2))", "curvature of the unit ball"},
      {"C1", L.C1, "Lambda * Hball", "touching-ball curvature bound"},
      {"C4", L.C4, "lambda d |B1| / (2s)", "lower bound of the kernel integral outside B_rho"},
      {"C2", L.C2, "C4", "lower bound of the kernel integral outside B_rho"},
      {"C3", L.C3, "2^(-s-s/d)", "radius of the rearranged ball"},
      {"beta", L.beta, "(C2 C3 / (M + 1 + C1 + C2))^(d/s)", "sparse-set curvature threshold"},
      {"CHL", L.CHL, "3^d", "Hardy-Littlewood weak (1,1) constant (Vitali covering)"},
      {"theta", L.theta, "1/2 (4^d CHL)^(-1)", "measure of the sparse-point set"},
      {"C1shell", L.C1shell, "lambda d |B1| (2^s - 1) / s", "annulus integral of the kernel"},
      {"C2shell", L.C2shell, "Lambda |B1| 2^(d+s)", "annulus bound from the density of E"},
      {"gamma", L.gamma, "C1shell / (2 C2shell)", "shell lower bound density threshold"},
      {"Cshell", L.Cshell, "C1shell / 2", "shell lower bound constant"},
      {"alphaThm12", L.alphaThm12, "beta", "density estimate for subsolutions"},
      {"alphaThm16", L.alphaThm16, "min(beta, gamma)", "positive measure of the boundary"},
      {"delta12", L.delta12, "theta * alphaThm12", "density estimate for subsolutions"},
      {"delta16", L.delta16, "theta * alphaThm16", "positive measure of the boundary"},
  };
}

std::string ledgerText(const ConstantLedger& L) {
  std::ostringstream os;
  os << "d = " << L.d << ", s = " << fmt(L.s) << ", lambda = " << fmt(L.lambda) << ", Lambda = " << fmt(L.Lambda)
     << ", M = " << fmt(L.M) << "\n";
  for (const LedgerRow& r : ledgerReport(L)) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-11s %-24.17g %s\n", r.name.c_str(), r.value, r.formula.c_str());
    os << buf;
  }
  return os.str();
}

std::string ledgerToCsv(const ConstantLedger& L) {
  std::ostringstream os;
  os << "# d," << L.d << "\n# s," << fmt(L.s) << "\n# lambda," << fmt(L.lambda) << "\n# Lambda," << fmt(L.Lambda)
     << "\n# M," << fmt(L.M) << "\n";
  os << "name,value,formula,anchor\n";
  for (const LedgerRow& r : ledgerReport(L)) {
    os << csvField(r.name) << ',' << fmt(r.value) << ',' << csvField(r.formula) << ',' << csvField(r.anchor) << '\n';
  }
  return os.str();
}

ConstantLedger ledgerFromCsv(const std::string& csv) {
  std::map<std::string, std::string> inputs;
  std::map<std::string, double> values;
  std::istringstream in(csv);
  std::string line;
  bool header = false;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto f = splitCsvLine(line.substr(1));
      if (f.size() == 2) {
        std::string key = f[0];
        key.erase(0, key.find_first_not_of(' '));
        inputs[key] = f[1];
      }
      continue;
    }
    const auto f = splitCsvLine(line);
    if (!header) {
      if (f.size() < 2 || f[0] != "name" || f[1] != "value") {
        throw std::invalid_argument("ledger csv: line " + std::to_string(lineNo) + ": expected header name,value,...");
      }
      header = true;
      continue;
    }
    if (f.size() < 2) throw std::invalid_argument("ledger csv: line " + std::to_string(lineNo) + ": too few fields");
    values[f[0]] = parseDouble(f[1], f[0]);
  }
  for (const char* key : {"d", "s", "lambda", "Lambda", "M"}) {
    if (!inputs.count(key)) throw std::invalid_argument(std::string("ledger csv: missing input '# ") + key + "'");
  }
  ConstantLedger L = buildLedger(static_cast<int>(parseDouble(inputs["d"], "d")), parseDouble(inputs["s"], "s"),
                                 parseDouble(inputs["lambda"], "lambda"), parseDouble(inputs["Lambda"], "Lambda"),
                                 parseDouble(inputs["M"], "M"));
  // The file is the source of truth for the values; they must match the recomputation.
  for (const LedgerRow& r : ledgerReport(L)) {
    const auto it = values.find(r.name);
    if (it == values.end()) throw std::invalid_argument("ledger csv: missing row '" + r.name + "'");
    if (it->second != r.value) {
      throw std::invalid_argument("ledger csv: row '" + r.name + "' = " + fmt(it->second) +
                                  " disagrees with the inputs (" + fmt(r.value) + ")");
    }
  }
  return L;
}

}  // namespace nlgeom
