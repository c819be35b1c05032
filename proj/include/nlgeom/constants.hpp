#pragma once

#include <string>
#include <vector>

namespace nlgeom {

struct LedgerRow {
  std::string name;
  double value = 0.0;
  std::string formula;
  std::string anchor;  // proof step the constant comes from
};

/// Explicit constants of the density-estimate proof chain, computed from (d, s, lambda, Lambda, M).
struct ConstantLedger {
  int d = 1;
  double s = 0.5;
  double lambda = 1.0;
  double Lambda = 1.0;
  double M = 0.0;

  double Hball = 0.0;
  double C1 = 0.0;
  double C4 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double beta = 0.0;
  double CHL = 0.0;
  double theta = 0.0;
  double C1shell = 0.0;
  double C2shell = 0.0;
  double gamma = 0.0;
  double Cshell = 0.0;
  double alphaThm12 = 0.0;
  double alphaThm16 = 0.0;
  double delta12 = 0.0;
  double delta16 = 0.0;

  bool operator==(const ConstantLedger&) const = default;
};

ConstantLedger buildLedger(int d, double s, double lambda, double Lambda, double M);

/// The 16 constants in dependency order.
std::vector<LedgerRow> ledgerReport(const ConstantLedger& ledger);

/// Aligned plain-text table.
std::string ledgerText(const ConstantLedger& ledger);

/// CSV with columns name,value,formula,anchor; the inputs go in leading '#' lines.
std::string ledgerToCsv(const ConstantLedger& ledger);
ConstantLedger ledgerFromCsv(const std::string& csv);

}  // namespace nlgeom
