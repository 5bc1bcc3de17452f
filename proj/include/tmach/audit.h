#pragma once

#include <string>
#include <vector>

#include "tmach/hammat.h"

namespace tmach {

/// One (n -> n', m) cell of a monomial group. `from` is the ket, `to` the bra.
struct FormulaAuditEntry {
  Monomial group;
  FockIndex from;
  FockIndex to;
  int offset = 0;
  SurdScalar engine;
  SurdScalar printed;
  SurdScalar oracle;
  [[nodiscard]] bool printed_match() const { return engine == printed; }
  [[nodiscard]] bool oracle_match() const { return engine == oracle; }
};

struct FormulaGroupSummary {
  Monomial group;
  int cells = 0;
  int printed_mismatches = 0;
  int oracle_mismatches = 0;
};

struct FormulaAudit {
  int k = 0;
  int regions = 0;
  int max_total = 0;
  std::vector<FormulaAuditEntry> entries;
  std::vector<FormulaGroupSummary> groups;

  [[nodiscard]] const FormulaGroupSummary& group(const Monomial& m) const;
};

/// Exact kernel of the printed k = 1 or k = 2 matrix-element formula on every ket with
/// sum(n) <= max_total, lattice delta. Printed (n, n', m) is stored as (bra n', ket n, m).
ExactKernel printed_kernel(int k, const Basis& basis, int max_total);

/// Compares the engine, the contraction oracle and the printed formula cell by cell.
/// Coefficients are split by parameter monomial; every cell where any of the three
/// is nonzero is listed.
FormulaAudit audit_printed_formulas(int k, int regions = 3, int max_total = 4);

ojson to_json(const SurdScalar& s);
ojson to_json(const FormulaAudit& a);

/// Parses one row of the printed H^3 table written in a compact notation:
/// `c1+` = a1+(t+T), `c2-` = a2+(t-T), `c2` = a2+(t), `a1` = a1(t), `n2` = c2 a2,
/// `sum_jk` sums the letters j, k over regions 1..regions, a bare integer is a constant.
/// Factors are sorted into normal form without contractions.
OperatorSum parse_table_row(const std::string& text, int regions, const Scalar& monomial);

struct TableRow {
  Monomial monomial;
  std::string text;
  std::string note;
};

/// Rows of the printed H^3 table, transcribed.
const std::vector<TableRow>& printed_h3_table();

struct TableRowAudit {
  Monomial monomial;
  std::string text;
  std::string note;
  std::vector<Rational> engine_coefficients;   // sorted multiset
  std::vector<Rational> printed_coefficients;  // sorted multiset
  std::vector<OperatorTerm> engine_only;
  std::vector<OperatorTerm> printed_only;
  /// (term, engine coefficient, printed coefficient) for shared operator content.
  std::vector<std::tuple<OperatorTerm, Rational, Rational>> coefficient_mismatches;
  int oracle_mismatches = 0;
  [[nodiscard]] bool matches_printed() const {
    return engine_only.empty() && printed_only.empty() && coefficient_mismatches.empty();
  }
};

struct TableAudit {
  int regions = 0;
  std::vector<TableRowAudit> rows;
  [[nodiscard]] int oracle_mismatches() const;
  [[nodiscard]] int printed_mismatch_rows() const;
};

/// Engine H^3 (lattice delta) against the transcribed table and the contraction oracle.
TableAudit audit_h3_table(int regions = 3);

ojson to_json(const TableAudit& a);

}  // namespace tmach
