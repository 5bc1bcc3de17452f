#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmach/json_io.h"
#include "tmach/opalg.h"

namespace tmach {

struct TrackEdge {
  enum class Kind { arrow, loop, dangling };
  Kind kind = Kind::loop;
  int from = 0;  // annihilated region (arrow, loop, dangling annihilator)
  int to = 0;    // created region (arrow, loop, dangling creator)
  int shift = 0;
  bool creator = false;  // for dangling edges only

  static TrackEdge arrow(int from, int to, int shift) { return {Kind::arrow, from, to, shift, false}; }
  static TrackEdge loop(int region) { return {Kind::loop, region, region, 0, false}; }
  static TrackEdge dangling(const ModeOp& op) {
    return {Kind::dangling, op.dagger ? 0 : op.region, op.dagger ? op.region : 0, op.shift, op.dagger};
  }
  friend auto operator<=>(const TrackEdge&, const TrackEdge&) = default;
};

/// Canonical edge multiset: arrows, then loops, then dangling edges.
struct WormTrack {
  std::vector<TrackEdge> edges;

  [[nodiscard]] bool conserving() const;
  /// Canonical text key; equal keys mean equal tracks.
  [[nodiscard]] std::string key() const;
  /// Regions 1 and 2 swapped, shifts negated.
  [[nodiscard]] WormTrack mirror() const;
  friend bool operator==(const WormTrack& a, const WormTrack& b) { return a.edges == b.edges; }
};

/// Pairs the factors of a term into edges. a1+(t+T) a2 and a2+(t-T) a1 hops are
/// paired first, then equal-time number pairs, then the rest in order; anything left
/// unpaired becomes a dangling edge. Factors in regions >= 3 are dropped.
WormTrack term_to_track(const OperatorTerm& t);

/// "(1)●<--[+T]--●(2)", "(1)●↺", "∅", ...
std::string render(const WormTrack& t);

struct TrackEntry {
  WormTrack track;
  Rational weight;
  OperatorTerm term;
};

struct TrackRow {
  Monomial monomial;
  std::vector<TrackEntry> entries;
  [[nodiscard]] std::vector<Rational> weights() const;  // sorted
};

struct TrackTable {
  int k = 0;
  std::vector<TrackRow> rows;
  [[nodiscard]] const TrackRow* row(const Monomial& m) const;
};

/// Groups the lattice-delta H^k by monomial. Only terms whose factors all sit in
/// regions 1 and 2 are listed; each term is one entry weighted by its coefficient.
TrackTable tabulate(int k, int regions = 3);

/// Printed diagram count per row for k = 1, 2 and printed weights per row for k = 3.
struct PrintedTrackRow {
  Monomial monomial;
  int diagrams = 0;
  std::vector<long> weights;  // empty where the printed table gives no weights
};
const std::vector<PrintedTrackRow>& printed_track_rows(int k);

struct TrackRowComparison {
  Monomial monomial;
  int engine_diagrams = 0;
  int printed_diagrams = 0;
  std::vector<Rational> engine_weights;
  std::vector<Rational> printed_weights;
  bool printed_row_exists = false;
  [[nodiscard]] bool matches() const;
};

std::vector<TrackRowComparison> compare_with_printed(const TrackTable& t);

/// Entries of `a`, mirrored, that are not matched in `b` and vice versa
/// (multiset difference on (track key, weight)).
struct MirrorDiff {
  std::vector<std::pair<std::string, Rational>> only_in_mirrored;
  std::vector<std::pair<std::string, Rational>> only_in_other;
  [[nodiscard]] bool empty() const { return only_in_mirrored.empty() && only_in_other.empty(); }
};
MirrorDiff mirror_diff(const TrackRow& a, const TrackRow& b);

/// Plain-text table, one row per monomial: "alpha^3 | (1)●<--[+T]--●(2)... + 3×..."
std::string render_table(const TrackTable& t);
ojson to_json(const TrackTable& t);
ojson to_json(const std::vector<TrackRowComparison>& c);

}  // namespace tmach
