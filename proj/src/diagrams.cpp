#include "tmach/diagrams.h"

#include <algorithm>
#include <iterator>
#include <set>
#include <stdexcept>

namespace tmach {

namespace {

std::string shift_label(int k) {
  if (k == 0) return "0";
  std::string s = k > 0 ? "+" : "-";
  if (std::abs(k) != 1) s += std::to_string(std::abs(k));
  return s + "T";
}

std::string edge_key(const TrackEdge& e) {
  switch (e.kind) {
    case TrackEdge::Kind::arrow:
      return "A(" + std::to_string(e.from) + ">" + std::to_string(e.to) + "," + std::to_string(e.shift) + ")";
    case TrackEdge::Kind::loop: return "L(" + std::to_string(e.from) + ")";
    case TrackEdge::Kind::dangling:
      return std::string(e.creator ? "C(" : "D(") + std::to_string(e.creator ? e.to : e.from) + "," +
             std::to_string(e.shift) + ")";
  }
  return "";
}

std::string edge_text(const TrackEdge& e) {
  const std::string dot1 = "(1)●";
  const std::string dot2 = "●(2)";
  switch (e.kind) {
    case TrackEdge::Kind::arrow: {
      const std::string label = "[" + shift_label(e.shift) + "]";
      if (e.from == 2 && e.to == 1) return dot1 + "<--" + label + "--" + dot2;
      if (e.from == 1 && e.to == 2) return dot1 + "--" + label + "-->" + dot2;
      return "(" + std::to_string(e.from) + ")●↻" + label;
    }
    case TrackEdge::Kind::loop: return "(" + std::to_string(e.from) + ")●↺";
    case TrackEdge::Kind::dangling: {
      const int r = e.creator ? e.to : e.from;
      return "(" + std::to_string(r) + ")●" + (e.creator ? "<··" : "··>") + "[" + shift_label(e.shift) + "]";
    }
  }
  return "";
}

int kind_rank(TrackEdge::Kind k) {
  switch (k) {
    case TrackEdge::Kind::arrow: return 0;
    case TrackEdge::Kind::loop: return 1;
    case TrackEdge::Kind::dangling: return 2;
  }
  return 3;
}

void canonicalize(std::vector<TrackEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const TrackEdge& a, const TrackEdge& b) {
    if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
    return a < b;
  });
}

int mirror_region(int r) { return r == 1 ? 2 : r == 2 ? 1 : r; }

}  // namespace

bool WormTrack::conserving() const {
  return std::none_of(edges.begin(), edges.end(), [](const TrackEdge& e) { return e.kind == TrackEdge::Kind::dangling; });
}

std::string WormTrack::key() const {
  if (edges.empty()) return "0";
  std::string s;
  for (const auto& e : edges) s += (s.empty() ? "" : " ") + edge_key(e);
  return s;
}

WormTrack WormTrack::mirror() const {
  WormTrack m;
  for (auto e : edges) {
    e.from = mirror_region(e.from);
    e.to = mirror_region(e.to);
    e.shift = -e.shift;
    m.edges.push_back(e);
  }
  canonicalize(m.edges);
  return m;
}

WormTrack term_to_track(const OperatorTerm& t) {
  std::vector<ModeOp> cre;
  std::vector<ModeOp> ann;
  for (const auto& f : t.factors) {
    if (f.region > 2) continue;
    (f.dagger ? cre : ann).push_back(f);
  }
  std::sort(cre.begin(), cre.end());
  std::sort(ann.begin(), ann.end());

  WormTrack track;
  auto pair_where = [&](auto pred) {
    for (std::size_t i = 0; i < cre.size();) {
      auto it = std::find_if(ann.begin(), ann.end(), [&](const ModeOp& a) { return pred(cre[i], a); });
      if (it == ann.end()) {
        ++i;
        continue;
      }
      if (cre[i].region == it->region && cre[i].shift == it->shift) {
        track.edges.push_back(TrackEdge::loop(cre[i].region));
      } else {
        track.edges.push_back(TrackEdge::arrow(it->region, cre[i].region, cre[i].shift - it->shift));
      }
      ann.erase(it);
      cre.erase(cre.begin() + static_cast<std::ptrdiff_t>(i));
    }
  };
  pair_where([](const ModeOp& c, const ModeOp& a) {
    return (c.region == 1 && c.shift == a.shift + 1 && a.region == 2) ||
           (c.region == 2 && c.shift == a.shift - 1 && a.region == 1);
  });
  pair_where([](const ModeOp& c, const ModeOp& a) { return c.region == a.region && c.shift == a.shift; });
  pair_where([](const ModeOp&, const ModeOp&) { return true; });
  for (const auto& c : cre) track.edges.push_back(TrackEdge::dangling(c));
  for (const auto& a : ann) track.edges.push_back(TrackEdge::dangling(a));
  canonicalize(track.edges);
  return track;
}

std::string render(const WormTrack& t) {
  if (t.edges.empty()) return "∅";
  std::string s;
  for (const auto& e : t.edges) s += (s.empty() ? "" : " ") + edge_text(e);
  return s;
}

std::vector<Rational> TrackRow::weights() const {
  std::vector<Rational> w;
  for (const auto& e : entries) w.push_back(e.weight);
  std::sort(w.begin(), w.end());
  return w;
}

const TrackRow* TrackTable::row(const Monomial& m) const {
  for (const auto& r : rows) {
    if (r.monomial == m) return &r;
  }
  return nullptr;
}

TrackTable tabulate(int k, int regions) {
  if (k < 1 || k > 3) throw std::invalid_argument("track tables cover k = 1..3");
  const Hamiltonian h = build_hamiltonian(regions);
  const auto groups = group_by_monomial(
      hamiltonian_power(h, k, {.max_power = 4, .shift_window = 8, .deltas = DeltaMode::kronecker}));
  TrackTable table{k, {}};
  for (const auto& [m, sum] : groups) {
    TrackRow row{m, {}};
    for (const auto& t : sum.term_list()) {
      const bool in_mouths = std::all_of(t.factors.begin(), t.factors.end(), [](const ModeOp& f) { return f.region <= 2; });
      if (!in_mouths || t.factors.empty()) continue;
      const ComplexRational c = t.coeff.coeff(Monomial{});
      if (c.im != 0) throw std::logic_error("track weights must be real");
      row.entries.push_back({term_to_track(t), c.re, t});
    }
    std::stable_sort(row.entries.begin(), row.entries.end(),
                     [](const TrackEntry& a, const TrackEntry& b) { return a.track.key() < b.track.key(); });
    table.rows.push_back(std::move(row));
  }
  // Rows in the printed order: pure powers first, then mixed, each by descending alpha, beta.
  std::sort(table.rows.begin(), table.rows.end(), [](const TrackRow& a, const TrackRow& b) {
    auto rank = [](const Monomial& m) {
      const int pure = (m.exp[0] == m.degree() || m.exp[1] == m.degree() || m.exp[2] == m.degree()) ? 0 : 1;
      return std::make_tuple(pure, m.exp[2], -m.exp[0], -m.exp[1]);
    };
    return rank(a.monomial) < rank(b.monomial);
  });
  return table;
}

const std::vector<PrintedTrackRow>& printed_track_rows(int k) {
  static const std::vector<PrintedTrackRow> k1 = {
      {Monomial{{1, 0, 0}}, 1, {}}, {Monomial{{0, 1, 0}}, 1, {}}, {Monomial{{0, 0, 1}}, 2, {}}};
  static const std::vector<PrintedTrackRow> k2 = {
      {Monomial{{2, 0, 0}}, 2, {}}, {Monomial{{0, 2, 0}}, 2, {}}, {Monomial{{0, 0, 2}}, 3, {}},
      {Monomial{{1, 1, 0}}, 1, {}}, {Monomial{{1, 0, 1}}, 2, {}}, {Monomial{{0, 1, 1}}, 2, {}}};
  static const std::vector<PrintedTrackRow> k3 = {
      {Monomial{{3, 0, 0}}, 3, {1, 3, 1}},
      {Monomial{{0, 3, 0}}, 3, {1, -6, 7}},
      {Monomial{{0, 0, 3}}, 9, {1, 1, 1, 1, 4, 4, 4, 5, 5}},
      {Monomial{{2, 1, 0}}, 4, {3, -3, 1, -1}},
      {Monomial{{1, 2, 0}}, 3, {3, -9, 3}},
      {Monomial{{2, 0, 1}}, 9, {3, 3, 3, 9, 9, 10, 3, 3, 5}},
      {Monomial{{1, 1, 1}}, 14, {8, 8, 8, 7, 7, -2, 2, -9, 3, -1, -2, -1, -1, -1}},
      {Monomial{{0, 2, 1}}, 8, {3, 3, 6, -9, -9, -19, 7, 3}},
      {Monomial{{0, 1, 2}}, 11, {2, 2, 2, 7, 7, 8, -3, -3, -1, -10, -5}},
  };
  static const std::vector<PrintedTrackRow> none;
  switch (k) {
    case 1: return k1;
    case 2: return k2;
    case 3: return k3;
    default: return none;
  }
}

bool TrackRowComparison::matches() const {
  if (!printed_row_exists) return false;
  if (engine_diagrams != printed_diagrams) return false;
  return printed_weights.empty() || engine_weights == printed_weights;
}

std::vector<TrackRowComparison> compare_with_printed(const TrackTable& t) {
  std::vector<TrackRowComparison> out;
  const auto& printed = printed_track_rows(t.k);
  for (const auto& row : t.rows) {
    TrackRowComparison c;
    c.monomial = row.monomial;
    c.engine_diagrams = static_cast<int>(row.entries.size());
    c.engine_weights = row.weights();
    auto it = std::find_if(printed.begin(), printed.end(), [&](const PrintedTrackRow& p) { return p.monomial == row.monomial; });
    if (it != printed.end()) {
      c.printed_row_exists = true;
      c.printed_diagrams = it->diagrams;
      for (long w : it->weights) c.printed_weights.emplace_back(w);
      std::sort(c.printed_weights.begin(), c.printed_weights.end());
    }
    out.push_back(std::move(c));
  }
  return out;
}

MirrorDiff mirror_diff(const TrackRow& a, const TrackRow& b) {
  std::multiset<std::pair<std::string, Rational>> left;
  std::multiset<std::pair<std::string, Rational>> right;
  for (const auto& e : a.entries) left.insert({e.track.mirror().key(), e.weight});
  for (const auto& e : b.entries) right.insert({e.track.key(), e.weight});
  MirrorDiff d;
  std::set_difference(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(d.only_in_mirrored));
  std::set_difference(right.begin(), right.end(), left.begin(), left.end(), std::back_inserter(d.only_in_other));
  return d;
}

std::string render_table(const TrackTable& t) {
  std::string out = "term | wormtracks and their weights (H^" + std::to_string(t.k) + ")\n";
  for (const auto& row : t.rows) {
    std::string line = to_string(row.monomial) + " |";
    bool first = true;
    for (const auto& e : row.entries) {
      Rational w = e.weight;
      std::string sign = w < 0 ? "-" : "+";
      if (w < 0) w = -w;
      std::string part = (first && sign == "+") ? " " : " " + sign + " ";
      if (w != 1) part += to_string(w) + "×";
      part += "[" + render(e.track) + "]";
      if (!e.track.conserving()) part += "(non-conserving)";
      line += part;
      first = false;
    }
    if (row.entries.empty()) line += " ∅";
    out += line + "\n";
  }
  return out;
}

ojson to_json(const TrackTable& t) {
  ojson rows = ojson::array();
  for (const auto& row : t.rows) {
    ojson entries = ojson::array();
    for (const auto& e : row.entries) {
      OperatorTerm bare = e.term;
      bare.coeff = Scalar(1);
      entries.push_back({{"key", e.track.key()},
                         {"render", render(e.track)},
                         {"weight", to_string(e.weight)},
                         {"conserving", e.track.conserving()},
                         {"term", to_string(bare)}});
    }
    rows.push_back({{"monomial", to_string(row.monomial)}, {"tracks", entries}});
  }
  return {{"k", t.k}, {"rows", rows}};
}

ojson to_json(const std::vector<TrackRowComparison>& c) {
  ojson rows = ojson::array();
  for (const auto& r : c) {
    ojson ew = ojson::array();
    for (const auto& w : r.engine_weights) ew.push_back(to_string(w));
    ojson pw = ojson::array();
    for (const auto& w : r.printed_weights) pw.push_back(to_string(w));
    ojson row{{"monomial", to_string(r.monomial)},
              {"engine_diagrams", r.engine_diagrams},
              {"engine_weights", ew},
              {"printed_row", r.printed_row_exists}};
    if (r.printed_row_exists) {
      row["printed_diagrams"] = r.printed_diagrams;
      row["printed_weights"] = pw;
    }
    row["matches"] = r.matches();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tmach
