#include <doctest.h>

#include "tmach/diagrams.h"

using namespace tmach;

namespace {

OperatorTerm term(std::vector<ModeOp> f, long c = 1) { return OperatorTerm{Scalar(c), {}, std::move(f)}; }

}  // namespace

TEST_CASE("term_to_track") {
  SUBCASE("hop into region 1") {
    auto t = term_to_track(term({creator(1, 1), annihilator(2)}));
    REQUIRE(t.edges.size() == 1);
    CHECK(t.edges[0] == TrackEdge::arrow(2, 1, 1));
    CHECK(render(t) == "(1)●<--[+T]--●(2)");
  }
  SUBCASE("hop into region 2") {
    auto t = term_to_track(term({creator(2, -1), annihilator(1)}));
    CHECK(t.edges == std::vector<TrackEdge>{TrackEdge::arrow(1, 2, -1)});
    CHECK(render(t) == "(1)●--[-T]-->●(2)");
  }
  SUBCASE("number operators") {
    CHECK(render(term_to_track(term({creator(1), annihilator(1)}))) == "(1)●↺");
    CHECK(render(term_to_track(term({creator(2), annihilator(2)}))) == "(2)●↺");
    CHECK(render(term_to_track(term({creator(3), annihilator(3)}))) == "∅");
    CHECK(render(WormTrack{}) == "∅");
  }
  SUBCASE("hops pair before loops") {
    auto t = term_to_track(term({creator(1, 1), creator(2, -1), annihilator(1), annihilator(2)}));
    CHECK(t.key() == "A(1>2,-1) A(2>1,1)");
    CHECK(t.conserving());
  }
  SUBCASE("unpaired factors dangle") {
    auto t = term_to_track(term({creator(1), creator(2), annihilator(2)}));
    CHECK_FALSE(t.conserving());
    CHECK(t.key() == "L(2) C(1,0)");
    CHECK(render(t) == "(2)●↺ (1)●<··[0]");
  }
  SUBCASE("order of commuting factors does not matter") {
    auto a = term_to_track(term({creator(1, 1), creator(2), annihilator(2), annihilator(2)}));
    auto b = term_to_track(term({creator(2), creator(1, 1), annihilator(2), annihilator(2)}));
    CHECK(a == b);
    CHECK(a.key() == "A(2>1,1) L(2)");
  }
  SUBCASE("mirror") {
    auto t = term_to_track(term({creator(1, 1), annihilator(2), creator(1), annihilator(1)}));
    CHECK(t.mirror().key() == "A(1>2,-1) L(2)");
    CHECK(t.mirror().mirror() == t);
  }
}

TEST_CASE("tabulate") {
  SUBCASE("first power has three rows") {
    auto t = tabulate(1);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].monomial == Monomial{{1, 0, 0}});
    CHECK(t.row(Monomial{{0, 0, 1}})->entries.size() == 2);
    for (const auto& c : compare_with_printed(t)) CHECK(c.matches());
  }
  SUBCASE("alpha beta at second order is one track") {
    auto t = tabulate(2);
    const auto* r = t.row(Monomial{{1, 1, 0}});
    REQUIRE(r);
    REQUIRE(r->entries.size() == 1);
    CHECK(r->entries[0].weight == 2);
    CHECK(render(r->entries[0].track) == "(1)●--[-T]-->●(2) (1)●<--[+T]--●(2)");
  }
  SUBCASE("cubic weights against the printed table") {
    auto t = tabulate(3);
    auto cmp = compare_with_printed(t);
    auto find = [&](Monomial m) {
      for (const auto& c : cmp) {
        if (c.monomial == m) return c;
      }
      throw std::out_of_range("row");
    };
    CHECK(find(Monomial{{3, 0, 0}}).matches());
    const auto b3 = find(Monomial{{0, 3, 0}});
    CHECK(b3.engine_weights == std::vector<Rational>{1, 1, 3});
    CHECK(b3.printed_weights == std::vector<Rational>{-6, 1, 7});
    CHECK_FALSE(b3.matches());
    CHECK_FALSE(find(Monomial{{1, 0, 2}}).printed_row_exists);
  }
  SUBCASE("weights account for every mouth-only term") {
    for (int k = 1; k <= 3; ++k) {
      auto t = tabulate(k);
      const auto groups = group_by_monomial(
          hamiltonian_power(build_hamiltonian(3), k, {.max_power = 4, .shift_window = 8, .deltas = DeltaMode::kronecker}));
      for (const auto& row : t.rows) {
        Rational tracks = 0;
        for (const auto& e : row.entries) tracks += abs(e.weight);
        Rational terms = 0;
        for (const auto& x : groups.at(row.monomial).term_list()) {
          bool mouths = !x.factors.empty();
          for (const auto& f : x.factors) mouths = mouths && f.region <= 2;
          if (mouths) terms += abs(x.coeff.coeff(Monomial{}).re);
        }
        CHECK(tracks == terms);
      }
    }
  }
  CHECK_THROWS_AS(tabulate(4), std::invalid_argument);
}

TEST_CASE("mirror symmetry of the cubic table") {
  auto t = tabulate(3);
  const auto* a2b = t.row(Monomial{{2, 1, 0}});
  const auto* ab2 = t.row(Monomial{{1, 2, 0}});
  REQUIRE(a2b);
  REQUIRE(ab2);
  // The algebra is invariant under 1<->2 with shifts negated and alpha<->beta.
  CHECK(mirror_diff(*a2b, *ab2).empty());
  CHECK(mirror_diff(*t.row(Monomial{{3, 0, 0}}), *t.row(Monomial{{0, 3, 0}})).empty());
  CHECK(mirror_diff(*t.row(Monomial{{2, 0, 1}}), *t.row(Monomial{{0, 2, 1}})).empty());
  CHECK_FALSE(mirror_diff(*a2b, *a2b).empty());

  // The printed weights for the same pair are not mirror images.
  const auto& printed = printed_track_rows(3);
  std::vector<long> w21;
  std::vector<long> w12;
  for (const auto& r : printed) {
    if (r.monomial == Monomial{{2, 1, 0}}) w21 = r.weights;
    if (r.monomial == Monomial{{1, 2, 0}}) w12 = r.weights;
  }
  std::sort(w21.begin(), w21.end());
  std::sort(w12.begin(), w12.end());
  CHECK(w21 != w12);
}

TEST_CASE("track exports") {
  auto t = tabulate(1);
  CHECK(render_table(t) ==
        "term | wormtracks and their weights (H^1)\n"
        "alpha | [(1)●<--[+T]--●(2)]\n"
        "beta | [(1)●--[-T]-->●(2)]\n"
        "g | [(1)●↺] + [(2)●↺]\n");
  auto j = to_json(t);
  CHECK(j["rows"][0]["tracks"][0]["key"] == "A(2>1,1)");
  CHECK(j["rows"][0]["tracks"][0]["weight"] == "1");
  auto c = to_json(compare_with_printed(tabulate(3)));
  CHECK(c[1]["printed_weights"] == ojson::array({"-6", "1", "7"}));
}
