#include <doctest.h>

#include <cstdint>

#include "support/dense_oracle.h"
#include "tmach/hammat.h"

using namespace tmach;
using cd = std::complex<double>;

namespace {

std::uint64_t fnv1a(const Basis& b) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : b.states()) {
    for (int v : s.n) {
      h ^= static_cast<std::uint64_t>(v) + 1;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

MatrixElementKernel kernel_of_power(const ModelParams& p, const Basis& b, int k) {
  return hamiltonian_kernels(p, b, k).back();
}

double joint_norm1(const ModelParams& p) {
  Basis b = enumerate_basis(p);
  auto ks = hamiltonian_kernels(p, b, 1);
  return joint_matrix(ks[0], b.size(), p.M).cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

TEST_CASE("basis enumeration") {
  Basis b3(3, 1);
  CHECK(b3.size() == 8);
  CHECK(b3[0].n == std::vector<int>{0, 0, 0});
  CHECK(b3[7].n == std::vector<int>{1, 1, 1});
  CHECK(b3[1].n == std::vector<int>{0, 0, 1});
  CHECK(Basis(3, 2).size() == 27);
  CHECK(Basis(4, 2).size() == 81);

  Basis b(4, 2);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index_of(b[i]) == i);
  CHECK_THROWS_AS((void)b.index_of(FockIndex{{3, 0, 0, 0}}), std::out_of_range);
  CHECK_THROWS_AS(Basis(20, 1), std::invalid_argument);

  SUBCASE("golden hash") {
    CHECK(fnv1a(Basis(3, 1)) == 11877866027040724071ULL);
    CHECK(fnv1a(Basis(4, 2)) == 12933939484721840435ULL);
  }
}

TEST_CASE("model parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [&](auto mutate) {
    ModelParams q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  };
  bad([](ModelParams& q) { q.N = 2; });
  bad([](ModelParams& q) { q.n_max = 0; });
  bad([](ModelParams& q) { q.M = 0; });
  bad([](ModelParams& q) { q.T = 0.0; });
  bad([](ModelParams& q) { q.delta = {DeltaProfile::Kind::gaussian, 0.0}; });

  CHECK(DeltaProfile::parse("kronecker").kind == DeltaProfile::Kind::kronecker);
  CHECK(DeltaProfile::parse("gaussian:0.25").sigma == doctest::Approx(0.25));
  CHECK_THROWS_AS(DeltaProfile::parse("gaussian:"), std::invalid_argument);
  CHECK_THROWS_AS(DeltaProfile::parse("gaussian:-1"), std::invalid_argument);
  CHECK_THROWS_AS(DeltaProfile::parse("box"), std::invalid_argument);
  CHECK(DeltaProfile::gaussian(0.5)(0.5) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("kernel of H") {
  ModelParams p;
  p.alpha = 0.3;
  p.beta = 0.7;
  p.g = 1.1;
  p.n_max = 2;
  Basis b = enumerate_basis(p);
  auto k = kernel_of_power(p, b, 1);
  auto idx = [&](std::vector<int> n) { return b.index_of(FockIndex{std::move(n)}); };

  SUBCASE("hop from region 2 into region 1 lands one step later") {
    CHECK(k.at(idx({1, 0, 0}), idx({0, 1, 0}), 1) == cd(0.3, 0.0));
    CHECK(k.entries.at({idx({1, 0, 0}), idx({0, 1, 0})}).size() == 1);
  }
  SUBCASE("number term is diagonal at zero offset") {
    CHECK(k.at(idx({2, 0, 0}), idx({2, 0, 0}), 0) == cd(2.2, 0.0));
    CHECK(k.entries.at({idx({2, 0, 0}), idx({2, 0, 0})}).size() == 1);
  }
  SUBCASE("unrelated pair") { CHECK(k.entries.count({idx({1, 0, 0}), idx({0, 0, 1})}) == 0); }
  SUBCASE("reverse hop carries beta one step earlier") {
    CHECK(k.at(idx({0, 2, 0}), idx({1, 1, 0}), -1).real() == doctest::Approx(0.7 * std::sqrt(2.0)));
  }
  SUBCASE("creation past the cap is counted") {
    ModelParams q = p;
    q.n_max = 1;
    Basis bq = enumerate_basis(q);
    auto kq = kernel_of_power(q, bq, 1);
    CHECK(kq.truncation.dropped_contributions > 0);
  }
}

TEST_CASE("kernel support and exact kernel agree") {
  ModelParams p;
  p.alpha = 0.4;
  p.beta = 0.2;
  p.g = 0.9;
  p.n_max = 2;
  Basis b = enumerate_basis(p);
  const Hamiltonian h = build_hamiltonian(3);
  const auto powers = hamiltonian_powers(h, 3, {.max_power = 3, .shift_window = 8, .deltas = DeltaMode::kronecker});
  for (int k = 1; k <= 3; ++k) {
    auto num = kernel_of(powers[static_cast<std::size_t>(k - 1)], p, b);
    CHECK(num.max_offset() <= k);
    TruncationReport tr;
    auto exact = exact_kernel_of(powers[static_cast<std::size_t>(k - 1)], b, &tr);
    CHECK(tr.dropped_contributions == num.truncation.dropped_contributions);
    std::size_t cells = 0;
    for (const auto& [pos, dk] : num.entries) cells += dk.size();
    CHECK(exact.size() <= cells);
    for (const auto& [key, v] : exact) {
      const auto [bra, ket, m] = key;
      const cd want = v.evaluate(p.values());
      const cd got = num.at(bra, ket, m);
      CHECK(std::abs(want - got) < 1e-12);
    }
  }
}

TEST_CASE("exact kernel keeps square-free radicands") {
  SurdScalar s;
  s.add(Scalar(1), 8);
  s.add(Scalar(1), 2);
  REQUIRE(s.parts().size() == 1);
  CHECK(s.parts().at(2) == Scalar(3));
  s.add(Scalar(-3), 2);
  CHECK(s.is_zero());
}

TEST_CASE("evolution series") {
  ModelParams p;
  Basis b = enumerate_basis(p);
  auto ks = hamiltonian_kernels(p, b, 8);

  SUBCASE("zero step is the identity") {
    auto ev = evolution_series(ks, b.size(), p.M, 0.0, 8);
    CHECK(ev.U == Eigen::MatrixXcd::Identity(ev.U.rows(), ev.U.cols()));
  }
  SUBCASE("first order is I - i dt H") {
    const double dt = 0.2;
    auto ev = evolution_series(ks, b.size(), p.M, dt, 1);
    auto h = joint_matrix(ks[0], b.size(), p.M);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(h.rows(), h.cols()) - cd(0.0, dt) * h;
    CHECK((ev.U - want).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ev.U(static_cast<Eigen::Index>(ev.joint(b.index_of(FockIndex{{1, 0, 0}}), 0)),
               static_cast<Eigen::Index>(ev.joint(b.index_of(FockIndex{{0, 1, 0}}), 1))) == cd(0.0, -dt * 0.3));
  }
  SUBCASE("orders 6 and 8 agree once the step is small") {
    // At norm*dt = 0.5 the scalar tail 0.5^7/7! alone is 1.5e-6, so the step sits just inside.
    const double dt = 0.4 / joint_norm1(p);
    auto u6 = evolution_series(ks, b.size(), p.M, dt, 6);
    auto u8 = evolution_series(ks, b.size(), p.M, dt, 8);
    CHECK((u6.U - u8.U).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(u6.effective_norm >= joint_norm1(p));
    CHECK(u8.remainder_estimate < u6.remainder_estimate);
  }
  SUBCASE("entries leaving the window are counted") {
    auto ev = evolution_series(ks, b.size(), p.M, 0.1, 2);
    CHECK(ev.boundary.dropped_entries > 0);
  }
  SUBCASE("order beyond the supplied powers") {
    CHECK_THROWS_AS(evolution_series(ks, b.size(), p.M, 0.1, 9), std::invalid_argument);
  }
}

TEST_CASE("evolution series matches the dense oracle") {
  std::vector<ModelParams> configs;
  ModelParams base;
  configs.push_back(base);
  ModelParams one_way = base;
  one_way.beta = 0.0;
  one_way.g = 0.0;
  configs.push_back(one_way);
  ModelParams smeared = base;
  smeared.delta = DeltaProfile::gaussian(0.6);
  smeared.alpha = 0.5;
  smeared.beta = 0.2;
  configs.push_back(smeared);
  ModelParams bigger = base;
  bigger.n_max = 2;
  bigger.M = 3;
  configs.push_back(bigger);
  ModelParams four = base;
  four.N = 4;
  four.M = 2;
  configs.push_back(four);

  for (const auto& p : configs) {
    CAPTURE(p.delta.name());
    for (int K : {1, 3, 4}) {
      if (K > p.M + 2) continue;
      auto ev = evolve(p, K, 0.37);
      auto dense = testing::dense_evolution(p, K, 0.37);
      CHECK((ev.U - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("unitarity defect") {
  SUBCASE("number-only model is unitary") {
    ModelParams p;
    p.alpha = p.beta = 0.0;
    p.M = 20;
    CHECK(unitarity_defect(evolve(p, 18, 0.5)) < 1e-10);
  }
  SUBCASE("symmetric hopping matches the dense oracle") {
    ModelParams p;
    auto ev = evolve(p, 4, 0.5);
    const double d = unitarity_defect(ev);
    CHECK(d > 0.0);
    CHECK(std::abs(d - testing::dense_defect(testing::dense_evolution(p, 4, 0.5), 8, 4, 0)) < 1e-9);
    CHECK(unitarity_defect(ev, NormKind::spectral) <= d + 1e-12);
  }
  SUBCASE("one-way machine") {
    ModelParams p;
    p.beta = 0.0;
    p.g = 0.0;
    auto ev = evolve(p, 4, 0.5);
    const double d = unitarity_defect(ev);
    CHECK(d > 0.0);
    CHECK(std::abs(d - testing::dense_defect(testing::dense_evolution(p, 4, 0.5), 8, 4, 0)) < 1e-9);
  }
  SUBCASE("window must cover the series order") {
    ModelParams p;
    p.M = 3;
    CHECK_THROWS_AS(unitarity_defect(evolve(p, 4, 0.5)), std::invalid_argument);
    p.M = 6;
    auto ev = evolve(p, 4, 0.5);
    CHECK_THROWS_AS(unitarity_defect(ev, NormKind::frobenius, 3), std::invalid_argument);
  }
  SUBCASE("defect vanishes with the hopping amplitudes") {
    double prev = 1e9;
    for (double a : {0.3, 0.03, 0.003}) {
      ModelParams p;
      p.alpha = p.beta = a;
      p.M = 10;
      const double d = unitarity_defect(evolve(p, 8, 0.1));
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 1e-3);
  }
  SUBCASE("widening the window leaves the interior defect alone") {
    ModelParams p;
    p.M = 5;
    const double dt = 0.5 / joint_norm1(p);
    const double d5 = unitarity_defect(evolve(p, 4, dt), NormKind::frobenius, 1);
    p.M = 7;
    const double d7 = unitarity_defect(evolve(p, 4, dt), NormKind::frobenius, 1);
    CHECK(d5 > 0.0);
    CHECK(std::abs(d5 - d7) < 1e-8);
  }
}

TEST_CASE("hermiticity witness") {
  ModelParams p;
  p.n_max = 2;
  Basis b = enumerate_basis(p);
  SUBCASE("lattice delta with equal hops has none up to H^3") {
    for (const auto& k : hamiltonian_kernels(p, b, 3)) CHECK_FALSE(hermiticity_witness(k).has_value());
  }
  SUBCASE("smeared delta exposes one in H^2") {
    p.delta = DeltaProfile::gaussian(0.5);
    auto ks = hamiltonian_kernels(p, b, 2);
    CHECK_FALSE(hermiticity_witness(ks[0]).has_value());
    auto w = hermiticity_witness(ks[1]);
    REQUIRE(w.has_value());
    CHECK(std::abs(w->value - w->mirror) > 1e-3);
  }
  SUBCASE("no hopping, no witness") {
    p.delta = DeltaProfile::gaussian(0.5);
    p.alpha = p.beta = 0.0;
    for (const auto& k : hamiltonian_kernels(p, b, 3)) CHECK_FALSE(hermiticity_witness(k).has_value());
  }
}

TEST_CASE("flux") {
  const std::vector<InitialAmplitude> start{{FockIndex{{1, 1, 1}}, 0, 1.0}};
  auto oracle_change = [&](const ModelParams& p, int K, double dt) {
    return testing::dense_occupation_change(testing::dense_evolution(p, K, dt), p, start[0].state);
  };

  SUBCASE("no hopping leaves occupations unchanged") {
    ModelParams p;
    p.alpha = p.beta = 0.0;
    auto r = flux_asymmetry(evolve(p, 4, 0.5), enumerate_basis(p), start);
    for (double c : r.change) CHECK(std::abs(c) < 1e-12);
  }
  SUBCASE("number eigenstate start conserves the total") {
    ModelParams p;
    p.n_max = 2;
    auto r = flux_asymmetry(evolve(p, 4, 0.5), enumerate_basis(p), start);
    auto want = oracle_change(p, 4, 0.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.change[i] - want[i]) < 1e-9);
    CHECK(std::abs(r.total_change) < 1e-12);
  }
  SUBCASE("one-way hop moves quanta into region 1") {
    ModelParams p;
    p.beta = 0.0;
    p.n_max = 2;
    auto r = flux_asymmetry(evolve(p, 4, 0.5), enumerate_basis(p), start);
    auto want = oracle_change(p, 4, 0.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.change[i] - want[i]) < 1e-9);
    CHECK(r.change[0] == doctest::Approx(0.042497774554086654).epsilon(1e-12));
    CHECK(r.change[1] == doctest::Approx(-0.042497774554086543).epsilon(1e-12));
    CHECK(r.probability_leak == doctest::Approx(-0.074371337890625).epsilon(1e-12));
  }
  SUBCASE("initial data is checked") {
    ModelParams p;
    auto ev = evolve(p, 4, 0.5);
    const std::vector<InitialAmplitude> off_interior{{FockIndex{{1, 1, 1}}, 1, 1.0}};
    CHECK_THROWS_AS(flux_asymmetry(ev, enumerate_basis(p), off_interior), std::invalid_argument);
    const std::vector<InitialAmplitude> unnormalized{{FockIndex{{1, 1, 1}}, 0, 2.0}};
    CHECK_THROWS_AS(flux_asymmetry(ev, enumerate_basis(p), unnormalized), std::invalid_argument);
  }
}

TEST_CASE("exports") {
  ModelParams p;
  Basis b = enumerate_basis(p);
  auto k = kernel_of_power(p, b, 1);
  auto csv = kernel_csv(k);
  CHECK(csv.rfind("row,col,offset,re,im\n", 0) == 0);
  auto j = to_json(k);
  CHECK(j["entries"].size() > 0);
  CHECK(j["truncation"]["dropped_contributions"] == k.truncation.dropped_contributions);
  CHECK(to_json(p).dump() ==
        R"({"alpha":0.3,"beta":0.3,"g":1.0,"T":1.0,"N":3,"nmax":1,"window":4,"delta":"kronecker"})");
  CHECK(matrix_csv(Eigen::MatrixXcd::Identity(2, 2)) == "row,col,re,im\n0,0,1,0\n1,1,1,0\n");
}
