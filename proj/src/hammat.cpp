#include "tmach/hammat.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tmach {

DeltaProfile DeltaProfile::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian delta needs sigma > 0");
  return {Kind::gaussian, sigma};
}

DeltaProfile DeltaProfile::parse(const std::string& text) {
  if (text == "kronecker") return kronecker();
  const std::string prefix = "gaussian:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double sigma = 0.0;
    try {
      sigma = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - prefix.size()) {
      throw std::invalid_argument("bad gaussian width in '" + text + "'");
    }
    return gaussian(sigma);
  }
  throw std::invalid_argument("delta profile must be 'kronecker' or 'gaussian:<sigma>', got '" + text + "'");
}

double DeltaProfile::operator()(double x) const {
  if (kind == Kind::kronecker) return x == 0.0 ? 1.0 : 0.0;
  return std::exp(-x * x / (2.0 * sigma * sigma));
}

std::string DeltaProfile::name() const {
  if (kind == Kind::kronecker) return "kronecker";
  std::ostringstream os;
  os << "gaussian:" << sigma;
  return os.str();
}

void ModelParams::validate() const {
  if (N < 3) throw std::invalid_argument("N must be at least 3");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (M < 1) throw std::invalid_argument("window half-width M must be at least 1");
  if (!(T > 0.0)) throw std::invalid_argument("time step T must be positive");
  if (delta.kind == DeltaProfile::Kind::gaussian && !(delta.sigma > 0.0)) {
    throw std::invalid_argument("gaussian delta needs sigma > 0");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(g)) {
    throw std::invalid_argument("alpha, beta, g must be finite");
  }
}

ojson to_json(const ModelParams& p) {
  ojson j;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["g"] = p.g;
  j["T"] = p.T;
  j["N"] = p.N;
  j["nmax"] = p.n_max;
  j["window"] = p.M;
  j["delta"] = p.delta.name();
  return j;
}

std::string to_string(const FockIndex& f) {
  std::string s = "(";
  for (std::size_t i = 0; i < f.n.size(); ++i) s += (i ? "," : "") + std::to_string(f.n[i]);
  return s + ")";
}

Basis::Basis(int regions, int n_max) : regions_(regions), n_max_(n_max) {
  if (regions < 1 || n_max < 0) throw std::invalid_argument("basis needs regions >= 1 and n_max >= 0");
  double count = std::pow(static_cast<double>(n_max + 1), regions);
  if (count > static_cast<double>(max_states)) {
    throw std::invalid_argument("basis of " + std::to_string(static_cast<long long>(count)) +
                                " states exceeds the limit of " + std::to_string(max_states));
  }
  const auto total = static_cast<std::size_t>(count);
  states_.reserve(total);
  FockIndex cur{std::vector<int>(static_cast<std::size_t>(regions), 0)};
  for (std::size_t s = 0; s < total; ++s) {
    states_.push_back(cur);
    for (int r = regions - 1; r >= 0; --r) {
      if (++cur.n[static_cast<std::size_t>(r)] <= n_max) break;
      cur.n[static_cast<std::size_t>(r)] = 0;
    }
  }
}

std::size_t Basis::index_of(const FockIndex& f) const {
  if (f.n.size() != static_cast<std::size_t>(regions_)) throw std::out_of_range("wrong number of regions");
  std::size_t idx = 0;
  for (int v : f.n) {
    if (v < 0 || v > n_max_) throw std::out_of_range("occupation outside truncated space: " + to_string(f));
    idx = idx * static_cast<std::size_t>(n_max_ + 1) + static_cast<std::size_t>(v);
  }
  return idx;
}

Basis enumerate_basis(const ModelParams& params) {
  params.validate();
  return Basis(params.N, params.n_max);
}

std::complex<double> MatrixElementKernel::at(std::size_t bra, std::size_t ket, int m) const {
  auto it = entries.find({bra, ket});
  if (it == entries.end()) return {0.0, 0.0};
  auto jt = it->second.find(m);
  return jt == it->second.end() ? std::complex<double>{0.0, 0.0} : jt->second;
}

int MatrixElementKernel::max_offset() const {
  int best = 0;
  for (const auto& [pos, dk] : entries) {
    for (const auto& [m, v] : dk) best = std::max(best, std::abs(m));
  }
  return best;
}

namespace {

enum class Applied { ok, zero, truncated };

struct Action {
  std::size_t bra = 0;
  std::uint64_t radicand = 1;
  int offset = 0;
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("bosonic amplitude overflows 64 bits");
  return r;
}

// Applies a normal-ordered product right to left with a|n> = sqrt(n)|n-1>,
// a+|n> = sqrt(n+1)|n+1>; the square root is accumulated as an integer radicand.
Applied apply_term(const std::vector<ModeOp>& factors, const FockIndex& ket, const Basis& basis,
                   std::vector<int>& scratch, Action& out) {
  scratch = ket.n;
  out.radicand = 1;
  out.offset = 0;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    if (it->region < 1 || it->region > basis.regions()) {
      throw std::invalid_argument("operator " + to_string(*it) + " refers to a region outside the model");
    }
    int& occ = scratch[static_cast<std::size_t>(it->region - 1)];
    if (it->dagger) {
      if (occ == basis.n_max()) return Applied::truncated;
      ++occ;
      out.radicand = checked_mul(out.radicand, static_cast<std::uint64_t>(occ));
      out.offset += it->shift;
    } else {
      if (occ == 0) return Applied::zero;
      out.radicand = checked_mul(out.radicand, static_cast<std::uint64_t>(occ));
      --occ;
      out.offset -= it->shift;
    }
  }
  std::size_t idx = 0;
  for (int v : scratch) idx = idx * static_cast<std::size_t>(basis.n_max() + 1) + static_cast<std::size_t>(v);
  out.bra = idx;
  return Applied::ok;
}

double delta_value(const DeltaFactor& d, int offset, const ModelParams& p) {
  switch (d.kind) {
    case DeltaFactor::Kind::literal: return p.delta(d.m * p.T);
    case DeltaFactor::Kind::signed_offset: return p.delta((offset - d.m) * p.T);
    case DeltaFactor::Kind::absolute_offset: return p.delta((std::abs(offset) - d.m) * p.T);
  }
  return 0.0;
}

bool kronecker_fires(const DeltaFactor& d, int offset) {
  switch (d.kind) {
    case DeltaFactor::Kind::literal: return d.m == 0;
    case DeltaFactor::Kind::signed_offset: return offset == d.m;
    case DeltaFactor::Kind::absolute_offset: return std::abs(offset) == d.m;
  }
  return false;
}

void require_normal_ordered(const OperatorSum& sum) {
  for (const auto& [key, c] : sum.terms()) {
    if (!std::is_sorted(key.factors.begin(), key.factors.end(), normal_less)) {
      throw std::invalid_argument("kernel evaluation needs a normal-ordered sum");
    }
  }
}

// r = s^2 f with f square-free.
std::pair<std::uint64_t, std::uint64_t> split_square(std::uint64_t r) {
  std::uint64_t s = 1;
  std::uint64_t f = 1;
  for (std::uint64_t p = 2; p * p <= r; ++p) {
    while (r % (p * p) == 0) {
      r /= p * p;
      s *= p;
    }
    if (r % p == 0) {
      r /= p;
      f *= p;
    }
  }
  return {s, f * r};
}

}  // namespace

MatrixElementKernel kernel_of(const OperatorSum& sum, const ModelParams& params, const Basis& basis) {
  require_normal_ordered(sum);
  MatrixElementKernel k;
  const ParamValues values = params.values();
  std::vector<std::pair<const OperatorSum::Key*, std::complex<double>>> terms;
  for (const auto& [key, c] : sum.terms()) terms.emplace_back(&key, c.evaluate(values));

  std::vector<int> scratch;
  for (std::size_t ket = 0; ket < basis.size(); ++ket) {
    for (const auto& [key, c] : terms) {
      Action act;
      Applied r = apply_term(key->factors, basis[ket], basis, scratch, act);
      if (r == Applied::truncated) ++k.truncation.dropped_contributions;
      if (r != Applied::ok) continue;
      double w = std::sqrt(static_cast<double>(act.radicand));
      for (const auto& d : key->deltas) w *= delta_value(d, act.offset, params);
      if (w == 0.0 || c == std::complex<double>{0.0, 0.0}) continue;
      k.entries[{act.bra, ket}][act.offset] += c * w;
    }
  }
  return k;
}

void SurdScalar::add(const Scalar& coeff, std::uint64_t radicand) {
  if (coeff.is_zero() || radicand == 0) return;
  auto [s, f] = split_square(radicand);
  Scalar c = coeff * Scalar(ComplexRational(Rational(mpz_class(static_cast<unsigned long>(s)))));
  auto [it, inserted] = parts_.try_emplace(f, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) parts_.erase(it);
  }
}

SurdScalar& SurdScalar::operator+=(const SurdScalar& o) {
  for (const auto& [f, c] : o.parts_) add(c, f);
  return *this;
}

std::complex<double> SurdScalar::evaluate(const ParamValues& v) const {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [f, c] : parts_) sum += c.evaluate(v) * std::sqrt(static_cast<double>(f));
  return sum;
}

std::string to_string(const SurdScalar& s) {
  if (s.is_zero()) return "0";
  std::string out;
  for (const auto& [f, c] : s.parts()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")";
    if (f != 1) out += "*sqrt(" + std::to_string(f) + ")";
  }
  return out;
}

ExactKernel exact_kernel_of(const OperatorSum& sum, const Basis& basis, TruncationReport* truncation) {
  require_normal_ordered(sum);
  ExactKernel k;
  std::vector<int> scratch;
  for (std::size_t ket = 0; ket < basis.size(); ++ket) {
    for (const auto& [key, c] : sum.terms()) {
      Action act;
      Applied r = apply_term(key.factors, basis[ket], basis, scratch, act);
      if (r == Applied::truncated && truncation) ++truncation->dropped_contributions;
      if (r != Applied::ok) continue;
      bool fires = true;
      for (const auto& d : key.deltas) fires = fires && kronecker_fires(d, act.offset);
      if (!fires) continue;
      auto& cell = k[{act.bra, ket, act.offset}];
      cell.add(c, act.radicand);
      if (cell.is_zero()) k.erase({act.bra, ket, act.offset});
    }
  }
  return k;
}

Eigen::MatrixXcd joint_matrix(const MatrixElementKernel& kernel, std::size_t basis_size, int M,
                              BoundaryReport* boundary) {
  const std::size_t dim = basis_size * static_cast<std::size_t>(2 * M + 1);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [pos, dk] : kernel.entries) {
    const auto [bra, ket] = pos;
    for (const auto& [m, v] : dk) {
      for (int s = -M; s <= M; ++s) {
        const int target = s + m;
        if (target < -M || target > M) {
          if (boundary) ++boundary->dropped_entries;
          continue;
        }
        const auto row = static_cast<Eigen::Index>(static_cast<std::size_t>(s + M) * basis_size + bra);
        const auto col = static_cast<Eigen::Index>(static_cast<std::size_t>(target + M) * basis_size + ket);
        out(row, col) += v;
      }
    }
  }
  return out;
}

EvolutionMatrix evolution_series(std::span<const MatrixElementKernel> powers, std::size_t basis_size, int M,
                                 double dt, int order) {
  if (order < 0 || static_cast<std::size_t>(order) > powers.size()) {
    throw std::invalid_argument("series order exceeds the number of available powers of H");
  }
  if (M < 1) throw std::invalid_argument("window half-width M must be at least 1");
  EvolutionMatrix ev;
  ev.basis_size = basis_size;
  ev.M = M;
  ev.order = order;
  ev.dt = dt;
  const auto dim = static_cast<Eigen::Index>(basis_size * static_cast<std::size_t>(2 * M + 1));
  ev.U = Eigen::MatrixXcd::Identity(dim, dim);

  std::complex<double> factor{1.0, 0.0};
  const std::complex<double> step{0.0, -dt};
  double rate = 0.0;
  for (int j = 1; j <= order; ++j) {
    factor *= step / static_cast<double>(j);
    Eigen::MatrixXcd hj = joint_matrix(powers[static_cast<std::size_t>(j - 1)], basis_size, M, &ev.boundary);
    const double norm1 = dim > 0 ? hj.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
    rate = std::max(rate, std::pow(norm1, 1.0 / j));
    ev.U += factor * hj;
  }
  ev.effective_norm = rate;
  const double x = std::abs(dt) * rate;
  double partial = 0.0;
  double term = 1.0;
  for (int i = 0; i <= order; ++i) {
    partial += term;
    term *= x / (i + 1);
  }
  ev.remainder_estimate = std::max(0.0, std::exp(x) - partial);
  return ev;
}

std::vector<MatrixElementKernel> hamiltonian_kernels(const ModelParams& params, const Basis& basis, int order) {
  params.validate();
  if (order < 1) return {};
  const Hamiltonian h = build_hamiltonian(params.N, params.flags());
  ExpansionOptions opts;
  opts.max_power = std::max(order, opts.max_power);
  opts.shift_window = std::max(order, opts.shift_window);
  opts.deltas = params.delta.kind == DeltaProfile::Kind::kronecker ? DeltaMode::kronecker : DeltaMode::symbolic;
  std::vector<MatrixElementKernel> out;
  for (const auto& hk : hamiltonian_powers(h, order, opts)) out.push_back(kernel_of(hk, params, basis));
  return out;
}

EvolutionMatrix evolve(const ModelParams& params, int order, double dt) {
  const Basis basis = enumerate_basis(params);
  auto kernels = hamiltonian_kernels(params, basis, order);
  return evolution_series(kernels, basis.size(), params.M, dt, order);
}

namespace {

std::vector<Eigen::Index> interior_indices(const EvolutionMatrix& U, std::optional<int> half_width) {
  if (U.M < U.order) {
    throw std::invalid_argument("window M=" + std::to_string(U.M) + " must be at least the series order K=" +
                                std::to_string(U.order));
  }
  std::vector<Eigen::Index> idx;
  const int inner = half_width.value_or(U.M - U.order);
  if (inner < 0 || inner > U.M - U.order) {
    throw std::invalid_argument("interior half-width must lie in [0, M-K]");
  }
  for (int s = -inner; s <= inner; ++s) {
    for (std::size_t b = 0; b < U.basis_size; ++b) idx.push_back(static_cast<Eigen::Index>(U.joint(b, s)));
  }
  return idx;
}

}  // namespace

double unitarity_defect(const EvolutionMatrix& U, NormKind norm, std::optional<int> interior) {
  const auto idx = interior_indices(U, interior);
  Eigen::MatrixXcd cols(U.U.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = U.U.col(idx[c]);
  Eigen::MatrixXcd gram = cols.adjoint() * cols;
  gram -= Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  if (norm == NormKind::frobenius) return gram.norm();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

FluxReport flux_asymmetry(const EvolutionMatrix& U, const Basis& basis, std::span<const InitialAmplitude> initial) {
  if (basis.size() != U.basis_size) throw std::invalid_argument("basis does not match the evolution matrix");
  const int inner = U.M - U.order;
  if (inner < 0) throw std::invalid_argument("window M must be at least the series order K");

  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(U.U.cols());
  for (const auto& a : initial) {
    if (std::abs(a.slot) > inner) {
      throw std::invalid_argument("initial slot " + std::to_string(a.slot) + " is outside the interior window");
    }
    psi0(static_cast<Eigen::Index>(U.joint(basis.index_of(a.state), a.slot))) += a.amplitude;
  }
  const double norm0 = psi0.squaredNorm();
  if (std::abs(norm0 - 1.0) > 1e-9) throw std::invalid_argument("initial amplitudes must be normalized");

  const Eigen::VectorXcd psi = U.U * psi0;
  const double norm1 = psi.squaredNorm();

  const auto regions = static_cast<std::size_t>(basis.regions());
  FluxReport r;
  r.before.assign(regions, 0.0);
  r.after.assign(regions, 0.0);
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const auto state = static_cast<std::size_t>(j) % U.basis_size;
    const double p0 = std::norm(psi0(j)) / norm0;
    const double p1 = norm1 > 0.0 ? std::norm(psi(j)) / norm1 : 0.0;
    for (std::size_t i = 0; i < regions; ++i) {
      r.before[i] += p0 * basis[state].n[i];
      r.after[i] += p1 * basis[state].n[i];
    }
  }
  r.change.resize(regions);
  for (std::size_t i = 0; i < regions; ++i) {
    r.change[i] = r.after[i] - r.before[i];
    r.total_change += r.change[i];
  }
  r.probability_leak = norm1 - norm0;
  return r;
}

std::optional<HermiticityWitness> hermiticity_witness(const MatrixElementKernel& k, double tol) {
  auto check = [&](std::size_t bra, std::size_t ket, int m, std::complex<double> v) -> std::optional<HermiticityWitness> {
    std::complex<double> mirror = std::conj(k.at(ket, bra, -m));
    if (std::abs(v - mirror) > tol) return HermiticityWitness{bra, ket, m, v, mirror};
    return std::nullopt;
  };
  for (const auto& [pos, dk] : k.entries) {
    for (const auto& [m, v] : dk) {
      if (auto w = check(pos.first, pos.second, m, v)) return w;
      // Entries whose mirror is present but whose own cell is absent.
      if (auto w = check(pos.second, pos.first, -m, k.at(pos.second, pos.first, -m))) return w;
    }
  }
  return std::nullopt;
}

std::string kernel_csv(const MatrixElementKernel& k) {
  std::ostringstream os;
  os.precision(17);
  os << "row,col,offset,re,im\n";
  for (const auto& [pos, dk] : k.entries) {
    for (const auto& [m, v] : dk) {
      os << pos.first << "," << pos.second << "," << m << "," << v.real() << "," << v.imag() << "\n";
    }
  }
  return os.str();
}

std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os.precision(17);
  os << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto v = m(r, c);
      if (v == std::complex<double>{0.0, 0.0}) continue;
      os << r << "," << c << "," << v.real() << "," << v.imag() << "\n";
    }
  }
  return os.str();
}

ojson to_json(const MatrixElementKernel& k) {
  ojson j;
  ojson entries = ojson::array();
  for (const auto& [pos, dk] : k.entries) {
    for (const auto& [m, v] : dk) {
      entries.push_back({{"row", pos.first}, {"col", pos.second}, {"offset", m}, {"re", v.real()}, {"im", v.imag()}});
    }
  }
  j["entries"] = std::move(entries);
  j["truncation"] = {{"dropped_contributions", k.truncation.dropped_contributions}};
  return j;
}

ojson to_json(const FluxReport& r) {
  ojson j;
  j["before"] = r.before;
  j["after"] = r.after;
  j["change"] = r.change;
  j["total_change"] = r.total_change;
  j["probability_leak"] = r.probability_leak;
  return j;
}

}  // namespace tmach
