#include "tmach/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "tmach/audit.h"
#include "tmach/bogoliubov.h"
#include "tmach/diagrams.h"

namespace tmach::cli {

namespace {

// Flag name and help text; config files use the same names.
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"alpha", "hop amplitude, region 2 into region 1 (rational or decimal)"},
    {"beta", "hop amplitude, region 1 into region 2"},
    {"g", "on-site amplitude"},
    {"T", "time-machine delay"},
    {"N", "number of regions, at least 3"},
    {"nmax", "occupation cap per region"},
    {"window", "time-offset window half-width M"},
    {"delta", "kernel profile: kronecker or gaussian:SIGMA"},
    {"k", "power of H for expand (1-4)"},
    {"order", "series order K for evolve"},
    {"dt", "time step (evolve) or t - t' (entropy)"},
    {"out", "output directory"},
    {"format", "comma-separated subset of json,csv,text"},
    {"start", "flux initial occupations, e.g. 1,1,1"},
    {"omega1", "mode-1 frequency or auto"},
    {"omega2", "mode-2 frequency or auto"},
    {"tmax", "end of the Bogoliubov time grid"},
    {"steps", "number of Bogoliubov grid steps"},
    {"offset", "kernel offset in units of T for entropy"},
};

int to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int x = 0;
  try {
    x = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  return x;
}

Rational to_rational(const std::string& key, const std::string& v) {
  try {
    return parse_rational(v);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(key + ": expected an exact number such as 0.3 or 1/3, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  for (std::string p; std::getline(ss, p, ',');) {
    p.erase(std::remove_if(p.begin(), p.end(), ::isspace), p.end());
    if (!p.empty()) parts.push_back(p);
  }
  return parts;
}

std::string json_text(const ojson& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + json_text(e);
    return s;
  }
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw std::invalid_argument("config: unsupported value " + v.dump());
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& v, const std::string& source) {
  if (key == "alpha") alpha = to_rational(key, v);
  else if (key == "beta") beta = to_rational(key, v);
  else if (key == "g") g = to_rational(key, v);
  else if (key == "T") T = to_rational(key, v);
  else if (key == "dt") dt = to_rational(key, v);
  else if (key == "N") N = to_int(key, v);
  else if (key == "nmax") nmax = to_int(key, v);
  else if (key == "window") window = to_int(key, v);
  else if (key == "k") k = to_int(key, v);
  else if (key == "order") order = to_int(key, v);
  else if (key == "steps") steps = to_int(key, v);
  else if (key == "offset") offset = to_int(key, v);
  else if (key == "tmax") tmax = to_double(key, v);
  else if (key == "delta") delta = DeltaProfile::parse(v).name();
  else if (key == "out") out = v;
  else if (key == "omega1" || key == "omega2") {
    if (v != "auto") to_double(key, v);
    (key == "omega1" ? omega1 : omega2) = v;
  } else if (key == "format") {
    std::set<std::string> f;
    for (const auto& p : split_list(v)) {
      if (p != "json" && p != "csv" && p != "text") throw std::invalid_argument("format: unknown format '" + p + "'");
      f.insert(p);
    }
    if (f.empty()) throw std::invalid_argument("format: empty list");
    format = f;
  } else if (key == "start") {
    std::vector<int> s;
    for (const auto& p : split_list(v)) s.push_back(to_int(key, p));
    start = s;
  } else {
    throw std::invalid_argument("unknown configuration key '" + key + "'");
  }
  sources[key] = source;
}

void RunConfig::apply(const ojson& config) {
  if (!config.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : config.items()) set(key, json_text(value), "config");
}

ModelParams RunConfig::model() const {
  ModelParams p;
  p.alpha = alpha.get_d();
  p.beta = beta.get_d();
  p.g = g.get_d();
  p.T = T.get_d();
  p.N = N;
  p.n_max = nmax;
  p.M = window;
  p.delta = DeltaProfile::parse(delta);
  return p;
}

EntropyParams RunConfig::entropy() const {
  EntropyParams e;
  e.alpha = alpha;
  e.beta = beta;
  e.g = g;
  e.T = T;
  e.offset = offset;
  e.delta = DeltaProfile::parse(delta);
  return e;
}

std::vector<int> RunConfig::start_state() const { return start.empty() ? std::vector<int>(N, 1) : start; }

ojson to_json(const RunConfig& c) {
  ojson v;
  v["alpha"] = to_string(c.alpha);
  v["beta"] = to_string(c.beta);
  v["g"] = to_string(c.g);
  v["T"] = to_string(c.T);
  v["N"] = c.N;
  v["nmax"] = c.nmax;
  v["window"] = c.window;
  v["delta"] = c.delta;
  v["k"] = c.k;
  v["order"] = c.order;
  v["dt"] = to_string(c.dt);
  v["out"] = c.out;
  v["format"] = c.format;
  v["start"] = c.start_state();
  v["omega1"] = c.omega1;
  v["omega2"] = c.omega2;
  v["tmax"] = c.tmax;
  v["steps"] = c.steps;
  v["offset"] = c.offset;
  ojson src;
  for (const auto& [key, help] : kKeys) {
    auto it = c.sources.find(key);
    src[key] = it == c.sources.end() ? "default" : it->second;
  }
  return {{"values", v}, {"sources", src}};
}

// ---------------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

class Writer {
 public:
  Writer(const RunConfig& c, std::ostream& log) : dir_(c.out), log_(log) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    log_ << "wrote " << path.string() << "\n";
  }
  void write(const std::string& name, const ojson& j) { write(name, j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  std::ostream& log_;
};

void validate_model(const RunConfig& c) {
  c.model().validate();
  if (c.T <= 0) throw std::invalid_argument("T must be positive");
}

ojson with_config(const RunConfig& c, const std::string& command) {
  ojson j;
  j["command"] = command;
  j["config"] = to_json(c);
  return j;
}

int cmd_expand(const RunConfig& c, std::ostream& out) {
  if (c.k < 1 || c.k > 4) throw std::invalid_argument("k must be between 1 and 4, got " + std::to_string(c.k));
  validate_model(c);
  const ModelParams p = c.model();
  const Hamiltonian h = build_hamiltonian(p.N, p.flags());
  const bool kronecker = p.delta.kind == DeltaProfile::Kind::kronecker;
  const OperatorSum hk =
      hamiltonian_power(h, c.k, {.max_power = std::max(c.k, 4), .shift_window = 8,
                                 .deltas = kronecker ? DeltaMode::kronecker : DeltaMode::symbolic});
  const auto groups = group_by_monomial(hk);

  Writer w(c, out);
  const std::string k = std::to_string(c.k);
  out << "H^" << k << ": " << hk.size() << " terms in " << groups.size() << " groups\n";
  ojson listing = ojson::array();
  for (const auto& [m, s] : groups) {
    out << "  " << to_string(m) << ": " << s.size() << " terms\n";
    listing.push_back({{"monomial", to_string(m)}, {"terms", s.size()}});
  }
  if (c.wants("json")) {
    ojson j = with_config(c, "expand");
    j["k"] = c.k;
    j["groups"] = listing;
    j["terms"] = to_json(hk);
    w.write("h" + k + "_terms.json", j);
  }

  std::optional<TrackTable> tracks;
  if (c.k <= 3) tracks = tabulate(c.k, p.N);
  if (tracks && c.wants("text")) w.write("tracks_k" + k + ".txt", render_table(*tracks));

  if (c.wants("json")) {
    ojson a = with_config(c, "expand");
    if (c.k == 3) {
      const auto audit = audit_h3_table(p.N);
      const ojson aj = to_json(audit);
      for (const auto& [key, value] : aj.items()) a[key] = value;
      out << "table audit: " << audit.rows.size() << " rows, engine vs oracle mismatches "
          << audit.oracle_mismatches() << "\n";
    } else if (c.k <= 2) {
      const ojson aj = to_json(audit_printed_formulas(c.k, p.N, 4));
      for (const auto& [key, value] : aj.items()) a[key] = value;
    } else {
      a["note"] = "no printed reference beyond the third power";
    }
    if (tracks) a["track_comparison"] = to_json(compare_with_printed(*tracks));
    w.write("audit_k" + k + ".json", a);
  }
  return ok;
}

int cmd_evolve(const RunConfig& c, std::ostream& out) {
  validate_model(c);
  if (c.order < 1) throw std::invalid_argument("order must be at least 1");
  if (c.window <= c.order) {
    throw std::invalid_argument("window M = " + std::to_string(c.window) + " must exceed the series order K = " +
                                std::to_string(c.order));
  }
  const ModelParams p = c.model();
  const Basis basis = enumerate_basis(p);
  const std::vector<int> start = c.start_state();
  if (static_cast<int>(start.size()) != p.N) throw std::invalid_argument("start needs one occupation per region");
  for (int n : start) {
    if (n < 0 || n > p.n_max) throw std::invalid_argument("start occupations must lie in [0, nmax]");
  }

  const EvolutionMatrix U = evolve(p, c.order, c.dt.get_d());
  const double frob = unitarity_defect(U);
  const double spec = unitarity_defect(U, NormKind::spectral);
  const InitialAmplitude init{FockIndex{start}, 0, {1.0, 0.0}};
  const FluxReport flux = flux_asymmetry(U, basis, std::span<const InitialAmplitude>(&init, 1));

  out << "basis " << basis.size() << " states, joint dimension " << U.U.rows() << "\n";
  out << "unitarity defect (frobenius) " << frob << ", spectral " << spec << "\n";
  out << "occupation change";
  for (double d : flux.change) out << " " << d;
  out << ", probability leak " << flux.probability_leak << "\n";

  Writer w(c, out);
  if (c.wants("csv")) w.write("evolution.csv", matrix_csv(U.U));
  if (c.wants("json")) {
    ojson d = with_config(c, "evolve");
    d["model"] = to_json(p);
    d["basis_size"] = basis.size();
    d["joint_dimension"] = U.U.rows();
    d["interior_halfwidth"] = c.window - c.order;
    d["defect_frobenius"] = frob;
    d["defect_spectral"] = spec;
    d["boundary_dropped_entries"] = U.boundary.dropped_entries;
    d["effective_norm"] = U.effective_norm;
    d["remainder_estimate"] = U.remainder_estimate;
    w.write("defect.json", d);

    ojson f = with_config(c, "evolve");
    f["model"] = to_json(p);
    f["start"] = to_string(FockIndex{start});
    f["flux"] = to_json(flux);
    w.write("flux.json", f);
  }
  return ok;
}

int cmd_entropy(const RunConfig& c, std::ostream& out) {
  if (c.T <= 0) throw std::invalid_argument("T must be positive");
  const EntropyParams e = c.entropy();
  const EntropyReport r = entropy_first_order(e, c.dt);
  const auto terms = trace_UH_first_terms(e, c.dt);
  const std::string text = derivation_text(r, terms);
  out << text;
  Writer w(c, out);
  if (c.wants("json")) {
    ojson j = with_config(c, "entropy");
    j["report"] = to_json(r);
    j["trace_UH"] = to_json(terms);
    w.write("entropy.json", j);
  }
  if (c.wants("text")) w.write("entropy.txt", text);
  return ok;
}

int cmd_bogo(const RunConfig& c, std::ostream& out) {
  validate_model(c);
  const ModelParams p = c.model();
  const auto stationary = stationary_omegas(p);
  auto pick = [&](const std::string& v, int mode) {
    return v == "auto" ? stationary[static_cast<std::size_t>(mode - 1)].real() : to_double("omega", v);
  };
  const BogoSystem s = build_system(p, pick(c.omega1, 1), pick(c.omega2, 2));
  const BogoSolution sol = solve(s, TimeGrid{c.tmax, c.steps});
  ojson report = bogo_report(sol, p);

  out << "omega1 " << s.omega1 << (c.omega1 == "auto" ? " (auto)" : "") << ", omega2 " << s.omega2
      << (c.omega2 == "auto" ? " (auto)" : "") << "\n";
  out << "normal-mode residual " << report["residual"]["mode1"].get<double>() << ", "
      << report["residual"]["mode2"].get<double>() << "\n";
  out << "hermiticity gap " << report["hermiticity_gap"]["gap"].get<double>() << "\n";

  Writer w(c, out);
  if (c.wants("json")) {
    ojson j = with_config(c, "bogo");
    j["omega"] = {{"omega1", s.omega1},
                  {"omega2", s.omega2},
                  {"omega1_source", c.omega1 == "auto" ? "g + sqrt(alpha*beta)" : "given"},
                  {"omega2_source", c.omega2 == "auto" ? "g - sqrt(alpha*beta)" : "given"}};
    for (const auto& [key, value] : report.items()) j[key] = value;
    w.write("bogo.json", j);
  }
  if (c.wants("csv")) w.write("bogo_trajectory.csv", trajectory_csv(sol));
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-machine operator algebra toolkit"};
  app.require_subcommand(1);

  struct Command {
    std::string name;
    std::string help;
    int (*fn)(const RunConfig&, std::ostream&);
    CLI::App* app = nullptr;
  };
  std::vector<Command> commands = {
      {"expand", "Powers of H, worm-track table and printed-formula audit", cmd_expand},
      {"evolve", "Truncated time evolution, unitarity defect and flux", cmd_evolve},
      {"entropy", "Regularized first-order entropy", cmd_entropy},
      {"bogo", "Generalized Bogoliubov normal modes", cmd_bogo},
  };
  std::map<std::string, std::string> flags;
  std::string config_path;
  for (auto& cmd : commands) {
    cmd.app = app.add_subcommand(cmd.name, cmd.help);
    cmd.app->add_option("--config", config_path, "JSON file with any of the keys below");
    for (const auto& [key, help] : kKeys) cmd.app->add_option("--" + key, flags[key], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : validation;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      RunConfig c;
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::invalid_argument("cannot read config file " + config_path);
        c.apply(ojson::parse(f));
      }
      for (const auto& [key, help] : kKeys) {
        if (cmd.app->count("--" + key) > 0) c.set(key, flags[key], "flag");
      }
      return cmd.fn(c, out);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const ojson::exception& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << "\n";
      return internal;
    }
  }
  return internal;
}

}  // namespace tmach::cli
