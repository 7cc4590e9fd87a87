#include "widthlab/tools/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "widthlab/errors.hpp"
#include "widthlab/stats.hpp"

namespace widthlab::tools {

using nlohmann::json;

ValidationError::ValidationError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ValidationError(join(path, item.key()), "unknown field");
}

double number(const json& v, const std::string& path) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return kInf;
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(path, "expected a finite positive number");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(path, "expected a finite nonnegative number");
  return x;
}

int integer(const json& v, const std::string& path, int lo, int hi) {
  if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
    throw ValidationError(path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a string");
  return v.get<std::string>();
}

Rational rational(const json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(path, "expected an integer or a rational string such as \"3/2\"");
}

LpIndex lp_index(const json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) return LpIndex::from_value(Rational(v.get<std::int64_t>()));
    if (v.is_string()) return LpIndex::parse(v.get<std::string>());
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(path, "expected an index: integer, rational string or \"inf\"");
}

// Either an explicit list or {"lo", "hi", "ratio"}.
std::vector<double> grid(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_object()) {
    only_keys(v, path, {"lo", "hi", "ratio"});
    for (const char* k : {"lo", "hi", "ratio"})
      if (!v.contains(k)) throw ValidationError(join(path, k), "required");
    const double lo = positive(v["lo"], join(path, "lo")), hi = positive(v["hi"], join(path, "hi"));
    const double ratio = positive(v["ratio"], join(path, "ratio"));
    if (hi < lo) throw ValidationError(join(path, "hi"), "must be >= lo");
    if (ratio <= 1.0) throw ValidationError(join(path, "ratio"), "must exceed 1");
    for (double x = lo; x <= hi * (1.0 + 1e-12); x *= ratio) out.push_back(x);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(positive(v[i], at(path, i)));
  } else {
    throw ValidationError(path, "expected a list or {lo, hi, ratio}");
  }
  if (out.empty()) throw ValidationError(path, "grid must be nonempty");
  return out;
}

std::vector<int> int_grid(const json& v, const std::string& path, int lo, int hi) {
  if (!v.is_array()) throw ValidationError(path, "expected a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], at(path, i), lo, hi));
  if (out.empty()) throw ValidationError(path, "grid must be nonempty");
  return out;
}

WidthKind width_kind(const json& v, const std::string& path) {
  try {
    return parse_width_kind(text(v, path));
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
}

std::vector<WidthKind> kinds(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ValidationError(path, "expected a nonempty list of width kinds");
  std::vector<WidthKind> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(width_kind(v[i], at(path, i)));
  return out;
}

void band(const json& v, const std::string& path, double& lo, double& hi) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(path, "expected [a, b]");
  lo = positive(v[0], at(path, 0));
  hi = positive(v[1], at(path, 1));
  if (!(hi > lo)) throw ValidationError(path, "band needs a < b");
}

void parse_manifold(const json& v, ExperimentConfig& c) {
  const std::string P = "manifold";
  only_keys(v, P, {"kind", "scale", "torus_dimension", "lambda_max", "resolution", "mesh_path", "mesh_modes"});
  ManifoldSpec& m = c.manifold;
  if (v.contains("kind")) m.kind = text(v["kind"], join(P, "kind"));
  if (m.kind != "circle" && m.kind != "torus" && m.kind != "sphere" && m.kind != "mesh")
    throw ValidationError(join(P, "kind"), "expected circle, torus, sphere or mesh");
  if (v.contains("scale")) {
    const json& s = v["scale"];
    if (s.is_number()) {
      m.scale = {positive(s, join(P, "scale"))};
    } else if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) m.scale.push_back(positive(s[i], at(join(P, "scale"), i)));
    } else {
      throw ValidationError(join(P, "scale"), "expected a number or a list");
    }
  }
  if (v.contains("torus_dimension")) m.torus_dimension = integer(v["torus_dimension"], join(P, "torus_dimension"), 1, 3);
  if (v.contains("lambda_max")) m.lambda_max = positive(v["lambda_max"], join(P, "lambda_max"));
  // An empty list selects the band default, matching the canonical form.
  if (v.contains("resolution") && !(v["resolution"].is_array() && v["resolution"].empty()))
    m.resolution = int_grid(v["resolution"], join(P, "resolution"), 1, 1 << 24);
  if (v.contains("mesh_path")) m.mesh_path = text(v["mesh_path"], join(P, "mesh_path"));
  if (v.contains("mesh_modes")) m.mesh_modes = integer(v["mesh_modes"], join(P, "mesh_modes"), 1, 100000);
}

void parse_filter(const json& v, FilterSpec& f, const std::string& P) {
  only_keys(v, P, {"Lambda", "band", "Q", "tail_rel"});
  if (v.contains("Lambda")) f.Lambda = positive(v["Lambda"], join(P, "Lambda"));
  if (v.contains("band")) band(v["band"], join(P, "band"), f.band_lo, f.band_hi);
  if (v.contains("Q")) f.Q = integer(v["Q"], join(P, "Q"), 0, 5);
  if (v.contains("tail_rel")) {
    f.tail_rel = positive(v["tail_rel"], join(P, "tail_rel"));
    if (f.tail_rel >= 1.0) throw ValidationError(join(P, "tail_rel"), "must be below 1");
  }
}

void parse_optimizer(const json& v, OptimizerConfig& o) {
  const std::string P = "widths.optimizer";
  only_keys(v, P, {"restarts", "iterations", "tolerance", "stages", "agree_stop", "agree_tol"});
  if (v.contains("restarts")) o.restarts = integer(v["restarts"], join(P, "restarts"), 1, 100000);
  if (v.contains("iterations")) o.iterations = integer(v["iterations"], join(P, "iterations"), 1, 1000000);
  if (v.contains("tolerance")) o.tolerance = positive(v["tolerance"], join(P, "tolerance"));
  if (v.contains("stages")) o.stages = integer(v["stages"], join(P, "stages"), 1, 100);
  if (v.contains("agree_stop")) o.agree_stop = integer(v["agree_stop"], join(P, "agree_stop"), 1, 100000);
  if (v.contains("agree_tol")) o.agree_tol = positive(v["agree_tol"], join(P, "agree_tol"));
}

int manifold_dimension(const ManifoldSpec& m) {
  if (m.kind == "circle") return 1;
  if (m.kind == "torus") return m.scale.empty() ? m.torus_dimension : static_cast<int>(m.scale.size());
  return 2;
}

void parse_rates(const json& v, ExperimentConfig& c) {
  const std::string P = "rates";
  only_keys(v, P, {"specs", "kinds", "n_grid", "oracle_n_grid", "nu", "bumps"});
  if (v.contains("specs")) {
    const json& s = v["specs"];
    const std::string SP = join(P, "specs");
    if (!s.is_array() || s.empty()) throw ValidationError(SP, "expected a nonempty list");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string path = at(SP, i);
      only_keys(s[i], path, {"p", "q", "r", "s"});
      for (const char* k : {"p", "q", "r"})
        if (!s[i].contains(k)) throw ValidationError(join(path, k), "required");
      const LpIndex p = lp_index(s[i]["p"], join(path, "p")), q = lp_index(s[i]["q"], join(path, "q"));
      const Rational r = rational(s[i]["r"], join(path, "r"));
      const int dim = manifold_dimension(c.manifold);
      const int sdim = s[i].contains("s") ? integer(s[i]["s"], join(path, "s"), 1, 3) : dim;
      if (sdim != dim) throw ValidationError(join(path, "s"), "must equal the manifold dimension " + std::to_string(dim));
      if (!SobolevSpec::admissible(p, q, r, sdim))
        throw ValidationError(path, "inadmissible: need r/s > (1/p - 1/q)_+");
      c.specs.push_back(SobolevSpec::make(p, q, r, sdim));
    }
  }
  if (v.contains("kinds")) c.kinds = kinds(v["kinds"], join(P, "kinds"));
  if (v.contains("n_grid")) c.n_grid = int_grid(v["n_grid"], join(P, "n_grid"), 1, 1 << 20);
  if (v.contains("oracle_n_grid"))
    c.oracle_n_grid = int_grid(v["oracle_n_grid"], join(P, "oracle_n_grid"), 1, 1 << 20);
  if (v.contains("nu")) c.nu = integer(v["nu"], join(P, "nu"), 0, 1 << 10);
  if (v.contains("bumps")) {
    const json& b = v["bumps"];
    const std::string BP = join(P, "bumps");
    only_keys(b, BP, {"Lambda", "band", "Q", "tail_rel", "probe_t", "support_rel", "epsilon_samples", "norm_samples"});
    BumpFamilyConfig& f = c.bumps;
    if (b.contains("Lambda")) f.Lambda = positive(b["Lambda"], join(BP, "Lambda"));
    if (b.contains("band")) band(b["band"], join(BP, "band"), f.band_lo, f.band_hi);
    if (b.contains("Q")) f.Q = integer(b["Q"], join(BP, "Q"), 1, 5);
    if (b.contains("tail_rel")) f.tail_rel = positive(b["tail_rel"], join(BP, "tail_rel"));
    if (b.contains("probe_t")) f.probe_t = positive(b["probe_t"], join(BP, "probe_t"));
    if (b.contains("support_rel")) f.support_rel = positive(b["support_rel"], join(BP, "support_rel"));
    if (b.contains("epsilon_samples"))
      f.epsilon_samples = static_cast<std::size_t>(integer(b["epsilon_samples"], join(BP, "epsilon_samples"), 1, 1 << 20));
    if (b.contains("norm_samples"))
      f.norm_samples = static_cast<std::size_t>(integer(b["norm_samples"], join(BP, "norm_samples"), 1, 1 << 20));
  }
}

void parse_tolerances(const json& v, Tolerances& t) {
  const std::string P = "tolerances";
  only_keys(v, P,
            {"exponent", "oracle_exponent", "r2_retry", "optimizer_vs_exact", "propagation_margin", "propagation",
             "localization_spread", "eigen_gap"});
  if (v.contains("exponent")) t.exponent = positive(v["exponent"], join(P, "exponent"));
  if (v.contains("oracle_exponent")) t.oracle_exponent = positive(v["oracle_exponent"], join(P, "oracle_exponent"));
  if (v.contains("r2_retry")) t.r2_retry = positive(v["r2_retry"], join(P, "r2_retry"));
  if (v.contains("optimizer_vs_exact")) t.optimizer_vs_exact = positive(v["optimizer_vs_exact"], join(P, "optimizer_vs_exact"));
  if (v.contains("propagation_margin")) t.propagation_margin = positive(v["propagation_margin"], join(P, "propagation_margin"));
  if (v.contains("propagation")) t.propagation = nonnegative(v["propagation"], join(P, "propagation"));
  if (v.contains("localization_spread")) t.localization_spread = positive(v["localization_spread"], join(P, "localization_spread"));
  if (v.contains("eigen_gap")) t.eigen_gap = positive(v["eigen_gap"], join(P, "eigen_gap"));
}

json index_json(const LpIndex& p) { return p.str(); }

json number_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

} // namespace

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  only_keys(doc, "", {"seed", "manifold", "filter", "spectra", "kernel_scan", "packing", "widths", "rates", "tolerances"});
  ExperimentConfig c;
  if (seed_override) {
    c.seed = *seed_override;
  } else if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      throw ValidationError("seed", "expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  } else {
    throw ValidationError("seed", "required (set it in the config or pass --seed)");
  }
  if (doc.contains("manifold")) parse_manifold(doc["manifold"], c);
  if (doc.contains("filter")) parse_filter(doc["filter"], c.filter, "filter");
  if (doc.contains("spectra")) {
    only_keys(doc["spectra"], "spectra", {"t_grid"});
    if (doc["spectra"].contains("t_grid")) c.weyl_t_grid = grid(doc["spectra"]["t_grid"], "spectra.t_grid");
  }
  if (doc.contains("kernel_scan")) {
    const json& k = doc["kernel_scan"];
    only_keys(k, "kernel_scan", {"t_grid", "alphas", "point"});
    if (k.contains("t_grid")) {
      c.t_grid = grid(k["t_grid"], "kernel_scan.t_grid");
      for (std::size_t i = 0; i < c.t_grid.size(); ++i)
        if (c.t_grid[i] > 1.0) throw ValidationError(at("kernel_scan.t_grid", i), "t must lie in (0, 1]");
    }
    if (k.contains("alphas")) {
      if (!k["alphas"].is_array() || k["alphas"].empty())
        throw ValidationError("kernel_scan.alphas", "expected a nonempty list");
      c.alphas.clear();
      for (std::size_t i = 0; i < k["alphas"].size(); ++i) {
        const double a = number(k["alphas"][i], at("kernel_scan.alphas", i));
        if (!(a >= 1.0)) throw ValidationError(at("kernel_scan.alphas", i), "alpha must lie in [1, inf]");
        c.alphas.push_back(a);
      }
    }
    if (k.contains("point")) {
      if (!k["point"].is_array() || k["point"].empty() || k["point"].size() > 3)
        throw ValidationError("kernel_scan.point", "expected 1 to 3 coordinates");
      c.point.clear();
      for (std::size_t i = 0; i < k["point"].size(); ++i) c.point.push_back(number(k["point"][i], at("kernel_scan.point", i)));
    }
  }
  if (doc.contains("packing")) {
    only_keys(doc["packing"], "packing", {"N_grid"});
    if (doc["packing"].contains("N_grid")) c.N_grid = int_grid(doc["packing"]["N_grid"], "packing.N_grid", 1, 1 << 20);
  }
  if (doc.contains("widths")) {
    const json& w = doc["widths"];
    only_keys(w, "widths", {"m_grid", "problems", "validate", "optimizer"});
    if (w.contains("m_grid")) c.m_grid = int_grid(w["m_grid"], "widths.m_grid", 1, 16);
    if (w.contains("problems")) {
      const json& ps = w["problems"];
      if (!ps.is_array() || ps.empty()) throw ValidationError("widths.problems", "expected a nonempty list");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string path = at("widths.problems", i);
        only_keys(ps[i], path, {"p", "q", "kind"});
        for (const char* k : {"p", "q", "kind"})
          if (!ps[i].contains(k)) throw ValidationError(join(path, k), "required");
        c.width_problems.push_back(
            {lp_index(ps[i]["p"], join(path, "p")), lp_index(ps[i]["q"], join(path, "q")), width_kind(ps[i]["kind"], join(path, "kind"))});
      }
    }
    if (w.contains("validate")) {
      if (!w["validate"].is_boolean()) throw ValidationError("widths.validate", "expected true or false");
      c.validate_widths = w["validate"].get<bool>();
    }
    if (w.contains("optimizer")) parse_optimizer(w["optimizer"], c.optimizer);
  }
  if (doc.contains("rates")) parse_rates(doc["rates"], c);
  if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], c.tolerances);

  if (c.width_problems.empty()) {
    const LpIndex one = LpIndex::parse("1"), two = LpIndex::parse("2"), inf = LpIndex::infinity();
    c.width_problems = {{one, two, WidthKind::Kolmogorov},
                        {two, inf, WidthKind::Gelfand},
                        {inf, one, WidthKind::Kolmogorov},
                        {inf, one, WidthKind::Gelfand}};
  }
  if (c.specs.empty()) {
    const Rational r(manifold_dimension(c.manifold) + 1);
    const int s = manifold_dimension(c.manifold);
    c.specs = {SobolevSpec::make(LpIndex::parse("2"), LpIndex::parse("2"), r, s)};
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, seed_override);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["manifold"] = {{"kind", c.manifold.kind},
                   {"scale", c.manifold.scale},
                   {"torus_dimension", c.manifold.torus_dimension},
                   {"lambda_max", c.manifold.lambda_max},
                   {"resolution", c.manifold.resolution},
                   {"mesh_path", c.manifold.mesh_path},
                   {"mesh_modes", c.manifold.mesh_modes}};
  j["filter"] = {{"Lambda", c.filter.Lambda},
                 {"band", {c.filter.band_lo, c.filter.band_hi}},
                 {"Q", c.filter.Q},
                 {"tail_rel", c.filter.tail_rel}};
  j["spectra"] = {{"t_grid", c.weyl_t_grid}};
  json alphas = json::array();
  for (double a : c.alphas) alphas.push_back(number_json(a));
  j["kernel_scan"] = {{"t_grid", c.t_grid}, {"alphas", alphas}, {"point", c.point}};
  j["packing"] = {{"N_grid", c.N_grid}};
  json problems = json::array();
  for (const auto& p : c.width_problems)
    problems.push_back({{"p", index_json(p.p)}, {"q", index_json(p.q)}, {"kind", to_string(p.kind)}});
  j["widths"] = {{"m_grid", c.m_grid},
                 {"problems", problems},
                 {"validate", c.validate_widths},
                 {"optimizer",
                  {{"restarts", c.optimizer.restarts},
                   {"iterations", c.optimizer.iterations},
                   {"tolerance", c.optimizer.tolerance},
                   {"stages", c.optimizer.stages},
                   {"agree_stop", c.optimizer.agree_stop},
                   {"agree_tol", c.optimizer.agree_tol}}}};
  json specs = json::array();
  for (const auto& s : c.specs) specs.push_back({{"p", index_json(s.p)}, {"q", index_json(s.q)}, {"r", s.r.str()}, {"s", s.s}});
  json kinds = json::array();
  for (auto k : c.kinds) kinds.push_back(to_string(k));
  j["rates"] = {{"specs", specs},
                {"kinds", kinds},
                {"n_grid", c.n_grid},
                {"oracle_n_grid", c.oracle_n_grid},
                {"nu", c.nu},
                {"bumps",
                 {{"Lambda", c.bumps.Lambda},
                  {"band", {c.bumps.band_lo, c.bumps.band_hi}},
                  {"Q", c.bumps.Q},
                  {"tail_rel", c.bumps.tail_rel},
                  {"probe_t", c.bumps.probe_t},
                  {"support_rel", c.bumps.support_rel},
                  {"epsilon_samples", c.bumps.epsilon_samples},
                  {"norm_samples", c.bumps.norm_samples}}}};
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"exponent", t.exponent},
                     {"oracle_exponent", t.oracle_exponent},
                     {"r2_retry", t.r2_retry},
                     {"optimizer_vs_exact", t.optimizer_vs_exact},
                     {"propagation_margin", t.propagation_margin},
                     {"propagation", t.propagation},
                     {"localization_spread", t.localization_spread},
                     {"eigen_gap", t.eigen_gap}};
  return j;
}

std::string config_hash(const ExperimentConfig& config) { return hex64(fnv1a(to_json(config).dump())); }

} // namespace widthlab::tools
