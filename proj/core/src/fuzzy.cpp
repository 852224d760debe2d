#include "fars/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fars {

MembershipFunction::MembershipFunction(MfShape shape, std::array<double, 4> p)
    : shape_(shape), p_(p) {
  const int n = shape == MfShape::triangular ? 3 : 4;
  for (int i = 0; i + 1 < n; ++i) {
    if (!(p_[i] <= p_[i + 1]) || !std::isfinite(p_[i])) {
      throw std::invalid_argument("membership parameters must be finite and non-decreasing");
    }
  }
  if (!std::isfinite(p_[n - 1])) {
    throw std::invalid_argument("membership parameters must be finite and non-decreasing");
  }
}

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
  return MembershipFunction(MfShape::triangular, {a, b, c, c});
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
  return MembershipFunction(MfShape::trapezoidal, {a, b, c, d});
}

double MembershipFunction::eval(double x) const {
  const double a = p_[0];
  const double b = p_[1];
  const double c = shape_ == MfShape::triangular ? p_[1] : p_[2];
  const double d = shape_ == MfShape::triangular ? p_[2] : p_[3];
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;  // plateau / apex (handles degenerate edges)
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

LinguisticVariable::LinguisticVariable(std::string name, double lo, double hi,
                                       std::vector<Term> terms)
    : name_(std::move(name)), lo_(lo), hi_(hi), terms_(std::move(terms)) {
  if (!(lo_ < hi_)) throw std::invalid_argument(name_ + ": universe requires lo < hi");
  if (terms_.empty()) throw std::invalid_argument(name_ + ": needs at least one term");
  for (const auto& t : terms_) {
    if (t.mf.support_lo() < lo_ - 1e-12 || t.mf.support_hi() > hi_ + 1e-12) {
      throw std::invalid_argument(name_ + ": term '" + t.label + "' exceeds the universe");
    }
  }
  // cover check: walk a fine grid; any hole in the membership union is fatal
  const int n = 1001;
  for (int i = 0; i < n; ++i) {
    const double x = lo_ + (hi_ - lo_) * i / (n - 1);
    bool covered = false;
    for (const auto& t : terms_) {
      if (t.mf.eval(x) > 0.0) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      throw std::invalid_argument(name_ + ": terms do not cover the universe near x=" +
                                  std::to_string(x));
    }
  }
}

int LinguisticVariable::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

double LinguisticVariable::clamp(double x) const {
  return std::min(std::max(x, lo_), hi_);
}

std::vector<double> LinguisticVariable::fuzzify(double x) const {
  const double xc = clamp(x);
  std::vector<double> degrees(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) degrees[i] = terms_[i].mf.eval(xc);
  return degrees;
}

double firing_strength(double velocity_degree, double distance_degree, AndOp op) {
  return op == AndOp::min ? std::min(velocity_degree, distance_degree)
                          : velocity_degree * distance_degree;
}

FuzzySystem::FuzzySystem(LinguisticVariable velocity, LinguisticVariable distance,
                         LinguisticVariable output, std::vector<FuzzyRule> rules,
                         AndOp mamdani_and, AndOp sugeno_and, int defuzz_resolution)
    : velocity_(std::move(velocity)),
      distance_(std::move(distance)),
      output_(std::move(output)),
      rules_(std::move(rules)),
      mamdani_and_(mamdani_and),
      sugeno_and_(sugeno_and),
      defuzz_resolution_(defuzz_resolution) {
  validate();
  vel_index_.reserve(rules_.size());
  dist_index_.reserve(rules_.size());
  consequent_index_.reserve(rules_.size());
  for (const auto& r : rules_) {
    vel_index_.push_back(velocity_.index_of(r.velocity_term));
    dist_index_.push_back(distance_.index_of(r.distance_term));
    consequent_index_.push_back(output_.index_of(r.consequent_label));
  }
}

void FuzzySystem::validate() const {
  if (defuzz_resolution_ < 2) throw std::invalid_argument("defuzz_resolution must be >= 2");
  const std::size_t nv = velocity_.terms().size();
  const std::size_t nd = distance_.terms().size();
  if (rules_.size() != nv * nd) {
    throw std::invalid_argument("rule grid must contain exactly one rule per term pair");
  }
  std::vector<bool> seen(nv * nd, false);
  for (const auto& r : rules_) {
    const int vi = velocity_.index_of(r.velocity_term);
    const int di = distance_.index_of(r.distance_term);
    if (vi < 0) throw std::invalid_argument("rule references unknown velocity term '" + r.velocity_term + "'");
    if (di < 0) throw std::invalid_argument("rule references unknown distance term '" + r.distance_term + "'");
    if (output_.index_of(r.consequent_label) < 0) {
      throw std::invalid_argument("rule references unknown output term '" + r.consequent_label + "'");
    }
    if (!(r.consequent_value >= 0.0 && r.consequent_value <= 1.0)) {
      throw std::invalid_argument("Sugeno constant must lie in [0,1]");
    }
    const std::size_t cell = static_cast<std::size_t>(di) * nv + static_cast<std::size_t>(vi);
    if (seen[cell]) throw std::invalid_argument("duplicate rule for a term pair");
    seen[cell] = true;
  }
}

namespace {

std::vector<Term> unit_triplet(const std::string& a, const std::string& b,
                               const std::string& c) {
  std::vector<Term> t;
  t.push_back({a, MembershipFunction::triangular(0.0, 0.0, 0.5)});
  t.push_back({b, MembershipFunction::triangular(0.0, 0.5, 1.0)});
  t.push_back({c, MembershipFunction::triangular(0.5, 1.0, 1.0)});
  return t;
}

}  // namespace

FuzzySystem FuzzySystem::default_system() {
  LinguisticVariable velocity("velocity", 0.0, 1.0, unit_triplet("slow", "medium", "fast"));
  LinguisticVariable distance("distance", 0.0, 1.0, unit_triplet("near", "medium", "far"));

  // Output: nine narrow symmetric level terms (one per rule) whose centroids
  // are exact, plus three broad bands so the term set covers [0,1]. Narrow
  // non-overlapping consequents keep the defuzzified surface monotone in
  // distance and smoother than the Sugeno surface on the same grid.
  const double w = 0.015;
  struct Level { const char* label; double c; };
  const Level levels[] = {
      {"lowest", 0.38}, {"very_low", 0.41}, {"low", 0.44},
      {"med_low", 0.47}, {"medium", 0.50}, {"med_high", 0.53},
      {"high", 0.56}, {"very_high", 0.59}, {"highest", 0.62},
  };
  std::vector<Term> out_terms;
  out_terms.push_back({"low_band", MembershipFunction::triangular(0.0, 0.0, 0.5)});
  out_terms.push_back({"mid_band", MembershipFunction::triangular(0.0, 0.5, 1.0)});
  out_terms.push_back({"high_band", MembershipFunction::triangular(0.5, 1.0, 1.0)});
  for (const auto& l : levels) {
    out_terms.push_back({l.label, MembershipFunction::triangular(l.c - w, l.c, l.c + w)});
  }
  LinguisticVariable output("reward", 0.0, 1.0, std::move(out_terms));

  // distance rows near->far, velocity columns slow->fast
  const char* dist_terms[3] = {"near", "medium", "far"};
  const char* vel_terms[3] = {"slow", "medium", "fast"};
  const double sugeno_c[3][3] = {{1.0, 0.8, 0.6}, {0.6, 0.6, 0.6}, {0.2, 0.4, 0.5}};
  const char* mamdani_c[3][3] = {{"highest", "very_high", "high"},
                                 {"med_high", "medium", "med_low"},
                                 {"lowest", "very_low", "low"}};
  std::vector<FuzzyRule> rules;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      rules.push_back({vel_terms[j], dist_terms[i], mamdani_c[i][j], sugeno_c[i][j]});
    }
  }
  return FuzzySystem(std::move(velocity), std::move(distance), std::move(output),
                     std::move(rules));
}

double FuzzySystem::infer(FuzzyEngine engine, double v_hat, double d_hat) const {
  return engine == FuzzyEngine::mamdani ? mamdani_infer(v_hat, d_hat)
                                        : sugeno_infer(v_hat, d_hat);
}

double FuzzySystem::sugeno_infer(double v_hat, double d_hat) const {
  const std::vector<double> wv = velocity_.fuzzify(v_hat);
  const std::vector<double> wd = distance_.fuzzify(d_hat);
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : rules_) {
    const double w = firing_strength(wv[velocity_.index_of(r.velocity_term)],
                                     wd[distance_.index_of(r.distance_term)], sugeno_and_);
    num += w * r.consequent_value;
    den += w;
  }
  // den > 0 is guaranteed by the cover invariant
  return num / den;
}

double FuzzySystem::mamdani_infer(double v_hat, double d_hat) const {
  const std::vector<double> wv = velocity_.fuzzify(v_hat);
  const std::vector<double> wd = distance_.fuzzify(d_hat);

  std::vector<double> strength(rules_.size());
  for (std::size_t k = 0; k < rules_.size(); ++k) {
    strength[k] = firing_strength(wv[velocity_.index_of(rules_[k].velocity_term)],
                                  wd[distance_.index_of(rules_[k].distance_term)],
                                  mamdani_and_);
  }

  const int n = defuzz_resolution_;
  const double lo = output_.lo();
  const double hi = output_.hi();
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = lo + (hi - lo) * i / (n - 1);
    double agg = 0.0;
    for (std::size_t k = 0; k < rules_.size(); ++k) {
      if (strength[k] <= 0.0) continue;
      const double clipped =
          std::min(output_.terms()[consequent_index_[k]].mf.eval(y), strength[k]);
      if (clipped > agg) agg = clipped;
    }
    num += y * agg;
    den += agg;
  }
  if (den == 0.0) return 0.5 * (lo + hi);  // unreachable under the cover invariant
  return num / den;
}

std::vector<double> FuzzySystem::surface_grid(FuzzyEngine engine, int nx, int ny) const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("surface_grid requires nx, ny >= 2");
  std::vector<double> grid(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    const double d = static_cast<double>(iy) / (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const double v = static_cast<double>(ix) / (nx - 1);
      grid[static_cast<std::size_t>(iy) * nx + ix] = infer(engine, v, d);
    }
  }
  return grid;
}

namespace {

nlohmann::json mf_to_json(const MembershipFunction& mf) {
  nlohmann::json j;
  if (mf.shape() == MfShape::triangular) {
    j["shape"] = "triangular";
    j["params"] = {mf.params()[0], mf.params()[1], mf.params()[2]};
  } else {
    j["shape"] = "trapezoidal";
    j["params"] = {mf.params()[0], mf.params()[1], mf.params()[2], mf.params()[3]};
  }
  return j;
}

MembershipFunction mf_from_json(const nlohmann::json& j) {
  const std::string shape = j.at("shape").get<std::string>();
  const auto p = j.at("params").get<std::vector<double>>();
  if (shape == "triangular") {
    if (p.size() != 3) throw std::invalid_argument("triangular mf needs 3 params");
    return MembershipFunction::triangular(p[0], p[1], p[2]);
  }
  if (shape == "trapezoidal") {
    if (p.size() != 4) throw std::invalid_argument("trapezoidal mf needs 4 params");
    return MembershipFunction::trapezoidal(p[0], p[1], p[2], p[3]);
  }
  throw std::invalid_argument("unknown membership shape '" + shape + "'");
}

nlohmann::json var_to_json(const LinguisticVariable& v) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : v.terms()) {
    nlohmann::json tj = mf_to_json(t.mf);
    tj["label"] = t.label;
    terms.push_back(tj);
  }
  return {{"name", v.name()}, {"universe", {v.lo(), v.hi()}}, {"terms", terms}};
}

LinguisticVariable var_from_json(const nlohmann::json& j) {
  std::vector<Term> terms;
  for (const auto& tj : j.at("terms")) {
    terms.push_back({tj.at("label").get<std::string>(), mf_from_json(tj)});
  }
  const auto u = j.at("universe").get<std::vector<double>>();
  if (u.size() != 2) throw std::invalid_argument("universe must be [lo, hi]");
  return LinguisticVariable(j.at("name").get<std::string>(), u[0], u[1], std::move(terms));
}

std::string and_op_name(AndOp op) { return op == AndOp::min ? "min" : "product"; }

AndOp and_op_from(const std::string& s) {
  if (s == "min") return AndOp::min;
  if (s == "product") return AndOp::product;
  throw std::invalid_argument("unknown and operator '" + s + "'");
}

}  // namespace

nlohmann::json FuzzySystem::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : rules_) {
    rules.push_back({{"velocity", r.velocity_term},
                     {"distance", r.distance_term},
                     {"then", r.consequent_label},
                     {"value", r.consequent_value}});
  }
  return {{"velocity", var_to_json(velocity_)},
          {"distance", var_to_json(distance_)},
          {"output", var_to_json(output_)},
          {"rules", rules},
          {"mamdani_and", and_op_name(mamdani_and_)},
          {"sugeno_and", and_op_name(sugeno_and_)},
          {"aggregation", "max"},
          {"defuzz_resolution", defuzz_resolution_}};
}

FuzzySystem FuzzySystem::from_json(const nlohmann::json& j) {
  std::vector<FuzzyRule> rules;
  for (const auto& rj : j.at("rules")) {
    rules.push_back({rj.at("velocity").get<std::string>(),
                     rj.at("distance").get<std::string>(),
                     rj.at("then").get<std::string>(),
                     rj.at("value").get<double>()});
  }
  if (j.contains("aggregation") && j.at("aggregation").get<std::string>() != "max") {
    throw std::invalid_argument("only max aggregation is supported");
  }
  return FuzzySystem(
      var_from_json(j.at("velocity")), var_from_json(j.at("distance")),
      var_from_json(j.at("output")), std::move(rules),
      j.contains("mamdani_and") ? and_op_from(j.at("mamdani_and").get<std::string>()) : AndOp::min,
      j.contains("sugeno_and") ? and_op_from(j.at("sugeno_and").get<std::string>()) : AndOp::product,
      j.value("defuzz_resolution", 201));
}

FuzzySystem load_fuzzy_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fuzzy system file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return FuzzySystem::from_json(j);
}

void write_surface_csv(std::ostream& os, const std::vector<double>& grid, int nx, int ny) {
  os << "v_hat,d_hat,reward\n";
  char buf[96];
  for (int iy = 0; iy < ny; ++iy) {
    const double d = static_cast<double>(iy) / (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const double v = static_cast<double>(ix) / (nx - 1);
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", v, d,
                    grid[static_cast<std::size_t>(iy) * nx + ix]);
      os << buf;
    }
  }
}

std::string to_string(FuzzyEngine engine) {
  return engine == FuzzyEngine::mamdani ? "mamdani" : "sugeno";
}

FuzzyEngine fuzzy_engine_from_string(const std::string& s) {
  if (s == "mamdani") return FuzzyEngine::mamdani;
  if (s == "sugeno") return FuzzyEngine::sugeno;
  throw std::invalid_argument("unknown fuzzy engine '" + s + "'");
}

}  // namespace fars
