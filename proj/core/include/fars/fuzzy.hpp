#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

namespace fars {

enum class MfShape { triangular, trapezoidal };
enum class AndOp { min, product };
enum class FuzzyEngine { mamdani, sugeno };

// Piecewise-linear membership function with non-decreasing breakpoints.
// Evaluation returns a degree in [0,1]; exactly 1 on the plateau/apex.
class MembershipFunction {
 public:
  static MembershipFunction triangular(double a, double b, double c);
  static MembershipFunction trapezoidal(double a, double b, double c, double d);

  double eval(double x) const;
  MfShape shape() const { return shape_; }
  const std::array<double, 4>& params() const { return p_; }
  double support_lo() const { return p_[0]; }
  double support_hi() const { return shape_ == MfShape::triangular ? p_[2] : p_[3]; }

 private:
  MembershipFunction(MfShape shape, std::array<double, 4> p);
  MfShape shape_;
  std::array<double, 4> p_;  // a<=b<=c(<=d); p_[3] unused for triangles
};

struct Term {
  std::string label;
  MembershipFunction mf;
};

// Named variable over a closed universe with an ordered, covering term set.
class LinguisticVariable {
 public:
  LinguisticVariable(std::string name, double lo, double hi, std::vector<Term> terms);

  const std::string& name() const { return name_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Term>& terms() const { return terms_; }
  int index_of(const std::string& label) const;  // -1 when absent

  double clamp(double x) const;
  // Degrees for the clamped input, one per term. At least one is > 0.
  std::vector<double> fuzzify(double x) const;

 private:
  std::string name_;
  double lo_, hi_;
  std::vector<Term> terms_;
};

struct FuzzyRule {
  std::string velocity_term;
  std::string distance_term;
  std::string consequent_label;  // Mamdani output term
  double consequent_value;       // zero-order Sugeno constant in [0,1]
};

double firing_strength(double velocity_degree, double distance_degree, AndOp op);

// Two-input fuzzy system over normalized velocity/distance, immutable after
// construction; inference is pure and safe to call concurrently.
class FuzzySystem {
 public:
  FuzzySystem(LinguisticVariable velocity, LinguisticVariable distance,
              LinguisticVariable output, std::vector<FuzzyRule> rules,
              AndOp mamdani_and = AndOp::min, AndOp sugeno_and = AndOp::product,
              int defuzz_resolution = 201);

  // The built-in velocity-distance rule base (see default rule table in fuzzy.cpp).
  static FuzzySystem default_system();

  static FuzzySystem from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double infer(FuzzyEngine engine, double v_hat, double d_hat) const;
  double mamdani_infer(double v_hat, double d_hat) const;
  double sugeno_infer(double v_hat, double d_hat) const;

  // Row-major ny x nx grid over [0,1]^2; entry (iy,ix) is
  // infer(v = ix/(nx-1), d = iy/(ny-1)).
  std::vector<double> surface_grid(FuzzyEngine engine, int nx, int ny) const;

  const LinguisticVariable& velocity() const { return velocity_; }
  const LinguisticVariable& distance() const { return distance_; }
  const LinguisticVariable& output() const { return output_; }
  const std::vector<FuzzyRule>& rules() const { return rules_; }
  AndOp mamdani_and_op() const { return mamdani_and_; }
  AndOp sugeno_and_op() const { return sugeno_and_; }
  int defuzz_resolution() const { return defuzz_resolution_; }

 private:
  void validate() const;

  LinguisticVariable velocity_;
  LinguisticVariable distance_;
  LinguisticVariable output_;
  std::vector<FuzzyRule> rules_;
  AndOp mamdani_and_;
  AndOp sugeno_and_;
  int defuzz_resolution_;
  // label lookups resolved once; inference stays string-free
  std::vector<int> vel_index_, dist_index_, consequent_index_;
};

FuzzySystem load_fuzzy_system(const std::string& path);

// CSV with header "v_hat,d_hat,reward", one row per grid cell, row-major in d.
void write_surface_csv(std::ostream& os, const std::vector<double>& grid,
                       int nx, int ny);

std::string to_string(FuzzyEngine engine);
FuzzyEngine fuzzy_engine_from_string(const std::string& s);

}  // namespace fars
