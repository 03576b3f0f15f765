// Annealing schedules (beta_t)_{t >= 0}, evaluated lazily by formula.
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace asink {

class Schedule {
 public:
  enum class Kind { constant, polynomial, clamped_geometric, plateau, linear };

  /// beta_t = beta0.
  static Schedule constant(double beta0);
  /// beta_t = beta0 (1 + t)^kappa. kappa = 0 is the constant schedule.
  static Schedule polynomial(double beta0, double kappa);
  /// beta_t = min(sigma^t, beta_max), sigma > 1.
  static Schedule clamped_geometric(double sigma, double beta_max);
  /// beta_t = beta0 + slope t.
  static Schedule linear(double beta0, double slope);
  /// Base schedule frozen between the update times t = 16 k^2; at t = 0 the
  /// base value at 0 is used.
  static Schedule plateau(const Schedule& base);

  /// Parses `const:B`, `poly:B0,K`, `lin:B0,A`, `geom:SIGMA,BMAX` or `plateau(<spec>)`,
  /// case-insensitively. Throws std::invalid_argument.
  static Schedule parse(std::string_view text);

  double beta(long t) const;
  /// beta(t) - beta(t - 1); t >= 1.
  double alpha(long t) const;

  Kind kind() const { return kind_; }
  double beta0() const { return beta0_; }
  double kappa() const { return kappa_; }
  double slope() const { return slope_; }
  double sigma() const { return sigma_; }
  double beta_max() const { return beta_max_; }
  const Schedule* base() const { return base_.get(); }
  bool is_constant() const;

  /// Canonical text form, re-parseable by parse().
  std::string describe() const;

 private:
  Schedule() = default;

  Kind kind_ = Kind::constant;
  double beta0_ = 1.0;
  double kappa_ = 0.0;
  double slope_ = 0.0;
  double sigma_ = 2.0;
  double beta_max_ = 1.0;
  std::shared_ptr<const Schedule> base_;
};

/// {16 k^2 : k >= 0, 16 k^2 <= max_t}.
std::vector<long> plateau_update_times(long max_t);

/// Last plateau update time at or before t.
long plateau_anchor(long t);

/// True iff alpha_t >= -1e-12 and alpha_{t+1} <= alpha_t + 1e-12 for 1 <= t <= horizon.
bool validate_concave(const Schedule& s, long horizon);

}  // namespace asink
