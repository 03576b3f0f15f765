#include "asink/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace asink {

namespace {

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}

std::vector<double> parse_numbers(std::string_view body, std::string_view whole) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view tok = body.substr(start, end - start);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("invalid schedule '" + std::string(whole) + "'");
    }
    out.push_back(x);
    start = end + 1;
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Schedule Schedule::constant(double beta0) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
    throw std::invalid_argument("Schedule: beta0 must be positive");
  }
  Schedule s;
  s.kind_ = Kind::constant;
  s.beta0_ = beta0;
  return s;
}

Schedule Schedule::polynomial(double beta0, double kappa) {
  if (kappa == 0.0) return constant(beta0);
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
    throw std::invalid_argument("Schedule: beta0 must be positive");
  }
  if (!std::isfinite(kappa) || kappa < 0.0) {
    throw std::invalid_argument("Schedule: kappa must be a nonnegative real");
  }
  Schedule s;
  s.kind_ = Kind::polynomial;
  s.beta0_ = beta0;
  s.kappa_ = kappa;
  return s;
}

Schedule Schedule::linear(double beta0, double slope) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
    throw std::invalid_argument("Schedule: beta0 must be positive");
  }
  if (!(slope >= 0.0) || !std::isfinite(slope)) {
    throw std::invalid_argument("Schedule: slope must be a nonnegative real");
  }
  if (slope == 0.0) return constant(beta0);
  Schedule s;
  s.kind_ = Kind::linear;
  s.beta0_ = beta0;
  s.slope_ = slope;
  return s;
}

Schedule Schedule::clamped_geometric(double sigma, double beta_max) {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("Schedule: sigma must exceed 1");
  }
  if (!(beta_max >= 1.0) || !std::isfinite(beta_max)) {
    throw std::invalid_argument("Schedule: beta_max must be at least 1");
  }
  Schedule s;
  s.kind_ = Kind::clamped_geometric;
  s.sigma_ = sigma;
  s.beta_max_ = beta_max;
  s.beta0_ = 1.0;
  return s;
}

Schedule Schedule::plateau(const Schedule& base) {
  Schedule s;
  s.kind_ = Kind::plateau;
  s.base_ = std::make_shared<const Schedule>(base);
  s.beta0_ = base.beta(0);
  return s;
}

Schedule Schedule::parse(std::string_view text) {
  const std::string s = lower(text);
  if (s.starts_with("plateau(") && s.ends_with(")")) {
    return plateau(parse(std::string_view(s).substr(8, s.size() - 9)));
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("invalid schedule '" + std::string(text) + "'");
  }
  const std::string_view head = std::string_view(s).substr(0, colon);
  const auto args = parse_numbers(std::string_view(s).substr(colon + 1), text);
  if (head == "const" && args.size() == 1) return constant(args[0]);
  if (head == "poly" && args.size() == 2) return polynomial(args[0], args[1]);
  if (head == "lin" && args.size() == 2) return linear(args[0], args[1]);
  if (head == "geom" && args.size() == 2) return clamped_geometric(args[0], args[1]);
  throw std::invalid_argument("invalid schedule '" + std::string(text) + "'");
}

double Schedule::beta(long t) const {
  if (t < 0) throw std::invalid_argument("Schedule::beta: negative t");
  switch (kind_) {
    case Kind::constant:
      return beta0_;
    case Kind::polynomial:
      return beta0_ * std::pow(1.0 + static_cast<double>(t), kappa_);
    case Kind::linear:
      return beta0_ + slope_ * static_cast<double>(t);
    case Kind::clamped_geometric:
      return std::min(std::pow(sigma_, static_cast<double>(t)), beta_max_);
    case Kind::plateau:
      return base_->beta(plateau_anchor(t));
  }
  return beta0_;
}

double Schedule::alpha(long t) const {
  if (t < 1) throw std::invalid_argument("Schedule::alpha: t must be >= 1");
  return beta(t) - beta(t - 1);
}

bool Schedule::is_constant() const { return kind_ == Kind::constant; }

std::string Schedule::describe() const {
  switch (kind_) {
    case Kind::constant:
      return "const:" + fmt(beta0_);
    case Kind::polynomial:
      return "poly:" + fmt(beta0_) + "," + fmt(kappa_);
    case Kind::linear:
      return "lin:" + fmt(beta0_) + "," + fmt(slope_);
    case Kind::clamped_geometric:
      return "geom:" + fmt(sigma_) + "," + fmt(beta_max_);
    case Kind::plateau:
      return "plateau(" + base_->describe() + ")";
  }
  return {};
}

long plateau_anchor(long t) {
  const long r = t / 16;
  long k = static_cast<long>(std::sqrt(static_cast<double>(r)));
  while (k * k > r) --k;
  while ((k + 1) * (k + 1) <= r) ++k;
  return 16 * k * k;
}

std::vector<long> plateau_update_times(long max_t) {
  std::vector<long> out;
  for (long k = 0; 16 * k * k <= max_t; ++k) out.push_back(16 * k * k);
  return out;
}

bool validate_concave(const Schedule& s, long horizon) {
  double prev = s.alpha(1);
  if (prev < -1e-12) return false;
  for (long t = 2; t <= horizon; ++t) {
    const double a = s.alpha(t);
    if (a < -1e-12 || a > prev + 1e-12) return false;
    prev = a;
  }
  return true;
}

}  // namespace asink
