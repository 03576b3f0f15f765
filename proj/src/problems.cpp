#include "asink/problems.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace asink {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// Stream ids, one per generated quantity.
enum Stream : std::uint64_t { kCost = 1, kRowWeights, kColWeights, kSourcePoints, kTargetPoints };

void rescale_osc(Matrix& c) {
  const double osc = osc_norm(c);
  if (osc > 0.0) {
    for (double& x : c.values()) x /= osc;
  }
}

Vector random_weights(CounterRng& rng, std::size_t k) {
  // Uniform on (0, 1], so the sum is never zero and every weight is positive.
  Vector w(k);
  for (double& x : w) x = rng.uniform_open0();
  const double s = sum(w);
  for (double& x : w) x /= s;
  return w;
}

std::string label_of(const GeneratorSpec& spec) {
  std::ostringstream os;
  os << "gen:" << (spec.family == Family::random ? "random" : "geometric") << ',' << spec.m << ','
     << spec.n << ',' << spec.seed;
  return os.str();
}

void check_spec(const GeneratorSpec& spec) {
  if (spec.m < 1 || spec.n < 1) throw std::invalid_argument("generator: m and n must be >= 1");
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("problem file line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(std::string_view tok, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error(line, "invalid number '" + std::string(tok) + "'");
  }
  return value;
}

Vector parse_row(std::string_view text, std::size_t expected, std::size_t line) {
  const auto toks = split_ws(text);
  if (toks.size() != expected) {
    parse_error(line, "expected " + std::to_string(expected) + " values, got " +
                          std::to_string(toks.size()));
  }
  Vector out(expected);
  for (std::size_t k = 0; k < expected; ++k) out[k] = parse_number<double>(toks[k], line);
  return out;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed ^ mix(stream * kGamma))) {}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix(key_ + counter_ * kGamma);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open0() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

Problem gen_random(const GeneratorSpec& spec) {
  check_spec(spec);
  if (spec.family != Family::random) throw std::invalid_argument("gen_random: wrong family");
  Problem prob;
  prob.cost = Matrix(spec.m, spec.n);
  CounterRng cost_rng(spec.seed, kCost);
  for (double& x : prob.cost.values()) x = cost_rng.normal();
  CounterRng prng(spec.seed, kRowWeights);
  CounterRng qrng(spec.seed, kColWeights);
  prob.p = random_weights(prng, spec.m);
  prob.q = random_weights(qrng, spec.n);
  if (spec.normalize_osc) rescale_osc(prob.cost);
  prob.label = label_of(spec);
  return prob;
}

Problem gen_geometric(const GeneratorSpec& spec) {
  check_spec(spec);
  if (spec.family != Family::geometric) throw std::invalid_argument("gen_geometric: wrong family");
  static constexpr std::array<std::array<double, 2>, 3> kCenters{{{0.0, 0.0}, {1.0, 0.2}, {0.4, 1.0}}};
  constexpr double kStd = 0.08;
  constexpr double kR1 = 0.7;
  constexpr double kR2 = 0.9;

  std::vector<std::array<double, 2>> xs(spec.m);
  CounterRng xr(spec.seed, kSourcePoints);
  for (auto& x : xs) {
    const auto k = static_cast<std::size_t>(xr.uniform() * 3.0);
    const auto& ctr = kCenters[std::min<std::size_t>(k, 2)];
    const double dx = xr.normal();
    const double dy = xr.normal();
    x = {ctr[0] + kStd * dx, ctr[1] + kStd * dy};
  }
  std::vector<std::array<double, 2>> ys(spec.n);
  CounterRng yr(spec.seed, kTargetPoints);
  for (auto& y : ys) {
    // Area-uniform radius.
    const double r = std::sqrt(kR1 * kR1 + (kR2 * kR2 - kR1 * kR1) * yr.uniform());
    const double th = 2.0 * std::numbers::pi * yr.uniform();
    y = {0.5 + r * std::cos(th), 0.5 + r * std::sin(th)};
  }

  Problem prob;
  prob.cost = Matrix(spec.m, spec.n);
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      const double dx = xs[i][0] - ys[j][0];
      const double dy = xs[i][1] - ys[j][1];
      prob.cost(i, j) = dx * dx + dy * dy;
    }
  }
  prob.p.assign(spec.m, 1.0 / static_cast<double>(spec.m));
  prob.q.assign(spec.n, 1.0 / static_cast<double>(spec.n));
  if (spec.normalize_osc) rescale_osc(prob.cost);
  prob.label = label_of(spec);
  return prob;
}

Problem generate(const GeneratorSpec& spec) {
  return spec.family == Family::random ? gen_random(spec) : gen_geometric(spec);
}

GeneratorSpec parse_generator(std::string_view text) {
  const std::string s = trim(text);
  if (s.rfind("gen:", 0) != 0) throw std::invalid_argument("generator spec must start with 'gen:'");
  std::vector<std::string> parts;
  std::stringstream ss(s.substr(4));
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
  if (parts.empty() || parts.size() > 4) {
    throw std::invalid_argument("generator spec: expected gen:family[,m,n[,seed]]");
  }
  GeneratorSpec spec;
  std::string fam = parts[0];
  std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (fam == "random") {
    spec.family = Family::random;
    spec.m = spec.n = 100;
  } else if (fam == "geometric") {
    spec.family = Family::geometric;
    spec.m = spec.n = 300;
  } else {
    throw std::invalid_argument("generator spec: unknown family '" + parts[0] + "'");
  }
  auto num = [&](const std::string& tok, const char* what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument(std::string("generator spec: bad ") + what + " '" + tok + "'");
    }
    return v;
  };
  if (parts.size() == 2) throw std::invalid_argument("generator spec: give both m and n");
  if (parts.size() >= 3) {
    spec.m = num(parts[1], "m");
    spec.n = num(parts[2], "n");
  }
  if (parts.size() == 4) spec.seed = num(parts[3], "seed");
  check_spec(spec);
  return spec;
}

Problem load_problem_spec(std::string_view text) {
  const std::string s = trim(text);
  if (s.rfind("gen:", 0) == 0) return generate(parse_generator(s));
  Problem prob = load_problem(s);
  prob.label = std::filesystem::path(s).filename().string();
  return prob;
}

std::string format_problem(const Problem& prob) {
  prob.validate();
  std::string out;
  out += std::to_string(prob.rows()) + ' ' + std::to_string(prob.cols()) + '\n';
  auto line = [&out](std::span<const double> xs) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (k) out += ' ';
      out += format_double(xs[k]);
    }
    out += '\n';
  };
  line(prob.p);
  line(prob.q);
  for (std::size_t i = 0; i < prob.rows(); ++i) line(prob.cost.row(i));
  return out;
}

void save_problem(const Problem& prob, const std::filesystem::path& path) {
  const std::string text = format_problem(prob);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Problem parse_problem(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  auto get = [&](std::size_t k) -> std::string_view {
    if (k >= lines.size()) parse_error(k + 1, "unexpected end of file");
    return lines[k];
  };

  const auto head = split_ws(get(0));
  if (head.size() != 2) parse_error(1, "expected 'm n'");
  const auto m = parse_number<std::size_t>(head[0], 1);
  const auto n = parse_number<std::size_t>(head[1], 1);
  if (m < 1 || n < 1) parse_error(1, "m and n must be >= 1");

  Problem prob;
  prob.p = parse_row(get(1), m, 2);
  prob.q = parse_row(get(2), n, 3);
  prob.cost = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector row = parse_row(get(3 + i), n, 4 + i);
    std::copy(row.begin(), row.end(), prob.cost.row(i).begin());
  }
  for (std::size_t k = 3 + m; k < lines.size(); ++k) {
    if (!trim(lines[k]).empty()) parse_error(k + 1, "trailing content");
  }
  prob.validate();
  return prob;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_problem(ss.str());
}

std::string fingerprint(const Problem& prob) {
  const std::string text = format_problem(prob);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return buf.data();
}

}  // namespace asink
