// SPDX-License-Identifier: MIT
#include "refundlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace refundlab {

namespace {

double segment_start(const Segment& s) {
  if (const auto* a = std::get_if<Atom>(&s)) return a->location;
  return std::get<ParetoDensity>(s).lower;
}

double segment_mass(const Segment& s) {
  if (const auto* a = std::get_if<Atom>(&s)) return a->mass;
  return std::get<ParetoDensity>(s).mass();
}

constexpr double kMassTol = 1e-12;
constexpr double kMeanTol = 1e-10;

}  // namespace

SignalDistribution::SignalDistribution(std::vector<Segment> segments,
                                       std::optional<double> expected_mean)
    : segments_(std::move(segments)) {
  std::stable_sort(segments_.begin(), segments_.end(),
                   [](const Segment& a, const Segment& b) {
                     return segment_start(a) < segment_start(b);
                   });
  double total = 0.0;
  for (const auto& s : segments_) {
    if (const auto* a = std::get_if<Atom>(&s)) {
      if (!(a->location >= 0.0 && a->location <= 1.0))
        throw std::invalid_argument("SignalDistribution: atom outside [0, 1]");
      if (!(a->mass > 0.0))
        throw std::invalid_argument("SignalDistribution: non-positive mass");
    } else {
      const auto& p = std::get<ParetoDensity>(s);
      if (!(p.lower > 0.0 && p.lower < p.upper && p.upper <= 1.0))
        throw std::invalid_argument(
            "SignalDistribution: density interval must satisfy 0 < a < b <= 1");
      if (!(p.scale > 0.0))
        throw std::invalid_argument("SignalDistribution: non-positive scale");
    }
    total += segment_mass(s);
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw std::invalid_argument("SignalDistribution: total mass != 1");
  if (expected_mean &&
      std::abs(mean() - *expected_mean) > kMeanTol)
    throw std::invalid_argument("SignalDistribution: mean mismatch");
}

bool SignalDistribution::is_discrete() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) {
    return std::holds_alternative<Atom>(s);
  });
}

double SignalDistribution::cdf(double q) const {
  double f = 0.0;
  for (const auto& s : segments_) {
    if (const auto* a = std::get_if<Atom>(&s)) {
      if (a->location <= q) f += a->mass;
    } else {
      const auto& p = std::get<ParetoDensity>(s);
      if (q >= p.upper)
        f += p.mass();
      else if (q >= p.lower)
        f += p.scale * (1.0 / p.lower - 1.0 / q);
    }
  }
  return f;
}

double SignalDistribution::integral_cdf(double a, double b) const {
  if (!(0.0 <= a && a <= b && b <= 1.0))
    throw std::invalid_argument("integral_cdf: need 0 <= a <= b <= 1");
  double acc = 0.0;
  for (const auto& s : segments_) {
    if (const auto* at = std::get_if<Atom>(&s)) {
      if (at->location < b) acc += at->mass * (b - std::max(a, at->location));
    } else {
      const auto& p = std::get<ParetoDensity>(s);
      const double x1 = std::clamp(a, p.lower, p.upper);
      const double x2 = std::clamp(b, p.lower, p.upper);
      if (x2 > x1)
        acc += p.scale * ((x2 - x1) / p.lower - std::log(x2 / x1));
      if (b > p.upper) acc += p.mass() * (b - std::max(a, p.upper));
    }
  }
  return acc;
}

double SignalDistribution::mean() const {
  double m = 0.0;
  for (const auto& s : segments_) {
    if (const auto* a = std::get_if<Atom>(&s))
      m += a->mass * a->location;
    else {
      const auto& p = std::get<ParetoDensity>(s);
      m += p.scale * std::log(p.upper / p.lower);  // int q * k/q^2 dq
    }
  }
  return m;
}

double SignalDistribution::sample_one(Rng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  for (const auto& s : segments_) {
    const double m = segment_mass(s);
    if (u < cum + m) {
      if (const auto* a = std::get_if<Atom>(&s)) return a->location;
      const auto& p = std::get<ParetoDensity>(s);
      const double local = u - cum;
      return 1.0 / (1.0 / p.lower - local / p.scale);
    }
    cum += m;
  }
  // u landed in the roundoff sliver past the last segment.
  return segment_start(segments_.back());
}

std::vector<double> SignalDistribution::sample(Rng& rng, std::size_t n) const {
  std::vector<double> out(n);
  for (auto& q : out) q = sample_one(rng);
  return out;
}

SignalDistribution SignalDistribution::discretize(std::size_t n) const {
  if (n < 3) throw std::invalid_argument("discretize: n < 3");
  std::vector<Atom> kept;
  double density_mass = 0.0;
  for (const auto& s : segments_) {
    if (const auto* a = std::get_if<Atom>(&s))
      kept.push_back(*a);
    else
      density_mass += segment_mass(s);
  }
  std::vector<Segment> out(kept.begin(), kept.end());
  if (density_mass > 0.0) {
    const std::size_t budget = n > kept.size() ? n - kept.size() : 2;
    for (const auto& s : segments_) {
      const auto* p = std::get_if<ParetoDensity>(&s);
      if (!p) continue;
      auto cells = static_cast<std::size_t>(
          std::max(2.0, std::round(budget * p->mass() / density_mass)));
      // Geometric cells: the k/q^2 density integrates in closed form per
      // cell, and placing cell mass at its conditional mean keeps the
      // distribution's mean exact.
      const double ratio = std::pow(p->upper / p->lower, 1.0 / cells);
      double lo = p->lower;
      for (std::size_t j = 0; j < cells; ++j) {
        const double hi =
            (j + 1 == cells) ? p->upper : p->lower * std::pow(ratio, j + 1.0);
        const double mass = p->scale * (1.0 / lo - 1.0 / hi);
        if (mass > 0.0) {
          const double loc = p->scale * std::log(hi / lo) / mass;
          out.push_back(Atom{loc, mass});
        }
        lo = hi;
      }
    }
  }
  return SignalDistribution(std::move(out));
}

std::vector<Atom> SignalDistribution::atoms() const {
  std::vector<Atom> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) {
    if (const auto* a = std::get_if<Atom>(&s))
      out.push_back(*a);
    else
      throw std::logic_error("atoms: distribution has density pieces");
  }
  return out;
}

SignalDistribution make_worst_case(const MarketParams& params) {
  const RobustSolution sol = best_guaranteed_profit(params);
  const double v = sol.v_star;
  const double g = params.gamma;
  std::vector<Segment> segs;
  if (sol.branch == CostBranch::kLow) {
    segs.push_back(Atom{v, 1.0 - g});
    if (g > 0.0) segs.push_back(Atom{1.0, g});
  } else {
    segs.push_back(ParetoDensity{v, g, v});
    const double atom_at_gamma = v / g - v;
    if (atom_at_gamma > 1e-15) segs.push_back(Atom{g, atom_at_gamma});
    segs.push_back(Atom{1.0, v});
  }
  return SignalDistribution(std::move(segs), params.mu);
}

SignalDistribution make_rs(double mu) {
  return make_worst_case(MarketParams(mu, 1.0));
}

SignalDistribution make_point_mass(double mu) {
  return SignalDistribution({Atom{mu, 1.0}}, mu);
}

SignalDistribution make_full_info(double mu) {
  return SignalDistribution({Atom{0.0, 1.0 - mu}, Atom{1.0, mu}}, mu);
}

SignalDistribution make_discrete(const std::vector<double>& locations,
                                 const std::vector<double>& masses,
                                 std::optional<double> expected_mean) {
  if (locations.size() != masses.size())
    throw std::invalid_argument("make_discrete: size mismatch");
  if (!std::is_sorted(locations.begin(), locations.end()))
    throw std::invalid_argument("make_discrete: locations must ascend");
  std::vector<Segment> segs;
  segs.reserve(locations.size());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (masses[i] < 0.0)
      throw std::invalid_argument("make_discrete: negative mass");
    if (masses[i] > 0.0) segs.push_back(Atom{locations[i], masses[i]});
  }
  return SignalDistribution(std::move(segs), expected_mean);
}

void write_discrete_csv(std::ostream& os, const SignalDistribution& dist) {
  os << "location,mass\n";
  char buf[80];
  for (const Atom& a : dist.atoms()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", a.location, a.mass);
    os << buf;
  }
}

SignalDistribution read_discrete_csv(std::istream& is) {
  std::vector<double> locs, masses;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "location,mass") continue;
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) continue;
    const double loc = std::stod(cell);
    if (!std::getline(row, cell, ','))
      throw std::invalid_argument("read_discrete_csv: missing mass column");
    locs.push_back(loc);
    masses.push_back(std::stod(cell));
  }
  return make_discrete(locs, masses);
}

}  // namespace refundlab
