// SPDX-License-Identifier: MIT
#pragma once

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "refundlab/market.hpp"
#include "refundlab/rng.hpp"

namespace refundlab {

/// Point mass at `location`.
struct Atom {
  double location;  // in [0, 1]
  double mass;      // in (0, 1]
};

/// Density scale/q^2 on [lower, upper); adds scale * (1/lower - 1/q) to the
/// CDF inside the interval.  This is the only analytic density family the
/// least favorable distributions need.
struct ParetoDensity {
  double lower;
  double upper;
  double scale;

  double mass() const { return scale * (1.0 / lower - 1.0 / upper); }
};

using Segment = std::variant<Atom, ParetoDensity>;

/// A mean-constrained CDF on [0, 1]: ordered atoms and inverse-square
/// density pieces with total mass one.  Immutable after construction.
class SignalDistribution {
 public:
  /// Validates ordering, total mass = 1 (1e-12) and, when `expected_mean`
  /// is given, |mean - expected_mean| <= 1e-10.  Throws std::invalid_argument.
  explicit SignalDistribution(std::vector<Segment> segments,
                              std::optional<double> expected_mean = {});

  const std::vector<Segment>& segments() const { return segments_; }
  bool is_discrete() const;

  /// Right-continuous CDF; atoms at q count toward F(q).
  double cdf(double q) const;

  /// Closed-form int_a^b F(q) dq, 0 <= a <= b <= 1.
  double integral_cdf(double a, double b) const;

  double mean() const;

  /// Quantile-inversion sampling; consumes draws from `rng`.
  std::vector<double> sample(Rng& rng, std::size_t n) const;
  double sample_one(Rng& rng) const;

  /// Mass-preserving discrete approximation: atoms are kept exactly and each
  /// density piece is split into cells whose mass sits at the cell's
  /// conditional mean, so the overall mean is preserved to roundoff.
  SignalDistribution discretize(std::size_t n = 2001) const;

  /// Support points of a discrete distribution (ascending).  Throws if the
  /// distribution has density pieces.
  std::vector<Atom> atoms() const;

 private:
  std::vector<Segment> segments_;
};

/// Least favorable distribution F_w for the given market.  Low branch:
/// atoms {v*: 1-gamma, 1: gamma}.  High branch: density v*/q^2 on
/// [v*, gamma), atom v*/gamma - v* at gamma, atom v* at 1.
SignalDistribution make_worst_case(const MarketParams& params);

/// Unit-elastic distribution of Roesler-Szentes; coincides with the worst
/// case at gamma = 1.
SignalDistribution make_rs(double mu);

/// Single atom at mu (the uninformed buyer).
SignalDistribution make_point_mass(double mu);

/// Atoms {0: 1-mu, 1: mu} (the fully informed buyer).
SignalDistribution make_full_info(double mu);

/// Discrete distribution from ascending locations and positive masses;
/// validates the mean against `expected_mean` when provided.
SignalDistribution make_discrete(const std::vector<double>& locations,
                                 const std::vector<double>& masses,
                                 std::optional<double> expected_mean = {});

/// CSV round trip for discrete distributions, columns "location,mass".
void write_discrete_csv(std::ostream& os, const SignalDistribution& dist);
SignalDistribution read_discrete_csv(std::istream& is);

}  // namespace refundlab
