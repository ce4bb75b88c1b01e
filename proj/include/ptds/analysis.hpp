#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ptds/domain.hpp"
#include "ptds/projection.hpp"

namespace ptds {

/// Sampling plan for certification: `anchors` are always included (projected
/// onto the set first); random draws from the box fill the rest, with
/// `boundary_bias` of them taken from projections of infeasible draws.
struct SamplerSpec {
  int count = 200;
  double boundary_bias = 0.8;
  std::uint64_t seed = 0;
  Eigen::VectorXd box_lo, box_hi;
  std::vector<Eigen::VectorXd> anchors;
};

enum class Verdict { ForwardLipschitz, Divergent, Inconclusive };

const char* verdict_name(Verdict v);

/// Displacement ratios d(x, X(t+delta))/delta per sample point and delta.
/// l_hat is the largest finite ratio; slope is the log-log fit of the
/// per-delta max ratio against delta. A ratio is +inf when the projection
/// into X(t+delta) failed, which forces the verdict away from
/// FORWARD_LIPSCHITZ.
struct LipschitzProfile {
  double t = 0.0;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> deltas;
  Eigen::MatrixXd ratios; // points x deltas
  std::vector<double> max_ratio_per_delta;
  double l_hat = 0.0;
  double slope = 0.0;
  double horizon = 0.0; // largest probed delta
  int failures = 0;
  Verdict verdict = Verdict::Inconclusive;
  double oracle_gap = 0.0; // only filled when the oracle cross-check ran
};

struct CertifyOptions {
  std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4};
  bool oracle_check = false;   // cross-check a subsample against the grid oracle
  double oracle_resolution = 1e-3;
  int oracle_points = 3;
  int threads = 1; // ratio rows are independent; results do not depend on this
  SetProjectOptions projection;
};

LipschitzProfile forward_lipschitz_profile(const PiecewiseDomain& domain, double t,
                                           const SamplerSpec& sampler,
                                           const CertifyOptions& opts = {});

/// Existence witness: the minimum-norm element of the feasible-velocity union
/// at (x, t). `within_bound` states whether its norm is <= l_hat + slack, the
/// consequence a forward-Lipschitz certificate promises.
struct TangentWitness {
  bool nonempty = false;
  Eigen::VectorXd witness;
  double witness_norm = 0.0;
  bool within_bound = false;
};

TangentWitness tangent_nonempty_check(const PiecewiseDomain& domain, const Eigen::VectorXd& x,
                                      double t, double l_hat, double slack = 1e-6);

/// Probes the reverse inequality L * ||y - x|| <= ||residual at y|| used to
/// lower-bound set distance by constraint violation: samples infeasible
/// points y near the set, projects them, and reports the per-sample ratio
/// ||[h(y); g_I(y)]|| / ||y - x||. fitted_l is the smallest ratio seen.
struct Lemma2Probe {
  double fitted_l = 0.0;
  std::vector<double> ratios;
  int samples = 0;
  bool violation = false; // true when any ratio fell below 1e-12
};

struct ProbeSpec {
  int count = 50;
  double radius = 1e-2;
  std::uint64_t seed = 0;
  Eigen::VectorXd box_lo, box_hi;
};

Lemma2Probe lemma2_probe(const BasicSet& set, double t, const ProbeSpec& spec,
                         const Tolerances& tol = {});

} // namespace ptds
