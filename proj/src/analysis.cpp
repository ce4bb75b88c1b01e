#include "ptds/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ptds/errors.hpp"
#include "ptds/rng.hpp"
#include "ptds/tangent.hpp"

namespace ptds {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ForwardLipschitz: return "FORWARD_LIPSCHITZ";
    case Verdict::Divergent: return "DIVERGENT";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

namespace {

std::vector<Eigen::VectorXd> draw_samples(const PiecewiseDomain& domain, double t,
                                          const SamplerSpec& spec) {
  if (spec.box_lo.size() != domain.dim || spec.box_hi.size() != domain.dim)
    throw ConfigError("sampler: box bounds must match the domain dimension");

  std::vector<Eigen::VectorXd> samples;
  SetProjectOptions popts;
  for (const auto& a : spec.anchors) {
    ProjectionResult pr = project_to_set(a, domain, t, popts);
    samples.push_back(pr.vector);
  }

  const int remaining = std::max(0, spec.count - int(samples.size()));
  int boundary_quota = int(std::lround(spec.boundary_bias * remaining));
  int interior_quota = remaining - boundary_quota;

  Rng rng(derive_seed(spec.seed, 0x73616d70ULL));
  int attempts = 0;
  const int cap = 200 * std::max(1, remaining);
  while (boundary_quota + interior_quota > 0 && attempts < cap) {
    ++attempts;
    Eigen::VectorXd y = rng.uniform_box(spec.box_lo, spec.box_hi);
    bool feasible = contains(domain, y, t);
    if (feasible) {
      if (interior_quota > 0) {
        samples.push_back(y);
        --interior_quota;
      } else if (attempts > cap / 2 && boundary_quota > 0) {
        samples.push_back(y); // box nearly inside the set: fill rather than stall
        --boundary_quota;
      }
    } else {
      ProjectionResult pr;
      try {
        pr = project_to_set(y, domain, t, popts);
      } catch (const ConvergenceError&) {
        continue;
      }
      if (boundary_quota > 0) {
        samples.push_back(pr.vector);
        --boundary_quota;
      } else if (attempts > cap / 2 && interior_quota > 0) {
        samples.push_back(pr.vector);
        --interior_quota;
      }
    }
  }
  return samples;
}

} // namespace

LipschitzProfile forward_lipschitz_profile(const PiecewiseDomain& domain, double t,
                                           const SamplerSpec& sampler,
                                           const CertifyOptions& opts) {
  if (opts.deltas.empty()) throw ConfigError("certify: delta grid must be non-empty");
  LipschitzProfile profile;
  profile.t = t;
  profile.deltas = opts.deltas;
  profile.horizon = *std::max_element(opts.deltas.begin(), opts.deltas.end());
  profile.points = draw_samples(domain, t, sampler);

  const int P = int(profile.points.size());
  const int D = int(opts.deltas.size());
  const double inf = std::numeric_limits<double>::infinity();
  profile.ratios.setZero(P, D);

  // One row per sample point; rows are independent, so they can be split
  // across threads without changing any entry.
  std::atomic<int> failures{0};
  auto fill_rows = [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      for (int d = 0; d < D; ++d) {
        double delta = opts.deltas[d];
        SetProjectOptions popts = opts.projection;
        popts.warm_start = profile.points[p];
        double ratio;
        try {
          ProjectionResult pr = project_to_set(profile.points[p], domain, t + delta, popts);
          ratio = pr.distance / delta;
        } catch (const ConvergenceError&) {
          ratio = inf;
          ++failures;
        }
        profile.ratios(p, d) = ratio;
      }
    }
  };
  int threads = std::max(1, std::min(opts.threads, P > 0 ? P : 1));
  if (threads == 1) {
    fill_rows(0, P);
  } else {
    std::vector<std::thread> pool;
    int chunk = (P + threads - 1) / threads;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back(fill_rows, std::min(w * chunk, P), std::min((w + 1) * chunk, P));
    for (auto& th : pool) th.join();
  }
  profile.failures = failures.load();

  profile.max_ratio_per_delta.assign(D, 0.0);
  double l_hat = 0.0;
  bool any_infinite = false;
  for (int d = 0; d < D; ++d) {
    double m = 0.0;
    for (int p = 0; p < P; ++p) {
      double r = profile.ratios(p, d);
      if (std::isinf(r)) {
        any_infinite = true;
        m = inf;
      } else if (!std::isinf(m)) {
        m = std::max(m, r);
      }
      if (!std::isinf(r)) l_hat = std::max(l_hat, r);
    }
    profile.max_ratio_per_delta[d] = m;
  }
  profile.l_hat = l_hat;

  // Log-log fit of max ratio against delta; flat-zero profiles get slope 0.
  {
    std::vector<double> lx, ly;
    for (int d = 0; d < D; ++d) {
      double m = profile.max_ratio_per_delta[d];
      if (std::isfinite(m) && m > 1e-12) {
        lx.push_back(std::log10(opts.deltas[d]));
        ly.push_back(std::log10(m));
      }
    }
    if (lx.size() >= 2) {
      double mx = 0, my = 0;
      for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= double(lx.size());
      my /= double(lx.size());
      double num = 0, den = 0;
      for (size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
      }
      profile.slope = den > 0 ? num / den : 0.0;
    } else {
      profile.slope = 0.0;
    }
  }

  // Growth test compares the smallest and largest probed delta.
  int d_small = 0, d_large = 0;
  for (int d = 1; d < D; ++d) {
    if (opts.deltas[d] < opts.deltas[d_small]) d_small = d;
    if (opts.deltas[d] > opts.deltas[d_large]) d_large = d;
  }
  double r_small = profile.max_ratio_per_delta[d_small];
  double r_large = profile.max_ratio_per_delta[d_large];
  bool growth = r_small > 10.0 * r_large || (std::isinf(r_small) && std::isfinite(r_large));

  if (profile.slope <= -0.1 && growth)
    profile.verdict = Verdict::Divergent;
  else if (profile.slope >= -0.1 && !any_infinite && profile.failures == 0)
    profile.verdict = Verdict::ForwardLipschitz;
  else
    profile.verdict = Verdict::Inconclusive;

  if (opts.oracle_check && domain.dim <= 3) {
    double gap = 0.0;
    const int check_points = std::min(opts.oracle_points, P);
    for (int p = 0; p < check_points; ++p) {
      for (int d = 0; d < D; ++d) {
        double delta = opts.deltas[d];
        double solver_dist = profile.ratios(p, d) * delta;
        if (!std::isfinite(solver_dist)) continue;
        double half = solver_dist + 10.0 * opts.oracle_resolution;
        Eigen::VectorXd lo = profile.points[p].array() - half;
        Eigen::VectorXd hi = profile.points[p].array() + half;
        try {
          OracleResult oracle =
              oracle_project(profile.points[p], domain, t + delta, lo, hi, opts.oracle_resolution);
          gap = std::max(gap, std::abs(oracle.distance - solver_dist));
        } catch (const InfeasibleError&) {
          continue; // box missed every feasible grid point; not a solver defect
        }
      }
    }
    profile.oracle_gap = gap;
  }
  return profile;
}

TangentWitness tangent_nonempty_check(const PiecewiseDomain& domain, const Eigen::VectorXd& x,
                                      double t, double l_hat, double slack) {
  TangentWitness w;
  PolyhedronUnion u = temporal_tangent_union(domain, x, t);
  bool any = false;
  for (const auto& m : u.members)
    if (m.qualification.status != QualStatus::Empty) any = true;
  if (!any) return w;

  ProjectionResult pr = project_union(Eigen::VectorXd::Zero(domain.dim), u);
  w.nonempty = true;
  w.witness = pr.vector;
  w.witness_norm = pr.vector.norm();
  w.within_bound = w.witness_norm <= l_hat + slack;
  return w;
}

Lemma2Probe lemma2_probe(const BasicSet& set, double t, const ProbeSpec& spec,
                         const Tolerances& tol) {
  if (spec.box_lo.size() != set.dim || spec.box_hi.size() != set.dim)
    throw ConfigError("lemma2_probe: box bounds must match the set dimension");

  PiecewiseDomain single;
  single.dim = set.dim;
  single.pieces.push_back(set);
  single.tol = tol;

  Lemma2Probe out;
  out.fitted_l = std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(spec.seed, 0x70726f62ULL));
  SetProjectOptions popts;

  const int cap = 100 * std::max(1, spec.count);
  int attempts = 0;
  while (out.samples < spec.count && attempts < cap) {
    ++attempts;
    Eigen::VectorXd z = rng.uniform_box(spec.box_lo, spec.box_hi);
    Eigen::VectorXd base, dir;
    if (violation(set, z, t) > tol.tau_feas) {
      ProjectionResult pr;
      try {
        pr = project_to_set(z, single, t, popts);
      } catch (const ConvergenceError&) {
        continue;
      }
      base = pr.vector;
      dir = (z - base);
      if (dir.norm() < 1e-12) continue;
      dir /= dir.norm();
    } else {
      base = z;
      dir = rng.unit_vector(set.dim);
    }
    double r = spec.radius * std::max(rng.uniform01(), 1e-3);
    Eigen::VectorXd y = base + r * dir;
    if (violation(set, y, t) <= tol.tau_feas) continue; // still inside; not a probe point

    ProjectionResult pr;
    try {
      pr = project_to_set(y, single, t, popts);
    } catch (const ConvergenceError&) {
      continue;
    }
    const Eigen::VectorXd& x = pr.vector;
    double dist = (y - x).norm();
    if (dist < 1e-14) continue;

    ActiveSet active = active_indices(set, x, t, tol);
    QualificationReport qual = qualification_check(set, x, t, active);
    if (qual.status != QualStatus::FullRank) continue; // probe is defined at smooth points

    double res2 = 0.0;
    for (const auto& h : set.equalities) {
      double v = h.value(y, t);
      res2 += v * v;
    }
    for (int i : active.indices) {
      double v = set.inequalities[i].value(y, t);
      res2 += v * v;
    }
    double ratio = std::sqrt(res2) / dist;
    out.ratios.push_back(ratio);
    out.fitted_l = std::min(out.fitted_l, ratio);
    if (ratio < 1e-12) out.violation = true;
    ++out.samples;
  }

  if (out.samples == 0)
    throw ConvergenceError(
        "lemma2_probe: no infeasible probe points found (sampler box may lie inside the set)");
  return out;
}

} // namespace ptds
