#include "groupwalk/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "groupwalk/util.hpp"

namespace groupwalk {

EntropyReport entropy_profile(const EnvState& start, int n_max, double prune_eps,
                              size_t budget_atoms) {
  if (n_max < 1) throw ValidationError("entropy_profile: n_max must be >= 1");
  EntropyReport rep;
  rep.profile.reserve(n_max);
  rep.dropped_mass.reserve(n_max);
  ConvolutionStream stream(start, prune_eps, budget_atoms);
  for (int n = 1; n <= n_max; ++n) {
    rep.profile.push_back(entropy(stream.current()));
    rep.dropped_mass.push_back(stream.current().dropped_mass());
    if (n < n_max) stream.advance();
  }
  if (rep.profile.size() >= 8) asymptotic_entropy_slope(rep);
  return rep;
}

void asymptotic_entropy_slope(EntropyReport& report) {
  const auto& h = report.profile;
  if (h.size() < 8) throw ValidationError("entropy slope needs a profile of length >= 8");
  size_t wb = (2 * h.size()) / 3;
  if (wb == 0) wb = 1;
  report.fit_window_begin = static_cast<int>(wb);

  std::vector<double> per_step;
  for (size_t i = wb; i < h.size(); ++i) per_step.push_back(h[i] / static_cast<double>(i + 1));
  report.h_slope_cesaro = median_of(per_step);

  std::vector<double> diffs, inv_n;
  for (size_t i = wb; i < h.size(); ++i) {
    diffs.push_back(h[i] - h[i - 1]);
    inv_n.push_back(1.0 / static_cast<double>(i + 1));
  }
  MeanSe ms = mean_se(diffs);
  report.h_slope_first_diff = ms.mean;
  report.h_slope_first_diff_se = ms.se;
  LineFit fit = ls_fit(inv_n, diffs);
  report.h_slope_extrapolated = fit.intercept;
  report.h_slope_extrapolated_se = fit.intercept_se;
}

SmbReport smb_estimate(const PathEnsemble& ensemble, const SparseMeasure& term_at_inner,
                       const SparseMeasure& term_at_window, const SparseMeasure& term_at_n,
                       int inner_begin, int window_begin, int n) {
  if (n < 3 || inner_begin < 1 || inner_begin >= window_begin || window_begin >= n)
    throw ValidationError("smb_estimate: need 1 <= inner_begin < window_begin < n");
  if (ensemble.length() < n)
    throw ValidationError("smb_estimate: ensemble paths are shorter than n");

  SmbReport rep;
  rep.n = n;
  rep.window_begin = window_begin;
  rep.inner_begin = inner_begin;

  // Window-averaged values of 1/k; the rate over a window estimates
  // h-bar + a * (that average), so two windows cancel the a/n term.
  auto inv_avg = [](int from, int to) {
    double s = 0;
    for (int k = from + 1; k <= to; ++k) s += 1.0 / k;
    return s / static_cast<double>(to - from);
  };
  const double w1 = inv_avg(inner_begin, window_begin);
  const double w2 = inv_avg(window_begin, n);
  const double c = w2 / (w1 - w2);

  std::vector<double> raw, rate, extrap;
  raw.reserve(ensemble.size());
  rate.reserve(ensemble.size());
  extrap.reserve(ensemble.size());
  for (const auto& p : ensemble.paths()) {
    GroupElement xi, xm, xn;
    ensemble.fold_positions(p, [&](int k, const GroupElement& x) {
      if (k == inner_begin) xi = x;
      if (k == window_begin) xm = x;
      if (k == n) xn = x;
    });
    double pi = term_at_inner.mass_of(xi);
    double pm = term_at_window.mass_of(xm);
    double pn = term_at_n.mass_of(xn);
    if (pi <= 0.0 || pm <= 0.0 || pn <= 0.0) {
      ++rep.paths_excluded;  // position fell into pruned-away mass
      continue;
    }
    raw.push_back(-std::log(pn) / n);
    double r1 = (std::log(pi) - std::log(pm)) / static_cast<double>(window_begin - inner_begin);
    double r2 = (std::log(pm) - std::log(pn)) / static_cast<double>(n - window_begin);
    rate.push_back(r2);
    extrap.push_back(r2 + (r2 - r1) * c);
  }
  rep.paths_used = raw.size();
  if (rep.paths_excluded > ensemble.size() / 100)
    throw IntegrityError("smb_estimate: more than 1% of paths hit pruned mass; "
                         "lower prune_eps or shorten the horizon");
  MeanSe r = mean_se(raw), s = mean_se(rate), e = mean_se(extrap);
  rep.raw_mean = r.mean;
  rep.raw_se = r.se;
  rep.rate = s.mean;
  rep.rate_se = s.se;
  rep.extrapolated = e.mean;
  rep.extrapolated_se = e.se;
  return rep;
}

HkReport h_k_estimate(const EnvState& start, int k, int n_max, double prune_eps,
                      size_t budget_atoms) {
  if (k < 1 || n_max <= k + 2) throw ValidationError("h_k_estimate: need 1 <= k < n_max - 2");
  HkReport rep;
  rep.k = k;
  ConvolutionStream full(start, prune_eps, budget_atoms);        // mu_{0,n}
  ConvolutionStream shifted(start.advanced(k), prune_eps, budget_atoms);  // mu_{k,n}
  for (int i = 0; i < k; ++i) full.advance();
  // full at index n, shifted at index n - k.
  for (int n = k; n < n_max; ++n) {
    rep.sequence.push_back(entropy(full.current()) - entropy(shifted.current()));
    if (n + 1 < n_max) {
      full.advance();
      shifted.advance();
    }
  }
  rep.final_value = rep.sequence.back();
  size_t quarter = std::max<size_t>(1, rep.sequence.size() / 4);
  double osc = 0.0;
  for (size_t i = rep.sequence.size() - quarter; i < rep.sequence.size(); ++i)
    osc = std::max(osc, std::abs(rep.sequence[i] - rep.final_value));
  rep.tail_oscillation = osc;
  return rep;
}

TailReport tail_analysis(const EnvState& start, std::vector<GroupElement> test_elements,
                         int n_max, double prune_eps, size_t budget_atoms, int radius_cap) {
  if (n_max < 2) throw ValidationError("tail_analysis: n_max must be >= 2");
  TailReport rep;
  rep.deltas.reserve(test_elements.size());
  for (auto& g : test_elements) rep.deltas.push_back({std::move(g), {}, DeltaVerdict::Undecided});

  ConvolutionStream stream(start, prune_eps, budget_atoms);
  for (int n = 0; n < n_max; ++n) {
    const SparseMeasure& cur = stream.current();
    for (auto& d : rep.deltas)
      d.values.push_back(tv_distance(translate(d.g, cur), cur));
    if (n + 1 < n_max) stream.advance();
  }
  for (auto& d : rep.deltas) {
    double last = d.values.back();
    if (last < rep.zero_threshold)
      d.verdict = DeltaVerdict::ToZero;
    else if (last > rep.two_threshold)
      d.verdict = DeltaVerdict::ToTwo;
  }

  // G_n(mu) within the radius cap: elements whose translate of the final term
  // still overlaps it.
  const SparseMeasure& final_term = stream.current();
  const auto& model = *final_term.model();
  for (const auto& [cand, radius] : model.ball(radius_cap)) {
    if (cand == model.identity()) continue;
    bool overlaps = false;
    for (const auto& [s, mass] : final_term.atoms()) {
      (void)mass;
      if (final_term.mass_of(model.mul(cand, s)) > 0.0) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) rep.subgroup_generators.push_back(cand);
  }
  std::sort(rep.subgroup_generators.begin(), rep.subgroup_generators.end(), element_less);

  rep.detected_period = detect_period(start);
  return rep;
}

EscapeReport rate_of_escape(const PathEnsemble& ensemble) {
  const int n = ensemble.length();
  if (n < 4) throw ValidationError("rate_of_escape: paths must have length >= 4");
  EscapeReport rep;
  rep.n = n;
  rep.paths = ensemble.size();
  std::vector<int> checkpoints = {n / 4, n / 2, (3 * n) / 4, n};
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  const auto& model = *ensemble.group();

  std::vector<std::vector<double>> norms(checkpoints.size());
  bool approx = false;
  for (const auto& p : ensemble.paths()) {
    ensemble.fold_positions(p, [&](int k, const GroupElement& x) {
      auto it = std::find(checkpoints.begin(), checkpoints.end(), k);
      if (it == checkpoints.end()) return;
      WordLength wl = model.word_length(x);
      approx = approx || wl.approximate;
      norms[static_cast<size_t>(it - checkpoints.begin())].push_back(
          static_cast<double>(wl.value) / k);
    });
  }
  rep.gauge_approximate = approx;
  for (size_t i = 0; i < checkpoints.size(); ++i)
    rep.trend.emplace_back(checkpoints[i], mean_se(norms[i]).mean);
  MeanSe final = mean_se(norms.back());
  rep.l_estimate = final.mean;
  rep.standard_error = final.se;
  return rep;
}

GrowthReport growth_rate(const GroupModel& model, int t_max, size_t budget_atoms) {
  if (t_max < 3) throw ValidationError("growth_rate: t_max must be >= 3");
  GrowthReport rep;
  rep.ball_sizes = model.ball_counts(t_max, budget_atoms);

  std::vector<double> xs, ys;
  for (int t = t_max - 2; t <= t_max; ++t) {
    xs.push_back(t);
    ys.push_back(std::log(static_cast<double>(rep.ball_sizes[t])));
  }
  rep.v_estimate = ls_slope(xs, ys);

  // Exponential growth keeps the local log-slope flat; polynomial growth has
  // it decay like deg/t.  Compare the late slope against one at half radius.
  int t0 = std::max(2, t_max / 2);
  double early_slope = 0.5 * (std::log(static_cast<double>(rep.ball_sizes[t0 + 1])) -
                              std::log(static_cast<double>(rep.ball_sizes[t0 - 1])));
  if (rep.v_estimate < 0.05 || rep.v_estimate < 0.8 * early_slope) {
    int lo = t_max >= 6 ? 4 : 1;
    std::vector<double> lx, ly;
    for (int t = lo; t <= t_max; ++t) {
      lx.push_back(std::log(static_cast<double>(t)));
      ly.push_back(std::log(static_cast<double>(rep.ball_sizes[t])));
    }
    rep.polynomial_degree = ls_slope(lx, ly);
  }
  return rep;
}

InequalityVerdict fundamental_inequality(const SmbReport& smb, const EscapeReport& escape,
                                         const GrowthReport& growth) {
  InequalityVerdict v;
  v.h = smb.extrapolated;
  v.h_se = smb.extrapolated_se;
  v.l = escape.l_estimate;
  v.l_se = escape.standard_error;
  v.v = growth.v_estimate;
  v.slack = v.l * v.v - v.h;
  double combined = std::sqrt(v.h_se * v.h_se + (v.v * v.l_se) * (v.v * v.l_se));
  v.pass = v.h <= v.l * v.v + 3.0 * combined;
  return v;
}

ConditionalEntropyReport conditional_entropy(const EnvState& start, ModelPtr group, int depth,
                                             int n, int horizon, size_t paths_per_cylinder,
                                             uint64_t seed) {
  if (group->kind() != GroupKind::FreeGroup)
    throw ModelMismatchError("conditional_entropy is defined for free groups only");
  if (depth < 0 || n < 2) throw ValidationError("conditional_entropy: bad depth or n");

  ConditionalEntropyReport rep;
  rep.depth = depth;
  rep.n = n;
  rep.horizon = horizon;
  const int m = std::max(1, n / 2);
  rep.window_begin = m;

  // Exact (unpruned) stream terms at the window edges.
  ConvolutionStream stream(start, 0.0);
  for (int i = 1; i < m; ++i) stream.advance();
  SparseMeasure term_m = stream.current();  // mu_{0,m-1}
  for (int i = m; i < n; ++i) stream.advance();
  const SparseMeasure& term_n = stream.current();  // mu_{0,n-1}

  Rng master(seed);
  auto prefixes = all_cylinder_prefixes(*group, depth);
  std::vector<double> wsum_contrib;
  double wsum = 0.0;
  KahanSum wmean, wvar, wrate, wrate_var;
  for (size_t ci = 0; ci < prefixes.size(); ++ci) {
    const auto& prefix = prefixes[ci];
    CylinderSurrogate surr(start, group, prefix, horizon);
    double w = surr.origin_mass();
    if (w <= 0.0) {
      ++rep.skipped_unattainable;
      continue;
    }
    PathEnsemble ens = conditional_sampler(start, group, horizon, prefix, n,
                                           paths_per_cylinder, master.split(ci).key());
    std::vector<double> raw, rate;
    raw.reserve(ens.size());
    rate.reserve(ens.size());
    for (const auto& p : ens.paths()) {
      GroupElement xm, xn;
      ens.fold_positions(p, [&](int k, const GroupElement& x) {
        if (k == m) xm = x;
        if (k == n) xn = x;
      });
      // pi_k(x) = mu_{0,k-1}(x) eps_hat(k, x) / eps_hat(0, e)
      double log_pin = std::log(term_n.mass_of(xn)) + std::log(surr.eps_hat(n, xn)) - std::log(w);
      double log_pim = std::log(term_m.mass_of(xm)) + std::log(surr.eps_hat(m, xm)) - std::log(w);
      raw.push_back(-log_pin / n);
      rate.push_back((log_pim - log_pin) / static_cast<double>(n - m));
    }
    MeanSe r = mean_se(raw), s = mean_se(rate);
    rep.cylinders.push_back({prefix, w, r.mean, r.se, s.mean, s.se});
    wsum += w;
    wmean.add(w * r.mean);
    wvar.add(w * w * r.se * r.se);
    wrate.add(w * s.mean);
    wrate_var.add(w * w * s.se * s.se);
  }
  if (wsum <= 0.0)
    throw UnattainableCylinderError("conditional_entropy: no cylinder is attainable");
  rep.weighted_mean = wmean.value() / wsum;
  rep.weighted_se = std::sqrt(wvar.value()) / wsum;
  rep.weighted_rate = wrate.value() / wsum;
  rep.weighted_rate_se = std::sqrt(wrate_var.value()) / wsum;
  return rep;
}

namespace {

// phi applied to an abelianized element: one coordinate, or the coordinate sum.
int64_t apply_functional(const std::vector<int64_t>& ab, int which) {
  if (which >= 0) return ab[static_cast<size_t>(which)];
  int64_t s = 0;
  for (int64_t c : ab) s += c;
  return s;
}

}  // namespace

int detect_period(const EnvState& start, int inspect_terms, int d_cap) {
  if (inspect_terms < 1) throw ValidationError("detect_period: inspect_terms must be >= 1");
  // Collect the distinct step measures that occur along the orbit window.
  std::vector<const SparseMeasure*> steps;
  {
    std::vector<int> seen;
    EnvState s = start;
    for (int i = 0; i < inspect_terms; ++i, s = s.step()) {
      int sym = s.symbol();
      if (std::find(seen.begin(), seen.end(), sym) == seen.end()) {
        seen.push_back(sym);
        steps.push_back(&s.env()->measure(static_cast<size_t>(sym)));
      }
    }
  }
  const auto& model = *steps.front()->model();
  const size_t ab_dim = model.abelianize(model.identity()).size();

  // Functionals: each abelianization coordinate, plus the coordinate sum.
  std::vector<int> functionals;
  for (size_t i = 0; i < ab_dim; ++i) functionals.push_back(static_cast<int>(i));
  if (ab_dim > 1) functionals.push_back(-1);

  int best = 1;
  for (int which : functionals) {
    bool have_base = false;
    int64_t base = 0;
    uint64_t d = 0;  // gcd of |phi(atom) - base| over every atom of every step measure
    for (const auto* mu : steps) {
      for (const auto& [g, mass] : mu->atoms()) {
        (void)mass;
        int64_t v = apply_functional(model.abelianize(g), which);
        if (!have_base) {
          base = v;
          have_base = true;
        } else {
          d = std::gcd(d, static_cast<uint64_t>(std::abs(v - base)));
        }
      }
    }
    int period;
    if (d == 0) {
      // Every atom maps to the same value: a deterministic drift direction.
      // Nonzero drift is concentrated on a residue class for every modulus.
      period = base == 0 ? 1 : d_cap;
    } else {
      int64_t dd = static_cast<int64_t>(d);
      int64_t c = ((base % dd) + dd) % dd;
      int64_t reduced = dd / std::gcd(static_cast<uint64_t>(c), d);  // gcd(0,d) == d
      period = static_cast<int>(std::min<int64_t>(reduced, d_cap));
    }
    best = std::max(best, period);
  }
  return best;
}

}  // namespace groupwalk
