#pragma once

// Kaplan-Meier estimation, Cox proportional hazards (Efron or Breslow ties)
// with Wald inference, Breslow baseline cumulative hazard, covariate-adjusted
// survival curves and percentile bootstrap bands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "ctts/detail/parallel.hpp"
#include "ctts/detail/stats.hpp"
#include "ctts/detail/text.hpp"
#include "ctts/error.hpp"
#include "ctts/survival_record.hpp"

namespace ctts {

// Right-continuous step function: value_at(t) is initial_value for
// t < times[0], otherwise values[k] for the last k with times[k] <= t.
struct StepFunction {
  std::vector<double> times;
  std::vector<double> values;
  double initial_value = 1.0;

  double value_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return initial_value;
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
  }

  std::vector<double> evaluate(std::span<const double> ts) const {
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(value_at(t));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Kaplan-Meier
// ---------------------------------------------------------------------------

// Product-limit estimate. Subjects censored at an event time are still at
// risk at that time.
inline StepFunction kaplan_meier(std::span<const double> durations, const std::vector<bool>& events) {
  if (durations.empty()) throw Error("survival", "kaplan_meier: no records");
  if (durations.size() != events.size()) throw Error("survival", "kaplan_meier: size mismatch");
  for (double d : durations)
    if (!(d >= 0.0) || !std::isfinite(d)) throw Error("survival", "kaplan_meier: durations must be finite and >= 0");
  std::vector<std::size_t> order(durations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });

  StepFunction s;
  double surv = 1.0;
  std::size_t at_risk = durations.size();
  for (std::size_t i = 0; i < order.size();) {
    const double t = durations[order[i]];
    std::size_t deaths = 0, leaving = 0;
    while (i < order.size() && durations[order[i]] == t) {
      deaths += events[order[i]] ? 1 : 0;
      ++leaving;
      ++i;
    }
    if (deaths > 0) {
      surv *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      s.times.push_back(t);
      s.values.push_back(surv);
    }
    at_risk -= leaving;
  }
  return s;
}

inline StepFunction kaplan_meier(std::span<const SurvivalRecord> records) {
  std::vector<double> d;
  std::vector<bool> e;
  for (const auto& r : records) {
    d.push_back(r.duration_months);
    e.push_back(r.event);
  }
  return kaplan_meier(d, e);
}

// ---------------------------------------------------------------------------
// Cox proportional hazards
// ---------------------------------------------------------------------------

enum class TieMethod { Efron, Breslow };

struct CoxData {
  std::vector<double> time;
  std::vector<bool> event;
  Eigen::MatrixXd X;  // n x p
  std::vector<std::string> names;

  std::size_t n() const { return time.size(); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

struct CoxFitOptions {
  TieMethod ties = TieMethod::Efron;
  int max_iterations = 100;
  int max_halvings = 20;
  double score_tolerance = 1e-7;
  double loglik_rel_tolerance = 1e-9;
  double step_tolerance = 1e-6;
  double divergence_bound = 20.0;
};

struct CoxModel {
  std::vector<std::string> covariate_names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd covariate_means;
  std::size_t n = 0;
  std::size_t n_events = 0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  double max_abs_score = 0.0;
  std::vector<double> loglik_trace;  // accepted iterates, non-decreasing
  std::string message;
  StepFunction baseline_cumhaz;  // uncentred: H(t | x) = H0(t) exp(b'x)
  TieMethod ties = TieMethod::Efron;
};

struct PartialLikelihood {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;  // negative Hessian
};

namespace detail {

// Subjects sorted by decreasing time; ties grouped.
inline std::vector<std::size_t> descending_time_order(const std::vector<double>& time) {
  std::vector<std::size_t> order(time.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return time[a] > time[b]; });
  return order;
}

}  // namespace detail

// Log partial likelihood, score and observed information at `beta`. With
// `with_derivatives == false` only the likelihood is computed.
inline PartialLikelihood cox_partial_likelihood(const CoxData& data, const Eigen::VectorXd& beta, TieMethod ties,
                                                bool with_derivatives = true) {
  const std::size_t n = data.n();
  const Eigen::Index p = data.X.cols();
  const Eigen::VectorXd eta = data.X * beta;
  // The likelihood is invariant to a common shift of eta; shift for exp range.
  const double shift = n ? eta.maxCoeff() : 0.0;
  const Eigen::VectorXd w = (eta.array() - shift).exp().matrix();

  PartialLikelihood out;
  if (with_derivatives) {
    out.score = Eigen::VectorXd::Zero(p);
    out.information = Eigen::MatrixXd::Zero(p, p);
  }
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

  const auto order = detail::descending_time_order(data.time);
  for (std::size_t g = 0; g < n;) {
    std::size_t end = g;
    while (end < n && data.time[order[end]] == data.time[order[g]]) ++end;
    double d0 = 0.0, eta_sum = 0.0;
    Eigen::VectorXd d1 = Eigen::VectorXd::Zero(p), x_sum = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(p, p);
    std::size_t deaths = 0;
    for (std::size_t k = g; k < end; ++k) {
      const auto i = order[k];
      const auto xi = data.X.row(static_cast<Eigen::Index>(i)).transpose();
      s0 += w[static_cast<Eigen::Index>(i)];
      if (with_derivatives) {
        s1 += w[static_cast<Eigen::Index>(i)] * xi;
        s2 += w[static_cast<Eigen::Index>(i)] * xi * xi.transpose();
      }
      if (data.event[i]) {
        ++deaths;
        d0 += w[static_cast<Eigen::Index>(i)];
        eta_sum += eta[static_cast<Eigen::Index>(i)] - shift;
        if (with_derivatives) {
          d1 += w[static_cast<Eigen::Index>(i)] * xi;
          d2 += w[static_cast<Eigen::Index>(i)] * xi * xi.transpose();
          x_sum += xi;
        }
      }
    }
    if (deaths > 0) {
      out.loglik += eta_sum;
      if (with_derivatives) out.score += x_sum;
      const double dd = static_cast<double>(deaths);
      const std::size_t terms = ties == TieMethod::Efron ? deaths : 1;
      for (std::size_t k = 0; k < terms; ++k) {
        const double f = ties == TieMethod::Efron ? static_cast<double>(k) / dd : 0.0;
        const double mult = ties == TieMethod::Efron ? 1.0 : dd;
        const double phi = s0 - f * d0;
        out.loglik -= mult * std::log(phi);
        if (with_derivatives) {
          const Eigen::VectorXd a = s1 - f * d1;
          out.score -= mult * a / phi;
          out.information += mult * ((s2 - f * d2) / phi - a * a.transpose() / (phi * phi));
        }
      }
    }
    g = end;
  }
  return out;
}

inline CoxData make_cox_data(std::span<const double> time, const std::vector<bool>& event, const Eigen::MatrixXd& X,
                             std::vector<std::string> names) {
  if (time.size() != event.size() || static_cast<Eigen::Index>(time.size()) != X.rows())
    throw Error("cox", "inconsistent input sizes");
  if (names.size() != static_cast<std::size_t>(X.cols())) throw Error("cox", "covariate name count mismatch");
  CoxData d;
  d.time.assign(time.begin(), time.end());
  d.event.assign(event.begin(), event.end());
  d.X = X;
  d.names = std::move(names);
  return d;
}

namespace detail {

inline StepFunction breslow_baseline(const CoxData& data, const Eigen::VectorXd& beta, const Eigen::VectorXd& means) {
  const std::size_t n = data.n();
  const Eigen::VectorXd eta_c = (data.X.rowwise() - means.transpose()) * beta;
  const auto order = descending_time_order(data.time);
  // Walk in decreasing time to accumulate risk sets, then emit increasing.
  std::vector<std::pair<double, double>> increments;  // (time, d / sum_R w)
  double s0 = 0.0;
  for (std::size_t g = 0; g < n;) {
    std::size_t end = g;
    std::size_t deaths = 0;
    while (end < n && data.time[order[end]] == data.time[order[g]]) {
      s0 += std::exp(eta_c[static_cast<Eigen::Index>(order[end])]);
      deaths += data.event[order[end]] ? 1 : 0;
      ++end;
    }
    if (deaths > 0) increments.emplace_back(data.time[order[g]], static_cast<double>(deaths) / s0);
    g = end;
  }
  std::reverse(increments.begin(), increments.end());
  const double uncenter = std::exp(-means.dot(beta));
  StepFunction h;
  h.initial_value = 0.0;
  double cum = 0.0;
  for (const auto& [t, inc] : increments) {
    cum += inc;
    h.times.push_back(t);
    h.values.push_back(cum * uncenter);
  }
  return h;
}

}  // namespace detail

// Newton-Raphson with step halving on the log partial likelihood. Covariates
// are centred internally; reported coefficients are unaffected.
inline CoxModel cox_fit(const CoxData& data, const CoxFitOptions& opts = {}) {
  const std::size_t n = data.n();
  const Eigen::Index p = data.X.cols();
  if (n == 0) throw Error("cox", "no records");
  for (double t : data.time)
    if (!std::isfinite(t) || t < 0.0) throw Error("cox", "durations must be finite and >= 0");
  const auto n_events = static_cast<std::size_t>(std::count(data.event.begin(), data.event.end(), true));
  if (n_events == 0) throw Error("cox", "no events");
  if (p == 0) throw Error("cox", "no covariates");
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = data.X.col(j);
    if (!col.allFinite()) throw Error("cox", "non-finite value in covariate '" + data.names[static_cast<std::size_t>(j)] + "'");
    if (col.maxCoeff() == col.minCoeff())
      throw Error("cox", "covariate not identifiable: '" + data.names[static_cast<std::size_t>(j)] + "' is constant");
  }

  CoxData centred = data;
  const Eigen::VectorXd means = data.X.colwise().mean().transpose();
  centred.X = data.X.rowwise() - means.transpose();

  CoxModel m;
  m.covariate_names = data.names;
  m.covariate_means = means;
  m.n = n;
  m.n_events = n_events;
  m.ties = opts.ties;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  auto pl = cox_partial_likelihood(centred, beta, opts.ties);
  m.loglik_trace.push_back(pl.loglik);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it <= opts.max_iterations; ++it) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(pl.information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      m.message = "information matrix not positive definite";
      break;
    }
    const Eigen::VectorXd step = ldlt.solve(pl.score);
    // A small score or a flat likelihood is not enough on its own: under
    // separation both vanish while the Newton step stays near 1 and the
    // coefficient keeps growing, so the step must be negligible too.
    double rel_step = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) rel_step = std::max(rel_step, std::abs(step[j]) / std::max(1.0, std::abs(beta[j])));
    const bool flat = pl.score.cwiseAbs().maxCoeff() < opts.score_tolerance ||
                      (it > 0 && std::abs(pl.loglik - prev) <= opts.loglik_rel_tolerance * std::abs(prev));
    if (flat && rel_step <= opts.step_tolerance) {
      m.converged = true;
      break;
    }
    if (it == opts.max_iterations) break;

    double scale = 1.0;
    bool accepted = false;
    PartialLikelihood next;
    Eigen::VectorXd candidate;
    for (int h = 0; h <= opts.max_halvings; ++h, scale *= 0.5) {
      candidate = beta + scale * step;
      next = cox_partial_likelihood(centred, candidate, opts.ties, false);
      if (std::isfinite(next.loglik) && next.loglik >= pl.loglik) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      m.message = "step halving failed to improve the partial likelihood";
      break;
    }
    prev = pl.loglik;
    beta = candidate;
    pl = cox_partial_likelihood(centred, beta, opts.ties);
    m.loglik_trace.push_back(pl.loglik);
    m.iterations = it + 1;
    if (beta.cwiseAbs().maxCoeff() > opts.divergence_bound) {
      m.message = "monotone likelihood: coefficient diverging past |beta| > " + detail::format_double(opts.divergence_bound);
      break;
    }
  }
  if (!m.converged && m.message.empty()) m.message = "iteration limit reached";

  m.coefficients = beta;
  m.log_likelihood = pl.loglik;
  m.max_abs_score = pl.score.cwiseAbs().maxCoeff();
  if (m.converged) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(pl.information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      m.converged = false;
      m.message = "information matrix singular at optimum";
      m.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    } else {
      m.covariance = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
      m.covariance = 0.5 * (m.covariance + m.covariance.transpose());
      m.message = "converged";
    }
  } else {
    m.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  }
  m.baseline_cumhaz = detail::breslow_baseline(data, beta, means);
  return m;
}

// ---------------------------------------------------------------------------
// Covariates from survival records
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& all_covariate_names() {
  static const std::vector<std::string> names = {"exposed", "age", "sex_Female", "sex_Other", "sex_NotSpecified"};
  return names;
}

inline double covariate_value(const SurvivalRecord& r, const std::string& name) {
  const auto oh = sex_onehot(r.sex);
  if (name == "exposed") return r.exposed ? 1.0 : 0.0;
  if (name == "age") return r.age_years;
  if (name == "sex_Female") return oh[0];
  if (name == "sex_Other") return oh[1];
  if (name == "sex_NotSpecified") return oh[2];
  throw Error("cox", "unknown covariate '" + name + "'");
}

// Full specification minus columns constant across `records`, which the
// caller should report as dropped.
inline std::vector<std::string> identifiable_covariates(std::span<const SurvivalRecord> records,
                                                        std::vector<std::string>* dropped = nullptr) {
  std::vector<std::string> keep;
  for (const auto& name : all_covariate_names()) {
    bool varies = false;
    for (const auto& r : records)
      if (covariate_value(r, name) != covariate_value(records.front(), name)) {
        varies = true;
        break;
      }
    if (varies || records.empty())
      keep.push_back(name);
    else if (dropped)
      dropped->push_back(name);
  }
  return keep;
}

inline CoxData cox_data(std::span<const SurvivalRecord> records, const std::vector<std::string>& covariates) {
  CoxData d;
  d.names = covariates;
  d.X.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    d.time.push_back(records[i].duration_months);
    d.event.push_back(records[i].event);
    for (std::size_t j = 0; j < covariates.size(); ++j)
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = covariate_value(records[i], covariates[j]);
  }
  return d;
}

inline CoxModel cox_fit(std::span<const SurvivalRecord> records, const std::vector<std::string>& covariates,
                        const CoxFitOptions& opts = {}) {
  if (records.empty()) throw Error("cox", "no records");
  return cox_fit(cox_data(records, covariates), opts);
}

// ---------------------------------------------------------------------------
// Inference and adjusted curves
// ---------------------------------------------------------------------------

struct HazardRow {
  std::string name;
  double coefficient;
  double se;
  double hr;
  double ci_low;
  double ci_high;
  double z;
  double p_value;
};

struct HazardReport {
  double level = 0.95;
  std::vector<HazardRow> rows;

  const HazardRow& at(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return r;
    throw Error("cox", "no covariate '" + name + "' in report");
  }
};

inline HazardRow hazard_row(std::string name, double beta, double se, double level) {
  const double z = detail::two_sided_z(level);
  HazardRow r{std::move(name), beta, se, std::exp(beta), std::exp(beta - z * se), std::exp(beta + z * se), 0.0, 1.0};
  r.z = se > 0.0 ? beta / se : 0.0;
  r.p_value = beta == 0.0 ? 1.0 : detail::two_sided_p(r.z);
  return r;
}

inline HazardReport hazard_report(const CoxModel& m, double level = 0.95) {
  if (!m.converged) throw Error("cox", "model did not converge (" + m.message + "); inspect the fit diagnostics");
  if (!(level > 0.0 && level < 1.0)) throw Error("cox", "confidence level must be in (0, 1)");
  HazardReport rep;
  rep.level = level;
  for (std::size_t j = 0; j < m.covariate_names.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    rep.rows.push_back(hazard_row(m.covariate_names[j], m.coefficients[jj], std::sqrt(m.covariance(jj, jj)), level));
  }
  return rep;
}

// S(t | x) = exp(-H0(t) exp(b'x)) at the baseline step times.
inline StepFunction adjusted_survival(const CoxModel& m, std::span<const double> profile) {
  if (!m.converged) throw Error("cox", "model did not converge (" + m.message + "); inspect the fit diagnostics");
  if (profile.size() != static_cast<std::size_t>(m.coefficients.size())) throw Error("cox", "profile length mismatch");
  double lp = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) lp += m.coefficients[static_cast<Eigen::Index>(j)] * profile[j];
  const double risk = std::exp(lp);
  StepFunction s;
  s.initial_value = 1.0;
  s.times = m.baseline_cumhaz.times;
  for (double h : m.baseline_cumhaz.values) s.values.push_back(std::exp(-h * risk));
  return s;
}

struct ProfilePair {
  std::vector<double> exposed;
  std::vector<double> unexposed;
  double mean_age = 0.0;
  SexCategory modal_sex = SexCategory::NotSpecified;
};

// Mean age and modal sex (ties broken by label order) over `records`, with
// the exposure indicator set to 1 and 0.
inline ProfilePair reference_profiles(std::span<const SurvivalRecord> records, const std::vector<std::string>& covariates) {
  if (records.empty()) throw Error("cox", "no records for reference profile");
  ProfilePair pp;
  std::map<std::string, std::pair<std::size_t, SexCategory>> counts;
  double age = 0.0;
  for (const auto& r : records) {
    age += r.age_years;
    auto& c = counts[std::string(sex_label(r.sex))];
    ++c.first;
    c.second = r.sex;
  }
  pp.mean_age = age / static_cast<double>(records.size());
  std::size_t best = 0;
  for (const auto& [label, c] : counts)
    if (c.first > best) best = c.first, pp.modal_sex = c.second;
  SurvivalRecord rep;
  rep.age_years = pp.mean_age;
  rep.sex = pp.modal_sex;
  for (bool exposed : {true, false}) {
    rep.exposed = exposed;
    auto& v = exposed ? pp.exposed : pp.unexposed;
    for (const auto& name : covariates) v.push_back(covariate_value(rep, name));
  }
  return pp;
}

// ---------------------------------------------------------------------------
// Percentile bootstrap bands
// ---------------------------------------------------------------------------

struct Band {
  StepFunction lower;
  StepFunction upper;
};

struct BootstrapResult {
  std::vector<double> grid;  // union of observed event times
  Band exposed;
  Band unexposed;
  std::size_t n_resamples = 0;
  std::size_t n_converged = 0;
  std::size_t n_failed = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
};

struct BootstrapOptions {
  std::size_t n_resamples = 500;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  CoxFitOptions fit;
};

// Case-level resampling with replacement; resample b draws from its own
// generator seeded with seed + b, so thread count never changes the result.
// Profiles stay fixed at the values supplied (computed on the full sample).
inline BootstrapResult bootstrap_bands(std::span<const SurvivalRecord> records, const std::vector<std::string>& covariates,
                                       const ProfilePair& profiles, const BootstrapOptions& opts) {
  if (opts.n_resamples < 1) throw Error("bootstrap", "n_resamples must be >= 1");
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw Error("bootstrap", "level must be in (0, 1)");
  if (records.empty()) throw Error("bootstrap", "no records");

  BootstrapResult res;
  res.n_resamples = opts.n_resamples;
  res.seed = opts.seed;
  res.level = opts.level;
  for (const auto& r : records)
    if (r.event) res.grid.push_back(r.duration_months);
  std::sort(res.grid.begin(), res.grid.end());
  res.grid.erase(std::unique(res.grid.begin(), res.grid.end()), res.grid.end());

  struct Draw {
    bool ok = false;
    std::vector<double> exposed, unexposed;
  };
  std::vector<Draw> draws(opts.n_resamples);
  const std::size_t n = records.size();
  detail::parallel_for(opts.n_resamples, opts.threads, [&](std::size_t b) {
    std::mt19937_64 rng(opts.seed + b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<SurvivalRecord> sample;
    sample.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sample.push_back(records[pick(rng)]);
    try {
      auto m = cox_fit(std::span<const SurvivalRecord>(sample), covariates, opts.fit);
      if (!m.converged) return;
      draws[b].exposed = adjusted_survival(m, profiles.exposed).evaluate(res.grid);
      draws[b].unexposed = adjusted_survival(m, profiles.unexposed).evaluate(res.grid);
      draws[b].ok = true;
    } catch (const Error&) {
      // degenerate resample (no events, constant covariate): omitted
    }
  });

  for (const auto& d : draws) d.ok ? ++res.n_converged : ++res.n_failed;
  if (res.n_converged == 0)
    throw Error("bootstrap", "all " + std::to_string(opts.n_resamples) + " resamples failed to converge");

  const double lo_p = (1.0 - opts.level) / 2.0, hi_p = (1.0 + opts.level) / 2.0;
  auto envelope = [&](bool exposed, Band& band) {
    band.lower.times = band.upper.times = res.grid;
    band.lower.initial_value = band.upper.initial_value = 1.0;
    std::vector<double> col;
    for (std::size_t g = 0; g < res.grid.size(); ++g) {
      col.clear();
      for (const auto& d : draws)
        if (d.ok) col.push_back(exposed ? d.exposed[g] : d.unexposed[g]);
      std::sort(col.begin(), col.end());
      band.lower.values.push_back(detail::quantile_sorted(col, lo_p));
      band.upper.values.push_back(detail::quantile_sorted(col, hi_p));
    }
  };
  envelope(true, res.exposed);
  envelope(false, res.unexposed);
  return res;
}

// ---------------------------------------------------------------------------
// Serialisation
// ---------------------------------------------------------------------------

inline std::string_view tie_label(TieMethod t) { return t == TieMethod::Efron ? "efron" : "breslow"; }

inline nlohmann::json model_to_json(const CoxModel& m) {
  nlohmann::json j;
  j["covariates"] = m.covariate_names;
  j["coefficients"] = std::vector<double>(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.covariance.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.covariance.cols(); ++c) row.push_back(m.covariance(r, c));
    cov.push_back(std::move(row));
  }
  j["covariance"] = std::move(cov);
  j["n"] = m.n;
  j["n_events"] = m.n_events;
  j["ties"] = tie_label(m.ties);
  j["diagnostics"] = {{"converged", m.converged},
                      {"iterations", m.iterations},
                      {"log_likelihood", m.log_likelihood},
                      {"max_abs_score", m.max_abs_score},
                      {"message", m.message}};
  return j;
}

inline nlohmann::json report_to_json(const HazardReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"covariate", r.name},
                    {"coefficient", r.coefficient},
                    {"se", r.se},
                    {"hr", r.hr},
                    {"ci_low", r.ci_low},
                    {"ci_high", r.ci_high},
                    {"z", r.z},
                    {"p_value", r.p_value}});
  return {{"level", rep.level}, {"hazard_ratios", std::move(rows)}};
}

}  // namespace ctts
