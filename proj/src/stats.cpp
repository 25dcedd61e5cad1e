// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asreval/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace asreval::stats {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

struct Cdf {
  double F = 0.0;   // logistic(z)
  double f = 0.0;   // density
  double df = 0.0;  // derivative of the density
};

Cdf cdf_at(double z) {
  if (z == kInf) return {1.0, 0.0, 0.0};
  if (z == -kInf) return {0.0, 0.0, 0.0};
  Cdf c;
  c.F = logistic(z);
  c.f = c.F * logistic(-z);
  c.df = c.f * (1.0 - 2.0 * c.F);
  return c;
}

// P(lower < Z <= upper) without cancellation in the upper tail.
double interval_probability(double upper, double lower) {
  if (lower > 0.0) return logistic(-lower) - logistic(-upper);
  return logistic(upper) - logistic(lower);
}

double sum_sq_dev(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw NumericalError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw DataError("ANOVA needs at least two groups");
  std::size_t n = 0;
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw DataError("ANOVA group is empty");
    n += g.size();
    total += std::accumulate(g.begin(), g.end(), 0.0);
  }
  if (n <= groups.size()) throw DataError("ANOVA needs more observations than groups");
  const double grand = total / static_cast<double>(n);
  AnovaResult r;
  for (const auto& g : groups) {
    double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    r.ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    r.ss_within += sum_sq_dev(g, mean);
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n - groups.size());
  if (r.ss_within == 0.0) {
    if (r.ss_between == 0.0) throw NumericalError("ANOVA F undefined: no variance at all");
    r.f_stat = kInf;
    r.p_value = 0.0;
    return r;
  }
  r.f_stat = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
  r.p_value = f_upper_tail(r.f_stat, r.df_between, r.df_within);
  return r;
}

OlrData make_olr_data(std::span<const int> y, const Eigen::MatrixXd& x) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    throw DataError("outcome count " + std::to_string(y.size()) + " != predictor rows " +
                    std::to_string(x.rows()));
  }
  if (x.cols() < 1) throw DataError("ordinal regression needs at least one predictor");
  std::vector<int> levels(y.begin(), y.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2) throw DataError("ordinal regression needs at least two outcome levels");
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (x.col(c).maxCoeff() == x.col(c).minCoeff()) {
      throw DataError("predictor column " + std::to_string(c) + " is constant");
    }
  }
  OlrData d;
  d.x = x;
  d.n_categories = static_cast<int>(levels.size());
  d.category.reserve(y.size());
  for (int v : y) {
    d.category.push_back(static_cast<int>(std::lower_bound(levels.begin(), levels.end(), v) - levels.begin()));
  }
  return d;
}

double olr_log_likelihood(const OlrData& data, const Eigen::VectorXd& params, Eigen::VectorXd* gradient,
                          Eigen::MatrixXd* hessian) {
  const Eigen::Index p = data.x.cols();
  const int k = data.n_categories;
  const Eigen::Index n_params = p + k - 1;
  const Eigen::VectorXd beta = params.head(p);
  const Eigen::VectorXd theta = params.tail(k - 1);
  if (gradient) gradient->setZero(n_params);
  if (hessian) hessian->setZero(n_params, n_params);
  for (int j = 1; j < k - 1; ++j) {
    if (!(theta[j] > theta[j - 1])) return -kInf;
  }

  double ll = 0.0;
  Eigen::VectorXd du(n_params), dv(n_params);
  for (std::size_t i = 0; i < data.category.size(); ++i) {
    const int c = data.category[i];
    const double eta = data.x.row(static_cast<Eigen::Index>(i)).dot(beta);
    const double upper = c < k - 1 ? theta[c] - eta : kInf;
    const double lower = c > 0 ? theta[c - 1] - eta : -kInf;
    const double prob = std::max(interval_probability(upper, lower), 1e-300);
    ll += std::log(prob);
    if (!gradient && !hessian) continue;

    const Cdf cu = cdf_at(upper);
    const Cdf cv = cdf_at(lower);
    // d(upper)/d(params) and d(lower)/d(params).
    du.setZero();
    dv.setZero();
    if (c < k - 1) {
      du.head(p) = -data.x.row(static_cast<Eigen::Index>(i)).transpose();
      du[p + c] = 1.0;
    }
    if (c > 0) {
      dv.head(p) = -data.x.row(static_cast<Eigen::Index>(i)).transpose();
      dv[p + c - 1] = 1.0;
    }
    const double lu = cu.f / prob;
    const double lv = -cv.f / prob;
    if (gradient) *gradient += lu * du + lv * dv;
    if (hessian) {
      const double luu = cu.df / prob - lu * lu;
      const double lvv = -cv.df / prob - lv * lv;
      const double luv = cu.f * cv.f / (prob * prob);
      hessian->noalias() += luu * du * du.transpose() + lvv * dv * dv.transpose() +
                            luv * (du * dv.transpose() + dv * du.transpose());
    }
  }
  return ll;
}

OlrModel fit_olr(std::span<const int> y, const Eigen::MatrixXd& x, const OlrOptions& options) {
  OlrData data = make_olr_data(y, x);
  const Eigen::Index p = x.cols();
  const int k = data.n_categories;
  const Eigen::Index n_params = p + k - 1;
  const auto n = static_cast<double>(data.category.size());

  // Start from beta = 0 with thresholds at the marginal cumulative logits.
  Eigen::VectorXd params = Eigen::VectorXd::Zero(n_params);
  {
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (int c : data.category) counts[static_cast<std::size_t>(c)] += 1.0;
    double cum = 0.0;
    for (int j = 0; j < k - 1; ++j) {
      cum += counts[static_cast<std::size_t>(j)];
      double q = std::clamp(cum / n, 1e-6, 1.0 - 1e-6);
      params[p + j] = std::log(q / (1.0 - q));
    }
  }

  OlrModel model;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double ll = olr_log_likelihood(data, params, &grad, &hess);
  model.log_likelihood_trace.push_back(ll);
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (grad.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    if (params.head(p).norm() > options.separation_bound) {
      throw NumericalError("ordinal regression diverges (perfect separation): |beta| = " +
                           std::to_string(params.head(p).norm()));
    }
    // Newton direction on the negative Hessian, shifted until positive definite.
    Eigen::MatrixXd info = -hess;
    Eigen::VectorXd step;
    double shift = 0.0;
    for (int attempt = 0; attempt < 20; ++attempt) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(info + shift * Eigen::MatrixXd::Identity(n_params, n_params));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all()) {
        step = ldlt.solve(grad);
        break;
      }
      shift = shift == 0.0 ? 1e-8 * std::max(1.0, info.diagonal().cwiseAbs().maxCoeff()) : shift * 10.0;
    }
    if (step.size() == 0) step = grad / std::max(1.0, grad.norm());
    // Newton decrement: the predicted log-likelihood gain. Once it is at
    // rounding level this step is the last one worth taking.
    const bool last_step = grad.dot(step) <= 1e-16 * std::max(1.0, std::abs(ll));

    // Near the optimum the log-likelihood difference of a good step is
    // rounding noise, so allow a drop of a few ulps.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ll));
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd trial = params + t * step;
      double trial_ll = olr_log_likelihood(data, trial);
      if (std::isfinite(trial_ll) && trial_ll >= ll - slack) {
        params = trial;
        ll = olr_log_likelihood(data, params, &grad, &hess);
        model.log_likelihood_trace.push_back(ll);
        accepted = true;
        break;
      }
    }
    if (last_step) {
      converged = true;
      break;
    }
    if (!accepted) {
      // No ascent left at working precision: accept if the gradient is
      // negligible relative to the sample size.
      converged = grad.cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, n);
      break;
    }
  }
  model.gradient_norm = grad.cwiseAbs().maxCoeff();
  model.iterations = iter;
  if (!converged) {
    throw NumericalError("ordinal regression did not converge after " + std::to_string(iter) +
                         " iterations; gradient max-norm " + std::to_string(model.gradient_norm));
  }
  if (params.head(p).norm() > options.separation_bound) {
    throw NumericalError("ordinal regression diverges (perfect separation)");
  }
  // A fit that predicts every observation with certainty means the slope is
  // unbounded and the optimizer merely stalled.
  if (ll > -1e-6 * n) {
    throw NumericalError("ordinal regression diverges (perfect separation): log-likelihood " +
                         std::to_string(ll));
  }

  model.beta = params.head(p);
  model.thresholds = params.tail(k - 1);
  model.log_likelihood = ll;
  model.n_obs = data.category.size();
  model.aic = 2.0 * static_cast<double>(n_params) - 2.0 * ll;
  {
    std::vector<int> levels(y.begin(), y.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    model.levels = std::move(levels);
  }
  Eigen::MatrixXd info = -hess;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
  model.std_errors.resize(p);
  model.t_stats.resize(p);
  model.p_values.resize(p);
  if (lu.isInvertible()) {
    Eigen::MatrixXd cov = lu.inverse();
    for (Eigen::Index j = 0; j < p; ++j) model.std_errors[j] = std::sqrt(std::max(0.0, cov(j, j)));
  } else {
    model.std_errors.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    model.t_stats[j] = model.beta[j] / model.std_errors[j];
    model.p_values[j] = normal_two_sided_p(model.t_stats[j]);
  }
  return model;
}

OlrModel fit_olr(std::span<const Assessment> y, const Eigen::MatrixXd& x, const OlrOptions& options) {
  std::vector<int> levels;
  levels.reserve(y.size());
  for (Assessment a : y) levels.push_back(level(a));
  return fit_olr(std::span<const int>(levels), x, options);
}

Eigen::MatrixXd olr_predict(const OlrModel& model, const Eigen::MatrixXd& x) {
  const Eigen::Index k = model.thresholds.size() + 1;
  Eigen::MatrixXd probs(x.rows(), k);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double eta = x.row(i).dot(model.beta);
    double prev = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      double cum = c < k - 1 ? logistic(model.thresholds[c] - eta) : 1.0;
      probs(i, c) = cum - prev;
      prev = cum;
    }
  }
  return probs;
}

std::vector<std::size_t> compare_aic(const std::vector<OlrModel>& models) {
  for (const auto& m : models) {
    if (m.n_obs != models.front().n_obs) throw DataError("models were fit on different sample sizes");
  }
  std::vector<std::size_t> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (models[a].aic != models[b].aic) return models[a].aic < models[b].aic;
    return models[a].n_params() < models[b].n_params();
  });
  return order;
}

KappaResult kappa_from_counts(const std::map<std::pair<std::string, std::string>, std::size_t>& counts) {
  std::vector<std::string> a, b;
  for (const auto& [pair, count] : counts) {
    a.insert(a.end(), count, pair.first);
    b.insert(b.end(), count, pair.second);
  }
  return cohens_kappa(a, b);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxplotSummary summarize(std::string group, std::vector<double> values) {
  if (values.empty()) throw DataError("boxplot group '" + group + "' is empty");
  std::sort(values.begin(), values.end());
  BoxplotSummary s;
  s.group = std::move(group);
  s.n = values.size();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_low = std::min(v, s.q1);
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.whisker_high = std::max(*it, s.q3);
      break;
    }
  }
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) s.outliers.push_back(v);
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  s.sd = s.n > 1 ? std::sqrt(sum_sq_dev(values, s.mean) / static_cast<double>(s.n - 1)) : 0.0;
  return s;
}

std::string to_string(GroupBy g) { return g == GroupBy::kAssessment ? "assessment" : "error_type"; }
std::string to_string(Metric m) { return m == Metric::kWordAccuracy ? "word_accuracy" : "f_bert"; }

std::vector<std::pair<std::string, std::vector<double>>> group_values(
    const std::vector<ScoredUtterance>& results, GroupBy group_by, Metric metric) {
  const std::size_t n_groups = group_by == GroupBy::kAssessment ? kNumAssessmentLevels : kNumErrorTypes;
  std::vector<std::vector<double>> buckets(n_groups);
  for (const auto& r : results) {
    std::optional<double> value = metric == Metric::kWordAccuracy ? std::optional<double>(r.word_accuracy) : r.f_bert;
    if (!value) continue;
    if (group_by == GroupBy::kAssessment) {
      if (r.assessment) buckets[static_cast<std::size_t>(level(*r.assessment))].push_back(*value);
    } else {
      for (ErrorType t : r.error_types) buckets[static_cast<std::size_t>(t)].push_back(*value);
    }
  }
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (std::size_t g = 0; g < n_groups; ++g) {
    if (buckets[g].empty()) continue;
    std::string key = group_by == GroupBy::kAssessment ? std::to_string(g)
                                                       : std::string(asreval::to_string(static_cast<ErrorType>(g)));
    out.emplace_back(std::move(key), std::move(buckets[g]));
  }
  if (out.empty()) {
    throw DataError("no records carry both a " + to_string(group_by) + " and a " + to_string(metric) + " value");
  }
  return out;
}

std::vector<BoxplotSummary> boxplot_by(const std::vector<ScoredUtterance>& results, GroupBy group_by,
                                       Metric metric) {
  std::vector<BoxplotSummary> out;
  for (auto& [key, values] : group_values(results, group_by, metric)) {
    out.push_back(summarize(key, std::move(values)));
  }
  return out;
}

}  // namespace asreval::stats
