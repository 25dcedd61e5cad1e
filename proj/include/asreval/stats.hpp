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

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asreval/corpus.hpp"
#include "asreval/error.hpp"

namespace asreval::stats {

// ---------------------------------------------------------------------------
// Distribution functions

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
// P(F > f) for an F(d1, d2) variate.
double f_upper_tail(double f, double d1, double d2);
// Two-sided p-value of a standard normal statistic.
double normal_two_sided_p(double z);

// ---------------------------------------------------------------------------
// One-way ANOVA

struct AnovaResult {
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
};

// Needs at least two non-empty groups and more observations than groups.
// Throws NumericalError when both sums of squares are zero.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

// ---------------------------------------------------------------------------
// Proportional-odds ordinal logistic regression
//
//   P(Y <= k | x) = logistic(theta_k - beta' x),   k = 0 .. K-2
//
// so a negative beta shifts mass towards higher categories as x falls.

struct OlrOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  int max_halvings = 30;
  double separation_bound = 1e3;
};

struct OlrModel {
  Eigen::VectorXd beta;
  Eigen::VectorXd thresholds;  // strictly increasing, K-1 entries
  double log_likelihood = 0.0;
  double aic = 0.0;
  Eigen::VectorXd std_errors;  // for beta
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;
  std::vector<int> levels;  // outcome value of each category, ascending
  std::size_t n_obs = 0;
  int iterations = 0;
  double gradient_norm = 0.0;
  // Log-likelihood after each accepted Newton step, starting point first.
  std::vector<double> log_likelihood_trace;

  std::size_t n_params() const { return static_cast<std::size_t>(beta.size() + thresholds.size()); }
};

// Observations with categories already coded 0 .. K-1.
struct OlrData {
  std::vector<int> category;
  Eigen::MatrixXd x;
  int n_categories = 0;
};

// Codes the distinct outcome levels present in `y` as 0 .. K-1.
OlrData make_olr_data(std::span<const int> y, const Eigen::MatrixXd& x);

// Log-likelihood at params = [beta; thresholds]. Gradient and Hessian are
// filled when non-null. Non-increasing thresholds give -infinity.
double olr_log_likelihood(const OlrData& data, const Eigen::VectorXd& params,
                          Eigen::VectorXd* gradient = nullptr, Eigen::MatrixXd* hessian = nullptr);

// Damped Newton maximum likelihood. Throws DataError for degenerate inputs
// (fewer than two outcome levels, a constant predictor, row mismatch) and
// NumericalError for separation or non-convergence.
OlrModel fit_olr(std::span<const int> y, const Eigen::MatrixXd& x, const OlrOptions& options = {});
OlrModel fit_olr(std::span<const Assessment> y, const Eigen::MatrixXd& x, const OlrOptions& options = {});

// Category probabilities for each row of x.
Eigen::MatrixXd olr_predict(const OlrModel& model, const Eigen::MatrixXd& x);

// Model indices by ascending AIC, ties broken by fewer parameters then by
// input order. Throws DataError if the models were fit on different N.
std::vector<std::size_t> compare_aic(const std::vector<OlrModel>& models);

// ---------------------------------------------------------------------------
// Cohen's kappa

struct KappaResult {
  double kappa = 0.0;
  double observed_po = 0.0;
  double expected_pe = 0.0;
  std::size_t n = 0;
};

KappaResult kappa_from_counts(const std::map<std::pair<std::string, std::string>, std::size_t>& counts);

template <typename Label>
KappaResult cohens_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw DataError("kappa needs two equally long, non-empty label lists");
  }
  std::map<Label, std::size_t> index;
  for (const auto& l : a) index.emplace(l, 0);
  for (const auto& l : b) index.emplace(l, 0);
  std::vector<double> pa(index.size()), pb(index.size());
  std::size_t next = 0;
  for (auto& [label, i] : index) i = next++;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[index[a[i]]] += 1.0;
    pb[index[b[i]]] += 1.0;
    if (a[i] == b[i]) ++agree;
  }
  const double n = static_cast<double>(a.size());
  KappaResult r;
  r.n = a.size();
  r.observed_po = static_cast<double>(agree) / n;
  for (std::size_t c = 0; c < pa.size(); ++c) r.expected_pe += (pa[c] / n) * (pb[c] / n);
  if (r.expected_pe >= 1.0) {
    if (r.observed_po >= 1.0) {
      r.kappa = 1.0;
      return r;
    }
    throw NumericalError("kappa undefined: chance agreement is 1");
  }
  r.kappa = (r.observed_po - r.expected_pe) / (1.0 - r.expected_pe);
  return r;
}

// ---------------------------------------------------------------------------
// Boxplot summaries

struct BoxplotSummary {
  std::string group;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  std::vector<double> outliers;
};

// Type-7 quantile (linear interpolation between order statistics) of
// ascending data.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Whiskers reach the most extreme observation within 1.5 IQR of the box.
BoxplotSummary summarize(std::string group, std::vector<double> values);

enum class GroupBy { kAssessment, kErrorType };
enum class Metric { kWordAccuracy, kFBert };

std::string to_string(GroupBy g);
std::string to_string(Metric m);

// One summary per non-empty group, in level / error-type order. Records
// lacking the key or the metric are skipped; throws DataError if none
// remain.
std::vector<BoxplotSummary> boxplot_by(const std::vector<ScoredUtterance>& results, GroupBy group_by,
                                       Metric metric);

// Values of `metric` grouped like boxplot_by (used for ANOVA).
std::vector<std::pair<std::string, std::vector<double>>> group_values(
    const std::vector<ScoredUtterance>& results, GroupBy group_by, Metric metric);

}  // namespace asreval::stats
