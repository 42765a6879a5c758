// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics for ddG predictions. Metrics are computed per complex
// and averaged without weighting; retrieval precision runs on the pooled
// predictions. Lower ddG is better: values < 0 are stabilizing.

#pragma once

#include <Eigen/Core>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppiref {

/// Average ranks starting at 1; tied values share the mean of their ranks.
Eigen::VectorXd average_ranks(std::span<const double> values);

/// Pearson correlation. DimensionMismatch for unequal lengths,
/// DegenerateInput for fewer than two items or a constant vector.
double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct PrecisionRecall {
  std::optional<double> precision;  // absent without predicted positives
  std::optional<double> recall;     // absent without true positives
};

/// Positive class: value < 0, for both prediction and truth.
PrecisionRecall stabilizing_precision_recall(std::span<const double> pred, std::span<const double> truth);

/// Mann-Whitney AUC with ties counted 1/2. Positives are truth < 0 and the
/// score is -pred. SingleClass when only one class is present.
double roc_auc(std::span<const double> pred, std::span<const double> truth);

struct ErrorMetrics {
  double mae = 0.0;
  double rmse = 0.0;
};
ErrorMetrics mae_rmse(std::span<const double> pred, std::span<const double> truth);

/// Item indices by ascending prediction; ties keep input order.
std::vector<std::size_t> ascending_ranking(std::span<const double> pred);

/// ceil(percent / 100 * n), at least 1.
std::size_t top_slice_size(double percent, std::size_t n);

struct RetrievalPrecision {
  double at_one = 0.0;
  std::vector<std::pair<double, double>> at_percent;  // (k, fraction favorable in top k%)
};

/// Fractions in [0, 1]: P@1 and, for each k in `percents`, the favorable
/// share of the top ceil(k% n) items of the ascending ranking.
RetrievalPrecision precision_at(std::span<const double> pred, const std::vector<bool>& favorable,
                                std::span<const double> percents);

struct Prediction {
  std::string group;  // complex id
  std::string mutation;
  double pred = 0.0;
  double truth = 0.0;
};

/// Predictions in input order, grouped by complex id.
class PredictionSet {
 public:
  void add(Prediction p);
  const std::vector<Prediction>& items() const { return items_; }
  /// Group id -> indices into items(), each list in input order.
  const std::map<std::string, std::vector<std::size_t>>& groups() const { return groups_; }
  bool empty() const { return items_.empty(); }

  /// Predicted and true values of one group.
  std::pair<std::vector<double>, std::vector<double>> group_values(const std::string& group) const;

 private:
  std::vector<Prediction> items_;
  std::map<std::string, std::vector<std::size_t>> groups_;
};

/// Table column order.
enum class Metric { Spearman, Pearson, Precision, Recall, RocAuc, Mae, Rmse };
inline constexpr std::array<Metric, 7> kAllMetrics = {Metric::Spearman, Metric::Pearson, Metric::Precision,
                                                      Metric::Recall,   Metric::RocAuc,  Metric::Mae,
                                                      Metric::Rmse};
std::string_view to_string(Metric m);

struct MetricRow {
  Metric metric = Metric::Spearman;
  std::map<std::string, double> values;        // groups where defined
  std::map<std::string, std::string> excluded;  // group -> reason
  std::optional<double> aggregate;              // unweighted mean of values
};

/// Evaluates `metric` on every group separately and averages the defined
/// values. Exclusions are logged as warnings.
MetricRow per_ppi_aggregate(const PredictionSet& set, Metric metric);

struct MetricReport {
  std::size_t groups = 0;
  std::size_t items = 0;
  std::vector<MetricRow> rows;  // kAllMetrics order
  std::optional<RetrievalPrecision> retrieval;  // pooled, favorable = truth < 0
};

inline constexpr std::array<double, 2> kDefaultPercents = {5.0, 10.0};

MetricReport evaluate(const PredictionSet& set, std::span<const double> percents = kDefaultPercents);

/// Aligned plain-text table: aggregate row then one row per group; P@ values
/// in percent.
std::string format_table(const MetricReport& report);

}  // namespace ppiref
