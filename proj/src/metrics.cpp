// SPDX-License-Identifier: Apache-2.0
#include "ppiref/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ppiref/error.hpp"
#include "ppiref/log.hpp"

namespace ppiref {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    fail(ErrorCode::DimensionMismatch,
         "lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::InvalidArgument, "non-finite value");
}

}  // namespace

Eigen::VectorXd average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Eigen::VectorXd ranks(static_cast<Eigen::Index>(n));
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[static_cast<Eigen::Index>(order[k])] = r;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (x.size() < 2) fail(ErrorCode::DegenerateInput, "correlation needs at least two items");
  const Eigen::Map<const Eigen::VectorXd> a(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> b(y.data(), static_cast<Eigen::Index>(y.size()));
  if ((a.array() == a[0]).all() || (b.array() == b[0]).all())
    fail(ErrorCode::DegenerateInput, "correlation of a constant vector");
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (!(denom > 0.0)) fail(ErrorCode::DegenerateInput, "zero variance");
  return std::clamp(da.dot(db) / denom, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const Eigen::VectorXd rx = average_ranks(x);
  const Eigen::VectorXd ry = average_ranks(y);
  return pearson(std::span<const double>(rx.data(), x.size()), std::span<const double>(ry.data(), y.size()));
}

PrecisionRecall stabilizing_precision_recall(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  if (pred.empty()) fail(ErrorCode::InvalidArgument, "no predictions");
  std::size_t tp = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] < 0.0;
    const bool t = truth[i] < 0.0;
    predicted += p;
    actual += t;
    tp += p && t;
  }
  PrecisionRecall out;
  if (predicted > 0) out.precision = static_cast<double>(tp) / static_cast<double>(predicted);
  if (actual > 0) out.recall = static_cast<double>(tp) / static_cast<double>(actual);
  return out;
}

double roc_auc(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  std::vector<double> score(pred.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    score[i] = -pred[i];
    positives += truth[i] < 0.0;
  }
  const std::size_t negatives = pred.size() - positives;
  if (positives == 0 || negatives == 0) fail(ErrorCode::SingleClass, "ROC AUC needs both classes");
  const Eigen::VectorXd ranks = average_ranks(score);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (truth[i] < 0.0) rank_sum += ranks[static_cast<Eigen::Index>(i)];
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

ErrorMetrics mae_rmse(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  if (pred.empty()) fail(ErrorCode::InvalidArgument, "no predictions");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(pred.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

std::vector<std::size_t> ascending_ranking(std::span<const double> pred) {
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pred[a] < pred[b]; });
  return order;
}

std::size_t top_slice_size(double percent, std::size_t n) {
  if (!(percent > 0.0 && percent <= 100.0)) fail(ErrorCode::InvalidArgument, "percent must be in (0, 100]");
  // k% of n is computed as k*n/100 so that whole-number products stay exact.
  const double raw = percent * static_cast<double>(n) / 100.0;
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

RetrievalPrecision precision_at(std::span<const double> pred, const std::vector<bool>& favorable,
                                std::span<const double> percents) {
  if (pred.size() != favorable.size()) fail(ErrorCode::DimensionMismatch, "predictions and labels differ in length");
  if (pred.empty()) fail(ErrorCode::InvalidArgument, "no predictions");
  for (double v : pred)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite prediction");
  const auto order = ascending_ranking(pred);
  RetrievalPrecision out;
  out.at_one = favorable[order.front()] ? 1.0 : 0.0;
  for (double k : percents) {
    const std::size_t m = top_slice_size(k, pred.size());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < m; ++r) hits += favorable[order[r]];
    out.at_percent.emplace_back(k, static_cast<double>(hits) / static_cast<double>(m));
  }
  return out;
}

void PredictionSet::add(Prediction p) {
  if (!std::isfinite(p.pred) || !std::isfinite(p.truth))
    fail(ErrorCode::InvalidArgument, "non-finite value for " + p.group + " " + p.mutation);
  groups_[p.group].push_back(items_.size());
  items_.push_back(std::move(p));
}

std::pair<std::vector<double>, std::vector<double>> PredictionSet::group_values(const std::string& group) const {
  auto it = groups_.find(group);
  if (it == groups_.end()) fail(ErrorCode::InvalidArgument, "unknown group " + group);
  std::vector<double> pred, truth;
  pred.reserve(it->second.size());
  truth.reserve(it->second.size());
  for (std::size_t i : it->second) {
    pred.push_back(items_[i].pred);
    truth.push_back(items_[i].truth);
  }
  return {std::move(pred), std::move(truth)};
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Spearman: return "Spearman";
    case Metric::Pearson: return "Pearson";
    case Metric::Precision: return "Precision";
    case Metric::Recall: return "Recall";
    case Metric::RocAuc: return "ROC AUC";
    case Metric::Mae: return "MAE";
    case Metric::Rmse: return "RMSE";
  }
  return "?";
}

namespace {

std::optional<double> group_metric(Metric metric, std::span<const double> pred, std::span<const double> truth,
                                   std::string& reason) {
  switch (metric) {
    case Metric::Spearman:
    case Metric::Pearson:
      if (pred.size() < 2) {
        reason = "fewer than two mutations";
        return std::nullopt;
      }
      try {
        return metric == Metric::Spearman ? spearman(pred, truth) : pearson(pred, truth);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
        reason = "constant predictions or labels";
        return std::nullopt;
      }
    case Metric::Precision: {
      auto pr = stabilizing_precision_recall(pred, truth);
      if (!pr.precision) reason = "no predicted stabilizing mutations";
      return pr.precision;
    }
    case Metric::Recall: {
      auto pr = stabilizing_precision_recall(pred, truth);
      if (!pr.recall) reason = "no stabilizing mutations";
      return pr.recall;
    }
    case Metric::RocAuc:
      try {
        return roc_auc(pred, truth);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingleClass) throw;
        reason = "labels have a single sign class";
        return std::nullopt;
      }
    case Metric::Mae: return mae_rmse(pred, truth).mae;
    case Metric::Rmse: return mae_rmse(pred, truth).rmse;
  }
  return std::nullopt;
}

}  // namespace

MetricRow per_ppi_aggregate(const PredictionSet& set, Metric metric) {
  MetricRow row;
  row.metric = metric;
  double sum = 0.0;
  for (const auto& [group, idx] : set.groups()) {
    const auto [pred, truth] = set.group_values(group);
    std::string reason;
    if (auto v = group_metric(metric, pred, truth, reason)) {
      row.values.emplace(group, *v);
      sum += *v;
    } else {
      row.excluded.emplace(group, reason);
      log_warning(std::string(to_string(metric)) + ": excluding " + group + " (" + reason + ")");
    }
  }
  if (!row.values.empty()) row.aggregate = sum / static_cast<double>(row.values.size());
  return row;
}

MetricReport evaluate(const PredictionSet& set, std::span<const double> percents) {
  MetricReport report;
  report.groups = set.groups().size();
  report.items = set.items().size();
  for (Metric m : kAllMetrics) report.rows.push_back(per_ppi_aggregate(set, m));
  if (!set.empty()) {
    std::vector<double> pred;
    std::vector<bool> favorable;
    for (const auto& p : set.items()) {
      pred.push_back(p.pred);
      favorable.push_back(p.truth < 0.0);
    }
    report.retrieval = precision_at(pred, favorable, percents);
  }
  return report;
}

namespace {

std::string cell(std::optional<double> v, int precision = 4) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

std::string percent_label(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "P@%g%%", k);
  return buf;
}

}  // namespace

std::string format_table(const MetricReport& report) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"group"};
  for (const auto& row : report.rows) header.emplace_back(to_string(row.metric));
  table.push_back(header);

  std::vector<std::string> mean{"mean"};
  for (const auto& row : report.rows) mean.push_back(cell(row.aggregate));
  table.push_back(mean);

  std::vector<std::string> groups;
  for (const auto& row : report.rows) {
    for (const auto& [g, v] : row.values) groups.push_back(g);
    for (const auto& [g, r] : row.excluded) groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  for (const auto& g : groups) {
    std::vector<std::string> line{g};
    for (const auto& row : report.rows) {
      auto it = row.values.find(g);
      line.push_back(cell(it == row.values.end() ? std::nullopt : std::optional<double>(it->second)));
    }
    table.push_back(line);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

  std::ostringstream os;
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c == 0) {
        os << line[c] << std::string(width[c] - line[c].size(), ' ');
      } else {
        os << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
      }
    }
    os << '\n';
  }
  if (report.retrieval) {
    os << "\npooled retrieval over " << report.items << " mutations\n";
    os << "P@1 " << cell(report.retrieval->at_one * 100.0, 2) << '\n';
    for (const auto& [k, v] : report.retrieval->at_percent)
      os << percent_label(k) << ' ' << cell(v * 100.0, 2) << '\n';
  }
  return os.str();
}

}  // namespace ppiref
