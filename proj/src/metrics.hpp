#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kinpred {

struct WeightedPoint {
  double weight = 0.0;
  Eigen::Vector2d position{0.0, 0.0};
};

/// Truth plus the weighted prediction cloud at one horizon.
struct HorizonObservation {
  Eigen::Vector2d truth{0.0, 0.0};
  std::vector<WeightedPoint> samples;
};

/// One evaluated vehicle/window, keyed by prediction horizon in seconds.
/// Sample weights at each horizon must sum to 1 within 1e-9.
struct EvalRecord {
  std::string id;
  std::map<double, HorizonObservation> horizons;
};

/// sqrt of the mean over vehicles of the weighted mean squared Euclidean
/// error at the given horizon.
double rmse(const std::vector<EvalRecord>& records, double horizon_s);

/// Weighted mean Euclidean distance, averaged over vehicles.
double ade(const std::vector<EvalRecord>& records, double horizon_s);

/// Per vehicle: sort sample distances ascending, accumulate weights, take the
/// first distance whose cumulative weight reaches q; averaged over vehicles.
double qde(const std::vector<EvalRecord>& records, double q, double horizon_s);

struct MetricValue {
  std::string metric;   ///< rmse | ade | qde
  std::string horizon;  ///< "1".."5" (seconds), "average", or "final"
  double value = 0.0;
};

/// All three metrics at horizons 1..5 s plus their time average and 5 s
/// value. Requires every record to carry all five horizons.
std::vector<MetricValue> horizon_summary(const std::vector<EvalRecord>& records,
                                         double q);

struct CsvMetricRow {
  std::string dataset;
  std::string view;
  std::string metric;
  std::string horizon;
  double value = 0.0;
};

/// Report rows as "dataset,view,metric,horizon_s,value" with a header line.
std::string metrics_csv(const std::vector<CsvMetricRow>& rows);
std::vector<CsvMetricRow> parse_metrics_csv(const std::string& text);

}  // namespace kinpred
