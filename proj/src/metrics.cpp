#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "errors.hpp"

namespace kinpred {

namespace {

/// Kahan compensated accumulator so parallel-friendly reductions stay
/// deterministic regardless of magnitude spread.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

const HorizonObservation& horizon_at(const EvalRecord& record, double horizon_s) {
  const auto it = record.horizons.find(horizon_s);
  if (it == record.horizons.end())
    throw InvalidInput("metrics: record missing requested horizon");
  return it->second;
}

void check_weights(const HorizonObservation& obs) {
  if (obs.samples.empty()) throw InvalidInput("metrics: no samples at horizon");
  KahanSum total;
  for (const WeightedPoint& s : obs.samples) total.add(s.weight);
  if (std::abs(total.value() - 1.0) > 1e-9)
    throw InvalidInput("metrics: sample weights must sum to 1");
}

template <typename PerVehicle>
double mean_over_vehicles(const std::vector<EvalRecord>& records,
                          double horizon_s, PerVehicle per_vehicle) {
  if (records.empty()) throw InvalidInput("metrics: no records");
  KahanSum outer;
  for (const EvalRecord& record : records) {
    const HorizonObservation& obs = horizon_at(record, horizon_s);
    check_weights(obs);
    outer.add(per_vehicle(obs));
  }
  return outer.value() / static_cast<double>(records.size());
}

}  // namespace

double rmse(const std::vector<EvalRecord>& records, double horizon_s) {
  const double mean_sq =
      mean_over_vehicles(records, horizon_s, [](const HorizonObservation& obs) {
        KahanSum e;
        for (const WeightedPoint& s : obs.samples)
          e.add(s.weight * (s.position - obs.truth).squaredNorm());
        return e.value();
      });
  return std::sqrt(mean_sq);
}

double ade(const std::vector<EvalRecord>& records, double horizon_s) {
  return mean_over_vehicles(records, horizon_s, [](const HorizonObservation& obs) {
    KahanSum e;
    for (const WeightedPoint& s : obs.samples)
      e.add(s.weight * (s.position - obs.truth).norm());
    return e.value();
  });
}

double qde(const std::vector<EvalRecord>& records, double q, double horizon_s) {
  if (!(q > 0.0) || q > 1.0) throw InvalidInput("qde: q must be in (0, 1]");
  return mean_over_vehicles(records, horizon_s, [q](const HorizonObservation& obs) {
    std::vector<std::pair<double, double>> by_distance;  // (distance, weight)
    by_distance.reserve(obs.samples.size());
    for (const WeightedPoint& s : obs.samples)
      by_distance.emplace_back((s.position - obs.truth).norm(), s.weight);
    std::sort(by_distance.begin(), by_distance.end());
    KahanSum cumulative;
    for (const auto& [distance, weight] : by_distance) {
      cumulative.add(weight);
      if (cumulative.value() + 1e-12 >= q) return distance;
    }
    return by_distance.back().first;  // cumulative reached 1 within tolerance
  });
}

std::vector<MetricValue> horizon_summary(const std::vector<EvalRecord>& records,
                                         double q) {
  static const double kHorizons[] = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<MetricValue> out;
  const std::pair<std::string, std::function<double(double)>> metrics[] = {
      {"rmse", [&](double h) { return rmse(records, h); }},
      {"ade", [&](double h) { return ade(records, h); }},
      {"qde", [&](double h) { return qde(records, q, h); }},
  };
  for (const auto& [name, eval] : metrics) {
    KahanSum sum;
    double final_value = 0.0;
    for (double h : kHorizons) {
      const double v = eval(h);
      sum.add(v);
      final_value = v;
      char label[16];
      std::snprintf(label, sizeof(label), "%g", h);
      out.push_back({name, label, v});
    }
    out.push_back({name, "average", sum.value() / 5.0});
    out.push_back({name, "final", final_value});
  }
  return out;
}

std::string metrics_csv(const std::vector<CsvMetricRow>& rows) {
  std::string out = "dataset,view,metric,horizon_s,value\n";
  char buf[64];
  for (const CsvMetricRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g", row.value);
    out += row.dataset + "," + row.view + "," + row.metric + "," + row.horizon +
           "," + buf + "\n";
  }
  return out;
}

std::vector<CsvMetricRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "dataset,view,metric,horizon_s,value")
    throw ParseError("metrics csv: bad header");
  std::vector<CsvMetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    CsvMetricRow row;
    std::string value;
    if (!std::getline(fields, row.dataset, ',') ||
        !std::getline(fields, row.view, ',') ||
        !std::getline(fields, row.metric, ',') ||
        !std::getline(fields, row.horizon, ',') || !std::getline(fields, value))
      throw ParseError("metrics csv: malformed row");
    try {
      std::size_t used = 0;
      row.value = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ParseError("metrics csv: bad value '" + value + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace kinpred
