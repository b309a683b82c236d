#pragma once

#include <map>
#include <string>
#include <vector>

#include "romes/reduced.hpp"

namespace romes {

/// One evaluated parameter point: indicators, true errors and bounds.
struct SampleRow {
  InputPoint mu;
  std::map<std::string, double> indicators;
  double err_energy = 0;
  double err_xnorm = 0;
  double err_output_compliant = 0;
  std::map<std::string, double> output_errors;  // by output id
  BoundSet bounds;
  std::string split;  // "train" or "validation"
  bool ok = true;
};

struct SampleTable {
  std::vector<std::string> indicator_columns;
  std::vector<std::string> output_ids;  // ordered, e.g. point_1, point_2
  std::vector<SampleRow> rows;

  std::vector<const SampleRow*> split_rows(const std::string& split) const;
};

/// Indicator columns to evaluate during sample collection. Scalar residual
/// indicators are always emitted; one dual-weighted-residual column is
/// added per dual model attached to the reduced model.
struct CollectOptions {
  int n_train = 0;  // first n_train rows are tagged "train"
  int threads = 1;
};

SampleTable collect_samples(const AffineOperator& op, const ReducedModel& rm,
                            const std::vector<InputPoint>& points,
                            const CollectOptions& opts);

std::string table_to_csv(const SampleTable& table);
SampleTable table_from_csv(const std::string& text);

std::vector<InputPoint> sample_parameter_box(int count, uint64_t seed,
                                             bool log_uniform = false);

}  // namespace romes
