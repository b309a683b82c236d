#include "romes/sample.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace romes {

std::vector<const SampleRow*> SampleTable::split_rows(
    const std::string& split) const {
  std::vector<const SampleRow*> out;
  for (const SampleRow& row : rows) {
    if (row.split == split && row.ok) out.push_back(&row);
  }
  return out;
}

namespace {

SampleRow evaluate_row(const AffineOperator& op, const ReducedModel& rm,
                       const InputPoint& mu) {
  SampleRow row;
  row.mu = mu;
  try {
    const Eigen::VectorXd u = solve_hifi(op, mu);
    const Eigen::VectorXd uhat = solve_projected(rm.primal, mu);
    const Eigen::VectorXd e = u - rm.primal.basis.V * uhat;
    row.err_energy = energy_norm(op, mu, e);
    row.err_xnorm = x_norm(op, e);
    row.err_output_compliant =
        compliant_output(op, u) - rm.primal.reduced_b.dot(uhat);
    for (const auto& [dual_id, dm] : rm.duals) {
      const Eigen::VectorXd& g = op.output_vectors.at(dm.output_id);
      row.output_errors[dm.output_id] =
          g.dot(u) - g.dot(rm.primal.basis.V * uhat);
      row.indicators["dwr_" + dual_id] =
          dual_weighted_residual(rm, dual_id, mu);
    }
    row.bounds = error_bounds(rm, mu, uhat);
    row.indicators["log_res_euclid"] = std::log(row.bounds.residual_euclid);
    row.indicators["log_res_riesz"] = std::log(row.bounds.residual_riesz);
    row.indicators["log_bound_energy"] = std::log(row.bounds.energy_ub);
    for (const auto& [name, value] : row.indicators) {
      if (!std::isfinite(value)) row.ok = false;
    }
  } catch (const std::exception&) {
    row.ok = false;
  }
  return row;
}

}  // namespace

SampleTable collect_samples(const AffineOperator& op, const ReducedModel& rm,
                            const std::vector<InputPoint>& points,
                            const CollectOptions& opts) {
  SampleTable table;
  table.indicator_columns = {"log_res_euclid", "log_res_riesz",
                             "log_bound_energy"};
  for (const auto& [dual_id, dm] : rm.duals) {
    table.indicator_columns.push_back("dwr_" + dual_id);
    if (std::find(table.output_ids.begin(), table.output_ids.end(),
                  dm.output_id) == table.output_ids.end()) {
      table.output_ids.push_back(dm.output_id);
    }
  }

  table.rows.resize(points.size());
  const int threads = std::max(1, opts.threads);
  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < points.size(); i += stride) {
      table.rows[i] = evaluate_row(op, rm, points[i]);
      table.rows[i].split =
          static_cast<int>(i) < opts.n_train ? "train" : "validation";
    }
  };
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker, static_cast<std::size_t>(t), threads);
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

std::string table_to_csv(const SampleTable& table) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 1; i <= 9; ++i) out << "mu_" << i << ',';
  for (const auto& col : table.indicator_columns) out << col << ',';
  out << "err_energy,err_xnorm,err_output_compliant";
  for (std::size_t k = 1; k <= table.output_ids.size(); ++k) {
    out << ",err_output_" << k;
  }
  out << ",bound_energy,bound_energy_lb,bound_output,bound_output_lb,split\n";
  for (const SampleRow& row : table.rows) {
    if (!row.ok) continue;  // failed rows are excluded from persisted data
    for (int i = 0; i < 9; ++i) out << row.mu[i] << ',';
    for (const auto& col : table.indicator_columns) {
      out << row.indicators.at(col) << ',';
    }
    out << row.err_energy << ',' << row.err_xnorm << ','
        << row.err_output_compliant;
    for (const auto& id : table.output_ids) {
      out << ',' << row.output_errors.at(id);
    }
    out << ',' << row.bounds.energy_ub << ',' << row.bounds.energy_lb << ','
        << row.bounds.output_ub << ',' << row.bounds.output_lb << ','
        << row.split << '\n';
  }
  return out.str();
}

SampleTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty sample CSV");
  }
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  SampleTable table;
  std::vector<std::string> output_columns;
  for (const auto& col : header) {
    if (col.rfind("log_", 0) == 0 || col.rfind("dwr_", 0) == 0) {
      table.indicator_columns.push_back(col);
    } else if (col.rfind("err_output_", 0) == 0 &&
               col != "err_output_compliant") {
      output_columns.push_back(col);
      table.output_ids.push_back("point_" +
                                 col.substr(std::string("err_output_").size()));
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw std::runtime_error("sample CSV row width mismatch");
    }
    SampleRow row;
    std::size_t out_k = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string& col = header[c];
      if (col == "split") {
        row.split = cells[c];
        continue;
      }
      const double v = std::stod(cells[c]);
      if (col.rfind("mu_", 0) == 0) {
        row.mu[std::stoi(col.substr(3)) - 1] = v;
      } else if (col.rfind("log_", 0) == 0 || col.rfind("dwr_", 0) == 0) {
        row.indicators[col] = v;
      } else if (col == "err_energy") {
        row.err_energy = v;
      } else if (col == "err_xnorm") {
        row.err_xnorm = v;
      } else if (col == "err_output_compliant") {
        row.err_output_compliant = v;
      } else if (col.rfind("err_output_", 0) == 0) {
        row.output_errors[table.output_ids[out_k++]] = v;
      } else if (col == "bound_energy") {
        row.bounds.energy_ub = v;
      } else if (col == "bound_energy_lb") {
        row.bounds.energy_lb = v;
      } else if (col == "bound_output") {
        row.bounds.output_ub = v;
      } else if (col == "bound_output_lb") {
        row.bounds.output_lb = v;
      } else {
        throw std::runtime_error("unknown sample CSV column: " + col);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<InputPoint> sample_parameter_box(int count, uint64_t seed,
                                             bool log_uniform) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // in [0,1)
  };
  std::vector<InputPoint> points(std::max(count, 0));
  const double lo = log_uniform ? std::log(kParamLo) : kParamLo;
  const double hi = log_uniform ? std::log(kParamHi) : kParamHi;
  for (auto& mu : points) {
    for (int i = 0; i < 9; ++i) {
      const double v = lo + unit() * (hi - lo);
      mu[i] = log_uniform ? std::exp(v) : v;
    }
  }
  return points;
}

}  // namespace romes
