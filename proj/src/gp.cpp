#include <Eigen/Cholesky>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "romes/regression.hpp"

namespace romes {

namespace {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double l2) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      k(i, j) = k(j, i) = std::exp(-d2 / (2.0 * l2));
    }
  }
  return k;
}

double median_pairwise_distance(const Eigen::MatrixXd& x) {
  std::vector<double> d;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = i + 1; j < x.rows(); ++j) {
      d.push_back((x.row(i) - x.row(j)).norm());
    }
  }
  if (d.empty()) return 1.0;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  const double m = d[d.size() / 2];
  return m > 0 ? m : 1.0;
}

struct NelderMeadResult {
  Eigen::Vector2d x;
  double value;
};

/// Minimizes f over R^2, derivative free.
template <typename F>
NelderMeadResult nelder_mead(F f, const Eigen::Vector2d& start,
                             double step, int max_iters) {
  std::array<Eigen::Vector2d, 3> pts = {
      start, start + Eigen::Vector2d(step, 0),
      start + Eigen::Vector2d(0, step)};
  std::array<double, 3> vals;
  for (int i = 0; i < 3; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    std::array<Eigen::Vector2d, 3> p2;
    std::array<double, 3> v2;
    for (int i = 0; i < 3; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts = p2;
    vals = v2;
  };

  for (int it = 0; it < max_iters; ++it) {
    order();
    if (std::abs(vals[2] - vals[0]) <
        1e-12 * (1.0 + std::abs(vals[0]))) {
      break;
    }
    const Eigen::Vector2d centroid = 0.5 * (pts[0] + pts[1]);
    const Eigen::Vector2d refl = centroid + (centroid - pts[2]);
    const double f_refl = f(refl);
    if (f_refl < vals[0]) {
      const Eigen::Vector2d exp_pt = centroid + 2.0 * (centroid - pts[2]);
      const double f_exp = f(exp_pt);
      if (f_exp < f_refl) {
        pts[2] = exp_pt;
        vals[2] = f_exp;
      } else {
        pts[2] = refl;
        vals[2] = f_refl;
      }
    } else if (f_refl < vals[1]) {
      pts[2] = refl;
      vals[2] = f_refl;
    } else {
      const Eigen::Vector2d contr = centroid + 0.5 * (pts[2] - centroid);
      const double f_contr = f(contr);
      if (f_contr < vals[2]) {
        pts[2] = contr;
        vals[2] = f_contr;
      } else {
        for (int i = 1; i < 3; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  return {pts[0], vals[0]};
}

GPModel fit_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std,
                  double y_offset, double y_scale, double l2,
                  double sigma2) {
  const int n = static_cast<int>(x.rows());
  const double jitter = 1e-10;
  Eigen::MatrixXd k = kernel_matrix(x, l2);
  k.diagonal().array() += sigma2 + jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("kernel matrix is not SPD");
  }
  GPModel m;
  m.x = x;
  m.y_std = y_std;
  m.y_offset = y_offset;
  m.y_scale = y_scale;
  m.l2 = l2;
  m.sigma2 = sigma2;
  m.jitter = jitter;
  m.chol_lower = llt.matrixL();
  m.alpha = llt.solve(y_std);
  double log_det = 0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(m.chol_lower(i, i));
  m.log_likelihood = -0.5 * y_std.dot(m.alpha) - 0.5 * log_det -
                     0.5 * n * std::log(2.0 * M_PI);
  return m;
}

}  // namespace

double gp_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double l2, double sigma2, double jitter) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd k = kernel_matrix(x, l2);
  k.diagonal().array() += sigma2 + jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXd l = llt.matrixL();
  double log_det = 0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  return -0.5 * y.dot(llt.solve(y)) - 0.5 * log_det -
         0.5 * n * std::log(2.0 * M_PI);
}

GPModel gp_train(const TrainingSet& ts, const GpConfig& config) {
  const int n = static_cast<int>(ts.x.rows());
  if (n < 2) {
    throw std::invalid_argument("GP training needs at least two points");
  }
  if (!ts.x.allFinite() || !ts.y.allFinite()) {
    throw std::invalid_argument("non-finite training data");
  }
  const double y_offset = ts.y.mean();
  Eigen::VectorXd yc = ts.y.array() - y_offset;
  double y_scale = std::sqrt(yc.squaredNorm() / std::max(1, n - 1));
  if (!(y_scale > 0)) {
    // constant targets: noise at the floor, constant predictions
    return fit_fixed(ts.x, Eigen::VectorXd::Zero(n), y_offset, 1.0, 1.0,
                     config.sigma2_floor);
  }
  yc /= y_scale;

  const double floor = config.sigma2_floor;
  const double jitter = 1e-10;
  auto objective = [&](const Eigen::Vector2d& theta) {
    const double l2 = std::exp(theta[0]);
    const double s2 = floor + std::exp(theta[1]);
    if (!std::isfinite(l2) || !std::isfinite(s2)) {
      return std::numeric_limits<double>::infinity();
    }
    return -gp_log_likelihood(ts.x, yc, l2, s2, jitter);
  };

  const double med = median_pairwise_distance(ts.x);
  std::vector<Eigen::Vector2d> starts;
  starts.emplace_back(std::log(med * med), std::log(0.1));
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](double lo, double hi) {
    const double u =
        static_cast<double>(rng() >> 11) * 0x1.0p-53;  // in [0,1)
    return lo + u * (hi - lo);
  };
  while (static_cast<int>(starts.size()) < std::max(config.starts, 1)) {
    starts.emplace_back(
        uniform(std::log(med * med) - 4.0, std::log(med * med) + 4.0),
        uniform(std::log(1e-8), std::log(1.0)));
  }

  bool any = false;
  Eigen::Vector2d best_theta = starts.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const auto res = nelder_mead(objective, s, 0.5, config.max_iters);
    if (std::isfinite(res.value) && res.value < best) {
      best = res.value;
      best_theta = res.x;
      any = true;
    }
  }
  if (!any) {
    throw std::runtime_error("all GP optimization starts failed");
  }
  return fit_fixed(ts.x, yc, y_offset, y_scale, std::exp(best_theta[0]),
                   floor + std::exp(best_theta[1]));
}

GPModel gp_fit_fixed(const TrainingSet& ts, double l2, double sigma2) {
  const int n = static_cast<int>(ts.x.rows());
  const double y_offset = ts.y.mean();
  Eigen::VectorXd yc = ts.y.array() - y_offset;
  double y_scale = std::sqrt(yc.squaredNorm() / std::max(1, n - 1));
  if (!(y_scale > 0)) y_scale = 1.0;
  yc /= y_scale;
  return fit_fixed(ts.x, yc, y_offset, y_scale, l2, sigma2);
}

NormalPrediction GPModel::predict(const Eigen::VectorXd& xs) const {
  const int n = static_cast<int>(x.rows());
  Eigen::VectorXd ks(n);
  for (int i = 0; i < n; ++i) {
    ks[i] = std::exp(-(x.row(i).transpose() - xs).squaredNorm() / (2.0 * l2));
  }
  NormalPrediction p;
  p.mean = y_offset + y_scale * ks.dot(alpha);
  const Eigen::VectorXd v =
      chol_lower.triangularView<Eigen::Lower>().solve(ks);
  p.var_mean = y_scale * y_scale * std::max(0.0, 1.0 - v.squaredNorm());
  p.noise_var = y_scale * y_scale * sigma2;
  return p;
}

std::string gp_to_json(const GPModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "gp";
  const int n = static_cast<int>(m.x.rows());
  const int q = static_cast<int>(m.x.cols());
  j["n"] = n;
  j["q"] = q;
  j["x"] = std::vector<double>(m.x.data(), m.x.data() + m.x.size());
  j["y_std"] =
      std::vector<double>(m.y_std.data(), m.y_std.data() + m.y_std.size());
  j["y_offset"] = m.y_offset;
  j["y_scale"] = m.y_scale;
  j["l2"] = m.l2;
  j["sigma2"] = m.sigma2;
  return j.dump();
}

GPModel gp_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("kind").get<std::string>() != "gp") {
    throw std::runtime_error("not a GP model document");
  }
  const int n = j.at("n").get<int>();
  const int q = j.at("q").get<int>();
  const auto xv = j.at("x").get<std::vector<double>>();
  const auto yv = j.at("y_std").get<std::vector<double>>();
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(xv.data(), n, q);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), n);
  return fit_fixed(x, y, j.at("y_offset").get<double>(),
                   j.at("y_scale").get<double>(), j.at("l2").get<double>(),
                   j.at("sigma2").get<double>());
}

}  // namespace romes
