#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "romes/regression.hpp"

namespace romes {

double legendre_poly(int order, double x) {
  switch (order) {
    case 0:
      return 1.0;
    case 1:
      return x;
  }
  double pm2 = 1.0, pm1 = x;
  for (int k = 2; k <= order; ++k) {
    const double p =
        ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / static_cast<double>(k);
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

namespace {

int full_basis_size(const RvmConfig& cfg, const Eigen::MatrixXd& x) {
  if (cfg.basis == RvmBasisKind::Legendre) {
    if (x.cols() != 1) {
      throw std::invalid_argument(
          "Legendre basis supports one-dimensional indicators only");
    }
    return cfg.legendre_max_order + 1;
  }
  return static_cast<int>(x.rows());
}

double basis_value(const RvmConfig& cfg, const Eigen::MatrixXd& centers,
                   double width, int k, const Eigen::VectorXd& xs) {
  if (cfg.basis == RvmBasisKind::Legendre) {
    return legendre_poly(k, xs[0]);
  }
  const double d2 = (centers.row(k).transpose() - xs).squaredNorm();
  return std::exp(-d2 / (width * width));
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

}  // namespace

Eigen::VectorXd RVMModel::features(const Eigen::VectorXd& xs) const {
  Eigen::VectorXd phi(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    phi[k] = basis_value(config, centers, rbf_width, active[k], xs);
  }
  return phi;
}

RVMModel rvm_train(const TrainingSet& ts, const RvmConfig& config) {
  const int n = static_cast<int>(ts.x.rows());
  if (n < 1 || !ts.x.allFinite() || !ts.y.allFinite()) {
    throw std::invalid_argument("invalid RVM training data");
  }
  RVMModel m;
  m.config = config;
  m.x = ts.x;
  m.centers = ts.x;
  m.rbf_width = config.rbf_width > 0 ? config.rbf_width
                                     : median_pairwise_distance(ts.x);
  m.y_offset = ts.y.mean();
  Eigen::VectorXd y = ts.y.array() - m.y_offset;
  m.y_scale = std::sqrt(y.squaredNorm() / std::max(1, n - 1));
  if (!(m.y_scale > 0)) m.y_scale = 1.0;
  y /= m.y_scale;

  const int k_full = full_basis_size(config, ts.x);
  Eigen::MatrixXd phi_full(n, k_full);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < k_full; ++k) {
      phi_full(i, k) = basis_value(config, m.centers, m.rbf_width, k,
                                   ts.x.row(i).transpose());
    }
  }

  m.active.resize(k_full);
  for (int k = 0; k < k_full; ++k) m.active[k] = k;
  m.beta = Eigen::VectorXd::Constant(k_full, 1e-4);
  m.sigma2 = config.estimate_noise ? 0.1 : config.fixed_sigma2;

  auto posterior = [&](const Eigen::MatrixXd& phi) {
    const Eigen::MatrixXd a =
        phi.transpose() * phi / m.sigma2 +
        Eigen::MatrixXd(m.beta.asDiagonal());
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("RVM posterior precision is not SPD");
    }
    m.weight_cov = llt.solve(
        Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    m.weight_mean = m.weight_cov * (phi.transpose() * y) / m.sigma2;
  };

  Eigen::MatrixXd phi = phi_full;
  posterior(phi);
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const int ka = static_cast<int>(m.active.size());
    Eigen::VectorXd gamma(ka), beta_new(ka);
    for (int k = 0; k < ka; ++k) {
      gamma[k] = 1.0 - m.beta[k] * m.weight_cov(k, k);
      const double mk2 = m.weight_mean[k] * m.weight_mean[k];
      beta_new[k] = mk2 > 0 ? gamma[k] / mk2 : 2.0 * config.prune_threshold;
      if (beta_new[k] < 0) beta_new[k] = 2.0 * config.prune_threshold;
    }
    double sigma2_new = m.sigma2;
    if (config.estimate_noise) {
      const double denom = n - gamma.sum();
      if (denom > 0) {
        sigma2_new =
            std::max((y - phi * m.weight_mean).squaredNorm() / denom, 1e-12);
      }
    }
    double rel = std::abs(std::log(sigma2_new / m.sigma2));
    for (int k = 0; k < ka; ++k) {
      rel = std::max(rel, std::abs(std::log(beta_new[k] / m.beta[k])));
    }

    // prune insignificant bases
    std::vector<int> keep;
    for (int k = 0; k < ka; ++k) {
      if (beta_new[k] <= config.prune_threshold) keep.push_back(k);
    }
    if (keep.empty()) {
      throw std::runtime_error("RVM pruned the entire basis");
    }
    std::vector<int> active_new;
    Eigen::VectorXd beta_kept(keep.size());
    Eigen::MatrixXd phi_new(n, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      active_new.push_back(m.active[keep[k]]);
      beta_kept[k] = beta_new[keep[k]];
      phi_new.col(k) = phi.col(keep[k]);
    }
    m.active = std::move(active_new);
    m.beta = beta_kept;
    m.sigma2 = sigma2_new;
    phi = phi_new;
    posterior(phi);
    if (rel < config.tol) break;
  }
  return m;
}

NormalPrediction rvm_predict(const RVMModel& m, const Eigen::VectorXd& xs) {
  const Eigen::VectorXd phi = m.features(xs);
  NormalPrediction p;
  p.mean = m.y_offset + m.y_scale * phi.dot(m.weight_mean);
  p.var_mean =
      m.y_scale * m.y_scale * std::max(0.0, phi.dot(m.weight_cov * phi));
  p.noise_var = m.y_scale * m.y_scale * m.sigma2;
  if (m.config.basis == RvmBasisKind::Legendre &&
      std::abs(xs[0]) > 1.0 + 1e-12) {
    p.extrapolated = true;
  }
  return p;
}

std::string rvm_to_json(const RVMModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "rvm";
  j["basis"] = m.config.basis == RvmBasisKind::Legendre ? "legendre" : "rbf";
  j["legendre_max_order"] = m.config.legendre_max_order;
  j["rbf_width"] = m.rbf_width;
  j["centers_rows"] = static_cast<int>(m.centers.rows());
  j["centers_cols"] = static_cast<int>(m.centers.cols());
  j["centers"] = std::vector<double>(
      m.centers.data(), m.centers.data() + m.centers.size());
  j["y_offset"] = m.y_offset;
  j["y_scale"] = m.y_scale;
  j["active"] = m.active;
  j["beta"] =
      std::vector<double>(m.beta.data(), m.beta.data() + m.beta.size());
  j["sigma2"] = m.sigma2;
  j["weight_mean"] = std::vector<double>(
      m.weight_mean.data(), m.weight_mean.data() + m.weight_mean.size());
  j["weight_cov"] = std::vector<double>(
      m.weight_cov.data(), m.weight_cov.data() + m.weight_cov.size());
  return j.dump();
}

RVMModel rvm_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("kind").get<std::string>() != "rvm") {
    throw std::runtime_error("not an RVM model document");
  }
  RVMModel m;
  m.config.basis = j.at("basis").get<std::string>() == "legendre"
                       ? RvmBasisKind::Legendre
                       : RvmBasisKind::Rbf;
  m.config.legendre_max_order = j.at("legendre_max_order").get<int>();
  m.rbf_width = j.at("rbf_width").get<double>();
  const int cr = j.at("centers_rows").get<int>();
  const int cc = j.at("centers_cols").get<int>();
  const auto cv = j.at("centers").get<std::vector<double>>();
  m.centers = Eigen::Map<const Eigen::MatrixXd>(cv.data(), cr, cc);
  m.x = m.centers;
  m.y_offset = j.at("y_offset").get<double>();
  m.y_scale = j.at("y_scale").get<double>();
  m.active = j.at("active").get<std::vector<int>>();
  const auto bv = j.at("beta").get<std::vector<double>>();
  m.beta = Eigen::Map<const Eigen::VectorXd>(
      bv.data(), static_cast<Eigen::Index>(bv.size()));
  m.sigma2 = j.at("sigma2").get<double>();
  const auto wm = j.at("weight_mean").get<std::vector<double>>();
  m.weight_mean = Eigen::Map<const Eigen::VectorXd>(
      wm.data(), static_cast<Eigen::Index>(wm.size()));
  const auto wc = j.at("weight_cov").get<std::vector<double>>();
  const int ka = static_cast<int>(m.active.size());
  m.weight_cov = Eigen::Map<const Eigen::MatrixXd>(wc.data(), ka, ka);
  return m;
}

}  // namespace romes
