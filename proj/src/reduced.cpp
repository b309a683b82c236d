#include "romes/reduced.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace romes {

namespace {

using Llt = Eigen::SimplicialLLT<SpMat>;

Eigen::VectorXd solve_with(const AffineOperator& op, const InputPoint& mu,
                           const Eigen::VectorXd& b) {
  const SpMat a = assemble_full(op, mu);
  Llt llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("factorization failed at snapshot parameter");
  }
  return llt.solve(b);
}

/// Modified Gram-Schmidt in the K inner product, one re-orthogonalization
/// pass. Returns false when the vector is (numerically) dependent.
bool k_orthonormalize(const SpMat& k_mat, const Eigen::MatrixXd& v_existing,
                      Eigen::VectorXd& u) {
  const double norm0 = std::sqrt(std::max(u.dot(k_mat * u), 0.0));
  if (norm0 <= 0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < v_existing.cols(); ++j) {
      const Eigen::VectorXd& psi = v_existing.col(j);
      u -= psi.dot(k_mat * u) * psi;
    }
  }
  const double norm1 = std::sqrt(std::max(u.dot(k_mat * u), 0.0));
  if (norm1 < 1e-10 * norm0) return false;
  u /= norm1;
  return true;
}

ResidualGramians build_gramians(const AffineOperator& op,
                                const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& v,
                                const std::vector<Eigen::MatrixXd>& av,
                                const Llt* k_llt) {
  ResidualGramians g;
  const int nq = kNumBlocks;
  std::vector<Eigen::MatrixXd> wv(nq);
  Eigen::VectorXd wb;
  if (k_llt != nullptr) {
    for (int q = 0; q < nq; ++q) wv[q] = k_llt->solve(av[q]);
    wb = k_llt->solve(b);
  } else {
    for (int q = 0; q < nq; ++q) wv[q] = av[q];
    wb = b;
  }
  g.AA.assign(nq, std::vector<Eigen::MatrixXd>(nq));
  g.bA.resize(nq);
  for (int q = 0; q < nq; ++q) {
    for (int qp = 0; qp < nq; ++qp) {
      g.AA[q][qp] = wv[q].transpose() * av[qp];
    }
    g.bA[q] = wb.transpose() * av[q];
  }
  g.bb = b.dot(wb);
  return g;
}

ProjectedSystem project_with(const AffineOperator& op,
                             const Eigen::VectorXd& b,
                             const ReducedBasis& basis, const Llt& k_llt) {
  ProjectedSystem sys;
  sys.basis = basis;
  const Eigen::MatrixXd& v = basis.V;
  std::vector<Eigen::MatrixXd> av(kNumBlocks);
  for (int q = 0; q < kNumBlocks; ++q) av[q] = op.components[q] * v;
  sys.reduced_A.resize(kNumBlocks);
  for (int q = 0; q < kNumBlocks; ++q) {
    sys.reduced_A[q] = v.transpose() * av[q];
  }
  sys.reduced_b = v.transpose() * b;
  sys.riesz = build_gramians(op, b, v, av, &k_llt);
  sys.euclid = build_gramians(op, b, v, av, nullptr);
  return sys;
}

double bound_at(const ProjectedSystem& sys, const InputPoint& mu) {
  const Eigen::VectorXd uhat = solve_projected(sys, mu);
  return residual_norm(sys, mu, uhat, Weighting::Riesz) /
         std::sqrt(coercivity_lower_bound(mu));
}

GreedyResult greedy_impl(const AffineOperator& op, const Eigen::VectorXd& b,
                         const std::vector<InputPoint>& candidates,
                         const GreedyOptions& opts) {
  if (candidates.empty()) {
    throw std::invalid_argument("greedy candidate set is empty");
  }
  if (!(opts.tol > 0)) {
    throw std::invalid_argument("greedy tolerance must be positive");
  }
  Llt k_llt(op.inner_product);
  if (k_llt.info() != Eigen::Success) {
    throw std::runtime_error("inner-product matrix is not SPD");
  }

  std::vector<InputPoint> pool = candidates;
  std::mt19937_64 rng(opts.seed);
  std::size_t next = rng() % pool.size();

  GreedyResult result;
  result.basis.V.resize(op.n, 0);
  while (result.basis.p() < opts.max_p) {
    const InputPoint mu_star = pool[next];
    Eigen::VectorXd u = solve_with(op, mu_star, b);
    if (k_orthonormalize(op.inner_product, result.basis.V, u)) {
      result.basis.V.conservativeResize(Eigen::NoChange,
                                        result.basis.p() + 1);
      result.basis.V.col(result.basis.p() - 1) = u;
      result.basis.snapshot_inputs.push_back(mu_star);
    } else {
      ++result.skipped_dependent;
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(next));
      if (pool.empty()) break;
    }

    const ProjectedSystem sys = project_with(op, b, result.basis, k_llt);
    double max_bound = -1;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double delta = bound_at(sys, pool[i]);
      if (delta > max_bound) {
        max_bound = delta;
        argmax = i;
      }
    }
    result.max_bound_history.push_back(max_bound);
    if (max_bound <= opts.tol) break;
    next = argmax;
  }
  return result;
}

std::vector<double> to_vec(const Eigen::MatrixXd& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

Eigen::MatrixXd from_vec(const std::vector<double>& v, int rows, int cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

nlohmann::json system_to_json(const ProjectedSystem& sys) {
  nlohmann::json j;
  const int n = static_cast<int>(sys.basis.V.rows());
  const int p = sys.basis.p();
  j["n"] = n;
  j["p"] = p;
  j["V"] = to_vec(sys.basis.V);
  auto& snaps = j["snapshot_inputs"] = nlohmann::json::array();
  for (const auto& mu : sys.basis.snapshot_inputs) {
    snaps.push_back(std::vector<double>(mu.data(), mu.data() + 9));
  }
  for (int q = 0; q < kNumBlocks; ++q) {
    j["reduced_A"].push_back(to_vec(sys.reduced_A[q]));
  }
  j["reduced_b"] = to_vec(sys.reduced_b);
  for (const auto* g : {&sys.riesz, &sys.euclid}) {
    nlohmann::json jg;
    for (int q = 0; q < kNumBlocks; ++q) {
      for (int qp = 0; qp < kNumBlocks; ++qp) {
        jg["AA"].push_back(to_vec(g->AA[q][qp]));
      }
      jg["bA"].push_back(to_vec(g->bA[q]));
    }
    jg["bb"] = g->bb;
    j[g == &sys.riesz ? "riesz" : "euclid"] = std::move(jg);
  }
  return j;
}

ProjectedSystem system_from_json(const nlohmann::json& j) {
  ProjectedSystem sys;
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  sys.basis.V = from_vec(j.at("V").get<std::vector<double>>(), n, p);
  for (const auto& s : j.at("snapshot_inputs")) {
    const auto v = s.get<std::vector<double>>();
    InputPoint mu;
    for (int i = 0; i < 9; ++i) mu[i] = v[i];
    sys.basis.snapshot_inputs.push_back(mu);
  }
  sys.reduced_A.resize(kNumBlocks);
  for (int q = 0; q < kNumBlocks; ++q) {
    sys.reduced_A[q] =
        from_vec(j.at("reduced_A")[q].get<std::vector<double>>(), p, p);
  }
  sys.reduced_b = from_vec(j.at("reduced_b").get<std::vector<double>>(), p, 1);
  for (const char* key : {"riesz", "euclid"}) {
    const auto& jg = j.at(key);
    ResidualGramians g;
    g.AA.assign(kNumBlocks, std::vector<Eigen::MatrixXd>(kNumBlocks));
    g.bA.resize(kNumBlocks);
    for (int q = 0; q < kNumBlocks; ++q) {
      for (int qp = 0; qp < kNumBlocks; ++qp) {
        g.AA[q][qp] = from_vec(
            jg.at("AA")[q * kNumBlocks + qp].get<std::vector<double>>(), p,
            p);
      }
      g.bA[q] =
          from_vec(jg.at("bA")[q].get<std::vector<double>>(), 1, p);
    }
    g.bb = jg.at("bb").get<double>();
    (std::string(key) == "riesz" ? sys.riesz : sys.euclid) = std::move(g);
  }
  return sys;
}

}  // namespace

GreedyResult greedy_build_system(const AffineOperator& op,
                                 const Eigen::VectorXd& b,
                                 const std::vector<InputPoint>& candidates,
                                 const GreedyOptions& opts) {
  return greedy_impl(op, b, candidates, opts);
}

GreedyResult greedy_build_dual(const AffineOperator& op,
                               const std::string& output_id,
                               const std::vector<InputPoint>& candidates,
                               const GreedyOptions& opts) {
  const auto it = op.output_vectors.find(output_id);
  if (it == op.output_vectors.end()) {
    throw std::invalid_argument("unknown output id: " + output_id);
  }
  return greedy_impl(op, -it->second, candidates, opts);
}

ProjectedSystem project_system(const AffineOperator& op,
                               const Eigen::VectorXd& b,
                               const ReducedBasis& basis) {
  Llt k_llt(op.inner_product);
  if (k_llt.info() != Eigen::Success) {
    throw std::runtime_error("inner-product matrix is not SPD");
  }
  return project_with(op, b, basis, k_llt);
}

ReducedModel offline_project(const AffineOperator& op,
                             const ReducedBasis& basis) {
  ReducedModel rm;
  rm.primal = project_system(op, op.rhs, basis);
  rm.n = op.n;
  return rm;
}

void attach_dual(ReducedModel& rm, const AffineOperator& op,
                 const std::string& dual_id, const std::string& output_id,
                 const ReducedBasis& dual_basis) {
  const auto it = op.output_vectors.find(output_id);
  if (it == op.output_vectors.end()) {
    throw std::invalid_argument("unknown output id: " + output_id);
  }
  DualModel dm;
  dm.system = project_system(op, -it->second, dual_basis);
  dm.output_id = output_id;
  dm.cross_A.resize(kNumBlocks);
  for (int q = 0; q < kNumBlocks; ++q) {
    dm.cross_A[q] =
        dual_basis.V.transpose() * (op.components[q] * rm.primal.basis.V);
  }
  dm.cross_f = dual_basis.V.transpose() * op.rhs;
  rm.duals[dual_id] = std::move(dm);
}

Eigen::VectorXd solve_projected(const ProjectedSystem& sys,
                                const InputPoint& mu) {
  check_in_box(mu);
  const int p = sys.basis.p();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int q = 0; q < kNumBlocks; ++q) a += mu[q] * sys.reduced_A[q];
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("reduced system matrix is not SPD");
  }
  return llt.solve(sys.reduced_b);
}

ReducedState solve_reduced(const ReducedModel& rm, const InputPoint& mu) {
  return ReducedState{solve_projected(rm.primal, mu), mu};
}

double residual_norm(const ProjectedSystem& sys, const InputPoint& mu,
                     const Eigen::VectorXd& uhat, Weighting w) {
  const ResidualGramians& g =
      (w == Weighting::Riesz) ? sys.riesz : sys.euclid;
  double quad = 0, lin = 0;
  for (int q = 0; q < kNumBlocks; ++q) {
    for (int qp = 0; qp < kNumBlocks; ++qp) {
      quad += mu[q] * mu[qp] * uhat.dot(g.AA[q][qp] * uhat);
    }
    lin += mu[q] * (g.bA[q] * uhat)(0);
  }
  double value = quad - 2.0 * lin + g.bb;
  const double scale = std::abs(quad) + 2.0 * std::abs(lin) + std::abs(g.bb);
  if (value < 0) {
    if (value < -1e-14 * std::max(1.0, scale)) {
      throw std::runtime_error("residual Gramian produced negative norm");
    }
    value = 0;
  }
  return std::sqrt(value);
}

BoundSet error_bounds(const ReducedModel& rm, const InputPoint& mu,
                      const Eigen::VectorXd& uhat) {
  BoundSet b;
  b.alpha_lb = coercivity_lower_bound(mu);
  b.gamma_ub = continuity_upper_bound(mu);
  b.residual_riesz = residual_norm(rm.primal, mu, uhat, Weighting::Riesz);
  b.residual_euclid = residual_norm(rm.primal, mu, uhat, Weighting::Euclid);
  const double r = b.residual_riesz;
  b.energy_ub = r / std::sqrt(b.alpha_lb);
  b.energy_lb = r / std::sqrt(b.gamma_ub);
  b.x_ub = r / b.alpha_lb;
  b.x_lb = r / b.gamma_ub;
  b.output_ub = r * r / b.alpha_lb;
  b.output_lb = r * r / b.gamma_ub;
  return b;
}

double dual_weighted_residual(const ReducedModel& rm,
                              const std::string& dual_id,
                              const InputPoint& mu) {
  const auto it = rm.duals.find(dual_id);
  if (it == rm.duals.end()) {
    throw std::invalid_argument("unknown dual model id: " + dual_id);
  }
  const DualModel& dm = it->second;
  const Eigen::VectorXd uhat = solve_projected(rm.primal, mu);
  const Eigen::VectorXd yhat = solve_projected(dm.system, mu);
  double rho = -yhat.dot(dm.cross_f);
  for (int q = 0; q < kNumBlocks; ++q) {
    rho += mu[q] * yhat.dot(dm.cross_A[q] * uhat);
  }
  return rho;
}

double output_bound_dual(const ReducedModel& rm, const std::string& dual_id,
                         const InputPoint& mu) {
  const auto it = rm.duals.find(dual_id);
  if (it == rm.duals.end()) {
    throw std::invalid_argument("unknown dual model id: " + dual_id);
  }
  const Eigen::VectorXd uhat = solve_projected(rm.primal, mu);
  const Eigen::VectorXd yhat = solve_projected(it->second.system, mu);
  const double r = residual_norm(rm.primal, mu, uhat, Weighting::Riesz);
  const double rg =
      residual_norm(it->second.system, mu, yhat, Weighting::Riesz);
  return r * rg / coercivity_lower_bound(mu);
}

std::string reduced_model_to_json(const ReducedModel& rm) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = rm.n;
  j["greedy_seed"] = rm.greedy_seed;
  j["primal"] = system_to_json(rm.primal);
  for (const auto& [id, dm] : rm.duals) {
    nlohmann::json jd;
    jd["system"] = system_to_json(dm.system);
    jd["output_id"] = dm.output_id;
    const int py = dm.system.basis.p();
    const int p = rm.primal.basis.p();
    for (int q = 0; q < kNumBlocks; ++q) {
      jd["cross_A"].push_back(to_vec(dm.cross_A[q]));
    }
    jd["cross_f"] = to_vec(dm.cross_f);
    jd["py"] = py;
    jd["p"] = p;
    j["duals"][id] = std::move(jd);
  }
  return j.dump();
}

ReducedModel reduced_model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("unsupported reduced-model schema version");
  }
  ReducedModel rm;
  rm.n = j.at("n").get<int>();
  rm.greedy_seed = j.at("greedy_seed").get<uint64_t>();
  rm.primal = system_from_json(j.at("primal"));
  if (j.contains("duals")) {
    for (const auto& [id, jd] : j.at("duals").items()) {
      DualModel dm;
      dm.system = system_from_json(jd.at("system"));
      dm.output_id = jd.at("output_id").get<std::string>();
      const int py = jd.at("py").get<int>();
      const int p = jd.at("p").get<int>();
      dm.cross_A.resize(kNumBlocks);
      for (int q = 0; q < kNumBlocks; ++q) {
        dm.cross_A[q] =
            from_vec(jd.at("cross_A")[q].get<std::vector<double>>(), py, p);
      }
      dm.cross_f =
          from_vec(jd.at("cross_f").get<std::vector<double>>(), py, 1);
      rm.duals[id] = std::move(dm);
    }
  }
  return rm;
}

}  // namespace romes
