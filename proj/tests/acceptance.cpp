// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs the full-scale configuration (60 divisions per side,
// n = 3660) end to end through the library API.
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <random>
#include <vector>

#include "romes/pipeline.hpp"
#include "romes/sample.hpp"
#include "romes/surrogate.hpp"

using namespace romes;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

SurrogateSpec gp_spec(IndicatorKind ind, ErrorKind err) {
  SurrogateSpec spec;
  spec.indicator.kind = ind;
  spec.transform = Transform::Log;
  spec.error.kind = err;
  spec.variance = VarianceMode::NoiseOnly;
  spec.regressor = RegressorKind::Gp;
  return spec;
}

// ------------------------------------------------------------------ 9, 10

void criterion_9() {
  bool ok = true;
  std::string detail;

  // (a) GP posterior against the dense-formula oracle, N = 5
  {
    TrainingSet ts;
    ts.x = Eigen::MatrixXd(5, 1);
    ts.x << -0.9, -0.4, 0.0, 0.3, 0.8;
    ts.y = Eigen::VectorXd(5);
    ts.y << 1.2, 0.7, -0.1, 0.4, 1.5;
    const double l2 = 0.3, sigma2 = 0.01;
    const GPModel m = gp_fit_fixed(ts, l2, sigma2);
    const double offset = ts.y.mean();
    Eigen::VectorXd yc = ts.y.array() - offset;
    const double scale = std::sqrt(yc.squaredNorm() / 4.0);
    yc /= scale;
    Eigen::MatrixXd k(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        k(i, j) =
            std::exp(-(ts.x.row(i) - ts.x.row(j)).squaredNorm() / (2.0 * l2));
      }
    }
    k.diagonal().array() += sigma2 + m.jitter;
    const Eigen::MatrixXd kinv = k.inverse();
    double worst = 0;
    for (double xq : {-1.0, -0.2, 0.15, 0.6, 1.3}) {
      Eigen::VectorXd xs(1), ks(5);
      xs[0] = xq;
      for (int i = 0; i < 5; ++i) {
        ks[i] = std::exp(-(ts.x.row(i).transpose() - xs).squaredNorm() /
                         (2.0 * l2));
      }
      const NormalPrediction p = m.predict(xs);
      worst = std::max(
          worst, std::abs(p.mean - (offset + scale * ks.dot(kinv * yc))));
      worst = std::max(worst,
                       std::abs(p.var_mean - scale * scale *
                                                 (1.0 - ks.dot(kinv * ks))));
    }
    ok = ok && worst < 1e-10;
    detail += fmt("gp-oracle %.1e", worst);
  }

  // (b) noiseless GP interpolates its training targets
  {
    TrainingSet ts;
    ts.x = Eigen::MatrixXd(4, 1);
    ts.x << -0.8, -0.3, 0.2, 0.7;
    ts.y = Eigen::VectorXd(4);
    ts.y << 2.0, -1.0, 0.5, 3.0;
    const GPModel m = gp_fit_fixed(ts, 0.5, 1e-12);
    double worst = 0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(
          worst, std::abs(m.predict(ts.x.row(i).transpose()).mean - ts.y[i]));
    }
    ok = ok && worst < 1e-6;
    detail += fmt("  interp %.1e", worst);
  }

  // (c) coverage on synthetic Gaussian data, 2000 validation points
  {
    SampleTable table;
    table.indicator_columns = {"log_res_euclid"};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rho_dist(-4.0, 0.0);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 400 + 2000; ++i) {
      SampleRow row;
      const double rho = rho_dist(rng);
      row.indicators["log_res_euclid"] = rho;
      row.err_energy = std::exp(rho + 0.5 + 0.3 * gauss(rng));
      row.mu = InputPoint::Constant(1.0);
      row.split = i < 400 ? "train" : "validation";
      table.rows.push_back(row);
    }
    const ErrorSurrogate s = train_surrogate(
        table, gp_spec(IndicatorKind::LogResidualEuclid,
                       ErrorKind::EnergyStateError));
    double worst = 0;
    for (const CoverageEntry& e :
         validate_confidence(s, table, {0.5, 0.9, 0.95})) {
      worst = std::max(worst, std::abs(e.observed_noise_only - e.omega));
    }
    ok = ok && worst <= 0.03;
    detail += fmt("  coverage %.3f", worst);
  }

  // (d) RVM discards the superfluous polynomial orders on linear data
  {
    const int n = 40;
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = -0.6 + 1.5 * i / (n - 1.0);
      y[i] = 1.0 + 2.0 * x(i, 0);
    }
    RvmConfig cfg;
    cfg.estimate_noise = false;
    cfg.fixed_sigma2 = 1e-6;
    const RVMModel m = rvm_train({x, y}, cfg);
    bool pruned = true;
    for (int k : m.active) pruned = pruned && k <= 1;
    ok = ok && pruned;
    detail += fmt("  rvm-prune %s", pruned ? "yes" : "no");
  }

  // (e) RVM equals the induced-kernel GP (weight-space identity)
  {
    const int n = 10;
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = -0.8 + 1.6 * i / (n - 1.0);
      y[i] = std::sin(2.0 * x(i, 0)) + 0.3 * x(i, 0);
    }
    RvmConfig cfg;
    cfg.estimate_noise = false;
    cfg.fixed_sigma2 = 0.04;
    cfg.max_sweeps = 0;
    const RVMModel m = rvm_train({x, y}, cfg);
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const double offset = y.mean();
    Eigen::VectorXd yc = y.array() - offset;
    const double scale = std::sqrt(yc.squaredNorm() / (n - 1.0));
    yc /= scale;
    auto phi_at = [&](double xv) {
      LVec p(5);
      for (int k = 0; k < 5; ++k) p[k] = legendre_poly(k, xv);
      return p;
    };
    LMat kmat(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        kmat(i, j) = phi_at(x(i, 0)).dot(phi_at(x(j, 0))) * 1e4L;
      }
      kmat(i, i) += 0.04L;
    }
    const LMat kinv = kmat.inverse();
    const LVec ycl = yc.cast<long double>();
    double worst = 0;
    for (double xq : {-0.6, -0.1, 0.3, 0.75}) {
      LVec ks(n);
      for (int i = 0; i < n; ++i) {
        ks[i] = phi_at(xq).dot(phi_at(x(i, 0))) * 1e4L;
      }
      Eigen::VectorXd xs(1);
      xs[0] = xq;
      const NormalPrediction p = rvm_predict(m, xs);
      const double mean_ref =
          offset + scale * static_cast<double>(ks.dot(kinv * ycl));
      worst = std::max(worst, std::abs(p.mean - mean_ref) /
                                  std::max(1.0, std::abs(mean_ref)));
    }
    ok = ok && worst < 1e-8;
    detail += fmt("  rvm-gp %.1e", worst);
  }

  report(9, ok, "regression oracles: " + detail);
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  const TriangularMesh mesh = build_mesh(60);
  const AffineOperator op = assemble_affine_components(mesh);
  const uint64_t greedy_seed = 3;
  const std::vector<InputPoint> candidates =
      sample_parameter_box(100, greedy_seed);

  // ---- criterion 1: greedy basis sizes at the two pinned tolerances
  const GreedyResult greedy_coarse =
      greedy_build(op, candidates, GreedyOptions{1.0, 200, greedy_seed});
  const int p_coarse = greedy_coarse.basis.p();
  const GreedyResult greedy_fine =
      greedy_build(op, candidates, GreedyOptions{1e-3, 200, greedy_seed});
  const int p_fine = greedy_fine.basis.p();
  report(1, p_coarse >= 8 && p_coarse <= 15 && p_fine >= 45 && p_fine <= 80,
         fmt("greedy sizes: tol 1.0 -> p=%d (band [8,15]), tol 1e-3 -> p=%d "
             "(band [45,80])",
             p_coarse, p_fine));

  // ---- study model: fixed 18-vector basis, 2000-point sample
  const GreedyResult greedy_study =
      greedy_build(op, candidates, GreedyOptions{1e-8, 18, greedy_seed});
  const ReducedModel rm_study = offline_project(op, greedy_study.basis);
  const std::vector<InputPoint> points = sample_parameter_box(2000, 41);
  const SampleTable table =
      collect_samples(op, rm_study, points, CollectOptions{100, 4});

  // ---- criterion 2: deterministic bound rigor on every validation row
  {
    int rows = 0, violations = 0;
    double min_compliant = 1e300;
    for (const SampleRow* row : table.split_rows("validation")) {
      ++rows;
      const BoundSet& b = row->bounds;
      if (!(b.energy_ub >= row->err_energy)) ++violations;
      if (!(b.energy_lb <= row->err_energy)) ++violations;
      if (!(b.x_ub >= row->err_xnorm)) ++violations;
      if (!(b.x_lb <= row->err_xnorm)) ++violations;
      if (!(b.output_ub >= row->err_output_compliant)) ++violations;
      if (!(b.output_lb <= row->err_output_compliant)) ++violations;
      if (!(row->err_output_compliant >= 0)) ++violations;
      min_compliant = std::min(min_compliant, row->err_output_compliant);
    }
    report(2, rows == 1900 && violations == 0,
           fmt("bound rigor: %d violations on %d rows, min compliant error "
               "%.2e",
               violations, rows, min_compliant));
  }

  // ---- criterion 3: reduced-basis bound effectivity band
  {
    const StatSummary eff = summarize(rb_bound_effectivities(table));
    report(3, eff.mean >= 1.5 && eff.mean <= 10.0 && eff.max <= 15.0,
           fmt("bound effectivity: mean %.3f (band [1.5,10]), max %.3f (cap "
               "15)",
               eff.mean, eff.max));
  }

  const SurrogateSpec energy_spec =
      gp_spec(IndicatorKind::LogResidualEuclid, ErrorKind::EnergyStateError);

  // ---- criterion 4: surrogate effectivity at and above the base level
  {
    bool ok = true;
    std::string detail = "surrogate effectivity:";
    for (int n : {35, 95}) {
      const ErrorSurrogate s = train_surrogate(table, energy_spec, n);
      const double m05 = mean_of(effectivities(s, table, 0.5));
      const double m09 = mean_of(effectivities(s, table, 0.9));
      ok = ok && m05 >= 0.8 && m05 <= 1.3 && m09 > m05 && m09 - m05 < 1.0;
      detail += fmt(" N=%d mean(0.5)=%.3f mean(0.9)=%.3f", n, m05, m09);
    }
    report(4, ok, detail + "  (bands [0.8,1.3], gap (0,1))");
  }

  // ---- criterion 5: confidence-interval coverage at N = 95
  {
    const ErrorSurrogate s = train_surrogate(table, energy_spec, 95);
    double worst = 0;
    std::string detail = "coverage N=95:";
    for (const CoverageEntry& e :
         validate_confidence(s, table, {0.5, 0.9, 0.95})) {
      worst = std::max(worst, std::abs(e.observed_noise_only - e.omega));
      detail += fmt(" c(%.2f)=%.3f", e.omega, e.observed_noise_only);
    }
    report(5, worst <= 0.07, detail + fmt("  worst dev %.3f (cap 0.07)", worst));
  }

  // ---- criterion 6: overestimation frequency matches the rigor level
  {
    const ErrorSurrogate s = train_surrogate(table, energy_spec, 100);
    const double c05 = overestimation_frequency(s, table, 0.5);
    const double c09 = overestimation_frequency(s, table, 0.9);
    report(6,
           std::abs(c05 - 0.5) <= 0.05 && std::abs(c09 - 0.9) <= 0.05,
           fmt("probabilistic rigor: c_val(0.5)=%.3f c_val(0.9)=%.3f (caps "
               "0.05)",
               c05, c09));
  }

  // ---- criterion 7: output correction beats the training-free baselines
  {
    bool ok = true;
    std::string detail = "output correction:";
    const SurrogateSpec compliant_spec = gp_spec(
        IndicatorKind::LogResidualEuclid, ErrorKind::CompliantOutputError);
    SurrogateSpec multifid;
    multifid.indicator.kind = IndicatorKind::SystemInputs;
    multifid.transform = Transform::Identity;
    multifid.error.kind = ErrorKind::CompliantOutputError;
    multifid.variance = VarianceMode::NoiseOnly;
    multifid.regressor = RegressorKind::Gp;
    for (int n : {20, 35, 50, 75, 100}) {
      const ErrorSurrogate s = train_surrogate(table, compliant_spec, n);
      const StatSummary imp = summarize(expected_improvements(s, table));
      const ErrorSurrogate mf = train_surrogate(table, multifid, n);
      const double mf_mean = mean_of(expected_improvements(mf, table));
      ok = ok && imp.mean <= 0.5 && imp.median <= 0.3 && mf_mean > 1.0;
      detail += fmt(" N=%d I=%.3f/%.3f mf=%.2f", n, imp.mean, imp.median,
                    mf_mean);
    }
    const double uni = mean_of(uniform_baseline_improvements(table));
    ok = ok && uni > 1.0;
    report(7, ok,
           detail + fmt("  uniform=%.2f  (caps 0.5/0.3, baselines > 1)", uni));
  }

  // ---- criterion 8: dual-weighted-residual correction at two fidelities
  {
    ReducedModel rm_dual = offline_project(op, greedy_coarse.basis);
    struct DualCase {
      const char* id;
      const char* output;
      double tol;
    };
    const std::vector<DualCase> cases = {{"p1_lo", "point_1", 1.0},
                                         {"p2_lo", "point_2", 1.0},
                                         {"p1_hi", "point_1", 0.1},
                                         {"p2_hi", "point_2", 0.1}};
    std::string detail = "dual correction:";
    for (const DualCase& d : cases) {
      const GreedyResult g = greedy_build_dual(
          op, d.output, candidates, GreedyOptions{d.tol, 100, greedy_seed + 1});
      attach_dual(rm_dual, op, d.id, d.output, g.basis);
      detail += fmt(" %s p=%d", d.id, g.basis.p());
    }
    const std::vector<InputPoint> dual_points = sample_parameter_box(500, 41);
    const SampleTable dual_table =
        collect_samples(op, rm_dual, dual_points, CollectOptions{100, 4});

    bool ok = true;
    for (const DualCase& d : cases) {
      SurrogateSpec spec;
      spec.indicator.kind = IndicatorKind::DualWeightedResidual;
      spec.indicator.dual_id = d.id;
      spec.transform = Transform::Identity;
      spec.error.kind = ErrorKind::OutputError;
      spec.error.output_id = d.output;
      spec.variance = VarianceMode::NoiseOnly;
      spec.regressor = RegressorKind::Rvm;
      const ErrorSurrogate s = train_surrogate(dual_table, spec, 100);
      const StatSummary imp = summarize(expected_improvements(s, dual_table));
      const bool hi = d.tol < 0.5;
      const bool case_ok =
          hi ? (imp.mean <= 0.05 && imp.median <= 0.05) : (imp.median >= 0.3);
      ok = ok && case_ok;
      detail += fmt("  %s I=%.3f/%.3f%s", d.id, imp.mean, imp.median,
                    case_ok ? "" : "(!)");
    }
    report(8, ok,
           detail + "  (hi: mean,median <= 0.05; lo: median >= 0.3)");
  }

  criterion_9();

  // ---- criterion 10: offline/online equivalence
  {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(kParamLo, kParamHi);
    std::normal_distribution<double> gauss;
    Eigen::SimplicialLLT<SpMat> kfac(op.inner_product);
    const int p = rm_study.primal.basis.p();
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      InputPoint mu;
      for (int i = 0; i < 9; ++i) mu[i] = dist(rng);
      Eigen::VectorXd uhat(p);
      for (int i = 0; i < p; ++i) uhat[i] = gauss(rng);
      const Eigen::VectorXd r =
          assemble_full(op, mu) * (rm_study.primal.basis.V * uhat) - op.rhs;
      const double direct_riesz = std::sqrt(r.dot(kfac.solve(r)));
      const double direct_euclid = r.norm();
      worst = std::max(
          worst,
          std::abs(residual_norm(rm_study.primal, mu, uhat, Weighting::Riesz) -
                   direct_riesz) /
              direct_riesz);
      worst = std::max(
          worst,
          std::abs(residual_norm(rm_study.primal, mu, uhat,
                                 Weighting::Euclid) -
                   direct_euclid) /
              direct_euclid);
    }

    // full-space basis reproduces the high-fidelity solution
    const TriangularMesh small_mesh = build_mesh(12);
    const AffineOperator small_op = assemble_affine_components(small_mesh);
    ReducedBasis full;
    full.V = Eigen::MatrixXd::Identity(small_op.n, small_op.n);
    const ProjectedSystem sys = project_system(small_op, small_op.rhs, full);
    double worst_full = 0;
    for (int trial = 0; trial < 5; ++trial) {
      InputPoint mu;
      for (int i = 0; i < 9; ++i) mu[i] = dist(rng);
      const Eigen::VectorXd u = solve_hifi(small_op, mu);
      worst_full = std::max(
          worst_full, (solve_projected(sys, mu) - u).norm() / u.norm());
    }
    report(10, worst < 1e-8 && worst_full < 1e-8,
           fmt("offline/online equivalence: residual dev %.1e, full-space dev "
               "%.1e (caps 1e-8)",
               worst, worst_full));
  }

  std::printf("%d of 10 criteria passed in %.1f s\n", 10 - g_failures,
              elapsed());
  return g_failures == 0 ? 0 : 1;
}
