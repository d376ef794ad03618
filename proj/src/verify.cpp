#include "evap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "evap/energy_monitor.hpp"
#include "evap/interface_coupling.hpp"
#include "evap/presets.hpp"
#include "evap/sbp.hpp"
#include "evap/simulation.hpp"

namespace evap {

namespace {

using Vec = Vector<double>;

PropertyResult result(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual <= tol, residual, tol, std::move(detail)};
}

std::vector<std::pair<int, Eigen::Index>> operator_grid() {
  std::vector<std::pair<int, Eigen::Index>> out;
  for (int order : {2, 4, 6})
    for (Eigen::Index n : {static_cast<Eigen::Index>(minimum_points(order)), Eigen::Index(33),
                           Eigen::Index(101)})
      out.emplace_back(order, n);
  return out;
}

PropertyResult sbp_identity(const VerifyOptions& o) {
  double worst = 0;
  std::string where;
  for (auto [order, n] : operator_grid()) {
    auto op = build_unit_sbp<double>(order, n);
    if (o.inject_q_perturbation) op = op.with_perturbed_q(0, 1, 1e-3);
    const double r = sbp_property_residual(op);
    if (r >= worst) {
      worst = r;
      where = "order " + std::to_string(order) + ", n " + std::to_string(n);
    }
  }
  return result("sbp_identity", worst, 1e-13, "worst at " + where);
}

PropertyResult sbp_accuracy(const VerifyOptions& o) {
  double worst = 0;
  for (auto [order, n] : operator_grid()) {
    auto op = build_unit_sbp<double>(order, n);
    if (o.inject_q_perturbation) op = op.with_perturbed_q(0, 1, 1e-3);
    const Vec x = op.grid();
    const Eigen::Index r = order == 2 ? 1 : order;  // closure rows per side
    for (int k = 0; k <= order; ++k) {
      const Vec v = x.array().pow(k).matrix();
      const Vec exact = k == 0 ? Vec::Zero(n) : Vec((k * x.array().pow(k - 1)).matrix());
      const Vec err = (apply_derivative(op, v) - exact).cwiseAbs();
      const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
      if (n > 2 * r) worst = std::max(worst, err.segment(r, n - 2 * r).maxCoeff() / scale);
      if (k <= order / 2) {
        worst = std::max(worst, err.head(r).maxCoeff() / scale);
        worst = std::max(worst, err.tail(r).maxCoeff() / scale);
      }
    }
  }
  return result("sbp_accuracy", worst, 1e-10);
}

struct RandomSetting {
  InterfaceSample<double> s;
  PhaseCoefficients<double> c;
  double gamma, t_delta, rho_v, h_lv, sigma, u_tilde, c1;
};

RandomSetting random_setting(std::mt19937_64& rng, int sign) {
  std::uniform_real_distribution<double> pos(0.2, 2.0), val(-2.0, 2.0), gam(0.05, 1.0);
  RandomSetting r;
  r.c = {pos(rng), pos(rng), pos(rng), pos(rng), pos(rng), pos(rng)};
  r.gamma = gam(rng);
  r.t_delta = val(rng);
  r.rho_v = pos(rng);
  r.h_lv = pos(rng);
  r.sigma = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
  r.c1 = 2 * r.t_delta * r.rho_v * r.h_lv;
  r.s.T_v = val(rng);
  r.s.T_l = val(rng);
  r.s.dT_v = val(rng);
  r.s.dT_l = val(rng);
  r.u_tilde = mesh_velocity(r.c.k_v * r.s.dT_v / r.c.j_v, r.c.k_l * r.s.dT_l / r.c.j_l, r.rho_v,
                            r.h_lv);
  const double a_v = sign * pos(rng);
  r.s.a_v = a_v;
  r.s.a_l = r.gamma * a_v;
  return r;
}

PenaltySet<double> penalties_for(const RandomSetting& r, bool flip) {
  auto p = select_penalties(r.s.a_v, r.c.beta_v, r.c.beta_l, r.gamma, r.c.k_v, r.c.k_l, r.c.j_v,
                            r.c.j_l, r.sigma);
  if (flip) {
    p.sigma_v1 = -p.sigma_v1;
    p.sigma_l1 = -p.sigma_l1;
  }
  return p;
}

PropertyResult closed_form(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed);
  double worst = 0;
  for (int sign : {-1, 1, 0}) {
    for (long i = 0; i < o.samples; ++i) {
      const auto r = random_setting(rng, sign);
      const auto p = penalties_for(r, o.inject_penalty_sign_flip);
      const double direct = it_direct(r.s, r.c) + sat_direct(r.s, p, r.t_delta);
      const double closed =
          itsat_closed_form(r.s.T_v, r.s.T_l, r.t_delta, r.s.a_v, r.s.a_l, r.c.beta_v,
                            r.c.beta_l, r.u_tilde, r.c1, r.sigma);
      worst = std::max(worst, std::abs(direct - closed) / std::max(1.0, std::abs(closed)));
    }
  }
  return result("closed_form_equivalence", worst, 1e-10,
                std::to_string(3 * o.samples) + " random states, three sign regimes");
}

PropertyResult pval_split(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 1);
  double worst = 0;
  for (long i = 0; i < o.samples; ++i) {
    const auto r = random_setting(rng, (i % 3) - 1);
    const auto p = penalties_for(r, false);
    const auto g = grad_pval_diagnostics(r.s, p, r.c, r.t_delta);
    const double parts = g.pval_coupling + g.pval_vapor + g.pval_liquid;
    worst = std::max(worst, std::abs(g.pval - parts) / std::max(1.0, std::abs(g.pval)));
  }
  return result("pval_decomposition", worst, 1e-12);
}

PropertyResult penalty_invariants(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 2);
  long bad = 0;
  for (long i = 0; i < o.samples; ++i) {
    const auto r = random_setting(rng, (i % 3) - 1);
    const auto p = penalties_for(r, o.inject_penalty_sign_flip);
    const double a = r.s.a_v;
    bool ok = p.sigma_v2 == -r.sigma / 2 && p.sigma_l2 == p.sigma_v2 && p.sigma_v2 <= 0 &&
              p.sigma_v3 == -r.c.k_v / r.c.j_v && p.sigma_l3 == r.c.k_l / r.c.j_l &&
              p.sigma_v1 <= 0 && p.sigma_l1 <= 0;
    if (a == 0) ok = ok && p.sigma_v1 == 0 && p.sigma_l1 == 0;
    else ok = ok && ((p.sigma_v1 != 0) != (p.sigma_l1 != 0));
    if (!ok) ++bad;
  }
  return result("penalty_invariants", static_cast<double>(bad), 0.0,
                std::to_string(bad) + " of " + std::to_string(o.samples) + " samples violate");
}

PropertyResult gcl(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 3);
  std::uniform_real_distribution<double> pos(0.1, 0.9), vel(-5.0, 5.0);
  double worst = 0;
  for (int order : {2, 4, 6}) {
    for (Eigen::Index n : {Eigen::Index(minimum_points(order)), Eigen::Index(65)}) {
      const auto op_v = build_unit_sbp<double>(order, n);
      const auto op_l = build_unit_sbp<double>(order, n + 3);
      for (int i = 0; i < 50; ++i) {
        const auto mesh = build_mesh(0.0, 1.0, pos(rng), n, n + 3);
        const auto [rv, rl] = gcl_residual(mesh, vel(rng), op_v, op_l);
        worst = std::max({worst, rv, rl});
      }
    }
  }
  return result("gcl", worst, 1e-12);
}

PropertyResult steady_state(const VerifyOptions&) {
  auto p = preset("steady");
  p.solver.n_v = 17;
  p.solver.n_l = 17;
  const auto model = Model<double>::build(p);
  const auto start = initial_state(p);
  auto state = start;
  const double dt = stable_dt(state, model);
  double drift = 0;
  for (int i = 0; i < 1000; ++i) {
    state = rk4_step(state, dt, model);
    drift = std::max({drift, (state.T_v - start.T_v).cwiseAbs().maxCoeff(),
                      (state.T_l - start.T_l).cwiseAbs().maxCoeff(),
                      std::abs(state.x_delta - start.x_delta)});
  }
  return result("steady_state", drift, 1e-12, "1000 RK4 steps");
}

PropertyResult regime_grid(const VerifyOptions&) {
  long bad = 0;
  for (double a : {-1.0, 0.0, 1.0})
    for (double u : {-1.0, 0.0, 1.0}) {
      const bool expect = a < 0 && u >= 0;
      if ((classify_strong_regime(a, u) == StrongRegime::Dissipative) != expect) ++bad;
    }
  return result("regime_classifier", static_cast<double>(bad), 0.0, "3x3 sign grid");
}

PropertyResult energy_identity(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int order : {2, 4, 6}) {
    Problem<double> p;
    p.vapor = {1.0, 1.0, 0.3};
    p.liquid = {2.0, 1.5, 0.2};
    p.t_delta = 1.0;
    p.h_lv = 2.0;
    p.x0 = 0;
    p.xn = 1;
    p.x_delta = 0.4;
    p.solver.sbp_order = order;
    p.solver.n_v = p.solver.n_l = 25;
    p.solver.outer_bc_v = 1.3;
    p.solver.outer_bc_l = 0.7;
    for (int i = 0; i < 100; ++i) {
      p.solver.u_v = u(rng);
      const auto model = Model<double>::build(p);
      SimState<double> s{Vec::Random(25).array() + 1.0, Vec::Random(25).array() + 1.0,
                         0.4 + 0.2 * u(rng), 0.0};
      const auto led = audit_step(s, assemble_rhs(s, model), model);
      worst = std::max(worst, led.identity_residual);
    }
  }
  return result("energy_identity", worst, kIdentityTolerance);
}

}  // namespace

std::vector<PropertyResult> run_verification(const VerifyOptions& opts) {
  std::srand(static_cast<unsigned>(opts.seed));
  return {sbp_identity(opts),  sbp_accuracy(opts),    penalty_invariants(opts),
          closed_form(opts),   pval_split(opts),      gcl(opts),
          energy_identity(opts), steady_state(opts), regime_grid(opts)};
}

}  // namespace evap
