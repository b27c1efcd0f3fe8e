#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "martlab/models.hpp"
#include "martlab/quadvar.hpp"
#include "martlab/stats.hpp"

using namespace martlab;

namespace {

PathRecord synthetic_jump_path() {
  PathRecord p;
  p.times = {0.0, 1.0, 2.0, 3.0};
  p.cont_values = {0.0, 1.0, -1.0, 2.0};
  p.values = {0.0, 1.6, -1.2, 1.8};
  p.jumps = {{0.5, 0.6}, {1.5, -0.8}};
  p.stop_time = 3.0;
  return p;
}

}  // namespace

TEST_CASE("predictable quadratic variation closed forms") {
  ModelSpec d = ModelSpec::jump_diffusion_two_sided(1.0, 2.0, 1.0, 10.0, 10.0);
  PathRecord p = synthetic_jump_path();
  QVBreakdown qv = predictable_qv(p, d);
  // sigma^2 t = 3 and rho K^2 t / 3 = 2, both deterministic in t.
  CHECK(qv.qv_cont == 3.0);
  CHECK(qv.qv_jump_pred == 2.0);
  CHECK(qv.qv_pred() == 5.0);

  ModelSpec walk = ModelSpec::random_walk_upper(3.0);
  PathRecord w;
  w.times = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  w.values = {0.0, 1.0, 0.0, 1.0, 2.0, 1.0, 2.0, 3.0};
  w.cont_values.assign(8, 0.0);
  for (int i = 1; i <= 7; ++i) {
    w.jumps.push_back({static_cast<double>(i), w.values[i] - w.values[i - 1]});
  }
  w.stop_time = 7.0;
  QVBreakdown wq = predictable_qv(w, walk);
  CHECK(wq.qv_cont == 0.0);
  CHECK(wq.qv_jump_pred == 7.0);
  CHECK(optional_qv(w).qv_opt() == 7.0);

  DiscrepancyResult wl = discrepancy(w, walk);
  CHECK(wl.terminal == 0.0);  // each atom nets 1 - 1 exactly
  CHECK(wl.sup_abs == 0.0);
}

TEST_CASE("optional quadratic variation sums grid increments and jumps") {
  PathRecord p = synthetic_jump_path();
  QVBreakdown qv = optional_qv(p);
  CHECK(qv.qv_opt_cont == doctest::Approx(14.0).epsilon(1e-14));
  CHECK(qv.qv_jump_opt == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(qv.qv_opt() == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("long increment sums stay exact") {
  PathRecord p;
  const int n = 100000;
  p.times.reserve(n + 1);
  p.cont_values.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    p.times.push_back(1e-3 * i);
    p.cont_values.push_back(1e-3 * i);
  }
  p.values = p.cont_values;
  p.stop_time = p.times.back();
  // n increments of 1e-3: realized QV is exactly n * 1e-6.
  CHECK(optional_qv(p).qv_opt_cont ==
        doctest::Approx(n * 1e-6).epsilon(1e-12));
}

TEST_CASE("continuous models carry no bracket discrepancy") {
  ModelSpec a = ModelSpec::brownian_upper(1.0);
  PathRecord p = generate_path(a, Seed{21, 0}, 1e-3);
  DiscrepancyResult l = discrepancy(p, a);
  CHECK(l.terminal == 0.0);
  CHECK(l.sup_abs == 0.0);
}

TEST_CASE("compensated Poisson discrepancy equals the process itself") {
  ModelSpec c = ModelSpec::compensated_poisson_upper(1.0, 1.0);
  PathRecord p = generate_path(c, Seed{22, 5}, 1e-2);
  DiscrepancyResult l = discrepancy(p, c);

  // L_t = N_t - rho t = M_t for unit jumps, so both the terminal value and
  // the running sup must match a direct reconstruction from the jumps.
  double terminal = static_cast<double>(p.jumps.size()) - p.stop_time;
  CHECK(l.terminal == doctest::Approx(terminal).epsilon(1e-12));

  double sup = std::abs(terminal);
  double count = 0.0;
  for (const Jump& j : p.jumps) {
    sup = std::max(sup, std::abs(count - j.time));  // just before the jump
    count += 1.0;
    sup = std::max(sup, std::abs(count - j.time));  // just after
  }
  CHECK(l.sup_abs == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("jump diffusion discrepancy is centered") {
  ModelSpec d = ModelSpec::jump_diffusion_two_sided(1.0, 2.0, 1.0, 1.0, 1.0);
  MeanAccumulator term;
  for (std::size_t i = 0; i < 300; ++i) {
    PathRecord p = generate_path(d, Seed{23, i}, 1e-2);
    term.add(discrepancy(p, d).terminal);
  }
  CHECK(std::abs(term.mean()) < 3.0 * term.std_error() + 1e-3);
}

TEST_CASE("quadratic variation validation") {
  ModelSpec a = ModelSpec::brownian_upper(1.0);
  PathRecord p = synthetic_jump_path();
  CHECK_THROWS_AS(predictable_qv(p, a), std::invalid_argument);

  ModelSpec d = ModelSpec::jump_diffusion_two_sided(1.0, 2.0, 1.0, 10.0, 10.0);
  PathRecord big = synthetic_jump_path();
  big.jumps[0].size = 1.5;  // beyond the stated bound K = 1
  CHECK_THROWS_AS(predictable_qv(big, d), std::invalid_argument);
}
