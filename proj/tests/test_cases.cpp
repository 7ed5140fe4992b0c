#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pencil/cases.hpp"
#include "test_util.hpp"

using namespace pencil;
using namespace testutil;

TEST_CASE("built-in pencils satisfy the structural checks") {
  std::vector<double> ts{0.2, 0.9};
  std::vector<cplx> lams{{0, 1}, {1, 2}, {0, -1}, {-0.3, 0.6}};
  for (auto& rc : {example2(), example3(0.0), example3(1.0), example4(1.0),
                   example5(1.0)}) {
    CAPTURE(rc.name);
    CHECK(checkSymmetry(rc.pencil.L, ts, lams).pass);
    CHECK(checkNevanlinna(rc.pencil.L, ts, lams).pass);
    CHECK(checkWeightDomination(rc.pencil, ts, lams).pass);
  }
}

TEST_CASE("excluded points") {
  CHECK(example3(0.0).pencil.excluded.empty());
  REQUIRE(example3(1.0).pencil.excluded.size() == 1);
  CHECK(std::abs(example3(1.0).pencil.excluded[0]) < 1e-12);
  CHECK(example5(1.0).pencil.excluded.size() == 1);
}

TEST_CASE("fourth-order band edge mu*") {
  // mu* solves mu^2 = 4(h/mu - mu); for h = 1 it is ~0.9025
  double ms = example4MuStar(1.0);
  CHECK(ms == doctest::Approx(0.9025).epsilon(1e-3));
  double D = ms * ms + 4.0 * ms - 4.0 / ms;
  CHECK(std::abs(D) < 1e-10);
  // scaling: substituting mu = sqrt(h) nu makes mu* scale like sqrt(h) only
  // for the cubic part; just verify monotonicity in h instead
  CHECK(example4MuStar(2.0) > example4MuStar(1.0));
}

TEST_CASE("closed-form densities: positivity and support") {
  auto rc3 = example3(1.0);
  double edge3 = std::sqrt(1.25);
  for (double mu : {0.0, 0.7, -1.0}) {
    Mat s = rc3.exactDensity(mu);
    CHECK(isPSD(s, 1e-12));
    CHECK(s.norm() > 0.0);
  }
  CHECK(rc3.exactDensity(edge3 + 0.05).norm() == 0.0);
  CHECK(rc3.exactDensity(-edge3 - 0.05).norm() == 0.0);

  auto rc4 = example4(1.0);
  double ms = example4MuStar(1.0);
  // first branch: (-sqrt h, 0) and (sqrt h, inf); second: (mu*, sqrt h)
  for (double mu : {-0.5, -0.05, 1.4, 2.5}) {
    Mat s = rc4.exactDensity(mu);
    CAPTURE(mu);
    CHECK(isPSD(s, 1e-10));
    CHECK(numericalRank(s, 1e-8) == 2);
  }
  for (double mu : {ms + 0.01, 0.95}) {
    Mat s = rc4.exactDensity(mu);
    CAPTURE(mu);
    CHECK(isPSD(s, 1e-10));
    CHECK(numericalRank(s, 1e-8) == 4);
  }
  // gap regions
  CHECK(rc4.exactDensity(0.4).norm() == 0.0);
  CHECK(rc4.exactDensity(-1.5).norm() == 0.0);
}

TEST_CASE("fourth-order density against an independent residue check") {
  // On the overlap region (sqrt h, inf) both pipelines exist:
  // compare the closed form against the periodic route.
  auto rc = example4(1.0);
  auto sys = buildCanonical(rc.pencil);
  for (double mu : {1.5, 2.2}) {
    Mat per = densityPeriodicAt(sys, mu, 1.0, 1.0);
    Mat want = rc.exactDensity(mu);
    CAPTURE(mu);
    CHECK((per - want).norm() / (1.0 + want.norm()) < 1e-6);
  }
  // fourfold stretch
  double ms = example4MuStar(1.0);
  for (double mu : {ms + 0.05, 0.9}) {
    Mat per = densityPeriodicAt(sys, mu, 1.0, 1.0);
    Mat want = rc.exactDensity(mu);
    CAPTURE(mu);
    CHECK((per - want).norm() / (1.0 + want.norm()) < 1e-6);
  }
  // second band of the first branch
  for (double mu : {-0.5, -0.1}) {
    Mat per = densityPeriodicAt(sys, mu, 1.0, 1.0);
    Mat want = rc.exactDensity(mu);
    CAPTURE(mu);
    CHECK((per - want).norm() / (1.0 + want.norm()) < 1e-6);
  }
}

TEST_CASE("first-order system jump kernel") {
  // the kernel formula is symmetric and decays; sanity against quadrature
  SmoothFn f = SmoothFn::gaussian(
      (Eigen::Vector2cd() << 0.0, 1.0).finished(), 0.0, 0.6);
  Vec v0 = example5JumpKernelApply(1.0, f, 0.0, -8.0, 8.0);
  CHECK(std::abs(v0(0)) < 1e-12);  // first component annihilated
  CHECK(v0(1).real() > 0.0);
  // decay away from the bump
  Vec vfar = example5JumpKernelApply(1.0, f, 5.0, -8.0, 8.0);
  CHECK(vfar.norm() < v0.norm() * 0.1);
}

TEST_CASE("case lookup by name") {
  CHECK(caseByName("example3", 1.0).name == example3(1.0).name);
  CHECK(caseByName("example5", 0.5).name == example5(0.5).name);
  CHECK_THROWS(caseByName("no-such-case", 1.0));
}
