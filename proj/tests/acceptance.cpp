// Acceptance suite: end-to-end checks against closed-form references and the
// structural identities of the theory.  Prints one PASS/FAIL line per
// criterion and exits nonzero if any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>

#include "pencil/cases.hpp"
#include "test_util.hpp"

using namespace pencil;
using namespace testutil;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// singular values above an absolute floor
int rankAbs(const Mat& A, double floor_ = 1e-6) {
  Eigen::JacobiSVD<Mat> svd(A);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > floor_) ++r;
  return r;
}

// ---------------------------------------------------------------------------
// 1. First-order scalar reference problem: Stieltjes-inversion density sweep
//    against the closed form, h in {0, 1}, grid step 0.01 over (-1.2, 1.2).
// ---------------------------------------------------------------------------
Result criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worstIn = 0.0, worstOut = 0.0;
  for (double h : {0.0, 1.0}) {
    auto rc = example3(h);
    auto sys = buildCanonical(rc.pencil);
    auto Mfun = [&sys](cplx lam) { return coPeriodic(sys, lam, 1.0, 1.0); };
    double B = std::sqrt(h + 0.25);  // band edge
    for (int i = 1; i < 240; ++i) {
      double mu = -1.2 + 0.01 * i;
      if (std::abs(std::abs(mu) - B) < 0.05 - 1e-12) continue;  // 5-step buffer
      Mat got = densityStieltjesAt(Mfun, mu);  // ladder floor 2.5e-4
      if (std::abs(mu) < B) {
        Mat want = rc.exactDensity(mu);
        double rel = (got - want).norm() / want.norm();
        worstIn = std::max(worstIn, rel);
        if (rel > 1e-3) ok = false;
      } else {
        worstOut = std::max(worstOut, got.norm());
        if (got.norm() > 1e-4) ok = false;
      }
    }
  }
  double secs = seconds(t0);
  if (secs > 60.0) ok = false;
  return {ok, fmt("in-band rel %.2e (<=1e-3), outside norm %.2e (<=1e-4), "
                  "%.1f s (<=60)",
                  worstIn, worstOut, secs)};
}

// ---------------------------------------------------------------------------
// 2. Dim-2 first-order system, h = 1: spectral gap endpoints, the point mass
//    at 0, and the partial expansion over (-0.1, 0.1) against the explicit
//    jump kernel diag(0, 1/2) int exp(-|t-s|) f(s) ds.
// ---------------------------------------------------------------------------
Result criterion2() {
  auto rc = example5(1.0);
  auto sys = buildCanonical(rc.pencil);
  bool ok = true;

  auto densNorm = [&](double mu) -> double {
    try {
      return densityPeriodicAt(sys, mu, 1.0, 1.0).norm();
    } catch (const std::exception&) {
      return -1.0;  // band-edge collision: unresolved point
    }
  };
  // walk outward from inside the gap until the density switches on
  auto edgeScan = [&](double from, double dir) {
    double lastZero = from;
    for (double mu = from; std::abs(mu) < 2.0; mu += dir * 0.005) {
      double n = densNorm(mu);
      if (n < 0.0) continue;
      if (n > 1e-3) return 0.5 * (lastZero + mu);
      lastZero = mu;
    }
    return 2.0 * dir;
  };
  double eHi = edgeScan(0.1, 1.0), eLo = edgeScan(-0.1, -1.0);
  if (std::abs(eHi - 1.0) > 0.02 || std::abs(eLo + 1.0) > 0.02) ok = false;

  auto Mfun = [&sys](cplx lam) { return coPeriodic(sys, lam, 1.0, 1.0); };
  Mat J;
  bool found = detectJump(Mfun, 0.0, J);
  Mat wantJ(2, 2);
  wantJ << 0, 0, 0, 0.5;
  double jerr = found ? (J - wantJ).cwiseAbs().maxCoeff() : 1.0;
  if (jerr > 1e-3) ok = false;

  // partial expansion over (-0.1, 0.1): the window holds only the atom at 0
  // (the absolutely continuous density vanishes inside the gap)
  if (densNorm(0.05) > 1e-8 || densNorm(-0.05) > 1e-8) ok = false;
  auto co = coPeriodicOp(sys, 1.0, 1.0);
  ResolventOp R(sys, co, -7.0, 7.0);
  Vec amp(2);
  amp << 1.0, 1.0;
  SmoothFn f = SmoothFn::gaussian(amp, 0.3, 0.6);
  auto atom = jumpAtom(R, f, 0.0);
  double worstT = 0.0;
  for (int i = 0; i < 20; ++i) {
    double t = -2.0 + 4.0 * i / 19.0;
    Vec want = example5JumpKernelApply(1.0, f, t, -7.0, 7.0);
    double rel = (atom.y1(t) - want).norm() / want.norm();
    worstT = std::max(worstT, rel);
    if (rel > 5e-3) ok = false;
  }
  return {ok, fmt("gap edges %.4f / %.4f (target -1 / +1, tol 0.02), jump err "
                  "%.1e (<=1e-3), expansion rel %.1e (<=5e-3)",
                  eLo, eHi, jerr, worstT)};
}

// ---------------------------------------------------------------------------
// 3. Fourth-order problem, h = 1: computed density support and the fourfold /
//    twofold rank structure.
// ---------------------------------------------------------------------------
Result criterion3() {
  auto rc = example4(1.0);
  auto sys = buildCanonical(rc.pencil);
  double mus = example4MuStar(1.0);
  bool ok = true;
  double minSupp = 1e300;
  auto dens = [&](double mu) { return densityPeriodicAt(sys, mu, 1.0, 1.0); };

  for (double mu = -0.98; mu <= -0.02 + 1e-9; mu += 0.04) {
    double n = dens(mu).norm();
    minSupp = std::min(minSupp, n);
    if (n < 1e-6) ok = false;
  }
  for (double mu = mus + 0.02; mu <= 3.0 + 1e-9; mu += 0.05) {
    if (std::abs(mu - 1.0) < 5e-3) continue;  // interior band edge of the grid
    double n = dens(mu).norm();
    minSupp = std::min(minSupp, n);
    if (n < 1e-6) ok = false;
  }

  // the nominal rank-4 window (mu*+0.05, 0.95) is empty for h = 1
  // (mu* ~ 0.9033); sample the interior of the fourfold band (mu*, 1) instead
  bool rank4ok = true, rank2ok = true;
  for (double mu : {0.93, 0.94, 0.96})
    if (rankAbs(dens(mu)) != 4) rank4ok = false;
  for (double mu : {1.25, 1.6, 2.0, 2.9})
    if (rankAbs(dens(mu)) != 2) rank2ok = false;
  if (!rank4ok || !rank2ok) ok = false;
  return {ok, fmt("support floor %.1e (>=1e-6), fourfold rank %s, twofold "
                  "rank %s (nominal rank-4 window empty; sampled 0.93-0.96)",
                  minSupp, rank4ok ? "ok" : "BAD", rank2ok ? "ok" : "BAD")};
}

// ---------------------------------------------------------------------------
// 4. Reduction equivalence on randomized problems: companion-form solve vs
//    canonical-system solve, r in 1..4, d in {1, 2}.
// ---------------------------------------------------------------------------
Result criterion4() {
  std::mt19937 rng(4242);
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    int r = 1 + k % 4, d = 1 + (k / 4) % 2;
    Pencil P = randPencil(rng, r, d);
    auto sys = buildCanonical(P);
    cplx lam(0.3 * (k % 3) - 0.2, 1.0 + 0.3 * (k % 2));
    SmoothFn f = randSmooth(rng, d);
    std::vector<Vec> jet0(r);
    Vec z0(sys.N);
    for (int j = 0; j < r; ++j) {
      jet0[j] = randVec(rng, d, 0.7);
      z0.segment(j * d, d) = jet0[j];
    }
    auto zsol = odeSolve(companionField(P, lam, &f), 0.0, 1.0, z0);
    auto xsol = odeSolve(canonicalField(sys, lam, &f), 0.0, 1.0,
                         sys.liftState(0.0, lam, jet0, &f));
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      Vec z = zsol.eval(t);
      auto jet = sys.recoverJet(t, lam, xsol.eval(t), &f);
      for (int j = 0; j < r; ++j) {
        double rel =
            (jet[j] - z.segment(j * d, d)).norm() / (1.0 + z.norm());
        worst = std::max(worst, rel);
        if (rel > 1e-6) ok = false;
      }
    }
  }
  return {ok, fmt("worst rel deviation %.2e (<=1e-6) over 10 instances", worst)};
}

// ---------------------------------------------------------------------------
// 5. Identity suite: the two-expression Green formula on random instances,
//    the Im H reduction identity, the weight identity (W F1, F2) = m{f1, f2},
//    and the fundamental-solution conjugation invariant.
// ---------------------------------------------------------------------------
Result criterion5() {
  std::mt19937 rng(555);
  bool ok = true;
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  // (a) Green formula on 20 random (l1, l2, m1, m2, f1, f2)
  double worstGreen = 0.0;
  for (int k = 0; k < 20; ++k) {
    int r = 1 + k % 4, d = 1 + k % 2;
    int smax = r - r % 2;
    int s1 = (k % 2 == 0) ? smax : 0;
    int s2 = (k % 3 == 0) ? 0 : smax;
    Pencil P1 = randPencil(rng, r, d, s1);
    Pencil P2 = randPencil(rng, r, d, s2);
    auto sys1 = buildCanonical(P1);
    auto sys2 = buildCanonical(P2);
    cplx lam1(u(rng), 1.0 + 0.5 * u(rng));
    cplx lam2(u(rng), -1.0 + 0.5 * u(rng));
    SmoothFn f1 = randSmooth(rng, d), f2 = randSmooth(rng, d);
    Vec z10(sys1.N), z20(sys2.N);
    for (int j = 0; j < r; ++j) {
      z10.segment(j * d, d) = randVec(rng, d, 0.6);
      z20.segment(j * d, d) = randVec(rng, d, 0.6);
    }
    auto fld1 = companionField(P1, lam1, &f1);
    auto fld2 = companionField(P2, lam2, &f2);
    auto y1 = odeSolve(fld1, 0.0, 1.0, z10);
    auto y2 = odeSolve(fld2, 0.0, 1.0, z20);
    auto jetAt = [&](const OdeSolution& s, const OdeField& fld,
                     double t) {
      Vec z = s.eval(t);
      std::vector<Vec> out(r + 1);
      for (int j = 0; j < r; ++j) out[j] = z.segment(j * d, d);
      out[r] = fld(t, z).segment((r - 1) * d, d);
      return out;
    };
    // m1{f1, y2} - m2*{y1, f2} - (l1 - l2*){y1, y2}, using
    // e*{u, v} = conj(e{v, u}) for the adjoint densities
    auto dens = [&](double t) -> cplx {
      auto u1 = jetAt(y1, fld1, t);
      auto u2 = jetAt(y2, fld2, t);
      auto fj1 = f1.jet(t, r), fj2 = f2.jet(t, r);
      cplx a = dirichletDensity(P1.m, t, 0.0, fj1, u2);
      cplx b = std::conj(dirichletDensity(P2.m, t, 0.0, fj2, u1));
      cplx c = dirichletDensity(P1.L, t, lam1, u1, u2) -
               std::conj(dirichletDensity(P2.L, t, lam2, u2, u1));
      return a - b - c;
    };
    cplx lhs = quadGauss(dens, 0.0, 1.0, 96, cplx(0.0));
    auto bdry = [&](double t) -> cplx {
      auto u1 = jetAt(y1, fld1, t);
      auto u2 = jetAt(y2, fld2, t);
      u1.resize(r);
      u2.resize(r);
      Vec x1 = sys1.liftState(t, lam1, u1, &f1);
      Vec x2 = sys2.liftState(t, lam2, u2, &f2);
      Mat B = cplx(0.0, 0.5) *
              (sys1.Q(t, lam1) + sys2.Q(t, lam2).adjoint());
      return inner(B * x1, x2);
    };
    cplx rhs = bdry(1.0) - bdry(0.0);
    double rel = std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
    worstGreen = std::max(worstGreen, rel);
    if (rel > 1e-8) ok = false;
  }

  // (b) Im H(t, lam) = Im(lam) * W(t, l_lam, -Im l_lam / Im lam)
  double worstImH = 0.0;
  std::vector<double> ts{0.2, 0.55, 0.9};
  std::vector<cplx> lams{{0, 1}, {1, 2}, {-0.5, 0.7}, {0, -1}, {2, -1}};
  for (int k = 0; k < 8; ++k) {
    Pencil P = randPencil(rng, 1 + k % 4, 1 + k % 2);
    auto rep = checkImHIdentity(buildCanonical(P), ts, lams);
    worstImH = std::max(worstImH, rep.worst);
  }
  for (auto& rc : {example2(), example3(1.0), example4(1.0), example5(1.0)}) {
    auto rep = checkImHIdentity(buildCanonical(rc.pencil), ts, lams);
    worstImH = std::max(worstImH, rep.worst);
  }
  if (worstImH > 1e-10) ok = false;

  // (c) weight identity (W(t, l) F1, F2) = m{f1, f2}(t)
  double worstW = 0.0;
  for (int r = 1; r <= 4; ++r) {
    for (int s : {0, 2, r - r % 2}) {
      if (s > r - r % 2 || s % 2 != 0) continue;
      Pencil P = randPencil(rng, r, 2, s);
      auto sys = buildCanonical(P);
      SmoothFn f1 = randSmooth(rng, 2), f2 = randSmooth(rng, 2);
      cplx lam(0.4, 1.5);
      for (double t : ts) {
        Vec F1 = sys.Fvec(t, lam, f1), F2 = sys.Fvec(t, lam, f2);
        cplx lhs = inner(sys.W(t, lam) * F1, F2);
        int K = (s + 1) / 2;
        cplx rhs = dirichletDensity(P.m, t, std::conj(lam), f1.jet(t, K),
                                    f2.jet(t, K));
        double rel = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
        worstW = std::max(worstW, rel);
      }
    }
  }
  if (worstW > 1e-10) ok = false;

  // (d) conjugation invariant X_conj(t)^* ReQ(t) X(t) = G, 5 lambda per case
  double worstConj = 0.0;
  for (auto& rc : {example2(), example3(1.0), example4(1.0), example5(1.0)}) {
    auto sys = buildCanonical(rc.pencil);
    Mat G = sys.G();
    for (cplx lam : lams) {
      auto X = fundamentalSolution(sys, lam, 0.0);
      auto Y = fundamentalSolution(sys, std::conj(lam), 0.0);
      for (double t : {0.3, 0.7, 1.0}) {
        Mat inv = Y(t).adjoint() * rePart(sys.Q(t, lam)) * X(t);
        worstConj = std::max(worstConj, (inv - G).norm() / (1.0 + G.norm()));
      }
    }
  }
  if (worstConj > 1e-8) ok = false;

  return {ok, fmt("Green %.1e (<=1e-8), ImH %.1e (<=1e-10), weight %.1e "
                  "(<=1e-10), conjugation %.1e (<=1e-8)",
                  worstGreen, worstImH, worstW, worstConj)};
}

// ---------------------------------------------------------------------------
// 6. Resolvent properties on the periodic reference problems: equation
//    residual, adjointness, dissipativity.
// ---------------------------------------------------------------------------
Result criterion6() {
  bool ok = true;
  double worstRes = 0.0, worstAdj = 0.0, worstDis = -1e300;
  std::vector<cplx> lams{{0, 1}, {0, -1}, {1, 2}, {1, -2}};
  for (auto& rc : {example3(1.0), example5(1.0)}) {
    auto sys = buildCanonical(rc.pencil);
    int d = rc.pencil.L.d;
    auto co = coPeriodicOp(sys, 1.0, 1.0);
    // moderate window: roundoff in the kernel quadrature grows with the
    // fundamental-solution growth across the window
    ResolventOp R(sys, co, -4.0, 4.0, 192);
    std::vector<SmoothFn> fs;
    for (int i = 0; i < 3; ++i) {
      Vec a = Vec::Zero(d);
      a(i % d) = 1.0;
      if (d > 1) a((i + 1) % d) = 0.5;
      fs.push_back(SmoothFn::gaussian(a, -0.4 + 0.5 * i, 0.5 + 0.15 * i));
    }
    for (cplx lam : lams) {
      for (size_t i = 0; i < fs.size(); ++i) {
        auto app = R.apply(fs[i], lam);
        auto res = checkResidual(R, app, fs[i]);
        worstRes = std::max(worstRes, res.worst);
        if (res.worst > 1e-6) ok = false;
        auto adj = checkAdjointPair(R, fs[i], fs[(i + 1) % fs.size()], lam);
        worstAdj = std::max(worstAdj, adj.worst);
        if (adj.worst > 1e-7) ok = false;
        auto dis = checkDissipativity(R, fs[i], lam);
        worstDis = std::max(worstDis, dis.worst);
        if (dis.worst > 1e-8) ok = false;
      }
    }
  }
  return {ok, fmt("residual %.1e (<=1e-6), adjoint %.1e (<=1e-7), "
                  "dissipativity violation %.1e (<=1e-8)",
                  worstRes, worstAdj, worstDis)};
}

// ---------------------------------------------------------------------------
// 7. Degenerate-weight dichotomy: the function f0 with m[f0] = 0 pointwise
//    but positive m-norm is annihilated by the resolvent of the second
//    boundary pair and not by the first.
// ---------------------------------------------------------------------------
Result criterion7() {
  auto rc = example2();
  auto sys = buildCanonical(rc.pencil);
  SmoothFn f0 = example1NullPrimitive();  // t exp(it): m[f0] = 0, ||f0||_m > 0
  bool ok = true;
  double maxAnn = 0.0, minKeep = 1e300;
  for (cplx lam : {cplx(0, 1), cplx(1, 2)}) {
    auto b1 = solveBvp(sys, example2Pair1(), f0, lam);
    auto b2 = solveBvp(sys, example2Pair2(), f0, lam);
    if (b1.boundaryResidual > 1e-8 || b2.boundaryResidual > 1e-8) ok = false;
    maxAnn = std::max(maxAnn, b2.normM);
    minKeep = std::min(minKeep, b1.normM);
  }
  if (maxAnn > 1e-8 || minKeep < 1e-3) ok = false;
  return {ok, fmt("annihilating pair ||R f0||_m %.1e (<=1e-8), other pair "
                  "%.1e (>1e-3)",
                  maxAnn, minKeep)};
}

// ---------------------------------------------------------------------------
// 8. Bessel inequality across a randomized window battery and the Parseval
//    identity on full-band sweeps of the first-order reference problem.
// ---------------------------------------------------------------------------
Result criterion8() {
  auto rc = example3(1.0);
  auto sys = buildCanonical(rc.pencil);
  double edge = std::sqrt(1.25);
  auto sp = [&](double mu) { return rc.exactDensity(mu); };
  bool ok = true;
  double worstSlack = 0.0, worstPar = 0.0;

  std::vector<std::pair<double, double>> wins{
      {-0.5, 0.5}, {-1.0, 0.2}, {0.1, 1.0}, {-edge, -0.1}, {-0.8, 0.8}};
  std::vector<SmoothFn> fs;
  for (int i = 0; i < 3; ++i)
    fs.push_back(SmoothFn::gaussian(Vec::Ones(1), -0.4 + 0.4 * i,
                                    0.55 + 0.1 * i));
  for (auto& w : wins) {
    auto breaks = gradedBreaks(w.first, w.second, {-edge, edge});
    auto rep = parsevalBessel(sys, sp, fs[(int)(&w - &wins[0]) % 3],
                              -6.0, 6.0, breaks);
    double slack = -rep.besselSlack / (1.0 + rep.lhs);  // positive = violation
    worstSlack = std::max(worstSlack, slack);
    if (slack > 1e-8) ok = false;
  }
  // one window evaluated with the Floquet-route density instead of the
  // closed form
  {
    auto spPer = [&](double mu) {
      return densityPeriodicAt(sys, mu, 1.0, 1.0);
    };
    auto breaks = gradedBreaks(0.15, 0.9, {});
    auto rep = parsevalBessel(sys, spPer, fs[0], -6.0, 6.0, breaks);
    double slack = -rep.besselSlack / (1.0 + rep.lhs);
    worstSlack = std::max(worstSlack, slack);
    if (slack > 1e-8) ok = false;
  }
  // full-band Parseval sweeps
  for (auto& f : fs) {
    auto breaks = gradedBreaks(-edge, edge, {-edge, edge}, 12, 16);
    auto rep = parsevalBessel(sys, sp, f, -6.0, 6.0, breaks, 0.0, 96);
    worstPar = std::max(worstPar, rep.parsevalRel);
    double slack = -rep.besselSlack / (1.0 + rep.lhs);
    worstSlack = std::max(worstSlack, slack);
    if (rep.parsevalRel > 2e-3 || slack > 1e-8) ok = false;
  }
  return {ok, fmt("Bessel violation %.1e (<=1e-8), Parseval rel %.1e (<=2e-3)",
                  worstSlack, worstPar)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Result (*run)();
  };
  const Entry entries[] = {
      {"first-order density sweep vs closed form", criterion1},
      {"gap, point mass and partial expansion", criterion2},
      {"fourth-order support and rank structure", criterion3},
      {"reduction equivalence on random problems", criterion4},
      {"identity suite", criterion5},
      {"resolvent properties", criterion6},
      {"degenerate-weight dichotomy", criterion7},
      {"Bessel and Parseval", criterion8},
  };
  int failures = 0;
  int idx = 0;
  for (const auto& e : entries) {
    ++idx;
    Result r;
    try {
      r = e.run();
    } catch (const std::exception& ex) {
      r = {false, fmt("exception: %s", ex.what())};
    }
    std::printf("criterion %d (%s): %s%s%s\n", idx, e.name,
                r.pass ? "PASS" : "FAIL", r.detail.empty() ? "" : " - ",
                r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
