// Command-line front end: problem ingestion, canonical reduction dumps,
// spectral density sweeps, expansions, resolvent application, and the
// verification battery.
//
// Exit codes: 0 success, 2 parse error, 3 numerical failure,
//             4 verification failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "pencil/problem.hpp"
#include "pencil/resolvent.hpp"

using namespace pencil;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matJson(const Mat& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < A.cols(); ++j)
      row.push_back({A(i, j).real(), A(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

cplx parseCplx(const std::string& s) {
  auto pos = s.find(',');
  if (pos == std::string::npos) return cplx(std::stod(s), 0.0);
  return cplx(std::stod(s.substr(0, pos)), std::stod(s.substr(pos + 1)));
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct Config {
  Problem prob;
  cplx lambda{0.0, 1.0};
  double muFrom = -1.0, muTo = 1.0, muStep = 0.1;
  double eps0 = 8e-3;
  int epsRungs = 6;
  double wa = -6.0, wb = 6.0;
  bool hasWindow = false;
  double alpha = -0.5, beta = 0.5;
  std::string outDir = ".";
  std::string method = "stieltjes";
  double tol = 1e-6;
  double fCenter = 0.0, fWidth = 0.5;
};

SmoothFn bump(const Config& cfg) {
  int d = cfg.prob.pencil.d();
  Vec amp = Vec::Ones(d);
  return SmoothFn::gaussian(amp, cfg.fCenter, cfg.fWidth);
}

std::pair<double, double> window(const Config& cfg) {
  if (cfg.prob.hasInterval && !cfg.hasWindow)
    return {cfg.prob.a, cfg.prob.b};
  return {cfg.wa, cfg.wb};
}

std::function<Mat(cplx)> charOpFn(const Config& cfg,
                                  const CanonicalSystem& sys) {
  double T = cfg.prob.period;
  return [sys, T](cplx lam) { return coPeriodic(sys, lam, T, T); };
}

int cmdReduce(const Config& cfg) {
  auto sys = buildCanonical(cfg.prob.pencil);
  json out;
  out["problem"] = cfg.prob.name;
  out["r"] = sys.r;
  out["d"] = sys.d;
  out["N"] = sys.N;
  out["G"] = matJson(sys.G());
  json samples = json::array();
  for (double t : {0.0, 0.5, 1.0}) {
    for (cplx lam : {cplx(0, 1), cplx(1, 2)}) {
      json s;
      s["t"] = t;
      s["lambda"] = {lam.real(), lam.imag()};
      s["Q"] = matJson(sys.Q(t, lam));
      s["S"] = matJson(sys.S(t, lam));
      s["H"] = matJson(sys.H(t, lam));
      s["W"] = matJson(sys.W(t, lam));
      if (sys.even) s["C"] = matJson(sys.Cmat(t, lam));
      samples.push_back(std::move(s));
    }
  }
  out["samples"] = std::move(samples);
  std::string text = out.dump(2) + "\n";
  writeText(cfg.outDir + "/reduce.json", text);
  std::cout << text;
  return 0;
}

int cmdDensity(const Config& cfg) {
  auto sys = buildCanonical(cfg.prob.pencil);
  auto Mfun = charOpFn(cfg, sys);
  EpsLadder lad{cfg.eps0, cfg.epsRungs};
  const int N = sys.N;
  bool doSt = cfg.method == "stieltjes" || cfg.method == "both";
  bool doPer = cfg.method == "periodic" || cfg.method == "both";
  std::ostringstream csv;
  csv << "mu,resolved";
  for (const char* m : {"st", "per"})
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        csv << "," << m << "_re_" << i << j << "," << m << "_im_" << i << j;
  if (doSt && doPer) csv << ",agreement";
  csv << ",note\n";
  int count = (int)std::floor((cfg.muTo - cfg.muFrom) / cfg.muStep + 1e-9);
  if (count < 0) throw std::runtime_error("empty mu grid");
  for (int k = 0; k <= count; ++k) {
    double mu = cfg.muFrom + k * cfg.muStep;
    Mat Sst = Mat::Zero(N, N), Sper = Mat::Zero(N, N);
    bool ok = true;
    std::string note;
    if (doSt) {
      try {
        Sst = densityStieltjesAt(Mfun, mu, lad);
      } catch (const std::exception& e) {
        ok = false;
        note = e.what();
      }
    }
    if (doPer) {
      bool excluded = false;
      for (cplx e : cfg.prob.pencil.excluded)
        if (std::abs(mu - e.real()) < 1e-9 && std::abs(e.imag()) < 1e-12)
          excluded = true;
      if (excluded) {
        ok = false;
        note = "excluded point";
      } else {
        try {
          Sper = densityPeriodicAt(sys, mu, cfg.prob.period, cfg.prob.period);
        } catch (const std::exception& e) {
          ok = false;
          note = e.what();
        }
      }
    }
    csv << fmt(mu) << "," << (ok ? 1 : 0);
    for (const Mat* S : {&Sst, &Sper})
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          csv << "," << fmt((*S)(i, j).real()) << ","
              << fmt((*S)(i, j).imag());
    if (doSt && doPer) csv << "," << fmt((Sst - Sper).norm());
    csv << "," << note << "\n";
  }
  writeText(cfg.outDir + "/density.csv", csv.str());
  // jump scan at excluded real points inside the sweep
  std::ostringstream jcsv;
  jcsv << "mu0,detected";
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) jcsv << ",re_" << i << j << ",im_" << i << j;
  jcsv << "\n";
  for (cplx e : cfg.prob.pencil.excluded) {
    if (std::abs(e.imag()) > 1e-12) continue;
    double mu0 = e.real();
    if (mu0 < cfg.muFrom || mu0 > cfg.muTo) continue;
    Mat J = Mat::Zero(N, N);
    bool det = detectJump(Mfun, mu0, J, lad);
    jcsv << fmt(mu0) << "," << (det ? 1 : 0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        jcsv << "," << fmt(J(i, j).real()) << "," << fmt(J(i, j).imag());
    jcsv << "\n";
  }
  writeText(cfg.outDir + "/jumps.csv", jcsv.str());
  std::cout << "density sweep written to " << cfg.outDir << "/density.csv\n";
  return 0;
}

int cmdResolvent(const Config& cfg) {
  auto sys = buildCanonical(cfg.prob.pencil);
  auto [a, b] = window(cfg);
  CharacteristicOperator co = coPeriodicOp(sys, cfg.prob.period, cfg.prob.period);
  ResolventOp R(sys, co, a, b);
  SmoothFn f = bump(cfg);
  auto app = R.apply(f, cfg.lambda);
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < sys.d; ++i) csv << ",re_" << i << ",im_" << i;
  csv << "\n";
  for (int k = 0; k <= 100; ++k) {
    double t = a + (b - a) * k / 100.0;
    Vec y = app.y1(t);
    csv << fmt(t);
    for (int i = 0; i < sys.d; ++i)
      csv << "," << fmt(y(i).real()) << "," << fmt(y(i).imag());
    csv << "\n";
  }
  writeText(cfg.outDir + "/resolvent.csv", csv.str());
  auto res = checkResidual(R, app, f);
  std::cout << "resolvent written to " << cfg.outDir
            << "/resolvent.csv; equation residual " << fmt(res.worst) << "\n";
  return res.pass ? 0 : 4;
}

int cmdExpand(const Config& cfg) {
  auto sys = buildCanonical(cfg.prob.pencil);
  auto [a, b] = window(cfg);
  SmoothFn f = bump(cfg);
  double fa = cfg.fCenter - 8.0 * cfg.fWidth, fb = cfg.fCenter + 8.0 * cfg.fWidth;
  fa = std::max(fa, a);
  fb = std::min(fb, b);
  // AC part over (alpha, beta) via the Floquet closed form
  std::vector<double> edges;
  if (cfg.prob.refCase)
    for (auto [e1, e2] : cfg.prob.refCase->expectedBands) {
      if (std::isfinite(e1)) edges.push_back(e1);
      if (std::isfinite(e2)) edges.push_back(e2);
    }
  auto breaks = gradedBreaks(cfg.alpha, cfg.beta, edges);
  auto sigma = [&](double mu) -> Mat {
    for (cplx e : cfg.prob.pencil.excluded)
      if (std::abs(mu - e.real()) < 1e-9) return Mat::Zero(sys.N, sys.N);
    try {
      return densityPeriodicAt(sys, mu, cfg.prob.period, cfg.prob.period);
    } catch (const std::exception&) {
      return Mat::Zero(sys.N, sys.N);
    }
  };
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(a + (b - a) * k / 20.0);
  auto ac = expansionAC(sys, sigma, f, fa, fb, breaks, ts);
  // jump atoms strictly inside (alpha, beta)
  CharacteristicOperator co = coPeriodicOp(sys, cfg.prob.period, cfg.prob.period);
  ResolventOp R(sys, co, a, b);
  double jumpContrib = 0.0;
  std::vector<std::pair<double, JumpAtom>> atoms;
  if (cfg.prob.refCase)
    for (const auto& jp : cfg.prob.refCase->exactJumps)
      if (jp.mu0 > cfg.alpha && jp.mu0 < cfg.beta)
        atoms.emplace_back(jp.mu0, jumpAtom(R, f, jp.mu0));
  int K = std::max(0, sys.r - 1);
  for (auto& [mu0, atom] : atoms) {
    jumpContrib +=
        mFormJets(sys.P.m, atom.jet, jetOf(f, K), fa, fb, 64).real();
    for (size_t i = 0; i < ts.size(); ++i) ac[i] += atom.y1(ts[i]);
  }
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < sys.d; ++i) csv << ",re_" << i << ",im_" << i;
  csv << "\n";
  for (size_t k = 0; k < ts.size(); ++k) {
    csv << fmt(ts[k]);
    for (int i = 0; i < sys.d; ++i)
      csv << "," << fmt(ac[k](i).real()) << "," << fmt(ac[k](i).imag());
    csv << "\n";
  }
  writeText(cfg.outDir + "/expand.csv", csv.str());
  auto rep = parsevalBessel(sys, sigma, f, fa, fb, breaks, jumpContrib);
  json j;
  j["m_ff"] = rep.lhs;
  j["spectral_sum"] = rep.rhs;
  j["bessel_slack"] = rep.besselSlack;
  j["parseval_rel"] = rep.parsevalRel;
  std::string text = j.dump(2) + "\n";
  writeText(cfg.outDir + "/expand.json", text);
  std::cout << text;
  return rep.besselSlack >= -1e-6 * (1.0 + rep.lhs) ? 0 : 4;
}

int cmdVerify(const Config& cfg) {
  const Pencil& P = cfg.prob.pencil;
  auto sys = buildCanonical(P);
  std::vector<double> ts{0.13, 0.5, 0.87};
  std::vector<cplx> lams{{0, 1}, {0, -1}, {1, 2}, {1, -2}, {0, 2}};
  json rep;
  bool pass = true;
  auto record = [&](const std::string& name, const CheckReport& r) {
    rep[name] = {{"pass", r.pass}, {"worst", r.worst}, {"note", r.note}};
    pass = pass && r.pass;
  };
  record("decomposition", checkDecomposition(P, ts, lams));
  record("symmetry", checkSymmetry(P.L, ts, lams));
  record("nevanlinna", checkNevanlinna(P.L, ts, lams));
  record("weight_domination", checkWeightDomination(P, ts, lams));
  record("im_h_identity", checkImHIdentity(sys, ts, lams));

  // weight-side identities at sample points
  {
    CheckReport r;
    SmoothFn f1 = scalarPolyExp({0.3, 1.0, -0.2}, cplx(0.2, 0.7));
    SmoothFn f2 = scalarPolyExp({1.0, -0.5}, cplx(-0.1, 0.4));
    if (P.d() > 1) {
      Vec a1 = Vec::Ones(P.d()), a2 = Vec::Ones(P.d());
      a2(P.d() - 1) = cplx(0.5, 0.5);
      f1 = SmoothFn::polyExp({a1}, cplx(0.2, 0.7));
      f2 = SmoothFn::polyExp({a2}, cplx(-0.1, 0.4));
    }
    for (double t : ts)
      for (cplx lam : lams) {
        Vec F1 = sys.Fvec(t, lam, f1), F2 = sys.Fvec(t, lam, f2);
        cplx lhs = inner(sys.W(t, lam) * F1, F2);
        cplx rhs = dirichletDensity(P.m, t, 0.0, f1.jet(t, sys.r),
                                    f2.jet(t, sys.r));
        r.worst = std::max(r.worst, std::abs(lhs - rhs));
        Vec d = sys.liftRhs(t, lam, f1) - sys.liftRhsNaive(t, lam, f1);
        r.worst = std::max(r.worst, d.norm());
      }
    r.pass = r.worst <= 1e-8;
    record("weight_identities", r);
  }

  // fundamental-solution conjugation invariant
  {
    CheckReport r;
    for (cplx lam : {cplx(0, 1), cplx(1, 2)}) {
      auto X = fundamentalSolution(sys, lam, 0.0);
      auto Y = fundamentalSolution(sys, std::conj(lam), 0.0);
      Mat G = sys.G();
      for (double t : {0.25, 0.75, 1.0}) {
        Mat inv = Y(t).adjoint() * rePart(sys.Q(t, lam)) * X(t);
        r.worst = std::max(r.worst, (inv - G).norm() / (1.0 + G.norm()));
      }
    }
    r.pass = r.worst <= 1e-8;
    record("conjugation_invariant", r);
  }

  // companion vs canonical roundtrip with a driving term
  {
    CheckReport r;
    cplx lam(1.0, 1.5);
    SmoothFn f = bump(cfg);
    std::vector<Vec> jet0(sys.r);
    for (int j = 0; j < sys.r; ++j)
      jet0[j] = Vec::Constant(sys.d, cplx(0.4 + 0.1 * j, -0.2));
    Vec z0(sys.N);
    for (int j = 0; j < sys.r; ++j) z0.segment(j * sys.d, sys.d) = jet0[j];
    auto zsol = odeSolve(companionField(P, lam, &f), 0.0, 1.0, z0);
    Vec x0 = sys.liftState(0.0, lam, jet0, &f);
    auto xsol = odeSolve(canonicalField(sys, lam, &f), 0.0, 1.0, x0);
    for (double t : {0.3, 0.6, 1.0}) {
      Vec z = zsol.eval(t);
      auto jet = sys.recoverJet(t, lam, xsol.eval(t), &f);
      for (int j = 0; j < sys.r; ++j) {
        double dn = (jet[j] - z.segment(j * sys.d, sys.d)).norm();
        r.worst = std::max(r.worst, dn / (1.0 + z.norm()));
      }
    }
    r.pass = r.worst <= cfg.tol;
    record("reduction_roundtrip", r);
  }

  // Green formula on the problem with l1 = l_lam, l2 = l_conj(lam)
  {
    CheckReport r;
    cplx lam(0.7, 1.1);
    SmoothFn f1 = bump(cfg);
    SmoothFn f2 = SmoothFn::gaussian(Vec::Ones(sys.d), 0.6, 0.4);
    std::vector<Vec> j1(sys.r), j2(sys.r);
    for (int j = 0; j < sys.r; ++j) {
      j1[j] = Vec::Constant(sys.d, cplx(0.2 * (j + 1), 0.1));
      j2[j] = Vec::Constant(sys.d, cplx(-0.1, 0.3 * (j + 1)));
    }
    Vec z10(sys.N), z20(sys.N);
    for (int j = 0; j < sys.r; ++j) {
      z10.segment(j * sys.d, sys.d) = j1[j];
      z20.segment(j * sys.d, sys.d) = j2[j];
    }
    auto y1 = odeSolve(companionField(P, lam, &f1), 0.0, 1.0, z10);
    auto y2 = odeSolve(companionField(P, std::conj(lam), &f2), 0.0, 1.0, z20);
    auto jetAt = [&](const OdeSolution& s, double t) {
      Vec z = s.eval(t);
      std::vector<Vec> out(sys.r + 1);
      for (int j = 0; j < sys.r; ++j) out[j] = z.segment(j * sys.d, sys.d);
      // top derivative from the companion field itself
      auto fld = (&s == &y1) ? companionField(P, lam, &f1)
                             : companionField(P, std::conj(lam), &f2);
      Vec dz = fld(t, z);
      out[sys.r] = dz.segment((sys.r - 1) * sys.d, sys.d);
      return out;
    };
    int K = sys.r;
    auto lhsDens = [&](double t) -> cplx {
      auto u1 = jetAt(y1, t);
      auto u2 = jetAt(y2, t);
      auto fj1 = f1.jet(t, K), fj2 = f2.jet(t, K);
      return dirichletDensity(P.m, t, 0.0, fj1, u2) -
             std::conj(dirichletDensity(P.m, t, 0.0, fj2, u1));
    };
    cplx lhs = quadGauss(lhsDens, 0.0, 1.0, 64, cplx(0.0));
    auto bdry = [&](double t) -> cplx {
      Vec x1 = sys.liftState(t, lam, [&] {
        auto u = jetAt(y1, t);
        u.resize(sys.r);
        return u;
      }(), &f1);
      Vec x2 = sys.liftState(t, std::conj(lam), [&] {
        auto u = jetAt(y2, t);
        u.resize(sys.r);
        return u;
      }(), &f2);
      Mat B = cplx(0.0, 0.5) *
              (sys.Q(t, lam) + sys.Q(t, std::conj(lam)).adjoint());
      return inner(B * x1, x2);
    };
    cplx rhs = bdry(1.0) - bdry(0.0);
    r.worst = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    r.pass = r.worst <= 1e-7;
    record("green_formula", r);
  }

  // resolvent checks (periodic route on a finite window)
  if (!cfg.prob.hasInterval) {
    try {
      auto co = coPeriodicOp(sys, cfg.prob.period, cfg.prob.period);
      ResolventOp R(sys, co, -6.0, 6.0);
      SmoothFn f = bump(cfg);
      cplx lam(0.0, 1.0);
      auto app = R.apply(f, lam);
      record("resolvent_residual", checkResidual(R, app, f));
      record("resolvent_adjoint",
             checkAdjointPair(R, f, SmoothFn::gaussian(Vec::Ones(sys.d), 0.4, 0.6),
                              lam));
      record("resolvent_dissipative", checkDissipativity(R, f, lam));
      record("co_symmetry", checkCoSymmetry(co, {{0, 1}, {1, 2}}));
    } catch (const std::exception& e) {
      CheckReport r;
      r.pass = false;
      r.note = e.what();
      record("resolvent_suite", r);
    }
  }

  rep["pass"] = pass;
  std::string text = rep.dump(2) + "\n";
  writeText(cfg.outDir + "/verify.json", text);
  std::cout << text;
  return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pencil: canonical reduction, characteristic operators, resolvents and "
      "spectral densities for operator differential pencils"};
  std::string caseName, problemFile, command, lambdaStr = "0,1";
  Config cfg;
  double h = 1.0;
  std::string windowStr;
  app.set_help_flag("--help", "print usage");  // frees --h for the parameter
  app.add_option("--case", caseName, "builtin case name (example1..example5)");
  app.add_option("--problem", problemFile, "problem file (JSON)");
  app.add_option("--h", h, "case parameter h");
  app.add_option("--command", command,
                 "one of reduce|density|expand|verify|resolvent")
      ->required();
  app.add_option("--lambda", lambdaStr, "spectral parameter re,im");
  app.add_option("--mu-from", cfg.muFrom, "density sweep start");
  app.add_option("--mu-to", cfg.muTo, "density sweep end");
  app.add_option("--mu-step", cfg.muStep, "density sweep step");
  app.add_option("--eps0", cfg.eps0, "largest eps of the ladder");
  app.add_option("--eps-rungs", cfg.epsRungs, "ladder rungs (halving)");
  app.add_option("--window", windowStr, "integration window a,b");
  app.add_option("--alpha", cfg.alpha, "expansion interval start");
  app.add_option("--beta", cfg.beta, "expansion interval end");
  app.add_option("--out", cfg.outDir, "output directory");
  app.add_option("--method", cfg.method, "density method stieltjes|periodic|both");
  app.add_option("--tol", cfg.tol, "verification tolerance");
  app.add_option("--f-center", cfg.fCenter, "test bump center");
  app.add_option("--f-width", cfg.fWidth, "test bump width");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!problemFile.empty()) {
      cfg.prob = loadProblem(problemFile);
    } else if (!caseName.empty()) {
      ReferenceCase rc = caseByName(caseName, h);
      cfg.prob.name = rc.name;
      cfg.prob.pencil = rc.pencil;
      cfg.prob.period = rc.period;
      cfg.prob.refCase = rc;
      if (rc.name == "example1" || rc.name == "example2") {
        cfg.prob.a = 0.0;
        cfg.prob.b = 1.0;
        cfg.prob.hasInterval = true;
      }
    } else {
      std::cerr << "error: need --case or --problem\n";
      return 2;
    }
    cfg.lambda = parseCplx(lambdaStr);
    if (!windowStr.empty()) {
      cfg.wa = parseCplx(windowStr).real();
      auto pos = windowStr.find(',');
      cfg.wb = std::stod(windowStr.substr(pos + 1));
      cfg.hasWindow = true;
    }
    std::filesystem::create_directories(cfg.outDir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (command == "reduce") return cmdReduce(cfg);
    if (command == "density") return cmdDensity(cfg);
    if (command == "expand") return cmdExpand(cfg);
    if (command == "verify") return cmdVerify(cfg);
    if (command == "resolvent") return cmdResolvent(cfg);
    std::cerr << "error: unknown command " << command << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
