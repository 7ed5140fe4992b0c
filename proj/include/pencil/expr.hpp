#ifndef PENCIL_EXPR_HPP
#define PENCIL_EXPR_HPP

#include "pencil/core.hpp"
#include "pencil/series.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Matrix coefficient of a differential expression: a smooth function of t,
// possibly depending on the spectral parameter.  fn(t, lambda, k) returns the
// k-th t-derivative of the d x d value.
// ---------------------------------------------------------------------------
struct Coefficient {
  int d = 1;
  bool isZero = false;
  std::function<Mat(double, cplx, int)> fn;

  Mat operator()(double t, cplx lam, int k = 0) const { return fn(t, lam, k); }

  static Coefficient zero(int d);
  static Coefficient constant(const Mat& A);
  static Coefficient tpoly(std::vector<Mat> A);  // sum_j A_j t^j
  static Coefficient lamFn(int d, std::function<Mat(cplx)> f);  // t-constant
  static Coefficient tpolyLam(int d, std::vector<std::function<Mat(cplx)>> f);
  // Black-box value; derivatives by Richardson-extrapolated central
  // differences (documented accuracy loss for k >= 3).
  static Coefficient numeric(int d, std::function<Mat(double, cplx)> value,
                             double h = 1e-5);

  Coefficient adjointC() const;  // (t,lambda) -> value(t,lambda)^*
  static Coefficient add(const Coefficient& a, const Coefficient& b);
  static Coefficient scaleLam(const Coefficient& a, std::function<cplx(cplx)> s);
};

// Derivative series (value, d/dt, d2/dt2, ...) of a coefficient at (t, lambda).
MatSeries coeffSeries(const Coefficient& c, double t, cplx lam, int len);

// ---------------------------------------------------------------------------
// Differential expression in divergent form, order r >= 1:
//   e[y] = sum_k i^k e_k[y],
//   e_{2j}[y]   = D^j (p_j y^(j)),                     j = 0..floor(r/2),
//   e_{2j-1}[y] = (1/2) D^{j-1} [ (q_j y^(j-1))' + s_j y^(j) ],
//                                                      j = 1..floor((r+1)/2).
// Coefficients may depend on lambda (an expression "family").
// ---------------------------------------------------------------------------
struct DiffExpr {
  int r = 1;
  int d = 1;
  std::vector<Coefficient> p;  // index j = 0..floor(r/2)
  std::vector<Coefficient> q;  // index j = 1..floor((r+1)/2); slot 0 unused
  std::vector<Coefficient> s;  // same indexing as q

  static DiffExpr make(int r, int d);  // all-zero coefficients

  int np() const { return r / 2; }        // top p index
  int nq() const { return (r + 1) / 2; }  // top q/s index

  const Coefficient& pj(int j) const;  // zero coefficient outside range
  const Coefficient& qj(int j) const;
  const Coefficient& sj(int j) const;

  // Formal adjoint: p_j -> p_j^*, q_j -> s_j^*, s_j -> q_j^* (same lambda).
  DiffExpr adjointE() const;
  // Hermitian real/imaginary parts: e = Re e + i Im e.
  DiffExpr reE() const;
  DiffExpr imE() const;

  static DiffExpr add(const DiffExpr& a, const DiffExpr& b);
  static DiffExpr scaleLam(const DiffExpr& a, std::function<cplx(cplx)> s);
  static DiffExpr scale(const DiffExpr& a, cplx c);
};

// ---------------------------------------------------------------------------
// Evaluation machinery.
// ---------------------------------------------------------------------------

// e[y] as a derivative series, from the divergent form expanded term by term
// (independent of the quasi-derivative recursion; used as its oracle and for
// right-hand sides).  yser[j] = y^(j)(t), as d x m matrices.
MatSeries exprApply(const DiffExpr& e, double t, cplx lam, const MatSeries& yser);

// e[f](t) for a smooth vector function.
Vec exprApplyFn(const DiffExpr& e, const SmoothFn& f, double t, cplx lam);

// Scalarized form: matrices A_k(t, lambda) with e[y] = sum_k A_k y^(k).
std::vector<Mat> scalarize(const DiffExpr& e, double t, cplx lam);

// Quasi-derivative series y^[k](t|e), k = 0..r.  Series lengths shrink with k;
// qd[k] keeps len(yser) - k leading derivatives (coefficients permitting).
std::vector<MatSeries> quasiDerivSeries(const DiffExpr& e, double t, cplx lam,
                                        const MatSeries& yser);

// Quasi-derivative values (and first derivatives where available) of a smooth
// function: feeds f's jet of length r + 1 + extra into quasiDerivSeries.
std::vector<MatSeries> quasiDerivFn(const DiffExpr& e, const SmoothFn& f,
                                    double t, cplx lam, int extra = 1);

// Dirichlet density e{f,g}(t) from jets of f and g (the sesquilinear
// integrand): sum_j (P_j f^(j), g^(j))
//            + (i/2) sum_j [(S_j f^(j), g^(j-1)) - (Q_j f^(j-1), g^(j))].
cplx dirichletDensity(const DiffExpr& e, double t, cplx lam,
                      const std::vector<Vec>& fjet, const std::vector<Vec>& gjet);

// Matrix of the same form on stacked jets h = (h_0, ..., h_{nb-1}):
// block diag p_j, block (j-1,j) = (i/2) s_j, block (j,j-1) = -(i/2) q_j.
// Default nb = floor((r+1)/2) + 1 (full); m-type comparisons pad to a common nb.
Mat formMatrix(const DiffExpr& e, double t, cplx lam, int nblocks = -1);

// ---------------------------------------------------------------------------
// Pencil l_lambda = l - lambda m - n_lambda with Nevanlinna-type dependence.
// ---------------------------------------------------------------------------
struct Pencil {
  DiffExpr L;  // l_lambda, the full family
  DiffExpr l;  // lambda-free part
  DiffExpr m;  // weight expression, lambda-free, even order s <= r
  DiffExpr n;  // perturbation n_lambda
  std::vector<cplx> excluded;  // real points excluded from the lambda-domain

  int r() const { return L.r; }
  int d() const { return L.d; }
  int s() const { return m.r; }

  // Builds L = l - lambda m - n of order r.
  static Pencil fromParts(DiffExpr l, DiffExpr m, DiffExpr n, int r,
                          std::vector<cplx> excluded = {});
};

struct CheckReport {
  bool pass = true;
  double worst = 0.0;  // worst violation / mismatch found
  std::string note;
};

// l_lambda == l - lambda m - n_lambda coefficientwise at sample points.
CheckReport checkDecomposition(const Pencil& P, const std::vector<double>& ts,
                               const std::vector<cplx>& lams);

// Symmetry l_lambda = (l_{conj lambda})^*: p_j(t,lam) = p_j(t,conj lam)^*,
// q_j(t,lam) = s_j(t,conj lam)^*.
CheckReport checkSymmetry(const DiffExpr& L, const std::vector<double>& ts,
                          const std::vector<cplx>& lams);

// Nevanlinna property: Im formMatrix(L) / Im lambda <= 0; for odd r the top
// q, s coefficients must be lambda-free with s = q^*.
CheckReport checkNevanlinna(const DiffExpr& L, const std::vector<double>& ts,
                            const std::vector<cplx>& lams);

// Degenerate-weight domination: 0 <= [m] <= -Im formMatrix(L) / Im lambda
// (form-matrix congruent version of the weight inequality).
CheckReport checkWeightDomination(const Pencil& P, const std::vector<double>& ts,
                                  const std::vector<cplx>& lams);

// Perturbation domination: Im n(t, i tau) <= c(t, tau) m(t) with
// sup_t c(t,tau) = o(tau); reports the fitted c(tau) table.
struct NDominationReport {
  bool pass = true;
  std::vector<double> taus;
  std::vector<double> c;  // sup_t c(t, tau)
  std::string note;
};
NDominationReport checkNDomination(const Pencil& P, const std::vector<double>& ts,
                                   const std::vector<double>& taus);

// Is f m-null: the form integral m[f,f] over (a,b) vanishes; cross-checked
// against vanishing of the upper quasi-derivatives f^[s/2..s](t|m).
struct MNullReport {
  bool isNull = false;
  double formValue = 0.0;     // m[f,f]
  double quasiResidual = 0.0; // max |f^[k](t|m)|, k = s/2..s, over samples
};
MNullReport mNullTest(const DiffExpr& m, const SmoothFn& f, double a, double b,
                      double tol = 1e-10);

// m[f,g] over (a,b) by composite Gauss quadrature of the Dirichlet density.
cplx mFormIntegral(const DiffExpr& m, const SmoothFn& f, const SmoothFn& g,
                   double a, double b, int nseg = 64);

}  // namespace pencil

#endif  // PENCIL_EXPR_HPP
