#include "sdioph/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdioph {

namespace {

mpq_class dot_zq(const std::vector<mpz_class>& a, const std::vector<mpq_class>& b) {
  mpq_class s = 0;
  for (size_t t = 0; t < a.size(); ++t) s += mpq_class(a[t]) * b[t];
  return s;
}

// round to nearest integer, halves toward +infinity (floor(x + 1/2))
mpz_class round_nearest(const mpq_class& x) {
  mpz_class num = x.get_num() * 2 + x.get_den();
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), mpz_class(x.get_den() * 2).get_mpz_t());
  return out;
}

mpz_class det_rec(const std::vector<std::vector<mpz_class>>& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  mpz_class s = 0;
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<mpz_class>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<mpz_class> row;
      for (size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[i][c]);
      minor.push_back(std::move(row));
    }
    mpz_class term = m[0][j] * det_rec(minor);
    if (j % 2) s -= term; else s += term;
  }
  return s;
}

}  // namespace

mpz_class IntegerLattice::determinant() const {
  std::vector<std::vector<mpz_class>> rows(k, std::vector<mpz_class>(k));
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < k; ++r) rows[r][c] = basis[c][r];
  return det_rec(rows);
}

GramSchmidtData gram_schmidt(const IntegerLattice& L) {
  const int k = L.k;
  GramSchmidtData gs;
  gs.norms_sq.assign(k, mpq_class(0));
  gs.mu.assign(k, std::vector<mpq_class>(k, mpq_class(0)));
  std::vector<std::vector<mpq_class>> star(k, std::vector<mpq_class>(k));
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < k; ++t) star[i][t] = mpq_class(L.basis[i][t]);
    for (int j = 0; j < i; ++j) {
      gs.mu[i][j] = dot_zq(L.basis[i], star[j]) / gs.norms_sq[j];
      for (int t = 0; t < k; ++t) star[i][t] -= gs.mu[i][j] * star[j][t];
    }
    mpq_class ns = 0;
    for (int t = 0; t < k; ++t) ns += star[i][t] * star[i][t];
    if (ns == 0) throw std::invalid_argument("lll_reduce: dependent basis columns");
    gs.norms_sq[i] = ns;
  }
  return gs;
}

GramSchmidtData lll_reduce(IntegerLattice& L) {
  const int k = L.k;
  const mpq_class delta(3, 4);
  GramSchmidtData gs = gram_schmidt(L);
  int i = 1;
  while (i < k) {
    for (int j = i - 1; j >= 0; --j) {
      mpz_class r = round_nearest(gs.mu[i][j]);
      if (r != 0) {
        for (int t = 0; t < k; ++t) L.basis[i][t] -= r * L.basis[j][t];
        gs.mu[i][j] -= r;
        for (int l = 0; l < j; ++l) gs.mu[i][l] -= mpq_class(r) * gs.mu[j][l];
      }
    }
    if (gs.norms_sq[i] >= (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.norms_sq[i - 1]) {
      ++i;
    } else {
      std::swap(L.basis[i], L.basis[i - 1]);
      gs = gram_schmidt(L);
      i = std::max(i - 1, 1);
    }
  }
  return gs;
}

namespace {

// Solve B z = y exactly (columns of B are the basis), Gaussian elimination
// over the rationals.  k <= 6 in this project.
std::vector<mpq_class> solve_exact(const IntegerLattice& B, const std::vector<mpz_class>& y) {
  const int k = B.k;
  std::vector<std::vector<mpq_class>> m(k, std::vector<mpq_class>(k + 1));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m[r][c] = mpq_class(B.basis[c][r]);
    m[r][k] = mpq_class(y[r]);
  }
  for (int col = 0; col < k; ++col) {
    int piv = -1;
    for (int r = col; r < k; ++r)
      if (m[r][col] != 0) { piv = r; break; }
    if (piv < 0) throw std::invalid_argument("solve_exact: singular basis");
    std::swap(m[col], m[piv]);
    for (int r = 0; r < k; ++r) {
      if (r == col || m[r][col] == 0) continue;
      mpq_class f = m[r][col] / m[col][col];
      for (int c = col; c <= k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<mpq_class> z(k);
  for (int r = 0; r < k; ++r) z[r] = m[r][k] / m[r][r];
  return z;
}

bool is_integral(const mpq_class& q) { return q.get_den() == 1; }

// distance to the nearest integer, exact
mpq_class dist_to_z(const mpq_class& q) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), mpz_class(q.get_num()).get_mpz_t(), mpz_class(q.get_den()).get_mpz_t());
  mpq_class frac = q - mpq_class(fl);
  mpq_class other = 1 - frac;
  return frac < other ? frac : other;
}

}  // namespace

mpq_class lattice_lower_bound_sq(const IntegerLattice& reduced,
                                 const GramSchmidtData& gs,
                                 const std::vector<mpz_class>& y) {
  const int k = reduced.k;
  mpq_class b1sq = 0;
  for (int t = 0; t < k; ++t) b1sq += mpq_class(reduced.basis[0][t]) * reduced.basis[0][t];
  mpq_class c2 = 0;
  for (int j = 0; j < k; ++j) {
    mpq_class r = b1sq / gs.norms_sq[j];
    if (r > c2) c2 = r;
  }

  bool y_zero = true;
  for (const auto& v : y)
    if (v != 0) { y_zero = false; break; }

  mpq_class sigma_sq = 1;
  if (!y_zero) {
    std::vector<mpq_class> z = solve_exact(reduced, y);
    int i0 = -1;
    for (int i = k - 1; i >= 0; --i)
      if (!is_integral(z[i])) { i0 = i; break; }
    if (i0 >= 0) {  // y not in the lattice
      mpq_class d = dist_to_z(z[i0]);
      sigma_sq = d * d;
    }
  }
  return sigma_sq * b1sq / c2;
}

mpz_class stable_floor_log(const mpz_class& C, const mpq_class& arg) {
  if (arg <= 0) throw std::domain_error("stable_floor_log: argument must be positive");
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 96;
  const mpfr_prec_t ceiling = 1 << 22;
  for (; prec <= ceiling; prec *= 2) {
    Real lo = Real::log_q(arg, MPFR_RNDD, prec);
    Real hi = Real::log_q(arg, MPFR_RNDU, prec);
    Real c = Real::of(C, prec);
    mpz_class f_lo = r_mul(c, lo, MPFR_RNDD).floor_z();
    mpz_class f_hi = r_mul(c, hi, MPFR_RNDU).floor_z();
    if (f_lo == f_hi) return f_lo;
  }
  throw std::runtime_error("stable_floor_log: floor unstable beyond precision ceiling");
}

std::pair<IntegerLattice, std::vector<mpz_class>> build_approx_lattice(const LatticeProblem& prob) {
  const int k = static_cast<int>(prob.eta_args.size());
  IntegerLattice L;
  L.k = k;
  L.basis.assign(k, std::vector<mpz_class>(k, 0));
  for (int i = 0; i < k; ++i) {
    if (i < k - 1) L.basis[i][i] = 1;
    L.basis[i][k - 1] = stable_floor_log(prob.C_tilde, prob.eta_args[i]);
  }
  std::vector<mpz_class> y(k, 0);
  if (prob.eta0_arg != 1)
    y[k - 1] = -stable_floor_log(prob.C_tilde, prob.eta0_arg);
  return {std::move(L), std::move(y)};
}

ReductionOutcome reduce_linear_form(const LatticeProblem& prob) {
  const int k = static_cast<int>(prob.eta_args.size());
  if (static_cast<int>(prob.X.size()) != k) throw std::invalid_argument("X size mismatch");
  auto [L, y] = build_approx_lattice(prob);
  GramSchmidtData gs = lll_reduce(L);
  mpq_class c1_sq = lattice_lower_bound_sq(L, gs, y);

  mpq_class S = 0;
  mpz_class sumX = 0;
  for (int i = 0; i < k; ++i) {
    if (i < k - 1) S += mpq_class(prob.X[i]) * prob.X[i];
    sumX += prob.X[i];
  }
  mpq_class T = mpq_class(1 + sumX) / 2;

  ReductionOutcome out;
  out.c1 = std::sqrt(mpq_class(c1_sq).get_d());

  // exceptional solution x_1..x_{k-1} = 0, x_k = -floor(C eta0)/floor(C eta_k)
  if (prob.eta0_arg != 1) {
    mpz_class f0 = stable_floor_log(prob.C_tilde, prob.eta0_arg);
    mpz_class fk = stable_floor_log(prob.C_tilde, prob.eta_args[k - 1]);
    if (fk != 0 && mpz_divisible_p(f0.get_mpz_t(), fk.get_mpz_t())) {
      mpz_class xk = -(f0 / fk);
      if (abs(xk) <= prob.X[k - 1]) out.exceptional_xk = xk;
    }
  } else {
    out.exceptional_xk = mpz_class(0);  // the all-zero vector
  }

  if (c1_sq < T * T + S) {
    out.kind = ReductionKind::Inconclusive;
    return out;
  }
  // W = sqrt(c1^2 - S) - T must be positive for a usable bound
  const mpfr_prec_t prec = prob.c3.prec();
  mpq_class rad = c1_sq - S;
  Real rad_r(prec);
  mpfr_set_q(rad_r.raw(), rad.get_mpq_t(), MPFR_RNDD);
  Real W = r_sqrt(rad_r, MPFR_RNDD);
  Real T_r(prec);
  mpfr_set_q(T_r.raw(), T.get_mpq_t(), MPFR_RNDU);
  W = r_sub(W, T_r, MPFR_RNDD);
  if (W.sgn() <= 0) {
    out.kind = ReductionKind::Inconclusive;
    return out;
  }
  // H <= (log(C c3) - log W) / c4, rounded up
  Real logC = r_add(Real::log_z(prob.C_tilde, MPFR_RNDU, prec), r_log(prob.c3, MPFR_RNDU), MPFR_RNDU);
  Real H = r_div(r_sub(logC, r_log(W, MPFR_RNDD), MPFR_RNDU), prob.c4, MPFR_RNDU);
  out.kind = ReductionKind::NewBound;
  out.H_bound = H;
  return out;
}

}  // namespace sdioph
