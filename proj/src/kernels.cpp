#include "pseudomode/kernels.hpp"

#include <omp.h>

#include "pseudomode/errors.hpp"

namespace pseudomode::kernels {

namespace {

using Index = Eigen::Index;

// Row i of A times x for a compressed row-major matrix.
inline Complex row_dot(const SparseMatrix& a, Index i, const Complex* x) {
  const Complex* val = a.valuePtr();
  const int* idx = a.innerIndexPtr();
  const int* ptr = a.outerIndexPtr();
  Complex s{0.0, 0.0};
  for (int p = ptr[i]; p < ptr[i + 1]; ++p) s += val[p] * x[idx[p]];
  return s;
}

void require_compressed(const SparseMatrix& a) {
  if (!a.isCompressed()) throw InputError("kernel: sparse matrix must be compressed");
}

}  // namespace

void csr_matvec(const SparseMatrix& a, const Complex* x, Complex* y) {
  require_compressed(a);
  const Index rows = a.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) y[i] = row_dot(a, i, x);
}

void csr_matvec_serial(const SparseMatrix& a, const Complex* x, Complex* y) {
  Eigen::Map<const CVector> xv(x, a.cols());
  Eigen::Map<CVector> yv(y, a.rows());
  yv.noalias() = a * xv;
}

void LindbladTerms::finalize() {
  if (static_cast<std::size_t>(h.rows()) != n || static_cast<std::size_t>(h.cols()) != n)
    throw DimensionError("LindbladTerms: Hamiltonian size mismatch");
  if (jumps.size() != jump_rates.size()) throw InputError("LindbladTerms: one rate per jump operator");
  if (dephasing != 0.0 && sz.size() != n) throw InputError("LindbladTerms: dephasing needs sz diagonal");
  h.makeCompressed();
  h_col = h;
  h_col.makeCompressed();
  jumps_col.clear();
  anticomm_shift.assign(n, 0.0);
  for (std::size_t l = 0; l < jumps.size(); ++l) {
    jumps[l].makeCompressed();
    jumps_col.emplace_back(jumps[l]);
    jumps_col.back().makeCompressed();
    // <i|b^dag b|i> = sum_k |b_ki|^2
    const SparseMatrixCol& bc = jumps_col.back();
    for (Index c = 0; c < bc.outerSize(); ++c)
      for (SparseMatrixCol::InnerIterator it(bc, c); it; ++it)
        anticomm_shift[static_cast<std::size_t>(c)] += 0.5 * jump_rates[l] * std::norm(it.value());
  }
}

void lindblad_apply(const LindbladTerms& t, const Complex* rho, Complex* out) {
  const Index n = static_cast<Index>(t.n);
  const bool deph = t.dephasing != 0.0;
  const std::size_t nj = t.jumps.size();

#pragma omp parallel
  {
    std::vector<Complex> tmp(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (Index j = 0; j < n; ++j) {
      Complex* o = out + j * n;
      const Complex* rj = rho + j * n;
      const double sj = t.anticomm_shift[static_cast<std::size_t>(j)];
      const double zj = deph ? t.sz[static_cast<std::size_t>(j)] : 0.0;

      for (Index i = 0; i < n; ++i) {
        Complex v = -kI * row_dot(t.h, i, rj);
        v -= (t.anticomm_shift[static_cast<std::size_t>(i)] + sj) * rj[i];
        if (deph) v += 2.0 * t.dephasing * (t.sz[static_cast<std::size_t>(i)] * zj - 1.0) * rj[i];
        o[i] = v;
      }
      // + i rho H: column j of H
      for (SparseMatrixCol::InnerIterator it(t.h_col, j); it; ++it) {
        const Complex c = kI * it.value();
        const Complex* rk = rho + it.row() * n;
        for (Index i = 0; i < n; ++i) o[i] += c * rk[i];
      }
      // r_l (b rho b^dag)(:, j) = r_l sum_k conj(b_jk) b rho(:, k)
      for (std::size_t l = 0; l < nj; ++l) {
        const SparseMatrix& b = t.jumps[l];
        const SparseMatrixCol& bc = t.jumps_col[l];
        for (SparseMatrix::InnerIterator it(b, j); it; ++it) {
          const Complex c = t.jump_rates[l] * std::conj(it.value());
          const Complex* rk = rho + it.col() * n;
          // (b rho)(:, k) scattered by columns of b
          for (Index m = 0; m < n; ++m) {
            const Complex rm = rk[m];
            if (rm == Complex{}) continue;
            for (SparseMatrixCol::InnerIterator bt(bc, m); bt; ++bt) o[bt.row()] += c * bt.value() * rm;
          }
        }
      }
    }
  }
}

void lindblad_apply_serial(const LindbladTerms& t, const Complex* rho, Complex* out) {
  const Index n = static_cast<Index>(t.n);
  Eigen::Map<const CMatrix> r(rho, n, n);
  Eigen::Map<CMatrix> o(out, n, n);
  CMatrix acc = -kI * (t.h * r);
  acc += kI * (r * t.h);
  for (std::size_t l = 0; l < t.jumps.size(); ++l) {
    const SparseMatrix& b = t.jumps[l];
    const SparseMatrix bd = b.adjoint();
    const SparseMatrix nb = bd * b;
    CMatrix br = b * r;
    acc += t.jump_rates[l] * (br * bd);
    acc -= 0.5 * t.jump_rates[l] * (nb * r);
    acc -= 0.5 * t.jump_rates[l] * (r * nb);
  }
  if (t.dephasing != 0.0) {
    Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(t.sz.data(), n);
    acc += 2.0 * t.dephasing * (z.asDiagonal() * r * z.asDiagonal() - r);
  }
  o = acc;
}

Complex dot(std::size_t n, const Complex* x, const Complex* y) {
  double re = 0.0, im = 0.0;
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const Complex p = std::conj(x[i]) * y[i];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

double norm2(std::size_t n, const Complex* x) {
  double s = 0.0;
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) s += std::norm(x[i]);
  return std::sqrt(s);
}

void axpy(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) y[i] += a * x[i];
}

void scale(std::size_t n, Complex a, Complex* x) {
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) x[i] *= a;
}

}  // namespace pseudomode::kernels
