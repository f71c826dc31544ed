#include "nfce/tensor_ops.hpp"

#include "nfce/errors.hpp"

namespace nfce {

MatrixXcd unfold(const Tensor3& t, int mode) {
  const int nq = t.dim1(), nt = t.dim2(), np = t.dim3();
  MatrixXcd m;
  switch (mode) {
    case 1:
      m.resize(nq, nt * np);
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) m(q, p * nt + tt) = t(q, tt, p);
      break;
    case 2:
      m.resize(nt, nq * np);
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) m(tt, p * nq + q) = t(q, tt, p);
      break;
    case 3:
      m.resize(np, nq * nt);
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) m(p, tt * nq + q) = t(q, tt, p);
      break;
    default:
      throw InvalidMode("unfold mode must be 1, 2 or 3");
  }
  return m;
}

Tensor3 fold(const MatrixXcd& m, int mode, int nq, int nt, int np) {
  Tensor3 t(nq, nt, np);
  switch (mode) {
    case 1:
      if (m.rows() != nq || m.cols() != Eigen::Index(nt) * np)
        throw ShapeMismatch("fold: matrix does not match mode-1 dimensions");
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) t(q, tt, p) = m(q, p * nt + tt);
      break;
    case 2:
      if (m.rows() != nt || m.cols() != Eigen::Index(nq) * np)
        throw ShapeMismatch("fold: matrix does not match mode-2 dimensions");
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) t(q, tt, p) = m(tt, p * nq + q);
      break;
    case 3:
      if (m.rows() != np || m.cols() != Eigen::Index(nq) * nt)
        throw ShapeMismatch("fold: matrix does not match mode-3 dimensions");
      for (int p = 0; p < np; ++p)
        for (int tt = 0; tt < nt; ++tt)
          for (int q = 0; q < nq; ++q) t(q, tt, p) = m(p, tt * nq + q);
      break;
    default:
      throw InvalidMode("fold mode must be 1, 2 or 3");
  }
  return t;
}

MatrixXcd khatri_rao(const MatrixXcd& x, const MatrixXcd& y) {
  if (x.cols() != y.cols())
    throw ShapeMismatch("khatri_rao: column counts differ");
  const Eigen::Index m = x.rows(), n = y.rows(), cols = x.cols();
  MatrixXcd out(m * n, cols);
  for (Eigen::Index l = 0; l < cols; ++l)
    for (Eigen::Index a = 0; a < m; ++a)
      out.block(a * n, l, n, 1) = x(a, l) * y.col(l);
  return out;
}

std::array<long, 3> vec_index_maps(int q, int t, int p, int nq, int nt, int np) {
  if (q < 1 || q > nq || t < 1 || t > nt || p < 1 || p > np)
    throw IndexOutOfRange("vec_index_maps: index outside tensor dimensions");
  const long i1 = long(p - 1) * nt + t + long(q - 1) * np * nt;
  const long i2 = long(p - 1) * nq + q + long(t - 1) * np * nq;
  const long i3 = long(t - 1) * nq + q + long(p - 1) * nq * nt;
  return {i1, i2, i3};
}

Tensor3 cp_tensor(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c) {
  if (a.cols() != b.cols() || b.cols() != c.cols())
    throw ShapeMismatch("cp_tensor: factor column counts differ");
  const int nq = int(a.rows()), nt = int(b.rows()), np = int(c.rows());
  Tensor3 t(nq, nt, np);
  for (int l = 0; l < a.cols(); ++l)
    for (int p = 0; p < np; ++p)
      for (int tt = 0; tt < nt; ++tt)
        for (int q = 0; q < nq; ++q)
          t(q, tt, p) += a(q, l) * b(tt, l) * c(p, l);
  return t;
}

Tensor3 nmode_product_chain(const MatrixXcd& m1, const MatrixXcd& m2,
                            const MatrixXcd& m3, const RowVectorXcd& w) {
  if (m1.cols() != m2.cols() || m2.cols() != m3.cols() || m3.cols() != w.cols())
    throw ShapeMismatch("nmode_product_chain: factor column counts differ");
  MatrixXcd weighted = m1;
  for (Eigen::Index l = 0; l < weighted.cols(); ++l) weighted.col(l) *= w[l];
  return cp_tensor(weighted, m2, m3);
}

}  // namespace nfce
