#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace nfce {

using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;

// Order-3 complex tensor with a fixed linear layout: mode-1 index fastest,
// i.e. entry (q, t, p) lives at q + t*Q + p*Q*T (0-based).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int nq, int nt, int np)
      : nq_(nq), nt_(nt), np_(np), data_(VectorXcd::Zero(nq * nt * np)) {}

  int dim1() const { return nq_; }
  int dim2() const { return nt_; }
  int dim3() const { return np_; }
  Eigen::Index size() const { return data_.size(); }

  std::complex<double>& operator()(int q, int t, int p) {
    return data_[q + t * nq_ + p * nq_ * nt_];
  }
  const std::complex<double>& operator()(int q, int t, int p) const {
    return data_[q + t * nq_ + p * nq_ * nt_];
  }

  VectorXcd& vec() { return data_; }
  const VectorXcd& vec() const { return data_; }

  double frobenius_norm() const { return data_.norm(); }

 private:
  int nq_ = 0, nt_ = 0, np_ = 0;
  VectorXcd data_;
};

// Mode-n unfolding, mode in {1,2,3}. The column orderings are fixed so that
// for a CP tensor with factors (A: Q x L, B: T x L, C: P x L):
//   unfold(1)^T = (C kr B) A^T,  unfold(2)^T = (C kr A) B^T,
//   unfold(3)^T = (B kr A) C^T,
// with kr the Khatri-Rao product below. Throws InvalidMode otherwise.
MatrixXcd unfold(const Tensor3& t, int mode);

// Inverse of unfold for the given mode and target dimensions.
Tensor3 fold(const MatrixXcd& m, int mode, int nq, int nt, int np);

// Column-wise Kronecker product: column l = X(:,l) kron Y(:,l), the X index
// running slower. Throws ShapeMismatch on unequal column counts.
MatrixXcd khatri_rao(const MatrixXcd& x, const MatrixXcd& y);

// Positions (1-based) of tensor entry (q, t, p) inside vec(W_(n)^H) for the
// three unfoldings; used to place noise cross-covariance entries.
std::array<long, 3> vec_index_maps(int q, int t, int p, int nq, int nt, int np);

// Sum of rank-1 outer products: result(q,t,p) = sum_l A(q,l) B(t,l) C(p,l).
Tensor3 cp_tensor(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c);

// Order-4 superdiagonal core contracted with three factor matrices and a
// weight row: result(i,j,k) = sum_l m1(i,l) m2(j,l) m3(k,l) w(l). The weight
// row collapses the fourth mode, leaving an order-3 tensor.
Tensor3 nmode_product_chain(const MatrixXcd& m1, const MatrixXcd& m2,
                            const MatrixXcd& m3, const RowVectorXcd& w);

}  // namespace nfce
