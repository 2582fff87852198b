#include "vnav/nn/matrix.hpp"

#include <stdexcept>

#include <cblas.h>

extern "C" void openblas_set_num_threads(int);

namespace vnav::nn {

namespace {

struct BlasInit {
  BlasInit() { openblas_set_num_threads(1); }  // deterministic reductions
};
const BlasInit blas_init;

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool ta, bool tb, double beta) {
  const int m = ta ? a.cols() : a.rows();
  const int k = ta ? a.rows() : a.cols();
  const int kb = tb ? b.cols() : b.rows();
  const int n = tb ? b.rows() : b.cols();
  if (k != kb || c.rows() != m || c.cols() != n)
    throw std::invalid_argument("matmul: shape mismatch");
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m, n,
              k, 1.0, a.data(), a.cols(), b.data(), b.cols(), beta, c.data(), c.cols());
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, bool transpose_a, bool transpose_b) {
  Matrix c(transpose_a ? a.cols() : a.rows(), transpose_b ? b.rows() : b.cols());
  gemm(a, b, c, transpose_a, transpose_b, 0.0);
  return c;
}

void matmul_accumulate(const Matrix& a, const Matrix& b, Matrix& c, bool transpose_a,
                       bool transpose_b) {
  gemm(a, b, c, transpose_a, transpose_b, 1.0);
}

}  // namespace vnav::nn
