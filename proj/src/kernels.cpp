#include "emtl/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace emtl::kernels {

namespace {
std::atomic<Backend> g_backend{
#ifdef _OPENMP
    Backend::parallel
#else
    Backend::serial
#endif
};
}  // namespace

void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }
Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool parallel_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define EMTL_DISPATCH(call)                  \
  if (active_backend() == Backend::serial) { \
    serial::call;                            \
  } else {                                   \
    par::call;                               \
  }

void matmul(const double* x, const double* w, double* y, int B, int I, int O) {
  EMTL_DISPATCH(matmul(x, w, y, B, I, O))
}
void matmul_grad_w(const double* x, const double* dy, double* dw, int B, int I, int O) {
  EMTL_DISPATCH(matmul_grad_w(x, dy, dw, B, I, O))
}
void matmul_grad_x(const double* dy, const double* w, double* dx, int B, int I, int O) {
  EMTL_DISPATCH(matmul_grad_x(dy, w, dx, B, I, O))
}
void bias_add(const double* b, double* y, int B, int O) { EMTL_DISPATCH(bias_add(b, y, B, O)) }
void bias_grad(const double* dy, double* db, int B, int O) {
  EMTL_DISPATCH(bias_grad(dy, db, B, O))
}
void conv1d_forward(const double* x, const double* k, const double* bias, double* y, int B, int L,
                    int C, int F, int W) {
  EMTL_DISPATCH(conv1d_forward(x, k, bias, y, B, L, C, F, W))
}
void conv1d_grad_x(const double* dy, const double* k, double* dx, int B, int L, int C, int F,
                   int W) {
  EMTL_DISPATCH(conv1d_grad_x(dy, k, dx, B, L, C, F, W))
}
void conv1d_grad_k(const double* x, const double* dy, double* dk, int B, int L, int C, int F,
                   int W) {
  EMTL_DISPATCH(conv1d_grad_k(x, dy, dk, B, L, C, F, W))
}
void conv1d_grad_bias(const double* dy, double* db, int B, int Lo, int F) {
  EMTL_DISPATCH(conv1d_grad_bias(dy, db, B, Lo, F))
}
void maxpool1d_forward(const double* x, double* y, int* argmax, int B, int L, int F, int W) {
  EMTL_DISPATCH(maxpool1d_forward(x, y, argmax, B, L, F, W))
}
void maxpool1d_backward(const double* dy, const int* argmax, double* dx, int B, int L, int Lo,
                        int F) {
  EMTL_DISPATCH(maxpool1d_backward(dy, argmax, dx, B, L, Lo, F))
}
void embedding_forward(const double* table, const int* ids, double* y, int N, int E) {
  EMTL_DISPATCH(embedding_forward(table, ids, y, N, E))
}
void embedding_backward(const double* dy, const int* ids, double* dtable, int N, int E) {
  EMTL_DISPATCH(embedding_backward(dy, ids, dtable, N, E))
}
void meanpool_forward(const double* x, const int* len, double* y, int B, int L, int E) {
  EMTL_DISPATCH(meanpool_forward(x, len, y, B, L, E))
}
void meanpool_backward(const double* dy, const int* len, double* dx, int B, int L, int E) {
  EMTL_DISPATCH(meanpool_backward(dy, len, dx, B, L, E))
}
void softmax_rows(const double* z, double* p, int B, int K) {
  EMTL_DISPATCH(softmax_rows(z, p, B, K))
}
void softmax_backward_rows(const double* p, const double* dp, double* dz, int B, int K) {
  EMTL_DISPATCH(softmax_backward_rows(p, dp, dz, B, K))
}
void lstm_seq_forward(const double* x, const double* wx, const double* wh, const double* b,
                      double* gates, double* c, double* h, double* hT, int B, int T, int C,
                      int H) {
  EMTL_DISPATCH(lstm_seq_forward(x, wx, wh, b, gates, c, h, hT, B, T, C, H))
}
void lstm_seq_backward(const double* x, const double* wx, const double* wh, const double* gates,
                       const double* c, const double* dhT, double* dgates, double* dx, int B,
                       int T, int C, int H) {
  EMTL_DISPATCH(lstm_seq_backward(x, wx, wh, gates, c, dhT, dgates, dx, B, T, C, H))
}
void adam_update(double* p, const double* g, double* m, double* v, int n, double lr, double b1,
                 double b2, double eps, double b1t, double b2t) {
  EMTL_DISPATCH(adam_update(p, g, m, v, n, lr, b1, b2, eps, b1t, b2t))
}
void axpy(double a, const double* x, double* y, int n) { EMTL_DISPATCH(axpy(a, x, y, n)) }

#undef EMTL_DISPATCH

}  // namespace emtl::kernels
