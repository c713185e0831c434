#pragma once

// Numeric kernels behind the tape operators. Every kernel exists twice:
// kernels::serial is the reference implementation, kernels::par is the
// OpenMP version. The parallel loops only split across output elements that
// no other iteration writes, and every per-element reduction keeps the serial
// summation order, so both backends produce bitwise-identical results for any
// thread count. Tests assert that equality; bench/kernel_bench.cpp compares
// their throughput.
//
// Layout conventions (row-major):
//   x        [B, I]          dense input
//   w        [I, O]          dense weight
//   seq      [B, T, C]       sequence input (time-major within a sample)
//   conv k   [F, W, C]       F filters of width W over C channels
//   lstm     gate order i, f, g, o packed as [.., 4H]

namespace emtl::kernels {

enum class Backend { serial, parallel };

void set_backend(Backend b);
Backend active_backend();
bool parallel_available();
int max_threads();

#define EMTL_KERNELS_DECL                                                                       \
  /* y[b,o] += sum_i x[b,i] * w[i,o] */                                                         \
  void matmul(const double* x, const double* w, double* y, int B, int I, int O);                \
  /* dw[i,o] += sum_b x[b,i] * dy[b,o] */                                                       \
  void matmul_grad_w(const double* x, const double* dy, double* dw, int B, int I, int O);       \
  /* dx[b,i] += sum_o dy[b,o] * w[i,o] */                                                       \
  void matmul_grad_x(const double* dy, const double* w, double* dx, int B, int I, int O);       \
  void bias_add(const double* b, double* y, int B, int O);                                      \
  void bias_grad(const double* dy, double* db, int B, int O);                                   \
  /* valid convolution: y[b,t,f] = bias[f] + sum_{w,c} x[b,t+w,c] * k[f,w,c] */                 \
  void conv1d_forward(const double* x, const double* k, const double* bias, double* y, int B,   \
                      int L, int C, int F, int W);                                              \
  void conv1d_grad_x(const double* dy, const double* k, double* dx, int B, int L, int C, int F, \
                     int W);                                                                    \
  void conv1d_grad_k(const double* x, const double* dy, double* dk, int B, int L, int C, int F, \
                     int W);                                                                    \
  void conv1d_grad_bias(const double* dy, double* db, int B, int Lo, int F);                    \
  /* non-overlapping windows, Lo = L / W; ties keep the lowest index */                         \
  void maxpool1d_forward(const double* x, double* y, int* argmax, int B, int L, int F, int W);  \
  void maxpool1d_backward(const double* dy, const int* argmax, double* dx, int B, int L,        \
                          int Lo, int F);                                                       \
  /* y[n,:] = table[ids[n],:] for n in [0,N) */                                                 \
  void embedding_forward(const double* table, const int* ids, double* y, int N, int E);         \
  /* dtable[ids[n],e] += dy[n,e]; parallel across e so each cell has one writer */              \
  void embedding_backward(const double* dy, const int* ids, double* dtable, int N, int E);      \
  /* mean over the first len[b] steps; len[b] == 0 yields zeros */                              \
  void meanpool_forward(const double* x, const int* len, double* y, int B, int L, int E);       \
  void meanpool_backward(const double* dy, const int* len, double* dx, int B, int L, int E);    \
  /* row-wise softmax with max subtraction */                                                   \
  void softmax_rows(const double* z, double* p, int B, int K);                                  \
  void softmax_backward_rows(const double* p, const double* dp, double* dz, int B, int K);      \
  /* full sequence, zero initial state; emits activated gates [B,T,4H], cell                    \
     states c [B,T,H] and hidden states h [B,T,H]; hT [B,H] is h at t=T-1 */                    \
  void lstm_seq_forward(const double* x, const double* wx, const double* wh, const double* b,   \
                        double* gates, double* c, double* h, double* hT, int B, int T, int C,   \
                        int H);                                                                 \
  /* per-sample BPTT: fills dgates [B,T,4H] and dx [B,T,C] from dhT [B,H];                      \
     weight gradients are reduced by the caller via matmul_grad_w/bias_grad */                  \
  void lstm_seq_backward(const double* x, const double* wx, const double* wh,                   \
                         const double* gates, const double* c, const double* dhT,               \
                         double* dgates, double* dx, int B, int T, int C, int H);               \
  void adam_update(double* p, const double* g, double* m, double* v, int n, double lr,          \
                   double b1, double b2, double eps, double b1t, double b2t);                   \
  /* y[i] += a * x[i] */                                                                        \
  void axpy(double a, const double* x, double* y, int n);

namespace serial {
EMTL_KERNELS_DECL
}
namespace par {
EMTL_KERNELS_DECL
}

// Dispatching entry points used by the engine; route to the active backend.
EMTL_KERNELS_DECL

#undef EMTL_KERNELS_DECL

}  // namespace emtl::kernels
