#include "emtl/kernels.hpp"

#include <cstddef>
#include <vector>

#include "kernel_cells.hpp"

// Reference backend: plain loops, one cell at a time. Kept deliberately
// simple; this is what the OpenMP backend and the tests are checked against.

namespace emtl::kernels::serial {

namespace cell = emtl::kernels::cell;

void matmul(const double* x, const double* w, double* y, int B, int I, int O) {
  for (int b = 0; b < B; ++b)
    for (int o = 0; o < O; ++o) y[static_cast<long>(b) * O + o] += cell::matmul_cell(x, w, I, O, b, o);
}

void matmul_grad_w(const double* x, const double* dy, double* dw, int B, int I, int O) {
  for (int i = 0; i < I; ++i)
    for (int o = 0; o < O; ++o)
      dw[static_cast<long>(i) * O + o] += cell::matmul_grad_w_cell(x, dy, B, I, O, i, o);
}

void matmul_grad_x(const double* dy, const double* w, double* dx, int B, int I, int O) {
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < I; ++i)
      dx[static_cast<long>(b) * I + i] += cell::matmul_grad_x_cell(dy, w, O, b, i);
}

void bias_add(const double* b, double* y, int B, int O) {
  for (int r = 0; r < B; ++r)
    for (int o = 0; o < O; ++o) y[static_cast<long>(r) * O + o] += b[o];
}

void bias_grad(const double* dy, double* db, int B, int O) {
  for (int o = 0; o < O; ++o) db[o] += cell::bias_grad_cell(dy, B, O, o);
}

void conv1d_forward(const double* x, const double* k, const double* bias, double* y, int B, int L,
                    int C, int F, int W) {
  const int Lo = L - W + 1;
  for (int b = 0; b < B; ++b)
    for (int t = 0; t < Lo; ++t)
      for (int f = 0; f < F; ++f)
        y[(static_cast<long>(b) * Lo + t) * F + f] += cell::conv1d_cell(x, k, bias, L, C, W, b, t, f);
}

void conv1d_grad_x(const double* dy, const double* k, double* dx, int B, int L, int C, int F,
                   int W) {
  const int Lo = L - W + 1;
  for (int b = 0; b < B; ++b)
    for (int t = 0; t < L; ++t)
      for (int c = 0; c < C; ++c)
        dx[(static_cast<long>(b) * L + t) * C + c] +=
            cell::conv1d_grad_x_cell(dy, k, Lo, C, F, W, b, t, c);
}

void conv1d_grad_k(const double* x, const double* dy, double* dk, int B, int L, int C, int F,
                   int W) {
  const int Lo = L - W + 1;
  for (int f = 0; f < F; ++f)
    for (int w = 0; w < W; ++w)
      for (int c = 0; c < C; ++c)
        dk[(static_cast<long>(f) * W + w) * C + c] +=
            cell::conv1d_grad_k_cell(x, dy, B, L, C, Lo, F, f, w, c);
}

void conv1d_grad_bias(const double* dy, double* db, int B, int Lo, int F) {
  for (int f = 0; f < F; ++f) db[f] += cell::conv1d_grad_bias_cell(dy, B, Lo, F, f);
}

void maxpool1d_forward(const double* x, double* y, int* argmax, int B, int L, int F, int W) {
  const int Lo = L / W;
  for (int b = 0; b < B; ++b)
    for (int to = 0; to < Lo; ++to)
      for (int f = 0; f < F; ++f) cell::maxpool_cell(x, y, argmax, L, F, W, b, to, f);
}

void maxpool1d_backward(const double* dy, const int* argmax, double* dx, int B, int L, int Lo,
                        int F) {
  // windows are disjoint, so each dx cell has exactly one writer
  for (int b = 0; b < B; ++b)
    for (int to = 0; to < Lo; ++to)
      for (int f = 0; f < F; ++f) {
        long i = (static_cast<long>(b) * Lo + to) * F + f;
        dx[(static_cast<long>(b) * L + argmax[i]) * F + f] += dy[i];
      }
}

void embedding_forward(const double* table, const int* ids, double* y, int N, int E) {
  for (int n = 0; n < N; ++n)
    for (int e = 0; e < E; ++e)
      y[static_cast<long>(n) * E + e] = table[static_cast<long>(ids[n]) * E + e];
}

void embedding_backward(const double* dy, const int* ids, double* dtable, int N, int E) {
  for (int e = 0; e < E; ++e)
    for (int n = 0; n < N; ++n)
      dtable[static_cast<long>(ids[n]) * E + e] += dy[static_cast<long>(n) * E + e];
}

void meanpool_forward(const double* x, const int* len, double* y, int B, int L, int E) {
  for (int b = 0; b < B; ++b)
    for (int e = 0; e < E; ++e)
      y[static_cast<long>(b) * E + e] += cell::meanpool_cell(x, len[b], L, E, b, e);
}

void meanpool_backward(const double* dy, const int* len, double* dx, int B, int L, int E) {
  for (int b = 0; b < B; ++b) {
    if (len[b] <= 0) continue;
    double inv = 1.0 / len[b];
    for (int t = 0; t < len[b]; ++t)
      for (int e = 0; e < E; ++e)
        dx[(static_cast<long>(b) * L + t) * E + e] += dy[static_cast<long>(b) * E + e] * inv;
  }
}

void softmax_rows(const double* z, double* p, int B, int K) {
  for (int b = 0; b < B; ++b)
    cell::softmax_row(z + static_cast<long>(b) * K, p + static_cast<long>(b) * K, K);
}

void softmax_backward_rows(const double* p, const double* dp, double* dz, int B, int K) {
  for (int b = 0; b < B; ++b)
    cell::softmax_backward_row(p + static_cast<long>(b) * K, dp + static_cast<long>(b) * K,
                               dz + static_cast<long>(b) * K, K);
}

void lstm_seq_forward(const double* x, const double* wx, const double* wh, const double* b,
                      double* gates, double* c, double* h, double* hT, int B, int T, int C,
                      int H) {
  for (int s = 0; s < B; ++s)
    cell::lstm_sample_forward(x + static_cast<long>(s) * T * C, wx, wh, b,
                              gates + static_cast<long>(s) * T * 4 * H,
                              c + static_cast<long>(s) * T * H, h + static_cast<long>(s) * T * H,
                              hT + static_cast<long>(s) * H, T, C, H);
}

void lstm_seq_backward(const double* x, const double* wx, const double* wh, const double* gates,
                       const double* c, const double* dhT, double* dgates, double* dx, int B,
                       int T, int C, int H) {
  (void)x;  // weight-gradient reductions over x happen in the caller
  std::vector<double> dh_buf(static_cast<std::size_t>(H)), dc_buf(static_cast<std::size_t>(H));
  for (int s = 0; s < B; ++s)
    cell::lstm_sample_backward(wx, wh, gates + static_cast<long>(s) * T * 4 * H,
                               c + static_cast<long>(s) * T * H, dhT + static_cast<long>(s) * H,
                               dgates + static_cast<long>(s) * T * 4 * H,
                               dx + static_cast<long>(s) * T * C, dh_buf.data(), dc_buf.data(), T,
                               C, H);
}

void adam_update(double* p, const double* g, double* m, double* v, int n, double lr, double b1,
                 double b2, double eps, double b1t, double b2t) {
  for (int i = 0; i < n; ++i) cell::adam_cell(p, g, m, v, i, lr, b1, b2, eps, b1t, b2t);
}

void axpy(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace emtl::kernels::serial
