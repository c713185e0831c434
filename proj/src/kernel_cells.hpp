#pragma once

// Per-element bodies shared by the serial and OpenMP kernel backends.
// Each function computes exactly one output cell (or one per-sample slice for
// the LSTM), with a fixed internal summation order. The two backends differ
// only in how they iterate over these cells, which is what keeps them
// bitwise-identical.

#include <cmath>

namespace emtl::kernels::cell {

inline double dot_strided(const double* a, int astride, const double* b, int bstride, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i * astride] * b[i * bstride];
  return s;
}

inline double matmul_cell(const double* x, const double* w, int I, int O, int b, int o) {
  return dot_strided(x + static_cast<long>(b) * I, 1, w + o, O, I);
}

inline double matmul_grad_w_cell(const double* x, const double* dy, int B, int I, int O, int i,
                                 int o) {
  double s = 0.0;
  for (int b = 0; b < B; ++b) s += x[static_cast<long>(b) * I + i] * dy[static_cast<long>(b) * O + o];
  return s;
}

inline double matmul_grad_x_cell(const double* dy, const double* w, int O, int b, int i) {
  return dot_strided(dy + static_cast<long>(b) * O, 1, w + static_cast<long>(i) * O, 1, O);
}

inline double bias_grad_cell(const double* dy, int B, int O, int o) {
  double s = 0.0;
  for (int b = 0; b < B; ++b) s += dy[static_cast<long>(b) * O + o];
  return s;
}

inline double conv1d_cell(const double* x, const double* k, const double* bias, int L, int C,
                          int W, int b, int t, int f) {
  const double* xb = x + static_cast<long>(b) * L * C;
  const double* kf = k + static_cast<long>(f) * W * C;
  double s = bias ? bias[f] : 0.0;
  for (int w = 0; w < W; ++w)
    for (int c = 0; c < C; ++c) s += xb[(t + w) * C + c] * kf[w * C + c];
  return s;
}

inline double conv1d_grad_x_cell(const double* dy, const double* k, int Lo, int C, int F, int W,
                                 int b, int t, int c) {
  // dy index (b, t-w, f) is valid when 0 <= t-w < Lo
  const double* dyb = dy + static_cast<long>(b) * Lo * F;
  double s = 0.0;
  for (int w = 0; w < W; ++w) {
    int to = t - w;
    if (to < 0 || to >= Lo) continue;
    for (int f = 0; f < F; ++f) s += dyb[to * F + f] * k[(static_cast<long>(f) * W + w) * C + c];
  }
  return s;
}

inline double conv1d_grad_k_cell(const double* x, const double* dy, int B, int L, int C, int Lo,
                                 int F, int f, int w, int c) {
  double s = 0.0;
  for (int b = 0; b < B; ++b) {
    const double* xb = x + static_cast<long>(b) * L * C;
    const double* dyb = dy + static_cast<long>(b) * Lo * F;
    for (int t = 0; t < Lo; ++t) s += xb[(t + w) * C + c] * dyb[t * F + f];
  }
  return s;
}

inline double conv1d_grad_bias_cell(const double* dy, int B, int Lo, int F, int f) {
  double s = 0.0;
  for (int b = 0; b < B; ++b)
    for (int t = 0; t < Lo; ++t) s += dy[(static_cast<long>(b) * Lo + t) * F + f];
  return s;
}

inline void maxpool_cell(const double* x, double* y, int* argmax, int L, int F, int W, int b,
                         int to, int f) {
  const double* xb = x + static_cast<long>(b) * L * F;
  int base = to * W;
  int best = base;
  double bestv = xb[base * F + f];
  for (int w = 1; w < W; ++w) {
    double v = xb[(base + w) * F + f];
    if (v > bestv) {  // strict: ties keep the lowest index
      bestv = v;
      best = base + w;
    }
  }
  int Lo = L / W;
  y[(static_cast<long>(b) * Lo + to) * F + f] = bestv;
  argmax[(static_cast<long>(b) * Lo + to) * F + f] = best;
}

inline double meanpool_cell(const double* x, int len, int L, int E, int b, int e) {
  if (len <= 0) return 0.0;
  const double* xb = x + static_cast<long>(b) * L * E;
  double s = 0.0;
  for (int t = 0; t < len; ++t) s += xb[t * E + e];
  return s / len;
}

inline void softmax_row(const double* z, double* p, int K) {
  double mx = z[0];
  for (int k = 1; k < K; ++k)
    if (z[k] > mx) mx = z[k];
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    p[k] = std::exp(z[k] - mx);
    sum += p[k];
  }
  for (int k = 0; k < K; ++k) p[k] /= sum;
}

inline void softmax_backward_row(const double* p, const double* dp, double* dz, int K) {
  double inner = 0.0;
  for (int k = 0; k < K; ++k) inner += dp[k] * p[k];
  for (int k = 0; k < K; ++k) dz[k] += p[k] * (dp[k] - inner);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One sample end to end; gate order i, f, g, o.
inline void lstm_sample_forward(const double* x, const double* wx, const double* wh,
                                const double* bias, double* gates, double* c, double* h,
                                double* hT, int T, int C, int H) {
  const int G = 4 * H;
  for (int t = 0; t < T; ++t) {
    const double* xt = x + static_cast<long>(t) * C;
    const double* hprev = t > 0 ? h + static_cast<long>(t - 1) * H : nullptr;
    const double* cprev = t > 0 ? c + static_cast<long>(t - 1) * H : nullptr;
    double* gt = gates + static_cast<long>(t) * G;
    double* ct = c + static_cast<long>(t) * H;
    double* ht = h + static_cast<long>(t) * H;
    for (int u = 0; u < G; ++u) {
      double s = bias[u];
      for (int i = 0; i < C; ++i) s += xt[i] * wx[static_cast<long>(i) * G + u];
      if (hprev)
        for (int j = 0; j < H; ++j) s += hprev[j] * wh[static_cast<long>(j) * G + u];
      gt[u] = s;
    }
    for (int u = 0; u < H; ++u) {
      double gi = sigmoid(gt[u]);
      double gf = sigmoid(gt[H + u]);
      double gg = std::tanh(gt[2 * H + u]);
      double go = sigmoid(gt[3 * H + u]);
      gt[u] = gi;
      gt[H + u] = gf;
      gt[2 * H + u] = gg;
      gt[3 * H + u] = go;
      double cp = cprev ? cprev[u] : 0.0;
      ct[u] = gf * cp + gi * gg;
      ht[u] = go * std::tanh(ct[u]);
    }
  }
  for (int u = 0; u < H; ++u) hT[u] = T > 0 ? h[static_cast<long>(T - 1) * H + u] : 0.0;
}

// x is not needed here: dx comes from dgates.Wx^T and the weight-gradient
// reductions over x happen in the caller
inline void lstm_sample_backward(const double* wx, const double* wh, const double* gates,
                                 const double* c, const double* dhT, double* dgates, double* dx,
                                 double* dh_buf, double* dc_buf, int T, int C, int H) {
  const int G = 4 * H;
  for (int u = 0; u < H; ++u) {
    dh_buf[u] = dhT[u];
    dc_buf[u] = 0.0;
  }
  for (int t = T - 1; t >= 0; --t) {
    const double* gt = gates + static_cast<long>(t) * G;
    const double* ct = c + static_cast<long>(t) * H;
    const double* cprev = t > 0 ? c + static_cast<long>(t - 1) * H : nullptr;
    double* dgt = dgates + static_cast<long>(t) * G;
    for (int u = 0; u < H; ++u) {
      double gi = gt[u], gf = gt[H + u], gg = gt[2 * H + u], go = gt[3 * H + u];
      double tc = std::tanh(ct[u]);
      double dc = dc_buf[u] + dh_buf[u] * go * (1.0 - tc * tc);
      double dgo = dh_buf[u] * tc;
      double dgi = dc * gg;
      double dgf = dc * (cprev ? cprev[u] : 0.0);
      double dgg = dc * gi;
      dgt[u] = dgi * gi * (1.0 - gi);
      dgt[H + u] = dgf * gf * (1.0 - gf);
      dgt[2 * H + u] = dgg * (1.0 - gg * gg);
      dgt[3 * H + u] = dgo * go * (1.0 - go);
      dc_buf[u] = dc * gf;
    }
    double* dxt = dx + static_cast<long>(t) * C;
    for (int i = 0; i < C; ++i) {
      double s = 0.0;
      for (int u = 0; u < G; ++u) s += dgt[u] * wx[static_cast<long>(i) * G + u];
      dxt[i] += s;
    }
    for (int j = 0; j < H; ++j) {
      double s = 0.0;
      for (int u = 0; u < G; ++u) s += dgt[u] * wh[static_cast<long>(j) * G + u];
      dh_buf[j] = s;  // becomes dh for t-1
    }
  }
}

inline void adam_cell(double* p, const double* g, double* m, double* v, int i, double lr,
                      double b1, double b2, double eps, double b1t, double b2t) {
  m[i] = b1 * m[i] + (1.0 - b1) * g[i];
  v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
  double mhat = m[i] / (1.0 - b1t);
  double vhat = v[i] / (1.0 - b2t);
  p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
}

}  // namespace emtl::kernels::cell
