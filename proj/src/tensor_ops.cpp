// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/tensor_ops.hpp"

#include <cmath>
#include <string>

namespace wscnn::ops {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw DataError(msg);
}

void check_rank4(const NdArray& a, const char* what) {
  require(a.rank() == 4, std::string(what) + ": expected rank-4 array, got rank " +
                             std::to_string(a.rank()));
}

}  // namespace

namespace {

// Fused 3x3 stride-1 pad-1 kernel: one pass per (n,k) plane with the nine
// taps held in registers. Covers the network's dominant layers; everything
// else takes the generic path.
void conv3x3_accumulate(const real* __restrict__ xplane, int h, int w,
                        const real* __restrict__ wplane, real* __restrict__ oplane) {
  const real w00 = wplane[0], w01 = wplane[1], w02 = wplane[2];
  const real w10 = wplane[3], w11 = wplane[4], w12 = wplane[5];
  const real w20 = wplane[6], w21 = wplane[7], w22 = wplane[8];
  for (int io = 0; io < h; ++io) {
    real* __restrict__ orow = oplane + static_cast<std::size_t>(io) * w;
    const real* __restrict__ x0 = xplane + static_cast<std::size_t>(io - 1) * w;
    const real* __restrict__ x1 = x0 + w;
    const real* __restrict__ x2 = x1 + w;
    if (io > 0 && io < h - 1) {
      for (int jo = 1; jo < w - 1; ++jo)
        orow[jo] += w00 * x0[jo - 1] + w01 * x0[jo] + w02 * x0[jo + 1] +
                    w10 * x1[jo - 1] + w11 * x1[jo] + w12 * x1[jo + 1] +
                    w20 * x2[jo - 1] + w21 * x2[jo] + w22 * x2[jo + 1];
      // clipped edge columns
      orow[0] += w01 * x0[0] + w02 * x0[1] + w11 * x1[0] + w12 * x1[1] + w21 * x2[0] +
                 w22 * x2[1];
      orow[w - 1] += w00 * x0[w - 2] + w01 * x0[w - 1] + w10 * x1[w - 2] + w11 * x1[w - 1] +
                     w20 * x2[w - 2] + w21 * x2[w - 1];
    } else {
      const int di_lo = io == 0 ? 1 : 0;
      const int di_hi = io == h - 1 ? 2 : 3;
      for (int di = di_lo; di < di_hi; ++di) {
        const real* __restrict__ xr = xplane + static_cast<std::size_t>(io - 1 + di) * w;
        const real wa = wplane[di * 3], wb = wplane[di * 3 + 1], wc = wplane[di * 3 + 2];
        for (int jo = 1; jo < w - 1; ++jo)
          orow[jo] += wa * xr[jo - 1] + wb * xr[jo] + wc * xr[jo + 1];
        orow[0] += wb * xr[0] + wc * xr[1];
        orow[w - 1] += wa * xr[w - 2] + wb * xr[w - 1];
      }
    }
  }
}

}  // namespace

int deconv_pad(int k, int stride) {
  require(stride >= 1, "deconv2d: stride must be positive");
  require(k >= stride, "deconv2d: kernel extent " + std::to_string(k) +
                           " smaller than stride " + std::to_string(stride));
  require((k - stride) % 2 == 0, "deconv2d: kernel extent " + std::to_string(k) +
                                     " minus stride " + std::to_string(stride) +
                                     " must be even for an exact stride-fold output");
  return (k - stride) / 2;
}

NdArray conv2d(const NdArray& x, const NdArray& w, const NdArray& bias, int stride, int pad) {
  check_rank4(x, "conv2d input");
  check_rank4(w, "conv2d kernels");
  require(stride >= 1, "conv2d: stride must be positive");
  require(pad >= 0, "conv2d: pad must be nonnegative");
  const int n = static_cast<int>(x.size(0)), c = static_cast<int>(x.size(1));
  const int h = static_cast<int>(x.size(2)), wd = static_cast<int>(x.size(3));
  const int k = static_cast<int>(w.size(0)), wc = static_cast<int>(w.size(1));
  const int kh = static_cast<int>(w.size(2)), kw = static_cast<int>(w.size(3));
  require(wc == c, "conv2d: kernel channel count " + std::to_string(wc) +
                       " does not match input channel count " + std::to_string(c));
  require(bias.rank() == 1 && static_cast<int>(bias.size(0)) == k,
          "conv2d: bias extent does not match kernel count " + std::to_string(k));
  require(kh <= h + 2 * pad, "conv2d: kernel height " + std::to_string(kh) +
                                 " exceeds padded input height " + std::to_string(h + 2 * pad));
  require(kw <= wd + 2 * pad, "conv2d: kernel width " + std::to_string(kw) +
                                  " exceeds padded input width " + std::to_string(wd + 2 * pad));

  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (wd + 2 * pad - kw) / stride + 1;
  NdArray out({static_cast<std::size_t>(n), static_cast<std::size_t>(k),
               static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});

  parallel_for(0, static_cast<std::size_t>(n) * k, [&](std::size_t task) {
    const int in = static_cast<int>(task) / k;
    const int ik = static_cast<int>(task) % k;
    real* oplane = out.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
    const real bv = bias[static_cast<std::size_t>(ik)];
    for (int i = 0; i < oh * ow; ++i) oplane[i] = bv;
    const bool fast3x3 = stride == 1 && pad == 1 && kh == 3 && kw == 3 && wd >= 2;
    for (int ic = 0; ic < c; ++ic) {
      const real* xplane = x.data() + (static_cast<std::size_t>(in) * c + ic) * h * wd;
      const real* wplane = w.data() + (static_cast<std::size_t>(ik) * c + ic) * kh * kw;
      if (fast3x3) {
        conv3x3_accumulate(xplane, h, wd, wplane, oplane);
        continue;
      }
      for (int di = 0; di < kh; ++di) {
        for (int dj = 0; dj < kw; ++dj) {
          const real wv = wplane[di * kw + dj];
          if (wv == real(0)) continue;
          // output rows whose input row io*stride - pad + di is in range
          for (int io = 0; io < oh; ++io) {
            const int ii = io * stride - pad + di;
            if (ii < 0 || ii >= h) continue;
            // jo range with ij = jo*stride - pad + dj inside [0, wd)
            int jo_lo = 0;
            while (jo_lo < ow && jo_lo * stride - pad + dj < 0) ++jo_lo;
            int jo_hi = ow - 1;
            while (jo_hi >= 0 && jo_hi * stride - pad + dj >= wd) --jo_hi;
            const int off = dj - pad;
            const real* __restrict__ xrow = xplane + static_cast<std::size_t>(ii) * wd + off;
            real* __restrict__ orow = oplane + static_cast<std::size_t>(io) * ow;
            if (stride == 1) {
              for (int jo = jo_lo; jo <= jo_hi; ++jo) orow[jo] += wv * xrow[jo];
            } else {
              for (int jo = jo_lo; jo <= jo_hi; ++jo) orow[jo] += wv * xrow[jo * stride];
            }
          }
        }
      }
    }
  });
  return out;
}

NdArray conv2d_grad_input(const NdArray& g, const NdArray& w, int in_h, int in_w,
                          int stride, int pad) {
  const int n = static_cast<int>(g.size(0)), k = static_cast<int>(g.size(1));
  const int oh = static_cast<int>(g.size(2)), ow = static_cast<int>(g.size(3));
  const int c = static_cast<int>(w.size(1));
  const int kh = static_cast<int>(w.size(2)), kw = static_cast<int>(w.size(3));

  if (stride == 1 && pad == 1 && kh == 3 && kw == 3 && in_h == oh && in_w == ow && in_w >= 2) {
    // same-size case: the input gradient is a convolution of g with the
    // kernels flipped and transposed, so it can ride the fast 3x3 path
    NdArray wflip({static_cast<std::size_t>(c), static_cast<std::size_t>(k), 3, 3});
    for (int ik = 0; ik < k; ++ik)
      for (int ic = 0; ic < c; ++ic)
        for (int t = 0; t < 9; ++t)
          wflip.at4(ic, ik, t / 3, t % 3) = w.at4(ik, ic, 2 - t / 3, 2 - (t % 3));
    NdArray zero_bias({static_cast<std::size_t>(c)});
    return conv2d(g, wflip, zero_bias, 1, 1);
  }

  NdArray gx({static_cast<std::size_t>(n), static_cast<std::size_t>(c),
              static_cast<std::size_t>(in_h), static_cast<std::size_t>(in_w)});
  parallel_for(0, static_cast<std::size_t>(n) * c, [&](std::size_t task) {
    const int in = static_cast<int>(task) / c;
    const int ic = static_cast<int>(task) % c;
    real* xplane = gx.data() + (static_cast<std::size_t>(in) * c + ic) * in_h * in_w;
    for (int ik = 0; ik < k; ++ik) {
      const real* gplane = g.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
      const real* wplane = w.data() + (static_cast<std::size_t>(ik) * c + ic) * kh * kw;
      for (int di = 0; di < kh; ++di) {
        for (int dj = 0; dj < kw; ++dj) {
          const real wv = wplane[di * kw + dj];
          if (wv == real(0)) continue;
          for (int io = 0; io < oh; ++io) {
            const int ii = io * stride - pad + di;
            if (ii < 0 || ii >= in_h) continue;
            int jo_lo = 0;
            while (jo_lo < ow && jo_lo * stride - pad + dj < 0) ++jo_lo;
            int jo_hi = ow - 1;
            while (jo_hi >= 0 && jo_hi * stride - pad + dj >= in_w) --jo_hi;
            const int off = dj - pad;
            real* __restrict__ xrow = xplane + static_cast<std::size_t>(ii) * in_w + off;
            const real* __restrict__ grow = gplane + static_cast<std::size_t>(io) * ow;
            if (stride == 1) {
              for (int jo = jo_lo; jo <= jo_hi; ++jo) xrow[jo] += wv * grow[jo];
            } else {
              for (int jo = jo_lo; jo <= jo_hi; ++jo) xrow[jo * stride] += wv * grow[jo];
            }
          }
        }
      }
    }
  });
  return gx;
}

NdArray conv2d_grad_kernels(const NdArray& g, const NdArray& x, int kh, int kw,
                            int stride, int pad) {
  const int n = static_cast<int>(g.size(0)), k = static_cast<int>(g.size(1));
  const int oh = static_cast<int>(g.size(2)), ow = static_cast<int>(g.size(3));
  const int c = static_cast<int>(x.size(1));
  const int h = static_cast<int>(x.size(2)), wd = static_cast<int>(x.size(3));

  NdArray gw({static_cast<std::size_t>(k), static_cast<std::size_t>(c),
              static_cast<std::size_t>(kh), static_cast<std::size_t>(kw)});
  if (stride == 1 && pad == 1 && kh == 3 && kw == 3 && oh == h && ow == wd && wd >= 2) {
    // fused form: per (k,c) one sweep over the rasters with nine running
    // sums, instead of nine independent dot-product passes
    parallel_for(0, static_cast<std::size_t>(k) * c, [&](std::size_t task) {
      const int ik = static_cast<int>(task) / c;
      const int ic = static_cast<int>(task) % c;
      double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
      for (int in = 0; in < n; ++in) {
        const real* gplane = g.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
        const real* xplane = x.data() + (static_cast<std::size_t>(in) * c + ic) * h * wd;
        for (int io = 0; io < oh; ++io) {
          const real* __restrict__ grow = gplane + static_cast<std::size_t>(io) * ow;
          const int di_lo = io == 0 ? 1 : 0;
          const int di_hi = io == oh - 1 ? 2 : 3;
          for (int di = di_lo; di < di_hi; ++di) {
            const real* __restrict__ xr = xplane + static_cast<std::size_t>(io - 1 + di) * wd;
            real a0 = 0, a1 = 0, a2 = 0;
            for (int jo = 1; jo < ow - 1; ++jo) {
              const real gv = grow[jo];
              a0 += gv * xr[jo - 1];
              a1 += gv * xr[jo];
              a2 += gv * xr[jo + 1];
            }
            // clipped edge columns
            a1 += grow[0] * xr[0];
            a2 += grow[0] * xr[1];
            a0 += grow[ow - 1] * xr[ow - 2];
            a1 += grow[ow - 1] * xr[ow - 1];
            acc[di * 3] += a0;
            acc[di * 3 + 1] += a1;
            acc[di * 3 + 2] += a2;
          }
        }
      }
      real* wplane = gw.data() + (static_cast<std::size_t>(ik) * c + ic) * 9;
      for (int t = 0; t < 9; ++t) wplane[t] = static_cast<real>(acc[t]);
    });
    return gw;
  }
  parallel_for(0, static_cast<std::size_t>(k) * c, [&](std::size_t task) {
    const int ik = static_cast<int>(task) / c;
    const int ic = static_cast<int>(task) % c;
    real* wplane = gw.data() + (static_cast<std::size_t>(ik) * c + ic) * kh * kw;
    for (int di = 0; di < kh; ++di) {
      for (int dj = 0; dj < kw; ++dj) {
        double acc = 0;
        for (int in = 0; in < n; ++in) {
          const real* gplane = g.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
          const real* xplane = x.data() + (static_cast<std::size_t>(in) * c + ic) * h * wd;
          for (int io = 0; io < oh; ++io) {
            const int ii = io * stride - pad + di;
            if (ii < 0 || ii >= h) continue;
            int jo_lo = 0;
            while (jo_lo < ow && jo_lo * stride - pad + dj < 0) ++jo_lo;
            int jo_hi = ow - 1;
            while (jo_hi >= 0 && jo_hi * stride - pad + dj >= wd) --jo_hi;
            const int off = dj - pad;
            const real* __restrict__ xrow = xplane + static_cast<std::size_t>(ii) * wd + off;
            const real* __restrict__ grow = gplane + static_cast<std::size_t>(io) * ow;
            real dot = 0;
            if (stride == 1) {
              real d0 = 0, d1 = 0, d2 = 0, d3 = 0;
              int jo = jo_lo;
              for (; jo + 3 <= jo_hi; jo += 4) {
                d0 += grow[jo] * xrow[jo];
                d1 += grow[jo + 1] * xrow[jo + 1];
                d2 += grow[jo + 2] * xrow[jo + 2];
                d3 += grow[jo + 3] * xrow[jo + 3];
              }
              for (; jo <= jo_hi; ++jo) d0 += grow[jo] * xrow[jo];
              dot = (d0 + d1) + (d2 + d3);
            } else {
              for (int jo = jo_lo; jo <= jo_hi; ++jo) dot += grow[jo] * xrow[jo * stride];
            }
            acc += dot;
          }
        }
        wplane[di * kw + dj] = static_cast<real>(acc);
      }
    }
  });
  return gw;
}

NdArray conv2d_grad_bias(const NdArray& g) {
  const int n = static_cast<int>(g.size(0)), k = static_cast<int>(g.size(1));
  const std::size_t plane = g.size(2) * g.size(3);
  NdArray gb({static_cast<std::size_t>(k)});
  for (int ik = 0; ik < k; ++ik) {
    double acc = 0;
    for (int in = 0; in < n; ++in) {
      const real* p = g.data() + (static_cast<std::size_t>(in) * k + ik) * plane;
      for (std::size_t i = 0; i < plane; ++i) acc += p[i];
    }
    gb[static_cast<std::size_t>(ik)] = static_cast<real>(acc);
  }
  return gb;
}

NdArray deconv2d(const NdArray& x, const NdArray& w, int stride) {
  check_rank4(x, "deconv2d input");
  check_rank4(w, "deconv2d kernels");
  const int n = static_cast<int>(x.size(0)), c = static_cast<int>(x.size(1));
  const int h = static_cast<int>(x.size(2)), wd = static_cast<int>(x.size(3));
  require(static_cast<int>(w.size(0)) == c,
          "deconv2d: kernel input-channel count " + std::to_string(w.size(0)) +
              " does not match input channel count " + std::to_string(c));
  const int k = static_cast<int>(w.size(1));
  const int kh = static_cast<int>(w.size(2)), kw = static_cast<int>(w.size(3));
  require(kh == kw, "deconv2d: non-square kernel " + std::to_string(kh) + "x" + std::to_string(kw));
  const int pad = deconv_pad(kh, stride);

  const int oh = stride * h, ow = stride * wd;
  NdArray out({static_cast<std::size_t>(n), static_cast<std::size_t>(k),
               static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  if (stride == 2) {
    // Parity-plane form: each kernel tap lands on one of the four output
    // parity classes, so every class accumulates with contiguous rows and is
    // interleaved into the strided layout once at the end.
    parallel_for(0, static_cast<std::size_t>(n) * k, [&](std::size_t task) {
      const int in = static_cast<int>(task) / k;
      const int ik = static_cast<int>(task) % k;
      std::vector<real> planes(static_cast<std::size_t>(4) * h * wd, real(0));
      for (int ic = 0; ic < c; ++ic) {
        const real* xplane = x.data() + (static_cast<std::size_t>(in) * c + ic) * h * wd;
        const real* wplane = w.data() + (static_cast<std::size_t>(ic) * k + ik) * kh * kw;
        for (int di = 0; di < kh; ++di) {
          const int pr = ((di - pad) % 2 + 2) % 2;
          const int mr = (di - pad - pr) / 2;  // row shift inside the plane
          for (int dj = 0; dj < kw; ++dj) {
            const real wv = wplane[di * kw + dj];
            if (wv == real(0)) continue;
            const int pc = ((dj - pad) % 2 + 2) % 2;
            const int mc = (dj - pad - pc) / 2;
            real* plane = planes.data() + (static_cast<std::size_t>(pr) * 2 + pc) * h * wd;
            for (int i = 0; i < h; ++i) {
              const int a = i + mr;
              if (a < 0 || a >= h) continue;
              const int j_lo = std::max(0, -mc);
              const int j_hi = std::min(wd - 1, wd - 1 - mc);
              const real* __restrict__ xrow = xplane + static_cast<std::size_t>(i) * wd;
              real* __restrict__ prow = plane + static_cast<std::size_t>(a) * wd + mc;
              for (int j = j_lo; j <= j_hi; ++j) prow[j] += wv * xrow[j];
            }
          }
        }
      }
      real* oplane = out.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
      for (int pr = 0; pr < 2; ++pr)
        for (int pc = 0; pc < 2; ++pc) {
          const real* plane = planes.data() + (static_cast<std::size_t>(pr) * 2 + pc) * h * wd;
          for (int a = 0; a < h; ++a) {
            const real* __restrict__ prow = plane + static_cast<std::size_t>(a) * wd;
            real* __restrict__ orow = oplane + (static_cast<std::size_t>(2 * a + pr)) * ow + pc;
            for (int b = 0; b < wd; ++b) orow[2 * b] = prow[b];
          }
        }
    });
    return out;
  }
  parallel_for(0, static_cast<std::size_t>(n) * k, [&](std::size_t task) {
    const int in = static_cast<int>(task) / k;
    const int ik = static_cast<int>(task) % k;
    real* oplane = out.data() + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
    for (int ic = 0; ic < c; ++ic) {
      const real* xplane = x.data() + (static_cast<std::size_t>(in) * c + ic) * h * wd;
      const real* wplane = w.data() + (static_cast<std::size_t>(ic) * k + ik) * kh * kw;
      for (int di = 0; di < kh; ++di) {
        for (int dj = 0; dj < kw; ++dj) {
          const real wv = wplane[di * kw + dj];
          if (wv == real(0)) continue;
          for (int i = 0; i < h; ++i) {
            const int oi = i * stride - pad + di;
            if (oi < 0 || oi >= oh) continue;
            int j_lo = 0;
            while (j_lo < wd && j_lo * stride - pad + dj < 0) ++j_lo;
            int j_hi = wd - 1;
            while (j_hi >= 0 && j_hi * stride - pad + dj >= ow) --j_hi;
            const int off = dj - pad;
            const real* xrow = xplane + static_cast<std::size_t>(i) * wd;
            real* orow = oplane + static_cast<std::size_t>(oi) * ow;
            for (int j = j_lo; j <= j_hi; ++j) orow[j * stride + off] += wv * xrow[j];
          }
        }
      }
    }
  });
  return out;
}

NdArray deconv2d_grad_input(const NdArray& g, const NdArray& w, int stride) {
  // the adjoint of the adjoint: a strided convolution of g with the same
  // kernels, reading w as [K=in_ch][C=out_ch]
  const int kh = static_cast<int>(w.size(2));
  NdArray zero_bias({w.size(0)});
  return conv2d(g, w, zero_bias, stride, deconv_pad(kh, stride));
}

NdArray deconv2d_grad_kernels(const NdArray& g, const NdArray& x, int kh, int kw, int stride) {
  // same contraction as conv2d_grad_kernels with the roles of g and x swapped
  return conv2d_grad_kernels(x, g, kh, kw, stride, deconv_pad(kh, stride));
}

NdArray relu(const NdArray& x) {
  NdArray out(x.shape());
  const real* in = x.data();
  real* o = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) o[i] = in[i] > real(0) ? in[i] : real(0);
  return out;
}

NdArray relu_grad(const NdArray& g, const NdArray& x) {
  NdArray out(x.shape());
  const real* gp = g.data();
  const real* xp = x.data();
  real* o = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) o[i] = xp[i] > real(0) ? gp[i] : real(0);
  return out;
}

real mse(const NdArray& pred, const NdArray& target) {
  if (!pred.same_shape(target))
    throw DataError("mse: shape mismatch " + shape_to_string(pred.shape()) + " vs " +
                    shape_to_string(target.shape()));
  double acc = 0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const double d = static_cast<double>(pred[i]) - target[i];
    acc += d * d;
  }
  return static_cast<real>(acc / pred.numel());
}

NdArray mse_grad(const NdArray& pred, const NdArray& target, real upstream) {
  NdArray out(pred.shape());
  const real scale = real(2) * upstream / static_cast<real>(pred.numel());
  for (std::size_t i = 0; i < pred.numel(); ++i) out[i] = scale * (pred[i] - target[i]);
  return out;
}

NdArray add(const NdArray& a, const NdArray& b) {
  if (!a.same_shape(b))
    throw DataError("add: shape mismatch " + shape_to_string(a.shape()) + " vs " +
                    shape_to_string(b.shape()));
  NdArray out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace wscnn::ops
