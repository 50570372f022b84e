#include "aagnet/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace aagnet {

namespace {

int g_threads = 1;

// Splits [0,n) into contiguous chunks, one worker per chunk. Every index is
// handled by exactly one worker, so writes never race.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
    const int t = std::min<std::int64_t>(g_threads, n);
    if (t <= 1 || n < 256) {
        body(0, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    const std::int64_t chunk = (n + t - 1) / t;
    for (int i = 0; i < t; ++i) {
        const std::int64_t b = i * chunk;
        const std::int64_t e = std::min<std::int64_t>(n, b + chunk);
        if (b >= e) break;
        workers.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& w : workers) w.join();
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void require_nhwc(const std::vector<int>& s, const char* what) {
    require(s.size() == 4, std::string(what) + " must be rank-4 NHWC, got " + shape_str(s));
}

}  // namespace

void set_num_threads(int n) { g_threads = std::max(1, n); }
int num_threads() { return g_threads; }

int conv_out_dim(int in, int k, int stride, Padding pad) {
    require(stride >= 1, "stride must be >= 1, got " + std::to_string(stride));
    if (pad == Padding::same) return (in + stride - 1) / stride;
    require(in >= k, "valid padding needs input extent " + std::to_string(in) +
                         " >= kernel extent " + std::to_string(k));
    return (in - k) / stride + 1;
}

int pad_before(int in, int k, int stride, Padding pad) {
    if (pad == Padding::valid) return 0;
    const int out = (in + stride - 1) / stride;
    const int total = std::max((out - 1) * stride + k - in, 0);
    return total / 2;  // the larger half goes after
}

template <typename S>
TensorT<S> conv2d_fwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad) {
    require_nhwc(x.shape(), "conv2d input");
    require(w.rank() == 4, "conv2d kernel must be rank-4 KhKwCiCo, got " + shape_str(w.shape()));
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), Ci = x.dim(3);
    const int Kh = w.dim(0), Kw = w.dim(1), Co = w.dim(3);
    require(w.dim(2) == Ci, "conv2d channel mismatch: input has " + std::to_string(Ci) +
                                ", kernel expects " + std::to_string(w.dim(2)));
    const int Ho = conv_out_dim(H, Kh, stride, pad), Wo = conv_out_dim(W, Kw, stride, pad);
    const int ph = pad_before(H, Kh, stride, pad), pw = pad_before(W, Kw, stride, pad);

    TensorT<S> y({N, Ho, Wo, Co});
    parallel_for(static_cast<std::int64_t>(N) * Ho, [&](std::int64_t b, std::int64_t e) {
        std::vector<S> acc(static_cast<std::size_t>(Co));
        for (std::int64_t r = b; r < e; ++r) {
            const int n = static_cast<int>(r / Ho), oh = static_cast<int>(r % Ho);
            for (int ow = 0; ow < Wo; ++ow) {
                std::fill(acc.begin(), acc.end(), S(0));
                for (int kh = 0; kh < Kh; ++kh) {
                    const int ih = oh * stride + kh - ph;
                    if (ih < 0 || ih >= H) continue;
                    for (int kw = 0; kw < Kw; ++kw) {
                        const int iw = ow * stride + kw - pw;
                        if (iw < 0 || iw >= W) continue;
                        const S* xp = x.data() + ((static_cast<std::int64_t>(n) * H + ih) * W + iw) * Ci;
                        const S* wp = w.data() + (static_cast<std::int64_t>(kh) * Kw + kw) * Ci * Co;
                        for (int ci = 0; ci < Ci; ++ci) {
                            const S xv = xp[ci];
                            const S* wrow = wp + static_cast<std::int64_t>(ci) * Co;
                            for (int co = 0; co < Co; ++co) acc[static_cast<std::size_t>(co)] += xv * wrow[co];
                        }
                    }
                }
                S* yp = y.data() + ((r * Wo) + ow) * Co;
                std::copy(acc.begin(), acc.end(), yp);
            }
        }
    });
    return y;
}

template <typename S>
void conv2d_bwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad,
                const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dw) {
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), Ci = x.dim(3);
    const int Kh = w.dim(0), Kw = w.dim(1), Co = w.dim(3);
    const int Ho = dy.dim(1), Wo = dy.dim(2);
    const int ph = pad_before(H, Kh, stride, pad), pw = pad_before(W, Kw, stride, pad);
    for (int n = 0; n < N; ++n) {
        for (int oh = 0; oh < Ho; ++oh) {
            for (int ow = 0; ow < Wo; ++ow) {
                const S* gp = dy.data() + ((static_cast<std::int64_t>(n) * Ho + oh) * Wo + ow) * Co;
                for (int kh = 0; kh < Kh; ++kh) {
                    const int ih = oh * stride + kh - ph;
                    if (ih < 0 || ih >= H) continue;
                    for (int kw = 0; kw < Kw; ++kw) {
                        const int iw = ow * stride + kw - pw;
                        if (iw < 0 || iw >= W) continue;
                        const std::int64_t xoff = ((static_cast<std::int64_t>(n) * H + ih) * W + iw) * Ci;
                        const std::int64_t woff = (static_cast<std::int64_t>(kh) * Kw + kw) * Ci * Co;
                        for (int ci = 0; ci < Ci; ++ci) {
                            const S xv = x.data()[xoff + ci];
                            const S* wrow = w.data() + woff + static_cast<std::int64_t>(ci) * Co;
                            S* dwrow = dw.data() + woff + static_cast<std::int64_t>(ci) * Co;
                            S acc = S(0);
                            for (int co = 0; co < Co; ++co) {
                                acc += gp[co] * wrow[co];
                                dwrow[co] += xv * gp[co];
                            }
                            dx.data()[xoff + ci] += acc;
                        }
                    }
                }
            }
        }
    }
}

template <typename S>
TensorT<S> depthwise_conv2d_fwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad) {
    require_nhwc(x.shape(), "depthwise_conv2d input");
    require(w.rank() == 3, "depthwise kernel must be rank-3 KhKwC, got " + shape_str(w.shape()));
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int Kh = w.dim(0), Kw = w.dim(1);
    require(w.dim(2) == C, "depthwise channel mismatch: input has " + std::to_string(C) +
                               ", kernel expects " + std::to_string(w.dim(2)));
    const int Ho = conv_out_dim(H, Kh, stride, pad), Wo = conv_out_dim(W, Kw, stride, pad);
    const int ph = pad_before(H, Kh, stride, pad), pw = pad_before(W, Kw, stride, pad);

    TensorT<S> y({N, Ho, Wo, C});
    parallel_for(static_cast<std::int64_t>(N) * Ho, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t r = b; r < e; ++r) {
            const int n = static_cast<int>(r / Ho), oh = static_cast<int>(r % Ho);
            for (int ow = 0; ow < Wo; ++ow) {
                S* yp = y.data() + ((r * Wo) + ow) * C;
                for (int kh = 0; kh < Kh; ++kh) {
                    const int ih = oh * stride + kh - ph;
                    if (ih < 0 || ih >= H) continue;
                    for (int kw = 0; kw < Kw; ++kw) {
                        const int iw = ow * stride + kw - pw;
                        if (iw < 0 || iw >= W) continue;
                        const S* xp = x.data() + ((static_cast<std::int64_t>(n) * H + ih) * W + iw) * C;
                        const S* wp = w.data() + (static_cast<std::int64_t>(kh) * Kw + kw) * C;
                        for (int c = 0; c < C; ++c) yp[c] += xp[c] * wp[c];
                    }
                }
            }
        }
    });
    return y;
}

template <typename S>
void depthwise_conv2d_bwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad,
                          const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dw) {
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int Kh = w.dim(0), Kw = w.dim(1);
    const int Ho = dy.dim(1), Wo = dy.dim(2);
    const int ph = pad_before(H, Kh, stride, pad), pw = pad_before(W, Kw, stride, pad);
    for (int n = 0; n < N; ++n) {
        for (int oh = 0; oh < Ho; ++oh) {
            for (int ow = 0; ow < Wo; ++ow) {
                const S* gp = dy.data() + ((static_cast<std::int64_t>(n) * Ho + oh) * Wo + ow) * C;
                for (int kh = 0; kh < Kh; ++kh) {
                    const int ih = oh * stride + kh - ph;
                    if (ih < 0 || ih >= H) continue;
                    for (int kw = 0; kw < Kw; ++kw) {
                        const int iw = ow * stride + kw - pw;
                        if (iw < 0 || iw >= W) continue;
                        const std::int64_t xoff = ((static_cast<std::int64_t>(n) * H + ih) * W + iw) * C;
                        const std::int64_t woff = (static_cast<std::int64_t>(kh) * Kw + kw) * C;
                        for (int c = 0; c < C; ++c) {
                            dx.data()[xoff + c] += gp[c] * w.data()[woff + c];
                            dw.data()[woff + c] += gp[c] * x.data()[xoff + c];
                        }
                    }
                }
            }
        }
    }
}

template <typename S>
TensorT<S> maxpool2d_fwd(const TensorT<S>& x, int window, int stride,
                         std::vector<std::int64_t>& argmax) {
    require_nhwc(x.shape(), "maxpool2d input");
    require(window >= 1 && stride >= 1, "maxpool window and stride must be >= 1");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    require(window <= H && window <= W,
            "maxpool window " + std::to_string(window) + " larger than input " + shape_str(x.shape()));
    const int Ho = (H - window) / stride + 1, Wo = (W - window) / stride + 1;

    TensorT<S> y({N, Ho, Wo, C});
    argmax.assign(static_cast<std::size_t>(y.numel()), 0);
    for (int n = 0; n < N; ++n) {
        for (int oh = 0; oh < Ho; ++oh) {
            for (int ow = 0; ow < Wo; ++ow) {
                for (int c = 0; c < C; ++c) {
                    S best = -std::numeric_limits<S>::infinity();
                    std::int64_t best_idx = 0;
                    for (int kh = 0; kh < window; ++kh) {
                        const int ih = oh * stride + kh;
                        for (int kw = 0; kw < window; ++kw) {
                            const int iw = ow * stride + kw;
                            const S v = x.at(n, ih, iw, c);
                            if (v > best) {  // strict: ties keep the first index in scan order
                                best = v;
                                best_idx = static_cast<std::int64_t>(ih) * W + iw;
                            }
                        }
                    }
                    const std::int64_t o = ((static_cast<std::int64_t>(n) * Ho + oh) * Wo + ow) * C + c;
                    y[o] = best;
                    argmax[static_cast<std::size_t>(o)] = best_idx;
                }
            }
        }
    }
    return y;
}

template <typename S>
void maxpool2d_bwd(const TensorT<S>& x, int window, int stride,
                   const std::vector<std::int64_t>& argmax, const TensorT<S>& dy, TensorT<S>& dx) {
    (void)window;
    (void)stride;
    const int N = dy.dim(0), Ho = dy.dim(1), Wo = dy.dim(2), C = dy.dim(3);
    const int W = x.dim(2);
    for (int n = 0; n < N; ++n) {
        for (int oh = 0; oh < Ho; ++oh) {
            for (int ow = 0; ow < Wo; ++ow) {
                for (int c = 0; c < C; ++c) {
                    const std::int64_t o = ((static_cast<std::int64_t>(n) * Ho + oh) * Wo + ow) * C + c;
                    const std::int64_t hw = argmax[static_cast<std::size_t>(o)];
                    const int ih = static_cast<int>(hw / W), iw = static_cast<int>(hw % W);
                    dx.at(n, ih, iw, c) += dy[o];
                }
            }
        }
    }
}

template <typename S>
TensorT<S> matmul_fwd(const TensorT<S>& x, const TensorT<S>& w) {
    require(x.rank() == 2 && w.rank() == 2, "matmul expects rank-2 operands");
    const int R = x.dim(0), K = x.dim(1), M = w.dim(1);
    require(w.dim(0) == K, "matmul inner dimension mismatch: " + shape_str(x.shape()) + " x " +
                               shape_str(w.shape()));
    TensorT<S> y({R, M});
    parallel_for(R, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t r = b; r < e; ++r) {
            S* yp = y.data() + r * M;
            const S* xp = x.data() + r * K;
            for (int k = 0; k < K; ++k) {
                const S xv = xp[k];
                const S* wp = w.data() + static_cast<std::int64_t>(k) * M;
                for (int m = 0; m < M; ++m) yp[m] += xv * wp[m];
            }
        }
    });
    return y;
}

template <typename S>
void matmul_bwd(const TensorT<S>& x, const TensorT<S>& w, const TensorT<S>& dy, TensorT<S>& dx,
                TensorT<S>& dw) {
    const int R = x.dim(0), K = x.dim(1), M = w.dim(1);
    for (std::int64_t r = 0; r < R; ++r) {
        const S* gp = dy.data() + r * M;
        const S* xp = x.data() + r * K;
        S* dxp = dx.data() + r * K;
        for (int k = 0; k < K; ++k) {
            const S* wp = w.data() + static_cast<std::int64_t>(k) * M;
            S* dwp = dw.data() + static_cast<std::int64_t>(k) * M;
            S acc = S(0);
            const S xv = xp[k];
            for (int m = 0; m < M; ++m) {
                acc += gp[m] * wp[m];
                dwp[m] += xv * gp[m];
            }
            dxp[k] += acc;
        }
    }
}

template <typename S>
void bmm(const S* a, const S* b, S* c, int batch, int m, int n, int k, bool ta, bool tb) {
    const std::int64_t as = static_cast<std::int64_t>(m) * k, bs = static_cast<std::int64_t>(k) * n,
                       cs = static_cast<std::int64_t>(m) * n;
    for (int bb = 0; bb < batch; ++bb) {
        const S* ap = a + bb * as;
        const S* bp = b + bb * bs;
        S* cp = c + bb * cs;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                S acc = S(0);
                for (int kk = 0; kk < k; ++kk) {
                    const S av = ta ? ap[static_cast<std::int64_t>(kk) * m + i]
                                    : ap[static_cast<std::int64_t>(i) * k + kk];
                    const S bv = tb ? bp[static_cast<std::int64_t>(j) * k + kk]
                                    : bp[static_cast<std::int64_t>(kk) * n + j];
                    acc += av * bv;
                }
                cp[static_cast<std::int64_t>(i) * n + j] = acc;
            }
        }
    }
}

template <typename S>
TensorT<S> softmax_last_fwd(const TensorT<S>& x) {
    require(x.rank() >= 1, "softmax needs at least rank 1");
    const int L = x.dim(x.rank() - 1);
    const std::int64_t rows = x.numel() / L;
    TensorT<S> y(x.shape());
    for (std::int64_t r = 0; r < rows; ++r) {
        const S* xp = x.data() + r * L;
        S* yp = y.data() + r * L;
        S mx = xp[0];
        for (int i = 1; i < L; ++i) mx = std::max(mx, xp[i]);
        S sum = S(0);
        for (int i = 0; i < L; ++i) {
            yp[i] = std::exp(xp[i] - mx);
            sum += yp[i];
        }
        for (int i = 0; i < L; ++i) yp[i] /= sum;
    }
    return y;
}

template <typename S>
TensorT<S> softmax_last_bwd(const TensorT<S>& y, const TensorT<S>& dy) {
    const int L = y.dim(y.rank() - 1);
    const std::int64_t rows = y.numel() / L;
    TensorT<S> dx(y.shape());
    for (std::int64_t r = 0; r < rows; ++r) {
        const S* yp = y.data() + r * L;
        const S* gp = dy.data() + r * L;
        S dot = S(0);
        for (int i = 0; i < L; ++i) dot += yp[i] * gp[i];
        S* dp = dx.data() + r * L;
        for (int i = 0; i < L; ++i) dp[i] = yp[i] * (gp[i] - dot);
    }
    return dx;
}

template <typename S>
TensorT<S> layer_norm_fwd(const TensorT<S>& x, const TensorT<S>& gamma, const TensorT<S>& beta,
                          S eps, TensorT<S>* xhat_out, TensorT<S>* inv_std_out) {
    require(x.rank() >= 1, "layer_norm needs at least rank 1");
    const int L = x.dim(x.rank() - 1);
    require(gamma.numel() == L && beta.numel() == L,
            "layer_norm gamma/beta length must equal the normalized axis length " + std::to_string(L));
    const std::int64_t rows = x.numel() / L;
    TensorT<S> y(x.shape());
    TensorT<S> xhat(x.shape());
    TensorT<S> inv_std({static_cast<int>(rows)});
    for (std::int64_t r = 0; r < rows; ++r) {
        const S* xp = x.data() + r * L;
        S mean = S(0);
        for (int i = 0; i < L; ++i) mean += xp[i];
        mean /= S(L);
        S var = S(0);
        for (int i = 0; i < L; ++i) {
            const S d = xp[i] - mean;
            var += d * d;
        }
        var /= S(L);
        const S is = S(1) / std::sqrt(var + eps);
        inv_std[r] = is;
        S* hp = xhat.data() + r * L;
        S* yp = y.data() + r * L;
        for (int i = 0; i < L; ++i) {
            hp[i] = (xp[i] - mean) * is;
            yp[i] = gamma[i] * hp[i] + beta[i];
        }
    }
    if (xhat_out) *xhat_out = std::move(xhat);
    if (inv_std_out) *inv_std_out = std::move(inv_std);
    return y;
}

template <typename S>
void layer_norm_bwd(const TensorT<S>& xhat, const TensorT<S>& inv_std, const TensorT<S>& gamma,
                    const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dgamma, TensorT<S>& dbeta) {
    const int L = xhat.dim(xhat.rank() - 1);
    const std::int64_t rows = xhat.numel() / L;
    for (std::int64_t r = 0; r < rows; ++r) {
        const S* hp = xhat.data() + r * L;
        const S* gp = dy.data() + r * L;
        S* dp = dx.data() + r * L;
        S sum_dh = S(0), sum_dh_h = S(0);
        for (int i = 0; i < L; ++i) {
            const S dh = gp[i] * gamma[i];
            sum_dh += dh;
            sum_dh_h += dh * hp[i];
            dgamma[i] += gp[i] * hp[i];
            dbeta[i] += gp[i];
        }
        const S is = inv_std[r];
        for (int i = 0; i < L; ++i) {
            const S dh = gp[i] * gamma[i];
            dp[i] += is * (dh - sum_dh / S(L) - hp[i] * sum_dh_h / S(L));
        }
    }
}

template <typename S>
TensorT<S> global_avg_pool_fwd(const TensorT<S>& x) {
    require_nhwc(x.shape(), "global_avg_pool input");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    TensorT<S> y({N, C});
    const S inv = S(1) / S(static_cast<std::int64_t>(H) * W);
    for (int n = 0; n < N; ++n) {
        S* yp = y.data() + static_cast<std::int64_t>(n) * C;
        for (int h = 0; h < H; ++h) {
            for (int w = 0; w < W; ++w) {
                const S* xp = x.data() + ((static_cast<std::int64_t>(n) * H + h) * W + w) * C;
                for (int c = 0; c < C; ++c) yp[c] += xp[c];
            }
        }
        for (int c = 0; c < C; ++c) yp[c] *= inv;
    }
    return y;
}

template <typename S>
TensorT<S> mean_axis_fwd(const TensorT<S>& x, int axis) {
    require(axis >= 0 && axis < x.rank(), "mean axis out of range");
    std::vector<int> out_shape;
    for (int i = 0; i < x.rank(); ++i)
        if (i != axis) out_shape.push_back(x.dim(i));
    if (out_shape.empty()) out_shape = {1};
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= x.dim(i);
    for (int i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
    const int L = x.dim(axis);
    TensorT<S> y(out_shape);
    for (std::int64_t o = 0; o < outer; ++o) {
        for (std::int64_t i = 0; i < inner; ++i) {
            S acc = S(0);
            for (int l = 0; l < L; ++l) acc += x[(o * L + l) * inner + i];
            y[o * inner + i] = acc / S(L);
        }
    }
    return y;
}

template <typename S>
TensorT<S> concat_last_fwd(const TensorT<S>& a, const TensorT<S>& b) {
    require(a.rank() == b.rank() && a.rank() >= 1, "concat operands must share rank");
    for (int i = 0; i + 1 < a.rank(); ++i)
        require(a.dim(i) == b.dim(i), "concat leading dimensions differ: " + shape_str(a.shape()) +
                                          " vs " + shape_str(b.shape()));
    const int Ca = a.dim(a.rank() - 1), Cb = b.dim(b.rank() - 1);
    std::vector<int> out_shape = a.shape();
    out_shape.back() = Ca + Cb;
    const std::int64_t rows = a.numel() / Ca;
    TensorT<S> y(out_shape);
    for (std::int64_t r = 0; r < rows; ++r) {
        std::copy(a.data() + r * Ca, a.data() + (r + 1) * Ca, y.data() + r * (Ca + Cb));
        std::copy(b.data() + r * Cb, b.data() + (r + 1) * Cb, y.data() + r * (Ca + Cb) + Ca);
    }
    return y;
}

template <typename S>
TensorT<S> transpose_0213(const TensorT<S>& x) {
    require(x.rank() == 4, "transpose_0213 expects rank-4 input");
    const int A = x.dim(0), B = x.dim(1), C = x.dim(2), D = x.dim(3);
    TensorT<S> y({A, C, B, D});
    for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b)
            for (int c = 0; c < C; ++c) {
                const S* xp = x.data() + ((static_cast<std::int64_t>(a) * B + b) * C + c) * D;
                S* yp = y.data() + ((static_cast<std::int64_t>(a) * C + c) * B + b) * D;
                std::copy(xp, xp + D, yp);
            }
    return y;
}

#define AAGNET_INSTANTIATE(S)                                                                      \
    template TensorT<S> conv2d_fwd<S>(const TensorT<S>&, const TensorT<S>&, int, Padding);        \
    template void conv2d_bwd<S>(const TensorT<S>&, const TensorT<S>&, int, Padding,               \
                                const TensorT<S>&, TensorT<S>&, TensorT<S>&);                     \
    template TensorT<S> depthwise_conv2d_fwd<S>(const TensorT<S>&, const TensorT<S>&, int,        \
                                                Padding);                                          \
    template void depthwise_conv2d_bwd<S>(const TensorT<S>&, const TensorT<S>&, int, Padding,     \
                                          const TensorT<S>&, TensorT<S>&, TensorT<S>&);           \
    template TensorT<S> maxpool2d_fwd<S>(const TensorT<S>&, int, int, std::vector<std::int64_t>&); \
    template void maxpool2d_bwd<S>(const TensorT<S>&, int, int, const std::vector<std::int64_t>&, \
                                   const TensorT<S>&, TensorT<S>&);                               \
    template TensorT<S> matmul_fwd<S>(const TensorT<S>&, const TensorT<S>&);                      \
    template void matmul_bwd<S>(const TensorT<S>&, const TensorT<S>&, const TensorT<S>&,          \
                                TensorT<S>&, TensorT<S>&);                                        \
    template void bmm<S>(const S*, const S*, S*, int, int, int, int, bool, bool);                 \
    template TensorT<S> softmax_last_fwd<S>(const TensorT<S>&);                                   \
    template TensorT<S> softmax_last_bwd<S>(const TensorT<S>&, const TensorT<S>&);                \
    template TensorT<S> layer_norm_fwd<S>(const TensorT<S>&, const TensorT<S>&, const TensorT<S>&, \
                                          S, TensorT<S>*, TensorT<S>*);                           \
    template void layer_norm_bwd<S>(const TensorT<S>&, const TensorT<S>&, const TensorT<S>&,      \
                                    const TensorT<S>&, TensorT<S>&, TensorT<S>&, TensorT<S>&);    \
    template TensorT<S> global_avg_pool_fwd<S>(const TensorT<S>&);                                \
    template TensorT<S> mean_axis_fwd<S>(const TensorT<S>&, int);                                 \
    template TensorT<S> concat_last_fwd<S>(const TensorT<S>&, const TensorT<S>&);                 \
    template TensorT<S> transpose_0213<S>(const TensorT<S>&);

AAGNET_INSTANTIATE(float)
AAGNET_INSTANTIATE(double)
#undef AAGNET_INSTANTIATE

}  // namespace aagnet
