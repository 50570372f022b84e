#pragma once

#include <cstdint>
#include <vector>

#include "aagnet/tensor.hpp"

// Forward and backward numeric kernels over NHWC tensors. Each output element
// is computed by exactly one accumulation chain in a fixed order, so results
// are bit-stable for a given dtype regardless of the thread count.

namespace aagnet {

enum class Padding { same, valid };

// `same`: out = ceil(in / stride), extra padding goes to the bottom/right.
// `valid`: out = floor((in - k) / stride) + 1.
int conv_out_dim(int in, int k, int stride, Padding pad);
int pad_before(int in, int k, int stride, Padding pad);

// Number of worker threads used by the spatial kernels (default 1).
void set_num_threads(int n);
int num_threads();

template <typename S>
TensorT<S> conv2d_fwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad);
template <typename S>
void conv2d_bwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad,
                const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dw);

template <typename S>
TensorT<S> depthwise_conv2d_fwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad);
template <typename S>
void depthwise_conv2d_bwd(const TensorT<S>& x, const TensorT<S>& w, int stride, Padding pad,
                          const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dw);

// Max pooling with valid padding; `argmax` receives the flat h*W+w source index
// of the first maximum in row-major scan order, one entry per output element.
template <typename S>
TensorT<S> maxpool2d_fwd(const TensorT<S>& x, int window, int stride,
                         std::vector<std::int64_t>& argmax);
template <typename S>
void maxpool2d_bwd(const TensorT<S>& x, int window, int stride,
                   const std::vector<std::int64_t>& argmax, const TensorT<S>& dy, TensorT<S>& dx);

// x:[R,K] * w:[K,M] -> [R,M]; any-rank inputs are folded to rows by the caller.
template <typename S>
TensorT<S> matmul_fwd(const TensorT<S>& x, const TensorT<S>& w);
template <typename S>
void matmul_bwd(const TensorT<S>& x, const TensorT<S>& w, const TensorT<S>& dy, TensorT<S>& dx,
                TensorT<S>& dw);

// Batched matmul on [B,M,K]x[B,K,N] with optional operand transposes.
template <typename S>
void bmm(const S* a, const S* b, S* c, int batch, int m, int n, int k, bool ta, bool tb);

template <typename S>
TensorT<S> softmax_last_fwd(const TensorT<S>& x);
template <typename S>
TensorT<S> softmax_last_bwd(const TensorT<S>& y, const TensorT<S>& dy);

template <typename S>
TensorT<S> layer_norm_fwd(const TensorT<S>& x, const TensorT<S>& gamma, const TensorT<S>& beta,
                          S eps, TensorT<S>* xhat_out, TensorT<S>* inv_std_out);
template <typename S>
void layer_norm_bwd(const TensorT<S>& xhat, const TensorT<S>& inv_std, const TensorT<S>& gamma,
                    const TensorT<S>& dy, TensorT<S>& dx, TensorT<S>& dgamma, TensorT<S>& dbeta);

template <typename S>
TensorT<S> global_avg_pool_fwd(const TensorT<S>& x);

template <typename S>
TensorT<S> mean_axis_fwd(const TensorT<S>& x, int axis);

template <typename S>
TensorT<S> concat_last_fwd(const TensorT<S>& a, const TensorT<S>& b);

template <typename S>
TensorT<S> transpose_0213(const TensorT<S>& x);

}  // namespace aagnet
