#include "aagnet/tape.hpp"

#include <algorithm>
#include <cmath>

namespace aagnet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

template <typename S>
S sigmoid_scalar(S x) {
    // Evaluated via exp(-|x|) so the argument of exp never overflows.
    if (x >= S(0)) {
        const S e = std::exp(-x);
        return S(1) / (S(1) + e);
    }
    const S e = std::exp(x);
    return e / (S(1) + e);
}

}  // namespace

template <typename S>
int TapeT<S>::check_id(int id) const {
    if (id < 0 || id >= size())
        throw std::invalid_argument("node id " + std::to_string(id) + " is not on this tape");
    return id;
}

template <typename S>
int TapeT<S>::find_label(const std::string& label) const {
    for (int i = size() - 1; i >= 0; --i)
        if (nodes_[static_cast<std::size_t>(i)].op == label) return i;
    throw std::invalid_argument("no node labeled '" + label + "' on this tape");
}

template <typename S>
int TapeT<S>::push(std::string op, std::vector<int> inputs, TensorT<S> value,
                   std::function<void(TapeT&, const Node&)> backward) {
    for (int i : inputs) check_id(i);
    Node n;
    n.op = std::move(op);
    n.inputs = std::move(inputs);
    n.value = std::move(value);
    if (recording_) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return size() - 1;
}

template <typename S>
int TapeT<S>::leaf(TensorT<S> v, std::string name) {
    return push(std::move(name), {}, std::move(v), nullptr);
}

template <typename S>
int TapeT<S>::conv2d(int x, int w, int stride, Padding pad) {
    TensorT<S> y = conv2d_fwd(value(x), value(w), stride, pad);
    return push("conv2d", {x, w}, std::move(y), [stride, pad](TapeT& t, const Node& self) {
        conv2d_bwd(t.value(self.inputs[0]), t.value(self.inputs[1]), stride, pad, self.grad,
                   t.grad_mut(self.inputs[0]), t.grad_mut(self.inputs[1]));
    });
}

template <typename S>
int TapeT<S>::depthwise_conv2d(int x, int w, int stride, Padding pad) {
    TensorT<S> y = depthwise_conv2d_fwd(value(x), value(w), stride, pad);
    return push("depthwise_conv2d", {x, w}, std::move(y), [stride, pad](TapeT& t, const Node& self) {
        depthwise_conv2d_bwd(t.value(self.inputs[0]), t.value(self.inputs[1]), stride, pad,
                             self.grad, t.grad_mut(self.inputs[0]), t.grad_mut(self.inputs[1]));
    });
}

template <typename S>
int TapeT<S>::maxpool2d(int x, int window, int stride) {
    std::vector<std::int64_t> argmax;
    TensorT<S> y = maxpool2d_fwd(value(x), window, stride, argmax);
    return push("maxpool2d", {x}, std::move(y),
                [window, stride, argmax = std::move(argmax)](TapeT& t, const Node& self) {
                    maxpool2d_bwd(t.value(self.inputs[0]), window, stride, argmax, self.grad,
                                  t.grad_mut(self.inputs[0]));
                });
}

template <typename S>
int TapeT<S>::dense(int x, int w, int b) {
    const TensorT<S>& xv = value(x);
    const TensorT<S>& wv = value(w);
    require(xv.rank() >= 2, "dense input must have rank >= 2, got " + shape_str(xv.shape()));
    require(wv.rank() == 2, "dense weight must be rank-2, got " + shape_str(wv.shape()));
    const int K = xv.dim(xv.rank() - 1);
    require(wv.dim(0) == K, "dense input last dim " + std::to_string(K) +
                                " must equal weight rows " + std::to_string(wv.dim(0)));
    const int rows = static_cast<int>(xv.numel() / K);
    TensorT<S> x2 = TensorT<S>::from_data({rows, K}, std::vector<S>(xv.data(), xv.data() + xv.numel()));
    TensorT<S> y2 = matmul_fwd(x2, wv);
    std::vector<int> out_shape(xv.shape().begin(), xv.shape().end() - 1);
    out_shape.push_back(wv.dim(1));
    TensorT<S> y = TensorT<S>::from_data(out_shape, std::vector<S>(y2.data(), y2.data() + y2.numel()));
    const int mm = push("matmul", {x, w}, std::move(y), [rows, K](TapeT& t, const Node& self) {
        const TensorT<S>& xv2 = t.value(self.inputs[0]);
        const TensorT<S>& wv2 = t.value(self.inputs[1]);
        const int M = wv2.dim(1);
        TensorT<S> xf = TensorT<S>::from_data({rows, K},
                                              std::vector<S>(xv2.data(), xv2.data() + xv2.numel()));
        TensorT<S> gf = TensorT<S>::from_data(
            {rows, M}, std::vector<S>(self.grad.data(), self.grad.data() + self.grad.numel()));
        TensorT<S> dxf({rows, K});
        matmul_bwd(xf, wv2, gf, dxf, t.grad_mut(self.inputs[1]));
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] += dxf[i];
    });
    return bias_add(mm, b);
}

template <typename S>
int TapeT<S>::bias_add(int x, int b) {
    const TensorT<S>& xv = value(x);
    const TensorT<S>& bv = value(b);
    const int C = xv.dim(xv.rank() - 1);
    require(bv.numel() == C, "bias length " + std::to_string(bv.numel()) +
                                 " must equal last axis length " + std::to_string(C));
    TensorT<S> y(xv.shape());
    const std::int64_t rows = xv.numel() / C;
    for (std::int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < C; ++c) y[r * C + c] = xv[r * C + c] + bv[c];
    return push("bias_add", {x, b}, std::move(y), [C, rows](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        TensorT<S>& db = t.grad_mut(self.inputs[1]);
        for (std::int64_t r = 0; r < rows; ++r)
            for (int c = 0; c < C; ++c) {
                dx[r * C + c] += self.grad[r * C + c];
                db[c] += self.grad[r * C + c];
            }
    });
}

template <typename S>
int TapeT<S>::relu(int x) {
    const TensorT<S>& xv = value(x);
    TensorT<S> y(xv.shape());
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = xv[i] > S(0) ? xv[i] : S(0);
    return push("relu", {x}, std::move(y), [](TapeT& t, const Node& self) {
        const TensorT<S>& xv2 = t.value(self.inputs[0]);
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i)
            if (xv2[i] > S(0)) dx[i] += self.grad[i];
    });
}

template <typename S>
int TapeT<S>::sigmoid(int x) {
    const TensorT<S>& xv = value(x);
    TensorT<S> y(xv.shape());
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = sigmoid_scalar(xv[i]);
    return push("sigmoid", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) {
            const S s = self.value[i];
            dx[i] += self.grad[i] * s * (S(1) - s);
        }
    });
}

template <typename S>
int TapeT<S>::swish(int x) {
    const TensorT<S>& xv = value(x);
    TensorT<S> y(xv.shape());
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = xv[i] * sigmoid_scalar(xv[i]);
    return push("swish", {x}, std::move(y), [](TapeT& t, const Node& self) {
        const TensorT<S>& xv2 = t.value(self.inputs[0]);
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) {
            const S s = sigmoid_scalar(xv2[i]);
            dx[i] += self.grad[i] * s * (S(1) + xv2[i] * (S(1) - s));
        }
    });
}

template <typename S>
int TapeT<S>::one_minus(int x) {
    const TensorT<S>& xv = value(x);
    TensorT<S> y(xv.shape());
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = S(1) - xv[i];
    return push("one_minus", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] -= self.grad[i];
    });
}

template <typename S>
int TapeT<S>::add(int a, int b) {
    const TensorT<S>& av = value(a);
    const TensorT<S>& bv = value(b);
    require(av.same_shape(bv),
            "add shape mismatch: " + shape_str(av.shape()) + " vs " + shape_str(bv.shape()));
    TensorT<S> y(av.shape());
    for (std::int64_t i = 0; i < av.numel(); ++i) y[i] = av[i] + bv[i];
    return push("add", {a, b}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S>& da = t.grad_mut(self.inputs[0]);
        TensorT<S>& db = t.grad_mut(self.inputs[1]);
        for (std::int64_t i = 0; i < da.numel(); ++i) {
            da[i] += self.grad[i];
            db[i] += self.grad[i];
        }
    });
}

template <typename S>
int TapeT<S>::mul(int a, int b) {
    const TensorT<S>& av = value(a);
    const TensorT<S>& bv = value(b);
    require(av.same_shape(bv),
            "mul shape mismatch: " + shape_str(av.shape()) + " vs " + shape_str(bv.shape()));
    TensorT<S> y(av.shape());
    for (std::int64_t i = 0; i < av.numel(); ++i) y[i] = av[i] * bv[i];
    return push("mul", {a, b}, std::move(y), [](TapeT& t, const Node& self) {
        const TensorT<S>& av2 = t.value(self.inputs[0]);
        const TensorT<S>& bv2 = t.value(self.inputs[1]);
        TensorT<S>& da = t.grad_mut(self.inputs[0]);
        TensorT<S>& db = t.grad_mut(self.inputs[1]);
        for (std::int64_t i = 0; i < da.numel(); ++i) {
            da[i] += self.grad[i] * bv2[i];
            db[i] += self.grad[i] * av2[i];
        }
    });
}

template <typename S>
int TapeT<S>::scale(int x, double c) {
    const TensorT<S>& xv = value(x);
    TensorT<S> y(xv.shape());
    const S cs = static_cast<S>(c);
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = xv[i] * cs;
    return push("scale", {x}, std::move(y), [cs](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] += self.grad[i] * cs;
    });
}

template <typename S>
int TapeT<S>::concat_last(int a, int b) {
    TensorT<S> y = concat_last_fwd(value(a), value(b));
    const int Ca = value(a).dim(value(a).rank() - 1);
    const int Cb = value(b).dim(value(b).rank() - 1);
    return push("concat_last", {a, b}, std::move(y), [Ca, Cb](TapeT& t, const Node& self) {
        TensorT<S>& da = t.grad_mut(self.inputs[0]);
        TensorT<S>& db = t.grad_mut(self.inputs[1]);
        const std::int64_t rows = da.numel() / Ca;
        for (std::int64_t r = 0; r < rows; ++r) {
            for (int c = 0; c < Ca; ++c) da[r * Ca + c] += self.grad[r * (Ca + Cb) + c];
            for (int c = 0; c < Cb; ++c) db[r * Cb + c] += self.grad[r * (Ca + Cb) + Ca + c];
        }
    });
}

template <typename S>
int TapeT<S>::layer_norm(int x, int gamma, int beta, double eps) {
    TensorT<S> xhat, inv_std;
    TensorT<S> y = layer_norm_fwd(value(x), value(gamma), value(beta), static_cast<S>(eps), &xhat,
                                  &inv_std);
    return push("layer_norm", {x, gamma, beta}, std::move(y),
                [xhat = std::move(xhat), inv_std = std::move(inv_std)](TapeT& t, const Node& self) {
                    layer_norm_bwd(xhat, inv_std, t.value(self.inputs[1]), self.grad,
                                   t.grad_mut(self.inputs[0]), t.grad_mut(self.inputs[1]),
                                   t.grad_mut(self.inputs[2]));
                });
}

template <typename S>
int TapeT<S>::softmax_last(int x) {
    TensorT<S> y = softmax_last_fwd(value(x));
    return push("softmax", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S> dx = softmax_last_bwd(self.value, self.grad);
        TensorT<S>& acc = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < acc.numel(); ++i) acc[i] += dx[i];
    });
}

template <typename S>
int TapeT<S>::global_avg_pool(int x) {
    TensorT<S> y = global_avg_pool_fwd(value(x));
    return push("global_avg_pool", {x}, std::move(y), [](TapeT& t, const Node& self) {
        const TensorT<S>& xv = t.value(self.inputs[0]);
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        const int N = xv.dim(0), H = xv.dim(1), W = xv.dim(2), C = xv.dim(3);
        const S inv = S(1) / S(static_cast<std::int64_t>(H) * W);
        for (int n = 0; n < N; ++n)
            for (int h = 0; h < H; ++h)
                for (int w = 0; w < W; ++w)
                    for (int c = 0; c < C; ++c)
                        dx.at(n, h, w, c) += self.grad.at(n, c) * inv;
    });
}

template <typename S>
int TapeT<S>::mean_axis(int x, int axis) {
    TensorT<S> y = mean_axis_fwd(value(x), axis);
    const TensorT<S>& xv = value(x);
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= xv.dim(i);
    for (int i = axis + 1; i < xv.rank(); ++i) inner *= xv.dim(i);
    const int L = xv.dim(axis);
    return push("mean_axis", {x}, std::move(y), [outer, inner, L](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        const S inv = S(1) / S(L);
        for (std::int64_t o = 0; o < outer; ++o)
            for (int l = 0; l < L; ++l)
                for (std::int64_t i = 0; i < inner; ++i)
                    dx[(o * L + l) * inner + i] += self.grad[o * inner + i] * inv;
    });
}

template <typename S>
int TapeT<S>::reshape(int x, std::vector<int> shape) {
    const TensorT<S>& xv = value(x);
    require(checked_numel(shape) == xv.numel(), "reshape to " + shape_str(shape) +
                                                    " changes element count of " +
                                                    shape_str(xv.shape()));
    TensorT<S> y =
        TensorT<S>::from_data(shape, std::vector<S>(xv.data(), xv.data() + xv.numel()));
    return push("reshape", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] += self.grad[i];
    });
}

template <typename S>
int TapeT<S>::transpose_0213(int x) {
    TensorT<S> y = aagnet::transpose_0213(value(x));
    return push("transpose_0213", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S> dx = aagnet::transpose_0213(self.grad);
        TensorT<S>& acc = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < acc.numel(); ++i) acc[i] += dx[i];
    });
}

namespace {

struct BmmDims {
    int batch, m, n, k;
    std::vector<int> out_shape;
};

template <typename S>
BmmDims bmm_dims(const TensorT<S>& a, const TensorT<S>& b, bool ta, bool tb) {
    require(a.rank() >= 2 && b.rank() >= 2 && a.rank() == b.rank(),
            "bmm operands must share rank >= 2");
    std::int64_t batch = 1;
    for (int i = 0; i + 2 < a.rank(); ++i) {
        require(a.dim(i) == b.dim(i), "bmm batch dims differ: " + shape_str(a.shape()) + " vs " +
                                          shape_str(b.shape()));
        batch *= a.dim(i);
    }
    const int ap = a.dim(a.rank() - 2), aq = a.dim(a.rank() - 1);
    const int bp = b.dim(b.rank() - 2), bq = b.dim(b.rank() - 1);
    const int m = ta ? aq : ap, ka = ta ? ap : aq;
    const int kb = tb ? bq : bp, n = tb ? bp : bq;
    require(ka == kb, "bmm inner dimension mismatch");
    std::vector<int> out_shape(a.shape().begin(), a.shape().end() - 2);
    out_shape.push_back(m);
    out_shape.push_back(n);
    return {static_cast<int>(batch), m, n, ka, std::move(out_shape)};
}

}  // namespace

template <typename S>
int TapeT<S>::bmm(int a, int b, bool ta, bool tb) {
    const TensorT<S>& av = value(a);
    const TensorT<S>& bv = value(b);
    const BmmDims d = bmm_dims(av, bv, ta, tb);
    TensorT<S> y(d.out_shape);
    aagnet::bmm(av.data(), bv.data(), y.data(), d.batch, d.m, d.n, d.k, ta, tb);
    return push("bmm", {a, b}, std::move(y), [ta, tb, d](TapeT& t, const Node& self) {
        const TensorT<S>& av2 = t.value(self.inputs[0]);
        const TensorT<S>& bv2 = t.value(self.inputs[1]);
        TensorT<S>& da = t.grad_mut(self.inputs[0]);
        TensorT<S>& db = t.grad_mut(self.inputs[1]);
        TensorT<S> tmp_a(av2.shape()), tmp_b(bv2.shape());
        // dA = dC * op_b(B)^T, transposed back into A's layout when ta is set.
        if (!ta)
            aagnet::bmm(self.grad.data(), bv2.data(), tmp_a.data(), d.batch, d.m, d.k, d.n, false, !tb);
        else
            aagnet::bmm(bv2.data(), self.grad.data(), tmp_a.data(), d.batch, d.k, d.m, d.n, tb, true);
        // dB = op_a(A)^T * dC, transposed back into B's layout when tb is set.
        if (!tb)
            aagnet::bmm(av2.data(), self.grad.data(), tmp_b.data(), d.batch, d.k, d.n, d.m, !ta, false);
        else
            aagnet::bmm(self.grad.data(), av2.data(), tmp_b.data(), d.batch, d.n, d.k, d.m, true, ta);
        for (std::int64_t i = 0; i < da.numel(); ++i) da[i] += tmp_a[i];
        for (std::int64_t i = 0; i < db.numel(); ++i) db[i] += tmp_b[i];
    });
}

template <typename S>
int TapeT<S>::dropout(int x, double rate, Rng& rng, bool training) {
    require(rate >= 0.0 && rate < 1.0, "dropout rate must be in [0,1)");
    if (!training || rate == 0.0) return x;
    const TensorT<S>& xv = value(x);
    std::vector<S> mask(static_cast<std::size_t>(xv.numel()));
    const S keep_scale = static_cast<S>(1.0 / (1.0 - rate));
    for (auto& m : mask) m = rng.uniform() >= rate ? keep_scale : S(0);
    TensorT<S> y(xv.shape());
    for (std::int64_t i = 0; i < xv.numel(); ++i) y[i] = xv[i] * mask[static_cast<std::size_t>(i)];
    return push("dropout", {x}, std::move(y), [mask = std::move(mask)](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i)
            dx[i] += self.grad[i] * mask[static_cast<std::size_t>(i)];
    });
}

template <typename S>
int TapeT<S>::sparse_ce(int logits, std::vector<int> labels) {
    const TensorT<S>& lv = value(logits);
    require(lv.rank() == 2, "sparse_ce expects rank-2 logits, got " + shape_str(lv.shape()));
    const int N = lv.dim(0), K = lv.dim(1);
    require(static_cast<int>(labels.size()) == N, "sparse_ce needs one label per row");
    for (int y : labels)
        require(y >= 0 && y < K, "label " + std::to_string(y) + " out of range [0," +
                                     std::to_string(K) + ")");
    // Mean over the batch of logsumexp(logits) - logits[label].
    TensorT<S> probs = softmax_last_fwd(lv);
    S loss = S(0);
    for (int n = 0; n < N; ++n) {
        const S* row = lv.data() + static_cast<std::int64_t>(n) * K;
        S mx = row[0];
        for (int k = 1; k < K; ++k) mx = std::max(mx, row[k]);
        S sum = S(0);
        for (int k = 0; k < K; ++k) sum += std::exp(row[k] - mx);
        loss += (mx + std::log(sum)) - row[labels[static_cast<std::size_t>(n)]];
    }
    loss /= S(N);
    TensorT<S> y = TensorT<S>::from_data({1}, {loss});
    return push("sparse_ce", {logits}, std::move(y),
                [labels = std::move(labels), probs = std::move(probs), N, K](TapeT& t,
                                                                             const Node& self) {
                    TensorT<S>& dx = t.grad_mut(self.inputs[0]);
                    const S g = self.grad[0] / S(N);
                    for (int n = 0; n < N; ++n)
                        for (int k = 0; k < K; ++k) {
                            const std::int64_t i = static_cast<std::int64_t>(n) * K + k;
                            const S onehot = k == labels[static_cast<std::size_t>(n)] ? S(1) : S(0);
                            dx[i] += g * (probs[i] - onehot);
                        }
                });
}

template <typename S>
int TapeT<S>::sum_all(int x) {
    const TensorT<S>& xv = value(x);
    S acc = S(0);
    for (std::int64_t i = 0; i < xv.numel(); ++i) acc += xv[i];
    TensorT<S> y = TensorT<S>::from_data({1}, {acc});
    return push("sum_all", {x}, std::move(y), [](TapeT& t, const Node& self) {
        TensorT<S>& dx = t.grad_mut(self.inputs[0]);
        for (std::int64_t i = 0; i < dx.numel(); ++i) dx[i] += self.grad[0];
    });
}

template <typename S>
void TapeT<S>::backward_from(int loss) {
    check_id(loss);
    require(recording_, "backward requires a recording tape");
    const TensorT<S>& lv = nodes_[static_cast<std::size_t>(loss)].value;
    require(lv.numel() == 1, "backward requires a scalar loss, got " + shape_str(lv.shape()));
    for (int i = 0; i <= loss; ++i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        n.grad = TensorT<S>(n.value.shape());
    }
    nodes_[static_cast<std::size_t>(loss)].grad[0] = S(1);
    for (int i = loss; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.backward) n.backward(*this, n);
    }
}

template class TapeT<float>;
template class TapeT<double>;

}  // namespace aagnet
