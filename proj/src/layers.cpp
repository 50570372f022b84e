#include "aagnet/layers.hpp"

#include <cmath>

namespace aagnet {

namespace {
void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

void FireSpec::validate() const {
    require(squeeze_ch > 0 && expand_total_ch > 0, "fire channels must be positive");
    require(expand_total_ch % 2 == 0,
            "fire expand_total_ch must be even, got " + std::to_string(expand_total_ch));
    require(squeeze_ch < expand_total_ch, "fire squeeze_ch must be smaller than expand_total_ch");
}

void MBConvSpec::validate() const {
    require(in_ch > 0 && out_ch > 0, "mbconv channels must be positive");
    require(stride == 1 || stride == 2, "mbconv stride must be 1 or 2");
    require(expansion >= 1, "mbconv expansion must be >= 1");
}

int AttentionSpec::head_dim() const {
    validate();
    return model_dim / heads;
}

void AttentionSpec::validate() const {
    require(model_dim > 0 && heads > 0 && mlp_expansion > 0, "attention spec must be positive");
    require(model_dim % heads == 0, "model_dim " + std::to_string(model_dim) +
                                        " not divisible by heads " + std::to_string(heads));
}

template <typename S>
int fire_forward(TapeT<S>& t, int x, const FireSpec& spec, const FireNodeIds& p) {
    spec.validate();
    const int squeezed = t.relu(t.bias_add(t.conv2d(x, p.squeeze_w, 1, Padding::same), p.squeeze_b));
    const int e1 = t.relu(t.bias_add(t.conv2d(squeezed, p.expand1_w, 1, Padding::same), p.expand1_b));
    const int e3 = t.relu(t.bias_add(t.conv2d(squeezed, p.expand3_w, 1, Padding::same), p.expand3_b));
    return t.concat_last(e1, e3);
}

template <typename S>
int mbconv_forward(TapeT<S>& t, int x, const MBConvSpec& spec, const MBConvNodeIds& p) {
    spec.validate();
    require(t.value(x).dim(3) == spec.in_ch,
            "mbconv input has " + std::to_string(t.value(x).dim(3)) + " channels, spec expects " +
                std::to_string(spec.in_ch));
    int h = t.swish(t.bias_add(t.conv2d(x, p.expand_w, 1, Padding::same), p.expand_b));
    h = t.swish(t.bias_add(t.depthwise_conv2d(h, p.dw_w, spec.stride, Padding::same), p.dw_b));
    h = t.bias_add(t.conv2d(h, p.project_w, 1, Padding::same), p.project_b);
    if (spec.residual()) h = t.add(x, h);
    return h;
}

template <typename S>
MhsaNodes mhsa(TapeT<S>& t, int tokens, const AttentionSpec& spec, const AttentionNodeIds& p) {
    const int dh = spec.head_dim();
    const auto& shape = t.value(tokens).shape();
    require(shape.size() == 3, "mhsa expects tokens [N,T,D], got " + shape_str(shape));
    const int N = shape[0], T = shape[1], D = shape[2];
    require(D == spec.model_dim, "token dim " + std::to_string(D) + " does not match model_dim " +
                                     std::to_string(spec.model_dim));

    const auto split_heads = [&](int z) {
        return t.transpose_0213(t.reshape(z, {N, T, spec.heads, dh}));  // [N,H,T,dh]
    };
    const int q = split_heads(t.dense(tokens, p.wq, p.bq));
    const int k = split_heads(t.dense(tokens, p.wk, p.bk));
    const int v = split_heads(t.dense(tokens, p.wv, p.bv));

    const int scores = t.scale(t.bmm(q, k, false, true), 1.0 / std::sqrt(static_cast<double>(dh)));
    const int attn = t.softmax_last(scores);  // [N,H,T,T], rows sum to 1
    const int ctx = t.bmm(attn, v, false, false);
    const int merged = t.reshape(t.transpose_0213(ctx), {N, T, D});
    return {t.dense(merged, p.wo, p.bo), attn};
}

template <typename S>
int transformer_encoder(TapeT<S>& t, int tokens, const AttentionSpec& spec,
                        const EncoderNodeIds& p) {
    spec.validate();
    const int attended = mhsa(t, t.layer_norm(tokens, p.ln1_gamma, p.ln1_beta), spec, p.attn).out;
    int x = t.add(tokens, attended);
    int m = t.swish(t.dense(t.layer_norm(x, p.ln2_gamma, p.ln2_beta), p.mlp1_w, p.mlp1_b));
    m = t.dense(m, p.mlp2_w, p.mlp2_b);
    return t.add(x, m);
}

#define AAGNET_INSTANTIATE(S)                                                                   \
    template int fire_forward<S>(TapeT<S>&, int, const FireSpec&, const FireNodeIds&);         \
    template int mbconv_forward<S>(TapeT<S>&, int, const MBConvSpec&, const MBConvNodeIds&);   \
    template MhsaNodes mhsa<S>(TapeT<S>&, int, const AttentionSpec&, const AttentionNodeIds&); \
    template int transformer_encoder<S>(TapeT<S>&, int, const AttentionSpec&, const EncoderNodeIds&);

AAGNET_INSTANTIATE(float)
AAGNET_INSTANTIATE(double)
#undef AAGNET_INSTANTIATE

}  // namespace aagnet
