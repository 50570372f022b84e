#pragma once

#include "aagnet/tape.hpp"

namespace aagnet {

// SqueezeNet fire block: 1x1 squeeze conv + ReLU, then parallel 1x1 and 3x3
// expand convs (ReLU each) concatenated on the channel axis. The two expand
// paths each carry half of expand_total_ch.
struct FireSpec {
    int squeeze_ch = 0;
    int expand_total_ch = 0;
    void validate() const;
};

// Mobile inverted bottleneck: expand 1x1 (Swish), depthwise 3x3 (Swish),
// project 1x1 (linear). The residual is taken iff stride == 1 and the channel
// count is unchanged.
struct MBConvSpec {
    int in_ch = 0;
    int out_ch = 0;
    int stride = 1;
    int expansion = 3;
    bool residual() const { return stride == 1 && in_ch == out_ch; }
    void validate() const;
};

struct AttentionSpec {
    int model_dim = 160;
    int heads = 4;
    int mlp_expansion = 2;
    int head_dim() const;
    void validate() const;
};

// Parameter node ids on the tape the block reads from.
struct FireNodeIds {
    int squeeze_w, squeeze_b, expand1_w, expand1_b, expand3_w, expand3_b;
};
struct MBConvNodeIds {
    int expand_w, expand_b, dw_w, dw_b, project_w, project_b;
};
struct AttentionNodeIds {
    int wq, bq, wk, bk, wv, bv, wo, bo;
};
struct EncoderNodeIds {
    int ln1_gamma, ln1_beta;
    AttentionNodeIds attn;
    int ln2_gamma, ln2_beta;
    int mlp1_w, mlp1_b, mlp2_w, mlp2_b;
};

template <typename S>
int fire_forward(TapeT<S>& t, int x, const FireSpec& spec, const FireNodeIds& p);

template <typename S>
int mbconv_forward(TapeT<S>& t, int x, const MBConvSpec& spec, const MBConvNodeIds& p);

// Scaled dot-product multi-head self-attention over tokens [N,T,D]. Also
// returns the attention-weight node [N,H,T,T] so callers can inspect it.
struct MhsaNodes {
    int out;
    int attn;
};
template <typename S>
MhsaNodes mhsa(TapeT<S>& t, int tokens, const AttentionSpec& spec, const AttentionNodeIds& p);

// Pre-norm encoder layer: x + MHSA(LN(x)), then x + MLP(LN(x)).
template <typename S>
int transformer_encoder(TapeT<S>& t, int tokens, const AttentionSpec& spec, const EncoderNodeIds& p);

}  // namespace aagnet
