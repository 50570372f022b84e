#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aagnet/layers.hpp"
#include "aagnet/tape.hpp"

namespace aagnet {

// Declarative architecture description. The defaults are the full-size plan:
// 128x128x3 input, a SqueezeNet-style CNN branch (stem 32 stride 2, three
// 2x2 max pools interleaved with fire pairs, GAP over 8x8x128), a MobileViT
// style branch (stem 16 stride 2, three stride-2 MBConv stages to 8x8x96,
// 64 tokens of dim 160 through two 4-head encoder layers), both projected to
// a 256-wide embedding and fused by the sigmoid attention gate.
//
// scale() shrinks every width and the input resolution proportionally so the
// whole network stays exercisable at desk scale.
struct ModelConfig {
    int input_hw = 128;
    int input_ch = 3;

    int stem_filters = 32;
    std::vector<FireSpec> fires = {{16, 64}, {16, 64}, {24, 96}, {24, 96}, {32, 128}, {32, 128}};
    int pool_window = 2;
    int pool_stride = 2;

    int vit_stem_ch = 16;
    std::vector<int> mbconv_channels = {32, 64, 96};
    int mbconv_expansion = 3;
    int token_dim = 160;
    int encoder_depth = 2;
    int heads = 4;
    int mlp_expansion = 2;

    int fusion_dim = 256;
    int gate_hidden = 256;
    double gate_dropout = 0.1;

    int head_hidden = 128;
    double head_dropout1 = 0.3;
    double head_dropout2 = 0.2;
    int num_classes = 4;

    double scale_factor = 1.0;
    bool freeze_alpha = false;  // ablation: pin alpha to 0.5

    static ModelConfig scaled(double factor);

    int gap_channels() const { return fires.back().expand_total_ch; }
    AttentionSpec attention_spec() const { return {token_dim, heads, mlp_expansion}; }
    void validate() const;
    std::string canonical() const;
    std::uint64_t digest() const;
};

// Instantiated parameter set. Parameters are stored in construction order;
// names are unique and double as the checkpoint record keys.
template <typename S>
struct ModelT {
    ModelConfig config;
    std::vector<std::pair<std::string, TensorT<S>>> params;
    std::unordered_map<std::string, int> index;

    const TensorT<S>& param(const std::string& name) const;
    TensorT<S>& param_mut(const std::string& name);
    std::int64_t total_params() const;
};

using Model = ModelT<float>;

template <typename S>
ModelT<S> build_model(const ModelConfig& config, std::uint64_t seed);

template <typename S>
std::int64_t count_params(const ModelT<S>& m);

// Model parameters inserted as leaves on a tape, for one forward/backward pass.
template <typename S>
struct TracedModel {
    const ModelT<S>* model = nullptr;
    std::vector<int> param_ids;
    int id(const std::string& name) const;
};

template <typename S>
TracedModel<S> insert_params(TapeT<S>& t, const ModelT<S>& m);

struct ForwardNodes {
    int input, f_cnn, f_vit, alpha, fused, logits;
};

template <typename S>
int cnn_branch(TapeT<S>& t, const TracedModel<S>& tm, int x);
template <typename S>
int vit_branch(TapeT<S>& t, const TracedModel<S>& tm, int x);

struct FuseNodes {
    int fused, alpha;
};
// alpha = sigmoid(fc2(dropout(relu(fc1(concat(f_cnn, f_vit)))))),
// fused = alpha * f_cnn + (1 - alpha) * f_vit.
template <typename S>
FuseNodes aag_fuse(TapeT<S>& t, const TracedModel<S>& tm, int f_cnn, int f_vit, bool training,
                   Rng* rng);
template <typename S>
int classifier_head(TapeT<S>& t, const TracedModel<S>& tm, int fused, bool training, Rng* rng);

template <typename S>
ForwardNodes model_forward(TapeT<S>& t, const TracedModel<S>& tm, int input, bool training,
                           Rng* rng);

template <typename S>
struct ForwardOutput {
    TensorT<S> logits, probs, f_cnn, f_vit, alpha, fused;
};

template <typename S>
ForwardOutput<S> forward(const ModelT<S>& m, const TensorT<S>& batch, bool training = false,
                         Rng* rng = nullptr);

struct LayerSummary {
    std::string name;
    std::vector<int> output_shape;  // for batch size 1
    std::int64_t param_count = 0;
};

// Per-block table of output shapes and parameter counts, measured from a
// traced forward pass on a dummy batch of size 1.
std::vector<LayerSummary> summarize(const ModelConfig& config);

}  // namespace aagnet
