#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aagnet/kernels.hpp"
#include "aagnet/tensor.hpp"

namespace aagnet {

// Reverse-mode autodiff record. Every forward op appends one node holding the
// op kind, the input node ids, the forward value and whatever the gradient
// rule needs. Nodes are stored in topological order by construction, and the
// backward sweep visits each node exactly once in reverse order.
//
// A tape is owned by a single thread; values are immutable once recorded.
template <typename S>
class TapeT {
public:
    struct Node {
        std::string op;
        std::vector<int> inputs;
        TensorT<S> value;
        TensorT<S> grad;
        std::function<void(TapeT&, const Node&)> backward;
    };

    explicit TapeT(bool recording = true) : recording_(recording) {}

    bool recording() const { return recording_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int id) const { return nodes_[check_id(id)]; }
    const TensorT<S>& value(int id) const { return nodes_[check_id(id)].value; }
    const TensorT<S>& grad(int id) const { return nodes_[check_id(id)].grad; }

    // Attaches a human-readable label used by the model summary and shape tests.
    void set_label(int id, std::string label) { nodes_[check_id(id)].op = std::move(label); }
    int find_label(const std::string& label) const;

    int leaf(TensorT<S> v, std::string name = "leaf");

    int conv2d(int x, int w, int stride, Padding pad);
    int depthwise_conv2d(int x, int w, int stride, Padding pad);
    int maxpool2d(int x, int window, int stride);
    int dense(int x, int w, int b);  // rows folded over leading dims, bias over last axis
    int bias_add(int x, int b);
    int relu(int x);
    int sigmoid(int x);
    int swish(int x);
    int one_minus(int x);
    int add(int a, int b);
    int mul(int a, int b);
    int scale(int x, double c);
    int concat_last(int a, int b);
    int layer_norm(int x, int gamma, int beta, double eps = 1e-5);
    int softmax_last(int x);
    int global_avg_pool(int x);
    int mean_axis(int x, int axis);
    int reshape(int x, std::vector<int> shape);
    int transpose_0213(int x);
    int bmm(int a, int b, bool ta, bool tb);
    // Inverted dropout: scales kept activations by 1/(1-rate) at train time and
    // is an identity (the same node id) when not training or rate == 0.
    int dropout(int x, double rate, Rng& rng, bool training);
    int sparse_ce(int logits, std::vector<int> labels);
    int sum_all(int x);

    // Seeds d(loss)/d(loss) = 1 and runs every recorded gradient rule in
    // reverse topological order; afterwards grad(id) holds d(loss)/d(node).
    void backward_from(int loss);

private:
    int check_id(int id) const;
    int push(std::string op, std::vector<int> inputs, TensorT<S> value,
             std::function<void(TapeT&, const Node&)> backward);
    TensorT<S>& grad_mut(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }

    bool recording_;
    std::vector<Node> nodes_;
};

using Tape32 = TapeT<float>;
using Tape64 = TapeT<double>;

}  // namespace aagnet
