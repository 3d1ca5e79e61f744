#pragma once

#include <array>
#include <string>
#include <vector>

#include "morphtag/graph.hpp"
#include "morphtag/rng.hpp"

namespace morphtag {

inline Tensor xavier_uniform(std::vector<int> shape, Rng& rng) {
    int fan_out = shape[0];
    int fan_in = shape.size() > 1 ? shape[1] : shape[0];
    Real limit = std::sqrt(Real(6) / (fan_in + fan_out));
    return Tensor::uniform(std::move(shape), -limit, limit, rng);
}

/// Peephole LSTM cell parameters. Gate order: input, forget, cell, output.
struct LstmParams {
    int input_dim = 0;
    int hidden_dim = 0;
    std::array<Parameter, 4> w_x;  // [hidden, input]
    std::array<Parameter, 4> w_h;  // [hidden, hidden]
    std::array<Parameter, 4> bias; // [hidden]
    Parameter peep_in, peep_forget, peep_out;  // [hidden]

    LstmParams() = default;

    LstmParams(const std::string& prefix, int input, int hidden, Rng& rng)
        : input_dim(input), hidden_dim(hidden) {
        static const char* gate[4] = {"i", "f", "c", "o"};
        for (int k = 0; k < 4; ++k) {
            w_x[k] = Parameter(prefix + ".wx_" + gate[k],
                               xavier_uniform({hidden, input}, rng));
            w_h[k] = Parameter(prefix + ".wh_" + gate[k],
                               xavier_uniform({hidden, hidden}, rng));
            // forget-gate bias starts at 1, the rest at 0
            bias[k] = Parameter(prefix + ".b_" + gate[k],
                                Tensor::full({hidden}, k == 1 ? Real(1) : Real(0)));
        }
        peep_in = Parameter(prefix + ".peep_i", Tensor::zeros({hidden}));
        peep_forget = Parameter(prefix + ".peep_f", Tensor::zeros({hidden}));
        peep_out = Parameter(prefix + ".peep_o", Tensor::zeros({hidden}));
    }

    void collect(std::vector<Parameter*>& out) {
        for (int k = 0; k < 4; ++k) {
            out.push_back(&w_x[k]);
            out.push_back(&w_h[k]);
            out.push_back(&bias[k]);
        }
        out.push_back(&peep_in);
        out.push_back(&peep_forget);
        out.push_back(&peep_out);
    }
};

struct LstmState {
    NodeId h;
    NodeId c;
};

inline LstmState lstm_zero_state(Graph& g, int hidden) {
    NodeId z = g.zeros({hidden});
    return {z, z};
}

/// One peephole LSTM step. Input and forget gates see c_prev, the output
/// gate sees the new cell state.
inline LstmState lstm_cell_step(Graph& g, LstmParams& p, NodeId x, LstmState prev) {
    auto gate_pre = [&](int k) {
        return g.add(g.add(g.matmul(g.param(p.w_x[k]), x),
                           g.matmul(g.param(p.w_h[k]), prev.h)),
                     g.param(p.bias[k]));
    };
    NodeId in_gate = g.sigmoid_(g.add(gate_pre(0), g.mul(g.param(p.peep_in), prev.c)));
    NodeId forget_gate =
        g.sigmoid_(g.add(gate_pre(1), g.mul(g.param(p.peep_forget), prev.c)));
    NodeId candidate = g.tanh_(gate_pre(2));
    NodeId c = g.add(g.mul(forget_gate, prev.c), g.mul(in_gate, candidate));
    NodeId out_gate = g.sigmoid_(g.add(gate_pre(3), g.mul(g.param(p.peep_out), c)));
    NodeId h = g.mul(out_gate, g.tanh_(c));
    return {h, c};
}

/// Two independent stacked LSTMs (one per direction) over the same input
/// sequence, joined at the top by an affine map and tanh.
struct BiLstmStack {
    int input_dim = 0;
    int hidden_dim = 0;
    int join_dim = 0;
    int layers = 0;
    Real dropout_keep = 1.0;
    std::vector<LstmParams> fwd;
    std::vector<LstmParams> bwd;
    Parameter join_w;  // [join_dim, 2*hidden]
    Parameter join_b;  // [join_dim]

    BiLstmStack() = default;

    BiLstmStack(const std::string& prefix, int input, int hidden, int depth,
                int join, Real keep, Rng& rng)
        : input_dim(input), hidden_dim(hidden), join_dim(join), layers(depth),
          dropout_keep(keep) {
        for (int l = 0; l < depth; ++l) {
            int in = l == 0 ? input : hidden;
            fwd.emplace_back(prefix + ".fwd" + std::to_string(l), in, hidden, rng);
            bwd.emplace_back(prefix + ".bwd" + std::to_string(l), in, hidden, rng);
        }
        join_w = Parameter(prefix + ".join_w", xavier_uniform({join, 2 * hidden}, rng));
        join_b = Parameter(prefix + ".join_b", Tensor::zeros({join}));
    }

    void collect(std::vector<Parameter*>& out) {
        for (auto& l : fwd) l.collect(out);
        for (auto& l : bwd) l.collect(out);
        out.push_back(&join_w);
        out.push_back(&join_b);
    }
};

/// Encode a sequence. Positions >= real_len produce zero rows and take no
/// part in the recurrences. Pass a dropout rng to enable input and
/// inter-layer dropout (training); null disables it.
inline std::vector<NodeId> bilstm_encode(Graph& g, BiLstmStack& stack,
                                         const std::vector<NodeId>& inputs,
                                         int real_len, Rng* dropout_rng = nullptr) {
    int total_len = static_cast<int>(inputs.size());
    if (total_len == 0 || real_len <= 0)
        throw ShapeError("bilstm_encode: empty sequence");
    if (real_len > total_len)
        throw ShapeError("bilstm_encode: real_len exceeds sequence length");

    auto dropped = [&](const std::vector<NodeId>& xs) {
        if (!dropout_rng) return xs;
        std::vector<NodeId> out(xs.size());
        for (std::size_t t = 0; t < xs.size(); ++t)
            out[t] = apply_dropout(g, xs[t], stack.dropout_keep, *dropout_rng, true);
        return out;
    };

    auto run_dir = [&](std::vector<LstmParams>& dir_layers, bool reverse) {
        std::vector<NodeId> level(inputs.begin(), inputs.begin() + real_len);
        level = dropped(level);
        for (int l = 0; l < stack.layers; ++l) {
            if (l > 0) level = dropped(level);
            std::vector<NodeId> next(real_len);
            LstmState state = lstm_zero_state(g, stack.hidden_dim);
            for (int step = 0; step < real_len; ++step) {
                int t = reverse ? real_len - 1 - step : step;
                state = lstm_cell_step(g, dir_layers[l], level[t], state);
                next[t] = state.h;
            }
            level = std::move(next);
        }
        return level;
    };

    std::vector<NodeId> fwd_top = run_dir(stack.fwd, false);
    std::vector<NodeId> bwd_top = run_dir(stack.bwd, true);

    std::vector<NodeId> out(total_len);
    for (int t = 0; t < real_len; ++t) {
        NodeId joined = g.concat({fwd_top[t], bwd_top[t]});
        out[t] = g.tanh_(g.add(g.matmul(g.param(stack.join_w), joined),
                               g.param(stack.join_b)));
    }
    for (int t = real_len; t < total_len; ++t) out[t] = g.zeros({stack.join_dim});
    return out;
}

/// Mask overload: mask must be a contiguous block of ones followed by zeros.
inline std::vector<NodeId> bilstm_encode(Graph& g, BiLstmStack& stack,
                                         const std::vector<NodeId>& inputs,
                                         const std::vector<std::uint8_t>& mask,
                                         Rng* dropout_rng = nullptr) {
    if (mask.size() != inputs.size())
        throw ShapeError("bilstm_encode: mask length mismatch");
    int real_len = 0;
    while (real_len < static_cast<int>(mask.size()) && mask[real_len]) ++real_len;
    for (std::size_t t = real_len; t < mask.size(); ++t)
        if (mask[t]) throw ShapeError("bilstm_encode: mask is not a prefix");
    return bilstm_encode(g, stack, inputs, real_len, dropout_rng);
}

/// Lookup table with reserved PAD (row 0, all zero, never updated) and UNK
/// (row 1) entries.
struct EmbeddingTable {
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    Parameter table;  // [vocab, dim]

    EmbeddingTable() = default;

    EmbeddingTable(const std::string& name, int vocab, int dim, Rng& rng,
                   Real scale = 0.1)
        : table(name, Tensor::uniform({vocab, dim}, -scale, scale, rng)) {
        for (int j = 0; j < dim; ++j) table.value.at(kPad, j) = 0;
    }

    int vocab_size() const { return table.value.shape[0]; }
    int dim() const { return table.value.shape[1]; }

    NodeId lookup(Graph& g, int id) {
        return g.gather_row(g.param(table), id, kPad);
    }

    void set_row(int row, const std::vector<Real>& vec) {
        if (static_cast<int>(vec.size()) != dim())
            throw ShapeError("embedding set_row: dimension mismatch");
        for (int j = 0; j < dim(); ++j) table.value.at(row, j) = vec[j];
    }

    void collect(std::vector<Parameter*>& out) { out.push_back(&table); }
};

/// Affine projection to a tag vocabulary followed by softmax.
struct SoftmaxHead {
    Parameter w;  // [classes, in_dim]
    Parameter b;  // [classes]

    SoftmaxHead() = default;

    SoftmaxHead(const std::string& name, int in_dim, int classes, Rng& rng)
        : w(name + ".w", xavier_uniform({classes, in_dim}, rng)),
          b(name + ".b", Tensor::zeros({classes})) {}

    int classes() const { return w.value.shape[0]; }

    NodeId logits(Graph& g, NodeId h) {
        return g.add(g.matmul(g.param(w), h), g.param(b));
    }

    NodeId probs(Graph& g, NodeId h) { return g.softmax(logits(g, h)); }

    void collect(std::vector<Parameter*>& out) {
        out.push_back(&w);
        out.push_back(&b);
    }
};

inline NodeId linear_softmax_head(Graph& g, SoftmaxHead& head, NodeId h) {
    return head.probs(g, h);
}

}  // namespace morphtag
