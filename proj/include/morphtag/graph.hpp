#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/rng.hpp"
#include "morphtag/tensor.hpp"

namespace morphtag {

/// A named trainable tensor. Lives outside any graph; graphs bind it as a
/// leaf and accumulate into `grad` during backward.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor t) : name(std::move(n)), value(std::move(t)) {}

    void ensure_grad() {
        if (!grad.same_shape(value)) grad = Tensor::zeros(value.shape);
    }

    void zero_grad() {
        ensure_grad();
        std::fill(grad.v.begin(), grad.v.end(), Real(0));
    }
};

using NodeId = int;

/// Reverse-mode tape over dense tensors. Ops evaluate eagerly as nodes are
/// appended, so the tape order is a topological order by construction;
/// backward() replays it in exact reverse.
class Graph {
public:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<NodeId> in;
        std::function<void(Graph&, NodeId)> back;  // null for leaves
        const char* op = "leaf";
        Parameter* param = nullptr;
    };

    explicit Graph(bool check_finite = default_check_finite())
        : check_finite_(check_finite) {}

    static bool default_check_finite() {
#ifdef NDEBUG
        return false;
#else
        return true;
#endif
    }

    void set_check_finite(bool on) { check_finite_ = on; }

    int size() const { return static_cast<int>(nodes_.size()); }
    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    const Tensor& grad(NodeId id) const { return nodes_[id].grad; }
    const std::vector<Parameter*>& bound_params() const { return params_; }

    // ---- leaves ----

    NodeId leaf(Tensor t) { return push(std::move(t), "leaf", {}, nullptr); }

    NodeId scalar(Real x) { return leaf(Tensor::scalar(x)); }

    NodeId zeros(std::vector<int> shape) { return leaf(Tensor::zeros(std::move(shape))); }

    /// Bind a trainable parameter. Binding the same parameter twice yields
    /// the same node, so its gradient accumulates across all uses.
    NodeId param(Parameter& p) {
        auto it = param_ids_.find(&p);
        if (it != param_ids_.end()) return it->second;
        NodeId id = push(p.value, "param", {}, nullptr);
        nodes_[id].param = &p;
        param_ids_.emplace(&p, id);
        params_.push_back(&p);
        return id;
    }

    // ---- elementwise ----

    NodeId add(NodeId a, NodeId b) {
        require_same_shape("add", a, b);
        Tensor out = nodes_[a].value;
        const Tensor& tb = nodes_[b].value;
        for (int i = 0; i < out.numel(); ++i) out.v[i] += tb.v[i];
        return push(std::move(out), "add", {a, b}, [](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            g.accumulate(g.nodes_[self].in[0], go);
            g.accumulate(g.nodes_[self].in[1], go);
        });
    }

    /// n-ary elementwise sum of same-shaped tensors.
    NodeId add_n(const std::vector<NodeId>& xs) {
        if (xs.empty()) throw ShapeError("add_n: empty input list");
        Tensor out = nodes_[xs[0]].value;
        for (std::size_t k = 1; k < xs.size(); ++k) {
            require_same_shape("add_n", xs[0], xs[k]);
            const Tensor& t = nodes_[xs[k]].value;
            for (int i = 0; i < out.numel(); ++i) out.v[i] += t.v[i];
        }
        return push(std::move(out), "add_n", xs, [](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            for (NodeId x : g.nodes_[self].in) g.accumulate(x, go);
        });
    }

    NodeId mul(NodeId a, NodeId b) {
        require_same_shape("mul", a, b);
        Tensor out = nodes_[a].value;
        const Tensor& tb = nodes_[b].value;
        for (int i = 0; i < out.numel(); ++i) out.v[i] *= tb.v[i];
        return push(std::move(out), "mul", {a, b}, [](Graph& g, NodeId self) {
            NodeId a = g.nodes_[self].in[0], b = g.nodes_[self].in[1];
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[a].grad;
            Tensor& gb = g.nodes_[b].grad;
            const Tensor& va = g.nodes_[a].value;
            const Tensor& vb = g.nodes_[b].value;
            for (int i = 0; i < go.numel(); ++i) {
                ga.v[i] += go.v[i] * vb.v[i];
                gb.v[i] += go.v[i] * va.v[i];
            }
        });
    }

    NodeId scale(NodeId a, Real c) {
        Tensor out = nodes_[a].value;
        for (auto& x : out.v) x *= c;
        return push(std::move(out), "scale", {a}, [c](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            for (int i = 0; i < go.numel(); ++i) ga.v[i] += c * go.v[i];
        });
    }

    // ---- linear algebra ----

    /// A[m,k] x B[k,n] -> [m,n], or A[m,k] x b[k] -> [m].
    NodeId matmul(NodeId a, NodeId b) {
        const Tensor& ta = nodes_[a].value;
        const Tensor& tb = nodes_[b].value;
        if (ta.rank() != 2)
            throw ShapeError("matmul: left operand must be rank 2, got " + ta.shape_str());
        int m = ta.shape[0], k = ta.shape[1];
        if (tb.rank() == 2) {
            if (tb.shape[0] != k)
                throw ShapeError("matmul: inner dims " + ta.shape_str() + " x " + tb.shape_str());
            int n = tb.shape[1];
            Tensor out = Tensor::zeros({m, n});
            for (int i = 0; i < m; ++i)
                for (int kk = 0; kk < k; ++kk) {
                    Real aik = ta.at(i, kk);
                    if (aik == 0) continue;
                    const Real* brow = &tb.v[static_cast<std::size_t>(kk) * n];
                    Real* orow = &out.v[static_cast<std::size_t>(i) * n];
                    for (int j = 0; j < n; ++j) orow[j] += aik * brow[j];
                }
            return push(std::move(out), "matmul", {a, b}, [](Graph& g, NodeId self) {
                matmul_backward(g, self);
            });
        }
        if (tb.rank() == 1) {
            if (tb.shape[0] != k)
                throw ShapeError("matmul: inner dims " + ta.shape_str() + " x " + tb.shape_str());
            Tensor out = Tensor::zeros({m});
            for (int i = 0; i < m; ++i) {
                const Real* arow = &ta.v[static_cast<std::size_t>(i) * k];
                Real acc = 0;
                for (int kk = 0; kk < k; ++kk) acc += arow[kk] * tb.v[kk];
                out.v[i] = acc;
            }
            return push(std::move(out), "matvec", {a, b}, [](Graph& g, NodeId self) {
                NodeId a = g.nodes_[self].in[0], b = g.nodes_[self].in[1];
                const Tensor& go = g.nodes_[self].grad;
                const Tensor& va = g.nodes_[a].value;
                const Tensor& vb = g.nodes_[b].value;
                Tensor& ga = g.nodes_[a].grad;
                Tensor& gb = g.nodes_[b].grad;
                int m = va.shape[0], k = va.shape[1];
                for (int i = 0; i < m; ++i) {
                    Real gi = go.v[i];
                    if (gi == 0) continue;
                    Real* garow = &ga.v[static_cast<std::size_t>(i) * k];
                    const Real* varow = &va.v[static_cast<std::size_t>(i) * k];
                    for (int kk = 0; kk < k; ++kk) {
                        garow[kk] += gi * vb.v[kk];
                        gb.v[kk] += gi * varow[kk];
                    }
                }
            });
        }
        throw ShapeError("matmul: right operand rank unsupported");
    }

    /// Concatenate rank-1 vectors.
    NodeId concat(const std::vector<NodeId>& xs) {
        if (xs.empty()) throw ShapeError("concat: empty input list");
        int total = 0;
        for (NodeId x : xs) {
            if (nodes_[x].value.rank() != 1)
                throw ShapeError("concat: inputs must be rank 1");
            total += nodes_[x].value.shape[0];
        }
        Tensor out = Tensor::zeros({total});
        int off = 0;
        for (NodeId x : xs) {
            const Tensor& t = nodes_[x].value;
            std::copy(t.v.begin(), t.v.end(), out.v.begin() + off);
            off += t.shape[0];
        }
        return push(std::move(out), "concat", xs, [](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            int off = 0;
            for (NodeId x : g.nodes_[self].in) {
                Tensor& gx = g.nodes_[x].grad;
                for (int i = 0; i < gx.numel(); ++i) gx.v[i] += go.v[off + i];
                off += gx.numel();
            }
        });
    }

    // ---- reductions ----

    NodeId sum(NodeId a) {
        Real acc = 0;
        for (Real x : nodes_[a].value.v) acc += x;
        return push(Tensor::scalar(acc), "sum", {a}, [](Graph& g, NodeId self) {
            Real go = g.nodes_[self].grad.v[0];
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            for (auto& x : ga.v) x += go;
        });
    }

    /// Sum a rank-2 tensor over one axis: axis 0 collapses rows -> [cols],
    /// axis 1 collapses columns -> [rows].
    NodeId sum_axis(NodeId a, int axis) {
        const Tensor& ta = nodes_[a].value;
        if (ta.rank() != 2) throw ShapeError("sum_axis: input must be rank 2");
        if (axis != 0 && axis != 1) throw ShapeError("sum_axis: axis must be 0 or 1");
        int m = ta.shape[0], n = ta.shape[1];
        Tensor out = Tensor::zeros({axis == 0 ? n : m});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) out.v[axis == 0 ? j : i] += ta.at(i, j);
        return push(std::move(out), "sum_axis", {a}, [axis](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            int m = ga.shape[0], n = ga.shape[1];
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    ga.v[static_cast<std::size_t>(i) * n + j] += go.v[axis == 0 ? j : i];
        });
    }

    // ---- nonlinearities ----

    NodeId tanh_(NodeId a) {
        Tensor out = nodes_[a].value;
        for (auto& x : out.v) x = std::tanh(x);
        return push(std::move(out), "tanh", {a}, [](Graph& g, NodeId self) {
            const Tensor& y = g.nodes_[self].value;
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            for (int i = 0; i < go.numel(); ++i)
                ga.v[i] += go.v[i] * (Real(1) - y.v[i] * y.v[i]);
        });
    }

    NodeId sigmoid_(NodeId a) {
        Tensor out = nodes_[a].value;
        for (auto& x : out.v) x = Real(1) / (Real(1) + std::exp(-x));
        return push(std::move(out), "sigmoid", {a}, [](Graph& g, NodeId self) {
            const Tensor& y = g.nodes_[self].value;
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            for (int i = 0; i < go.numel(); ++i)
                ga.v[i] += go.v[i] * y.v[i] * (Real(1) - y.v[i]);
        });
    }

    /// Row-wise softmax; rank-1 input is treated as a single row.
    NodeId softmax(NodeId a) {
        const Tensor& ta = nodes_[a].value;
        if (ta.rank() < 1) throw ShapeError("softmax: scalar input");
        int n = ta.rank() == 1 ? ta.shape[0] : ta.shape[1];
        int m = ta.rank() == 1 ? 1 : ta.shape[0];
        Tensor out = ta;
        for (int i = 0; i < m; ++i) {
            Real* row = &out.v[static_cast<std::size_t>(i) * n];
            Real mx = row[0];
            for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
            Real z = 0;
            for (int j = 0; j < n; ++j) {
                row[j] = std::exp(row[j] - mx);
                z += row[j];
            }
            for (int j = 0; j < n; ++j) row[j] /= z;
        }
        return push(std::move(out), "softmax", {a}, [m, n](Graph& g, NodeId self) {
            const Tensor& y = g.nodes_[self].value;
            const Tensor& go = g.nodes_[self].grad;
            Tensor& ga = g.nodes_[g.nodes_[self].in[0]].grad;
            for (int i = 0; i < m; ++i) {
                const Real* yr = &y.v[static_cast<std::size_t>(i) * n];
                const Real* gr = &go.v[static_cast<std::size_t>(i) * n];
                Real dot = 0;
                for (int j = 0; j < n; ++j) dot += gr[j] * yr[j];
                Real* gar = &ga.v[static_cast<std::size_t>(i) * n];
                for (int j = 0; j < n; ++j) gar[j] += yr[j] * (gr[j] - dot);
            }
        });
    }

    /// Negative log-likelihood of one class given a rank-1 probability
    /// vector: -log p[gold].
    NodeId cross_entropy(NodeId probs, int gold) {
        const Tensor& tp = nodes_[probs].value;
        if (tp.rank() != 1) throw ShapeError("cross_entropy: probs must be rank 1");
        if (gold < 0 || gold >= tp.shape[0])
            throw ShapeError("cross_entropy: gold index out of range");
        Real p = tp.v[gold];
        return push(Tensor::scalar(-std::log(p)), "cross_entropy", {probs},
                    [gold](Graph& g, NodeId self) {
                        Real go = g.nodes_[self].grad.v[0];
                        NodeId probs = g.nodes_[self].in[0];
                        Real p = g.nodes_[probs].value.v[gold];
                        g.nodes_[probs].grad.v[gold] += -go / p;
                    });
    }

    // ---- special ----

    /// Gradient reversal: identity forward, -lambda * upstream backward.
    NodeId grl(NodeId x, Real lambda) {
        if (lambda < 0) throw ConfigError("grl: lambda must be non-negative");
        Tensor out = nodes_[x].value;  // bitwise copy
        return push(std::move(out), "grl", {x}, [lambda](Graph& g, NodeId self) {
            const Tensor& go = g.nodes_[self].grad;
            Tensor& gx = g.nodes_[g.nodes_[self].in[0]].grad;
            for (int i = 0; i < go.numel(); ++i) gx.v[i] += -lambda * go.v[i];
        });
    }

    /// Table[v, d] row lookup -> [d]. `skip` marks a row (typically PAD)
    /// that yields zeros and receives no gradient.
    NodeId gather_row(NodeId table, int row, int skip = -1) {
        const Tensor& tt = nodes_[table].value;
        if (tt.rank() != 2) throw ShapeError("gather_row: table must be rank 2");
        if (row < 0 || row >= tt.shape[0])
            throw ShapeError("gather_row: row index out of range");
        int d = tt.shape[1];
        Tensor out = Tensor::zeros({d});
        if (row != skip)
            std::copy(tt.v.begin() + static_cast<std::size_t>(row) * d,
                      tt.v.begin() + static_cast<std::size_t>(row + 1) * d, out.v.begin());
        return push(std::move(out), "gather_row", {table},
                    [row, skip](Graph& g, NodeId self) {
                        if (row == skip) return;
                        const Tensor& go = g.nodes_[self].grad;
                        Tensor& gt = g.nodes_[g.nodes_[self].in[0]].grad;
                        int d = gt.shape[1];
                        Real* dst = &gt.v[static_cast<std::size_t>(row) * d];
                        for (int i = 0; i < d; ++i) dst[i] += go.v[i];
                    });
    }

    // ---- backward ----

    /// Reverse pass from a scalar loss. Each bound parameter's grad
    /// receives its accumulated d(loss)/d(param).
    void backward(NodeId loss) {
        if (nodes_[loss].value.numel() != 1)
            throw ShapeError("backward: loss node is not scalar");
        nodes_[loss].grad.v[0] = 1;
        for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
            Node& n = nodes_[id];
            if (n.back) n.back(*this, id);
        }
        for (Parameter* p : params_) {
            p->ensure_grad();
            const Tensor& g = nodes_[param_ids_[p]].grad;
            for (int i = 0; i < g.numel(); ++i) p->grad.v[i] += g.v[i];
            if (check_finite_ && !p->grad.all_finite())
                throw NumericError("non-finite gradient for parameter " + p->name);
        }
    }

private:
    NodeId push(Tensor value, const char* op, std::vector<NodeId> in,
                std::function<void(Graph&, NodeId)> back) {
        if (check_finite_ && !value.all_finite())
            throw NumericError(std::string("non-finite value in node '") + op + "' (node " +
                               std::to_string(nodes_.size()) + ")");
        Node n;
        n.grad = Tensor::zeros(value.shape);
        n.value = std::move(value);
        n.in = std::move(in);
        n.back = std::move(back);
        n.op = op;
        nodes_.push_back(std::move(n));
        return static_cast<NodeId>(nodes_.size()) - 1;
    }

    void require_same_shape(const char* op, NodeId a, NodeId b) const {
        if (!nodes_[a].value.same_shape(nodes_[b].value))
            throw ShapeError(std::string(op) + ": shape mismatch " +
                             nodes_[a].value.shape_str() + " vs " +
                             nodes_[b].value.shape_str());
    }

    void accumulate(NodeId id, const Tensor& g) {
        Tensor& dst = nodes_[id].grad;
        for (int i = 0; i < g.numel(); ++i) dst.v[i] += g.v[i];
    }

    static void matmul_backward(Graph& g, NodeId self) {
        NodeId a = g.nodes_[self].in[0], b = g.nodes_[self].in[1];
        const Tensor& go = g.nodes_[self].grad;
        const Tensor& va = g.nodes_[a].value;
        const Tensor& vb = g.nodes_[b].value;
        Tensor& ga = g.nodes_[a].grad;
        Tensor& gb = g.nodes_[b].grad;
        int m = va.shape[0], k = va.shape[1], n = vb.shape[1];
        // dA += dC * B^T
        for (int i = 0; i < m; ++i)
            for (int kk = 0; kk < k; ++kk) {
                const Real* grow = &go.v[static_cast<std::size_t>(i) * n];
                const Real* brow = &vb.v[static_cast<std::size_t>(kk) * n];
                Real acc = 0;
                for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
                ga.v[static_cast<std::size_t>(i) * k + kk] += acc;
            }
        // dB += A^T * dC
        for (int kk = 0; kk < k; ++kk)
            for (int i = 0; i < m; ++i) {
                Real aik = va.at(i, kk);
                if (aik == 0) continue;
                const Real* grow = &go.v[static_cast<std::size_t>(i) * n];
                Real* gbrow = &gb.v[static_cast<std::size_t>(kk) * n];
                for (int j = 0; j < n; ++j) gbrow[j] += aik * grow[j];
            }
    }

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, NodeId> param_ids_;
    std::vector<Parameter*> params_;
    bool check_finite_;
};

/// Inverted dropout mask: entries are 1/keep_prob with probability
/// keep_prob, else 0. keep_prob == 1 yields all ones.
inline Tensor dropout_mask(std::vector<int> shape, Real keep_prob, Rng& rng) {
    if (!(keep_prob > 0) || keep_prob > 1)
        throw ConfigError("dropout_mask: keep_prob must be in (0, 1]");
    Tensor m(std::move(shape));
    if (keep_prob == Real(1)) {
        std::fill(m.v.begin(), m.v.end(), Real(1));
        return m;
    }
    Real inv = Real(1) / keep_prob;
    for (auto& x : m.v) x = rng.uniform() < keep_prob ? inv : Real(0);
    return m;
}

inline Tensor dropout_mask(std::vector<int> shape, Real keep_prob, std::uint64_t seed) {
    Rng rng(seed);
    return dropout_mask(std::move(shape), keep_prob, rng);
}

/// Multiply by a dropout mask when training; identity otherwise.
inline NodeId apply_dropout(Graph& g, NodeId x, Real keep_prob, Rng& rng, bool train) {
    if (!train || keep_prob >= Real(1)) return x;
    NodeId mask = g.leaf(dropout_mask(g.value(x).shape, keep_prob, rng));
    return g.mul(x, mask);
}

}  // namespace morphtag
