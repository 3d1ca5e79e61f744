#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/graph.hpp"

namespace morphtag {

struct AdamConfig {
    Real learning_rate = 0.0005;
    Real beta1 = 0.9;
    Real beta2 = 0.999;
    Real epsilon = 1e-8;
};

/// First/second moment accumulators and step counter for one parameter.
struct AdamState {
    Tensor m;
    Tensor v;
    std::int64_t step = 0;
};

/// Adam with bias correction. State is allocated lazily per parameter;
/// a parameter's step counter advances only when it receives an update.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }

    void step(const std::vector<Parameter*>& params) {
        for (Parameter* p : params) step_one(*p);
    }

    void step_one(Parameter& p) {
        p.ensure_grad();
        if (!p.grad.all_finite())
            throw NumericError("adam: non-finite gradient for parameter " + p.name);
        AdamState& s = states_[&p];
        if (s.step == 0) {
            s.m = Tensor::zeros(p.value.shape);
            s.v = Tensor::zeros(p.value.shape);
        } else if (!s.m.same_shape(p.value)) {
            throw ShapeError("adam: state shape mismatch for parameter " + p.name);
        }
        ++s.step;
        const Real b1 = cfg_.beta1, b2 = cfg_.beta2;
        const Real corr1 = Real(1) - std::pow(b1, static_cast<Real>(s.step));
        const Real corr2 = Real(1) - std::pow(b2, static_cast<Real>(s.step));
        for (int i = 0; i < p.value.numel(); ++i) {
            Real g = p.grad.v[i];
            s.m.v[i] = b1 * s.m.v[i] + (Real(1) - b1) * g;
            s.v.v[i] = b2 * s.v.v[i] + (Real(1) - b2) * g * g;
            Real m_hat = s.m.v[i] / corr1;
            Real v_hat = s.v.v[i] / corr2;
            p.value.v[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }

    std::int64_t step_count(const Parameter& p) const {
        auto it = states_.find(&p);
        return it == states_.end() ? 0 : it->second.step;
    }

private:
    AdamConfig cfg_;
    std::unordered_map<const Parameter*, AdamState> states_;
};

}  // namespace morphtag
