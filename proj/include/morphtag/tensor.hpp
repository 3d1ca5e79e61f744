#pragma once

#include <cmath>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/rng.hpp"

namespace morphtag {

#ifdef MORPHTAG_REAL_FLOAT
using Real = float;
#else
using Real = double;
#endif

/// Dense row-major tensor. Rank 0 (scalar), 1 and 2 are what the model
/// needs; anything else is rejected at construction.
struct Tensor {
    std::vector<int> shape;
    std::vector<Real> v;

    Tensor() = default;

    explicit Tensor(std::vector<int> s, Real fill = 0.0) : shape(std::move(s)) {
        check_shape(shape);
        v.assign(static_cast<std::size_t>(numel_of(shape)), fill);
    }

    Tensor(std::initializer_list<Real> vals)
        : shape{static_cast<int>(vals.size())}, v(vals) {}

    static Tensor scalar(Real x) {
        Tensor t;
        t.shape = {};
        t.v = {x};
        return t;
    }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    static Tensor full(std::vector<int> s, Real x) {
        return Tensor(std::move(s), x);
    }

    static Tensor from_rows(const std::vector<std::vector<Real>>& rows) {
        Tensor t = Tensor::zeros({static_cast<int>(rows.size()),
                                  rows.empty() ? 0 : static_cast<int>(rows[0].size())});
        std::size_t k = 0;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != t.shape[1])
                throw ShapeError("from_rows: ragged rows");
            for (Real x : r) t.v[k++] = x;
        }
        return t;
    }

    static Tensor uniform(std::vector<int> s, Real lo, Real hi, Rng& rng) {
        Tensor t(std::move(s));
        for (auto& x : t.v) x = static_cast<Real>(rng.uniform(lo, hi));
        return t;
    }

    int numel() const { return static_cast<int>(v.size()); }
    int rank() const { return static_cast<int>(shape.size()); }
    bool is_scalar() const { return shape.empty(); }

    int rows() const { return rank() == 2 ? shape[0] : (rank() == 1 ? 1 : 1); }
    int cols() const { return rank() == 2 ? shape[1] : (rank() == 1 ? shape[0] : 1); }

    Real& at(int i) { return v[static_cast<std::size_t>(i)]; }
    Real at(int i) const { return v[static_cast<std::size_t>(i)]; }
    Real& at(int i, int j) { return v[static_cast<std::size_t>(i) * shape[1] + j]; }
    Real at(int i, int j) const { return v[static_cast<std::size_t>(i) * shape[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (Real x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    std::string shape_str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < shape.size(); ++i)
            os << (i ? "," : "") << shape[i];
        os << ']';
        return os.str();
    }

    static long long numel_of(const std::vector<int>& s) {
        long long n = 1;
        for (int d : s) n *= d;
        return n;
    }

private:
    static void check_shape(const std::vector<int>& s) {
        if (s.size() > 2) throw ShapeError("tensor rank > 2 unsupported");
        for (int d : s)
            if (d <= 0) throw ShapeError("non-positive dimension");
    }
};

}  // namespace morphtag
