#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "morphtag/embeddings.hpp"
#include "morphtag/errors.hpp"
#include "morphtag/tensor.hpp"

namespace morphtag {

/// Translation-equivalent word pairs (source word, target word).
struct SeedDictionary {
    std::vector<std::pair<std::string, std::string>> pairs;

    static SeedDictionary load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open seed dictionary: " + path);
        SeedDictionary d;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": expected two tab-separated columns");
            d.pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
        return d;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DataError("cannot open seed dictionary for writing: " + path);
        for (const auto& [s, t] : pairs) out << s << '\t' << t << "\n";
    }
};

namespace linalg {

/// One-sided Jacobi SVD of a square matrix: A = U diag(S) V^T.
/// Adequate for the d x d cross-covariance / Gram matrices used here.
struct Svd {
    std::vector<double> u;  // [n x n]
    std::vector<double> s;  // [n]
    std::vector<double> v;  // [n x n]
    int n = 0;
};

inline Svd jacobi_svd(std::vector<double> a, int n) {
    Svd r;
    r.n = n;
    r.v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) r.v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto col_dot = [&](const std::vector<double>& m, int p, int q) {
        double acc = 0;
        for (int i = 0; i < n; ++i)
            acc += m[static_cast<std::size_t>(i) * n + p] * m[static_cast<std::size_t>(i) * n + q];
        return acc;
    };
    auto rotate_cols = [&](std::vector<double>& m, int p, int q, double c, double s) {
        for (int i = 0; i < n; ++i) {
            double mp = m[static_cast<std::size_t>(i) * n + p];
            double mq = m[static_cast<std::size_t>(i) * n + q];
            m[static_cast<std::size_t>(i) * n + p] = c * mp - s * mq;
            m[static_cast<std::size_t>(i) * n + q] = s * mp + c * mq;
        }
    };

    const double eps = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double alpha = col_dot(a, p, p);
                double beta = col_dot(a, q, q);
                double gamma = col_dot(a, p, q);
                off = std::max(off, std::abs(gamma) / std::max(std::sqrt(alpha * beta), 1e-300));
                if (std::abs(gamma) < eps * std::sqrt(alpha * beta)) continue;
                double zeta = (beta - alpha) / (2 * gamma);
                double t = (zeta >= 0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
                double c = 1.0 / std::sqrt(1 + t * t);
                double s = c * t;
                rotate_cols(a, p, q, c, s);
                rotate_cols(r.v, p, q, c, s);
            }
        if (off < eps) break;
    }

    r.s.assign(n, 0.0);
    r.u.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        double norm = std::sqrt(col_dot(a, j, j));
        r.s[j] = norm;
        if (norm > 1e-300) {
            for (int i = 0; i < n; ++i)
                r.u[static_cast<std::size_t>(i) * n + j] =
                    a[static_cast<std::size_t>(i) * n + j] / norm;
        }
    }
    // complete zero-norm columns of U to an orthonormal basis
    for (int j = 0; j < n; ++j) {
        if (r.s[j] > 1e-300) continue;
        for (int basis = 0; basis < n; ++basis) {
            std::vector<double> cand(n, 0.0);
            cand[basis] = 1.0;
            for (int k = 0; k < n; ++k) {
                if (k == j || r.s[k] <= 1e-300) continue;
                double d = 0;
                for (int i = 0; i < n; ++i) d += cand[i] * r.u[static_cast<std::size_t>(i) * n + k];
                for (int i = 0; i < n; ++i) cand[i] -= d * r.u[static_cast<std::size_t>(i) * n + k];
            }
            double norm = 0;
            for (double x : cand) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (int i = 0; i < n; ++i)
                    r.u[static_cast<std::size_t>(i) * n + j] = cand[i] / norm;
                break;
            }
        }
    }
    return r;
}

}  // namespace linalg

enum class MapMode { LeastSquares, Orthogonal };

struct MappingResult {
    Tensor w;  // [d, d]; maps source vectors into the target space
    int used_pairs = 0;
    int skipped_pairs = 0;
    double mean_dist_before = 0;
    double mean_dist_after = 0;
    bool rank_deficient = false;
};

inline std::vector<Real> apply_map(const Tensor& w, const Real* x) {
    int d = w.shape[0];
    std::vector<Real> y(d, 0);
    for (int i = 0; i < d; ++i) {
        Real acc = 0;
        for (int j = 0; j < d; ++j) acc += w.at(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

/// Fit the d x d linear map from seed pairs. Least-squares mode minimizes
/// sum |W src(x) - tgt(y)|^2; orthogonal mode solves the Procrustes problem
/// (SVD of the cross-covariance, W = U V^T). Pairs whose words are missing
/// from either space are reported and skipped.
inline MappingResult map_spaces(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                const SeedDictionary& dict, MapMode mode) {
    if (src.dim != tgt.dim)
        throw ConfigError("map_spaces: spaces have different dimensions");
    const int d = src.dim;

    std::vector<const Real*> xs, ys;
    MappingResult res;
    for (const auto& [sw, tw] : dict.pairs) {
        int si = src.id(sw), ti = tgt.id(tw);
        if (si < 0 || ti < 0) {
            ++res.skipped_pairs;
            continue;
        }
        xs.push_back(src.vec(si));
        ys.push_back(tgt.vec(ti));
    }
    res.used_pairs = static_cast<int>(xs.size());
    if (xs.empty()) throw DataError("map_spaces: no usable seed pairs");

    const int m = res.used_pairs;
    auto dist = [&](const Real* a, const std::vector<Real>& b) {
        double acc = 0;
        for (int j = 0; j < d; ++j) {
            double diff = b[j] - a[j];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    };
    for (int i = 0; i < m; ++i) {
        std::vector<Real> x(xs[i], xs[i] + d);
        res.mean_dist_before += dist(ys[i], x);
    }
    res.mean_dist_before /= m;

    res.w = Tensor::zeros({d, d});
    if (mode == MapMode::Orthogonal) {
        // cross-covariance M = sum_i y_i x_i^T
        std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < m; ++i)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    cov[static_cast<std::size_t>(r) * d + c] +=
                        double(ys[i][r]) * double(xs[i][c]);
        linalg::Svd svd = linalg::jacobi_svd(cov, d);
        double smax = *std::max_element(svd.s.begin(), svd.s.end());
        for (double s : svd.s)
            if (s < 1e-10 * std::max(smax, 1.0)) res.rank_deficient = true;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                double acc = 0;
                for (int k = 0; k < d; ++k)
                    acc += svd.u[static_cast<std::size_t>(r) * d + k] *
                           svd.v[static_cast<std::size_t>(c) * d + k];
                res.w.at(r, c) = static_cast<Real>(acc);
            }
    } else {
        // normal equations (X^T X) W^T = X^T Y, solved with an SVD
        // pseudo-inverse so rank deficiency degrades gracefully
        std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
        std::vector<double> xty(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < m; ++i)
            for (int r = 0; r < d; ++r) {
                for (int c = 0; c < d; ++c) {
                    gram[static_cast<std::size_t>(r) * d + c] +=
                        double(xs[i][r]) * double(xs[i][c]);
                    xty[static_cast<std::size_t>(r) * d + c] +=
                        double(xs[i][r]) * double(ys[i][c]);
                }
            }
        linalg::Svd svd = linalg::jacobi_svd(gram, d);
        double smax = *std::max_element(svd.s.begin(), svd.s.end());
        std::vector<double> sinv(d, 0.0);
        for (int k = 0; k < d; ++k) {
            if (svd.s[k] < 1e-10 * std::max(smax, 1.0)) {
                res.rank_deficient = true;
            } else {
                sinv[k] = 1.0 / svd.s[k];
            }
        }
        // pinv(gram) = V S^-1 U^T; W^T = pinv(gram) * X^T Y
        std::vector<double> tmp(static_cast<std::size_t>(d) * d, 0.0);  // U^T * xty
        for (int k = 0; k < d; ++k)
            for (int c = 0; c < d; ++c) {
                double acc = 0;
                for (int i = 0; i < d; ++i)
                    acc += svd.u[static_cast<std::size_t>(i) * d + k] *
                           xty[static_cast<std::size_t>(i) * d + c];
                tmp[static_cast<std::size_t>(k) * d + c] = acc * sinv[k];
            }
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                double acc = 0;
                for (int k = 0; k < d; ++k)
                    acc += svd.v[static_cast<std::size_t>(r) * d + k] *
                           tmp[static_cast<std::size_t>(k) * d + c];
                // acc is W^T(r,c) = W(c,r)
                res.w.at(c, r) = static_cast<Real>(acc);
            }
    }

    for (int i = 0; i < m; ++i) {
        std::vector<Real> mapped = apply_map(res.w, xs[i]);
        res.mean_dist_after += dist(ys[i], mapped);
    }
    res.mean_dist_after /= m;
    return res;
}

/// Map file: "d" header then d rows of d values.
inline void save_map(const Tensor& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open map file for writing: " + path);
    int d = w.shape[0];
    out << d << "\n" << std::setprecision(17);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out << (j ? " " : "") << w.at(i, j);
        out << "\n";
    }
}

inline Tensor load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open map file: " + path);
    int d = 0;
    if (!(in >> d) || d <= 0) throw DataError(path + ": bad map header");
    Tensor w = Tensor::zeros({d, d});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!(in >> w.at(i, j)))
                throw DataError(path + ": truncated map file");
    return w;
}

}  // namespace morphtag
