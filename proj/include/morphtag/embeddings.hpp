#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/rng.hpp"
#include "morphtag/schema.hpp"
#include "morphtag/tensor.hpp"

namespace morphtag {

struct EmbeddingSpace {
    std::vector<std::string> words;
    std::unordered_map<std::string, int> index;
    int dim = 0;
    std::vector<Real> matrix;  // row-major [words x dim]
    std::string dialect;

    int size() const { return static_cast<int>(words.size()); }

    int id(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }

    Real* vec(int i) { return &matrix[static_cast<std::size_t>(i) * dim]; }
    const Real* vec(int i) const { return &matrix[static_cast<std::size_t>(i) * dim]; }

    const Real* vec(const std::string& w) const {
        int i = id(w);
        return i < 0 ? nullptr : vec(i);
    }

    void add(const std::string& w, const std::vector<Real>& v) {
        if (index.count(w)) throw DataError("duplicate word '" + w + "'");
        if (dim == 0) dim = static_cast<int>(v.size());
        if (static_cast<int>(v.size()) != dim)
            throw DataError("dimension mismatch for word '" + w + "'");
        index.emplace(w, size());
        words.push_back(w);
        matrix.insert(matrix.end(), v.begin(), v.end());
    }

    std::vector<Real> mean_vector() const {
        std::vector<Real> m(dim, 0);
        if (words.empty()) return m;
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < dim; ++j) m[j] += vec(i)[j];
        for (Real& x : m) x /= size();
        return m;
    }
};

inline double cosine(const Real* a, const Real* b, int dim) {
    double dot = 0, na = 0, nb = 0;
    for (int j = 0; j < dim; ++j) {
        dot += a[j] * b[j];
        na += a[j] * a[j];
        nb += b[j] * b[j];
    }
    double denom = std::sqrt(na) * std::sqrt(nb);
    return denom > 0 ? dot / denom : 0.0;
}

struct SkipgramConfig {
    int dim = 250;
    int window = 2;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    double min_learning_rate = 1e-4;
    int min_count = 2;
    double subsample = 0.0;  // 0 disables frequency subsampling
    std::uint64_t seed = 1;
};

struct SkipgramResult {
    EmbeddingSpace space;
    std::vector<double> epoch_losses;  // mean negative-sampling loss per epoch
};

using TokenizedCorpus = std::vector<std::vector<std::string>>;

inline TokenizedCorpus tokenized(const Corpus& corpus) {
    TokenizedCorpus out;
    for (const Sentence& s : corpus.sentences) {
        std::vector<std::string> sent;
        for (const Token& t : s.tokens) sent.push_back(t.norm);
        out.push_back(std::move(sent));
    }
    return out;
}

/// Skip-gram with negative sampling, single-threaded and deterministic per
/// seed. Vocabulary keeps words with count >= min_count, ordered by count
/// then lexicographically.
inline SkipgramResult train_skipgram(const TokenizedCorpus& corpus,
                                     const SkipgramConfig& cfg) {
    if (cfg.dim <= 0) throw ConfigError("skipgram: dim must be positive");
    if (cfg.window < 1) throw ConfigError("skipgram: window must be >= 1");
    if (corpus.empty()) throw DataError("skipgram: empty corpus");

    std::map<std::string, long long> counts;
    long long total_tokens = 0;
    for (const auto& sent : corpus)
        for (const auto& w : sent) {
            ++counts[w];
            ++total_tokens;
        }
    if (total_tokens == 0) throw DataError("skipgram: empty corpus");

    std::vector<std::pair<std::string, long long>> kept(counts.begin(), counts.end());
    kept.erase(std::remove_if(kept.begin(), kept.end(),
                              [&](const auto& p) { return p.second < cfg.min_count; }),
               kept.end());
    if (kept.empty()) throw DataError("skipgram: no word reaches min_count");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    SkipgramResult res;
    EmbeddingSpace& space = res.space;
    space.dim = cfg.dim;
    for (auto& [w, c] : kept) {
        space.index.emplace(w, space.size());
        space.words.push_back(w);
    }
    const int V = space.size();
    const int D = cfg.dim;

    Rng rng(cfg.seed);
    space.matrix.resize(static_cast<std::size_t>(V) * D);
    for (auto& x : space.matrix) x = static_cast<Real>((rng.uniform() - 0.5) / D);
    std::vector<Real> output(static_cast<std::size_t>(V) * D, 0);

    // negative-sampling distribution ~ count^0.75
    std::vector<double> cumulative(V);
    double z = 0;
    for (int i = 0; i < V; ++i) {
        z += std::pow(double(kept[i].second), 0.75);
        cumulative[i] = z;
    }
    auto sample_negative = [&]() {
        double u = rng.uniform() * z;
        return static_cast<int>(std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                                cumulative.begin());
    };

    const long long train_words = total_tokens * std::max(1, cfg.epochs);
    long long processed = 0;
    std::vector<Real> accum(D);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0;
        long long loss_terms = 0;
        for (const auto& sent : corpus) {
            std::vector<int> ids;
            for (const auto& w : sent) {
                auto it = space.index.find(w);
                if (it == space.index.end()) continue;
                if (cfg.subsample > 0) {
                    double freq = double(counts[w]) / total_tokens;
                    double keep = std::sqrt(cfg.subsample / freq);
                    if (keep < 1 && rng.uniform() > keep) continue;
                }
                ids.push_back(it->second);
            }
            for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
                ++processed;
                double lr = cfg.learning_rate *
                            (1.0 - double(processed) / (train_words + 1));
                lr = std::max(lr, cfg.min_learning_rate);
                int reduced = 1 + rng.uniform_int(cfg.window);
                for (int off = -reduced; off <= reduced; ++off) {
                    int j = i + off;
                    if (off == 0 || j < 0 || j >= static_cast<int>(ids.size())) continue;
                    Real* in = space.vec(ids[i]);
                    std::fill(accum.begin(), accum.end(), Real(0));
                    for (int d = 0; d <= cfg.negatives; ++d) {
                        int target;
                        double label;
                        if (d == 0) {
                            target = ids[j];
                            label = 1;
                        } else {
                            target = sample_negative();
                            if (target == ids[j]) continue;
                            label = 0;
                        }
                        Real* out = &output[static_cast<std::size_t>(target) * D];
                        double f = 0;
                        for (int k = 0; k < D; ++k) f += in[k] * out[k];
                        double sig = 1.0 / (1.0 + std::exp(-f));
                        loss_sum += label > 0.5 ? -std::log(std::max(sig, 1e-12))
                                                : -std::log(std::max(1 - sig, 1e-12));
                        ++loss_terms;
                        double g = (label - sig) * lr;
                        for (int k = 0; k < D; ++k) {
                            accum[k] += static_cast<Real>(g) * out[k];
                            out[k] += static_cast<Real>(g) * in[k];
                        }
                    }
                    for (int k = 0; k < D; ++k) in[k] += accum[k];
                }
            }
        }
        res.epoch_losses.push_back(loss_terms ? loss_sum / loss_terms : 0.0);
    }
    return res;
}

/// Concatenate two corpora (sentence-interleaved) and train one model.
inline SkipgramResult merge_corpora_and_train(const TokenizedCorpus& a,
                                              const TokenizedCorpus& b,
                                              const SkipgramConfig& cfg) {
    TokenizedCorpus merged;
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i < a.size()) merged.push_back(a[i]);
        if (i < b.size()) merged.push_back(b[i]);
    }
    SkipgramResult res = train_skipgram(merged, cfg);
    res.space.dialect = "merged";
    return res;
}

/// Text vector file: "<count> <dim>" header then one "<word> v1..vd" line
/// per word.
inline void save_vectors(const EmbeddingSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open vector file for writing: " + path);
    out << space.size() << ' ' << space.dim << "\n";
    out << std::setprecision(10);
    for (int i = 0; i < space.size(); ++i) {
        out << space.words[i];
        for (int j = 0; j < space.dim; ++j) out << ' ' << space.vec(i)[j];
        out << "\n";
    }
}

inline EmbeddingSpace load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vector file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw DataError(path + ": empty vector file");
    std::istringstream hs(header);
    long long count = 0;
    int dim = 0;
    if (!(hs >> count >> dim) || count < 0 || dim <= 0)
        throw DataError(path + ": bad header line '" + header + "'");
    EmbeddingSpace space;
    space.dim = dim;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<Real> v;
        double x;
        while (ls >> x) v.push_back(static_cast<Real>(x));
        if (static_cast<int>(v.size()) != dim)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(dim) + " components, got " +
                            std::to_string(v.size()));
        if (space.index.count(word))
            throw DataError(path + ":" + std::to_string(lineno) + ": duplicate word '" +
                            word + "'");
        space.add(word, v);
    }
    if (space.size() != count)
        throw DataError(path + ": header promised " + std::to_string(count) +
                        " words, file has " + std::to_string(space.size()));
    return space;
}

}  // namespace morphtag
