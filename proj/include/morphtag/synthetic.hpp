#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/rng.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

/// Knobs for the generated dialect pair. `divergence` drives three things:
/// the fraction of B word types written in B's shifted orthography, the
/// extent of that orthography shift, the interpolation of B's syntax chain
/// away from A's, and (at a quarter of the rate) irregular B tag behaviors.
/// Zero makes the two dialects draws from the same distribution.
struct SyntheticConfig {
    int n_features = 5;
    int vocab_size = 120;
    int tags_per_feature = 4;
    double divergence = 0.3;
    double ambiguity = 0.5;  // chance a word type is pos-ambiguous
    int sentences_a = 300;
    int sentences_b = 160;
    int sentences_b_unlabeled = 160;
    int dev_sentences_a = 0;
    int dev_sentences_b = 0;
    int min_len = 4;
    int max_len = 9;
    std::string dialect_a = "da";
    std::string dialect_b = "db";
};

struct SyntheticPair {
    std::vector<std::string> features;
    Corpus labeled_a;
    Corpus labeled_b;
    Corpus unlabeled_b;
    Corpus dev_a;
    Corpus dev_b;
    AnalyzerLexicon lexicon_a;
    AnalyzerLexicon lexicon_b;
};

namespace detail {

constexpr const char* kBaseAlphabet = "abcdefghijkl";
constexpr const char* kShiftAlphabet = "mnopqrstuvwx";

struct WordEntry {
    std::string surface;
    std::vector<Analysis> analyses;  // analysis i has pos class pos_of[i]
    std::vector<int> pos_of;
};

/// Dialect B's orthography: a fixed substitution of some A letters by
/// B-only letters. Words rewritten through it keep their analyses; only
/// the written form changes.
struct CharShift {
    std::map<char, char> sub;

    static CharShift make(double divergence, Rng& rng) {
        CharShift shift;
        int n = static_cast<int>(std::lround(divergence * 12));
        std::vector<int> order(12);
        for (int i = 0; i < 12; ++i) order[i] = i;
        rng.shuffle(order);
        for (int i = 0; i < n; ++i)
            shift.sub[kBaseAlphabet[order[i]]] = kShiftAlphabet[order[i]];
        return shift;
    }

    std::string apply(const std::string& s) const {
        std::string out = s;
        for (char& c : out) {
            auto it = sub.find(c);
            if (it != sub.end()) c = it->second;
        }
        return out;
    }
};

inline std::string make_diac(const std::string& surface, int which) {
    static const char vowels[3] = {'a', 'i', 'u'};
    std::string out;
    for (char c : surface) {
        out.push_back(c);
        out.push_back(vowels[which % 3]);
    }
    if (which >= 3) out += std::to_string(which);
    return out;
}

inline std::string make_lex(const std::string& surface, const std::string& pos_tag) {
    return surface.substr(0, std::min<std::size_t>(3, surface.size())) + "_" + pos_tag;
}

inline int sample_categorical(const std::vector<double>& probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace detail

/// Deterministic per seed. Morphology is suffixal: each non-pos feature
/// owns a letter range and every word spells its feature values in its
/// final characters, so tagging genuinely requires reading the characters.
/// Every generated gold analysis is one of its word's lexicon analyses.
inline SyntheticPair generate_synthetic_dialect_pair(const SyntheticConfig& cfg,
                                                     std::uint64_t seed) {
    if (cfg.divergence < 0 || cfg.divergence > 1)
        throw ConfigError("divergence must be in [0, 1]");
    if (cfg.n_features < 1) throw ConfigError("need at least one feature");
    if (cfg.tags_per_feature < 2 || cfg.tags_per_feature > 12)
        throw ConfigError("tags_per_feature must be in [2, 12]");

    SyntheticPair out;
    for (int f = 0; f < cfg.n_features; ++f)
        out.features.push_back(f < static_cast<int>(default_features().size())
                                   ? default_features()[f]
                                   : "f" + std::to_string(f));

    Rng root(seed);
    Rng rng_lex = root.fork("lexicon");
    Rng rng_chain = root.fork("chain");

    const int nf = cfg.n_features;
    const int k = cfg.tags_per_feature;

    auto tag_name = [&](int f, int v) { return out.features[f] + std::to_string(v); };
    // irregular B-only values
    auto tag_name_b = [&](int f, int v) {
        return out.features[f] + "x" + std::to_string(v);
    };
    // the suffix letter spelling value v of feature f
    auto suffix_letter = [&](int f, int v) {
        return detail::kBaseAlphabet[((f - 1) * k + v) % 12];
    };

    // dialect A lexicon: stem + one suffix letter per non-pos feature;
    // round-robin over pos classes first so every class has words
    std::set<std::string> used;
    std::vector<detail::WordEntry> words_a(cfg.vocab_size);
    for (int w = 0; w < cfg.vocab_size; ++w) {
        detail::WordEntry& e = words_a[w];
        std::vector<int> values(nf, 0);
        for (int f = 1; f < nf; ++f) values[f] = rng_lex.uniform_int(k);
        for (int attempt = 0;; ++attempt) {
            int stem_len = 2 + rng_lex.uniform_int(3);
            std::string s;
            for (int i = 0; i < stem_len; ++i)
                s.push_back(detail::kBaseAlphabet[rng_lex.uniform_int(12)]);
            for (int f = 1; f < nf; ++f) s.push_back(suffix_letter(f, values[f]));
            if (used.insert(s).second) {
                e.surface = std::move(s);
                break;
            }
            if (attempt > 100)
                throw ConfigError("synthetic vocabulary too large for the alphabet");
        }
        int pos_class = w < k ? w : rng_lex.uniform_int(k);
        auto add_analysis = [&](int pc) {
            Analysis a;
            a.tags.resize(nf);
            a.tags[0] = tag_name(0, pc);
            for (int f = 1; f < nf; ++f) a.tags[f] = tag_name(f, values[f]);
            a.diac = detail::make_diac(e.surface, static_cast<int>(e.analyses.size()));
            a.lex = detail::make_lex(e.surface, a.tags[0]);
            e.analyses.push_back(std::move(a));
            e.pos_of.push_back(pc);
        };
        add_analysis(pos_class);
        if (rng_lex.bernoulli(cfg.ambiguity)) {
            int extra = 1 + rng_lex.uniform_int(2);
            for (int x = 0; x < extra && static_cast<int>(e.analyses.size()) < k; ++x) {
                int alt;
                do {
                    alt = rng_lex.uniform_int(k);
                } while (std::find(e.pos_of.begin(), e.pos_of.end(), alt) != e.pos_of.end());
                add_analysis(alt);
            }
        }
    }

    // dialect B: the same lexical entries, except that a divergence-sized
    // fraction of word types carries a B-specific stem (written with B-only
    // letters); inflectional suffixes stay shared across the dialects, the
    // way dialect lexemes keep the standard paradigms. A smaller fraction
    // of analyses picks up an irregular B-only value.
    detail::CharShift shift = detail::CharShift::make(cfg.divergence, rng_lex);
    const double irregular_rate = cfg.divergence * 0.25;
    const int suffix_len = nf - 1;
    std::vector<detail::WordEntry> words_b(cfg.vocab_size);
    for (int w = 0; w < cfg.vocab_size; ++w) {
        words_b[w] = words_a[w];
        detail::WordEntry& e = words_b[w];
        if (rng_lex.bernoulli(cfg.divergence)) {
            std::string stem = e.surface.substr(0, e.surface.size() - suffix_len);
            std::string suffix = e.surface.substr(e.surface.size() - suffix_len);
            std::string shifted = shift.apply(stem) + suffix;
            if (shifted != e.surface && used.insert(shifted).second) {
                e.surface = shifted;
                for (std::size_t i = 0; i < e.analyses.size(); ++i) {
                    e.analyses[i].diac = detail::make_diac(e.surface, static_cast<int>(i));
                    e.analyses[i].lex = detail::make_lex(e.surface, e.analyses[i].tags[0]);
                }
            }
        }
        for (Analysis& a : e.analyses)
            if (nf > 1 && rng_lex.bernoulli(irregular_rate)) {
                int f = 1 + rng_lex.uniform_int(nf - 1);
                a.tags[f] = tag_name_b(f, rng_lex.uniform_int(k));
            }
    }

    out.lexicon_a.dialect = cfg.dialect_a;
    for (const auto& e : words_a)
        for (const Analysis& a : e.analyses) out.lexicon_a.add(e.surface, a);
    out.lexicon_b.dialect = cfg.dialect_b;
    for (const auto& e : words_b)
        for (const Analysis& a : e.analyses) out.lexicon_b.add(e.surface, a);

    auto usage_table = [&](const std::vector<detail::WordEntry>& words) {
        std::vector<std::vector<std::pair<int, int>>> table(k);
        for (int w = 0; w < static_cast<int>(words.size()); ++w)
            for (int i = 0; i < static_cast<int>(words[w].pos_of.size()); ++i)
                table[words[w].pos_of[i]].push_back({w, i});
        return table;
    };
    auto usage_a = usage_table(words_a);
    auto usage_b = usage_table(words_b);

    // first-order Markov chain over pos classes; B interpolates toward a
    // second random chain with weight = divergence
    auto random_simplex = [&](int n, Rng& rng) {
        std::vector<double> p(n);
        double z = 0;
        for (double& x : p) {
            x = 0.05 + rng.uniform();
            z += x;
        }
        for (double& x : p) x /= z;
        return p;
    };
    std::vector<double> init_a = random_simplex(k, rng_chain);
    std::vector<std::vector<double>> trans_a;
    for (int i = 0; i < k; ++i) trans_a.push_back(random_simplex(k, rng_chain));
    std::vector<double> init_b = init_a;
    std::vector<std::vector<double>> trans_b = trans_a;
    if (cfg.divergence > 0) {
        std::vector<double> alt_init = random_simplex(k, rng_chain);
        for (int i = 0; i < k; ++i)
            init_b[i] = (1 - cfg.divergence) * init_a[i] + cfg.divergence * alt_init[i];
        for (int i = 0; i < k; ++i) {
            std::vector<double> alt = random_simplex(k, rng_chain);
            for (int j = 0; j < k; ++j)
                trans_b[i][j] = (1 - cfg.divergence) * trans_a[i][j] + cfg.divergence * alt[j];
        }
    }

    auto gen_corpus = [&](const std::string& dialect,
                          const std::vector<detail::WordEntry>& words,
                          const std::vector<std::vector<std::pair<int, int>>>& usage,
                          const std::vector<double>& init,
                          const std::vector<std::vector<double>>& trans, int n_sentences,
                          bool labeled, Rng& rng) {
        Corpus c;
        c.dialect = dialect;
        c.labeled = labeled;
        for (int s = 0; s < n_sentences; ++s) {
            Sentence sent;
            sent.dialect = dialect;
            int len = cfg.min_len + rng.uniform_int(cfg.max_len - cfg.min_len + 1);
            int pos = detail::sample_categorical(init, rng);
            for (int t = 0; t < len; ++t) {
                if (t > 0) pos = detail::sample_categorical(trans[pos], rng);
                while (usage[pos].empty()) pos = (pos + 1) % k;
                auto [w, i] = usage[pos][rng.uniform_int(static_cast<int>(usage[pos].size()))];
                Token tok;
                tok.raw = words[w].surface;
                tok.norm = tok.raw;
                if (labeled) tok.gold = words[w].analyses[i];
                sent.tokens.push_back(std::move(tok));
            }
            c.sentences.push_back(std::move(sent));
        }
        return c;
    };

    Rng rng_a = root.fork("corpus_a");
    Rng rng_b = root.fork("corpus_b");
    Rng rng_u = root.fork("corpus_b_unlabeled");
    Rng rng_da = root.fork("dev_a");
    Rng rng_db = root.fork("dev_b");
    out.labeled_a = gen_corpus(cfg.dialect_a, words_a, usage_a, init_a, trans_a,
                               cfg.sentences_a, true, rng_a);
    out.labeled_b = gen_corpus(cfg.dialect_b, words_b, usage_b, init_b, trans_b,
                               cfg.sentences_b, true, rng_b);
    out.unlabeled_b = gen_corpus(cfg.dialect_b, words_b, usage_b, init_b, trans_b,
                                 cfg.sentences_b_unlabeled, false, rng_u);
    out.dev_a = gen_corpus(cfg.dialect_a, words_a, usage_a, init_a, trans_a,
                           cfg.dev_sentences_a, true, rng_da);
    out.dev_b = gen_corpus(cfg.dialect_b, words_b, usage_b, init_b, trans_b,
                           cfg.dev_sentences_b, true, rng_db);
    return out;
}

}  // namespace morphtag
