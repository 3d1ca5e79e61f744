#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/rng.hpp"
#include "morphtag/vocab.hpp"

namespace morphtag {

/// Padded id view of a group of sentences. Standard batches are
/// dialect-homogeneous; adversarial batches hold a labeled half followed by
/// an unlabeled half, with a dialect label on every sentence.
struct Batch {
    std::string dialect;  // empty for mixed (adversarial) batches
    std::vector<const Sentence*> sentences;
    std::vector<std::string> sentence_dialects;
    int max_len = 0;

    std::vector<std::vector<int>> word_ids;               // [B][Lmax]
    std::vector<std::vector<std::vector<int>>> char_ids;  // [B][Lmax][*]
    // cand_tag_ids[f][b][t]: distinct candidate tag ids for feature f
    std::vector<std::vector<std::vector<std::vector<int>>>> cand_tag_ids;
    // gold_ids[f][b][t]: tag id, or -1 for PAD/unlabeled
    std::vector<std::vector<std::vector<int>>> gold_ids;
    std::vector<std::vector<std::uint8_t>> mask;  // [B][Lmax]

    std::vector<int> dialect_labels;  // per sentence; -1 when unused
    int labeled_count = 0;
    bool adversarial = false;

    int size() const { return static_cast<int>(sentences.size()); }
    int real_len(int b) const { return static_cast<int>(sentences[b]->size()); }
};

/// Turns sentences into padded id matrices under a fixed vocabulary and
/// target-space configuration.
struct BatchBuilder {
    const DataVocabularies* vocabs = nullptr;
    std::map<std::string, const AnalyzerLexicon*> lexicons;  // per dialect
    NormalizationTable normalization = NormalizationTable::arabic_default();
    bool use_merged_words = false;
    bool share_char = false;
    bool use_merged_targets = false;
    bool use_analyzer = true;
    bool want_gold = true;  // off for pure tagging (gold may be absent/unknown)

    std::vector<std::string> dialect_order;  // label id = position here

    int dialect_label(const std::string& d) const {
        for (std::size_t i = 0; i < dialect_order.size(); ++i)
            if (dialect_order[i] == d) return static_cast<int>(i);
        return -1;
    }

    const WordVocab& word_vocab(const std::string& dialect) const {
        if (use_merged_words) return vocabs->merged_words;
        auto it = vocabs->words.find(dialect);
        if (it == vocabs->words.end())
            throw ConfigError("no word vocabulary for dialect '" + dialect + "'");
        return it->second;
    }

    const WordVocab& char_vocab(const std::string& dialect) const {
        if (share_char) return vocabs->merged_chars;
        auto it = vocabs->chars.find(dialect);
        if (it == vocabs->chars.end())
            throw ConfigError("no char vocabulary for dialect '" + dialect + "'");
        return it->second;
    }

    const TagVocab& target_vocab(const std::string& dialect, int f) const {
        return use_merged_targets ? vocabs->schema.merged_tags[f]
                                  : vocabs->schema.tags_for(dialect)[f];
    }

    Batch build(const std::vector<const Sentence*>& sents, bool require_homogeneous,
                int labeled_count = -1) const {
        if (sents.empty()) throw DataError("cannot build an empty batch");
        Batch b;
        b.sentences = sents;
        b.labeled_count = labeled_count >= 0 ? labeled_count : static_cast<int>(sents.size());
        const int nf = vocabs->schema.feature_count();
        for (const Sentence* s : sents) {
            b.sentence_dialects.push_back(s->dialect);
            b.max_len = std::max(b.max_len, static_cast<int>(s->size()));
        }
        if (require_homogeneous) {
            for (const auto& d : b.sentence_dialects)
                if (d != sents[0]->dialect)
                    throw DataError("standard batch must be dialect-homogeneous");
            b.dialect = sents[0]->dialect;
        }

        const int B = b.size(), L = b.max_len;
        b.word_ids.assign(B, std::vector<int>(L, WordVocab::kPad));
        b.char_ids.assign(B, std::vector<std::vector<int>>(L));
        b.mask.assign(B, std::vector<std::uint8_t>(L, 0));
        b.cand_tag_ids.assign(
            nf, std::vector<std::vector<std::vector<int>>>(B, std::vector<std::vector<int>>(L)));
        b.gold_ids.assign(nf, std::vector<std::vector<int>>(B, std::vector<int>(L, -1)));

        for (int i = 0; i < B; ++i) {
            const Sentence& s = *sents[i];
            const WordVocab& wv = word_vocab(s.dialect);
            const WordVocab& cv = char_vocab(s.dialect);
            const AnalyzerLexicon* lex = nullptr;
            if (use_analyzer) {
                auto it = lexicons.find(s.dialect);
                if (it != lexicons.end()) lex = it->second;
            }
            b.dialect_labels.push_back(dialect_label(s.dialect));
            for (int t = 0; t < static_cast<int>(s.size()); ++t) {
                const Token& tok = s.tokens[t];
                b.mask[i][t] = 1;
                b.word_ids[i][t] = wv.id(tok.norm);
                for (const auto& ch : utf8::chars(tok.norm))
                    b.char_ids[i][t].push_back(cv.id(ch));
                if (lex) {
                    const auto& analyses = analyze(*lex, tok.norm, normalization);
                    for (int f = 0; f < nf; ++f) {
                        std::set<int> ids;
                        for (const Analysis& a : analyses) {
                            int id = vocabs->schema.merged_tags[f].id(a.tags[f]);
                            if (id >= 0) ids.insert(id);
                        }
                        b.cand_tag_ids[f][i][t].assign(ids.begin(), ids.end());
                    }
                }
                if (want_gold && tok.gold && i < b.labeled_count) {
                    for (int f = 0; f < nf; ++f) {
                        const TagVocab& tv = target_vocab(s.dialect, f);
                        int id = tv.id(tok.gold->tags[f]);
                        if (id < 0)
                            throw DataError("gold tag '" + tok.gold->tags[f] +
                                            "' missing from vocabulary of feature '" +
                                            vocabs->schema.features[f] + "'");
                        b.gold_ids[f][i][t] = id;
                    }
                }
            }
        }
        return b;
    }
};

/// Shuffle and partition a corpus into dialect-homogeneous batches. Every
/// sentence appears exactly once.
inline std::vector<Batch> make_batches(const Corpus& corpus, int batch_size, Rng& rng,
                                       const BatchBuilder& builder) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    std::vector<const Sentence*> order;
    for (const Sentence& s : corpus.sentences) order.push_back(&s);
    rng.shuffle(order);
    std::vector<Batch> out;
    for (std::size_t i = 0; i < order.size(); i += batch_size) {
        std::vector<const Sentence*> chunk(
            order.begin() + i,
            order.begin() + std::min(order.size(), i + batch_size));
        out.push_back(builder.build(chunk, true));
    }
    return out;
}

/// Compose one adversarial batch: exactly half labeled, half unlabeled
/// sentences, the unlabeled side filtered by a minimum length. Sampling is
/// without replacement while a pool lasts.
inline Batch make_adversarial_batch(const std::vector<const Sentence*>& labeled_pool,
                                    const std::vector<const Sentence*>& unlabeled_pool,
                                    int batch_size, int min_unlabeled_len, Rng& rng,
                                    const BatchBuilder& builder) {
    if (batch_size < 2 || batch_size % 2 != 0)
        throw ConfigError("adversarial batch_size must be even and positive");
    std::vector<const Sentence*> usable;
    for (const Sentence* s : unlabeled_pool)
        if (static_cast<int>(s->size()) >= min_unlabeled_len) usable.push_back(s);
    if (labeled_pool.empty())
        throw DataError("adversarial batch: empty labeled pool");
    if (usable.empty())
        throw DataError("adversarial batch: no unlabeled sentences of length >= " +
                        std::to_string(min_unlabeled_len));

    int half = batch_size / 2;
    auto pick = [&](const std::vector<const Sentence*>& pool) {
        std::vector<const Sentence*> chosen;
        std::vector<const Sentence*> bag = pool;
        rng.shuffle(bag);
        for (int k = 0; k < half; ++k) chosen.push_back(bag[k % bag.size()]);
        return chosen;
    };
    std::vector<const Sentence*> sents = pick(labeled_pool);
    for (const Sentence* s : pick(usable)) sents.push_back(s);

    Batch b = builder.build(sents, false, half);
    b.adversarial = true;
    for (int lbl : b.dialect_labels)
        if (lbl < 0) throw DataError("adversarial batch: sentence with unknown dialect");
    return b;
}

}  // namespace morphtag
