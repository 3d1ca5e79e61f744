#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

/// Everything batching and the model need to map strings to ids.
struct DataVocabularies {
    FeatureSchema schema;
    std::map<std::string, WordVocab> words;  // per dialect, normalized forms
    std::map<std::string, WordVocab> chars;  // per dialect, utf-8 characters
    WordVocab merged_words;
    WordVocab merged_chars;
};

/// Per-dialect tag inventories are the union of gold tags and lexicon tags;
/// merged inventories are the union across dialects. Word inventories come
/// from the (labeled) corpora; `char_only_corpora` (typically unlabeled
/// text) extend the character inventories but do not add word rows, since
/// tagging gives such words no supervision.
inline DataVocabularies build_vocabularies(
    const std::vector<const Corpus*>& corpora,
    const std::vector<const AnalyzerLexicon*>& lexicons,
    const std::vector<std::string>& features = default_features(),
    const std::vector<const Corpus*>& char_only_corpora = {}) {
    bool any_labeled = false;
    for (const Corpus* c : corpora) {
        if (c->sentences.empty())
            throw DataError("empty corpus for dialect '" + c->dialect + "'");
        any_labeled |= c->labeled;
    }
    if (!any_labeled) throw DataError("at least one labeled corpus is required");

    DataVocabularies out;
    out.schema.features = features;
    const int nf = static_cast<int>(features.size());

    std::map<std::string, std::vector<std::set<std::string>>> tag_sets;
    std::map<std::string, std::set<std::string>> word_sets, char_sets;
    std::set<std::string> all_words, all_chars;

    auto sets_for = [&](const std::string& dialect) -> std::vector<std::set<std::string>>& {
        auto it = tag_sets.find(dialect);
        if (it == tag_sets.end())
            it = tag_sets.emplace(dialect, std::vector<std::set<std::string>>(nf)).first;
        return it->second;
    };

    for (const Corpus* c : corpora) {
        auto& tags = sets_for(c->dialect);
        for (const Sentence& s : c->sentences)
            for (const Token& t : s.tokens) {
                word_sets[c->dialect].insert(t.norm);
                all_words.insert(t.norm);
                for (const auto& ch : utf8::chars(t.norm)) {
                    char_sets[c->dialect].insert(ch);
                    all_chars.insert(ch);
                }
                if (t.gold) {
                    if (static_cast<int>(t.gold->tags.size()) != nf)
                        throw DataError("gold analysis with wrong feature count");
                    for (int f = 0; f < nf; ++f) tags[f].insert(t.gold->tags[f]);
                }
            }
    }
    for (const Corpus* c : char_only_corpora) {
        for (const Sentence& s : c->sentences)
            for (const Token& t : s.tokens)
                for (const auto& ch : utf8::chars(t.norm)) {
                    char_sets[c->dialect].insert(ch);
                    all_chars.insert(ch);
                }
    }
    for (const AnalyzerLexicon* lex : lexicons) {
        auto& tags = sets_for(lex->dialect);
        for (const auto& [surface, analyses] : lex->entries)
            for (const Analysis& a : analyses)
                for (int f = 0; f < nf && f < static_cast<int>(a.tags.size()); ++f)
                    tags[f].insert(a.tags[f]);
    }

    for (auto& [dialect, sets] : tag_sets) {
        std::vector<TagVocab> vocabs;
        for (int f = 0; f < nf; ++f) vocabs.push_back(TagVocab::from_set(sets[f]));
        out.schema.dialect_tags.emplace(dialect, std::move(vocabs));
    }
    // candidate-tag space: union across dialects, available even before an
    // explicit target merge
    for (int f = 0; f < nf; ++f) {
        std::set<std::string> u;
        for (auto& [dialect, sets] : tag_sets) u.insert(sets[f].begin(), sets[f].end());
        out.schema.merged_tags.push_back(TagVocab::from_set(u));
    }

    for (auto& [dialect, s] : word_sets) out.words.emplace(dialect, WordVocab::from_set(s));
    for (auto& [dialect, s] : char_sets) out.chars.emplace(dialect, WordVocab::from_set(s));
    out.merged_words = WordVocab::from_set(all_words);
    out.merged_chars = WordVocab::from_set(all_chars);
    return out;
}

/// Merge per-dialect target spaces (set union, sorted order) and mark the
/// schema as merged so shared output layers become legal.
inline void merge_target_spaces(FeatureSchema& schema) {
    if (schema.dialect_tags.size() < 2)
        throw ConfigError("merge_target_spaces: need at least two dialects");
    schema.merged_tags.clear();
    for (int f = 0; f < schema.feature_count(); ++f) {
        std::set<std::string> u;
        for (const auto& [dialect, vocabs] : schema.dialect_tags)
            u.insert(vocabs[f].tags.begin(), vocabs[f].tags.end());
        schema.merged_tags.push_back(TagVocab::from_set(u));
    }
    schema.targets_merged = true;
}

}  // namespace morphtag
