#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/normalize.hpp"

namespace morphtag {

/// The 14 closed morphological features, in canonical column order.
inline const std::vector<std::string>& default_features() {
    static const std::vector<std::string> f = {
        "pos", "asp", "cas", "gen", "per", "num", "mod",
        "stt", "vox", "prc0", "prc1", "prc2", "prc3", "enc0"};
    return f;
}

/// A closed tag inventory with stable (sorted) ids.
struct TagVocab {
    std::vector<std::string> tags;
    std::unordered_map<std::string, int> index;

    static TagVocab from_set(const std::set<std::string>& s) {
        TagVocab v;
        v.tags.assign(s.begin(), s.end());
        for (int i = 0; i < static_cast<int>(v.tags.size()); ++i)
            v.index.emplace(v.tags[i], i);
        return v;
    }

    int size() const { return static_cast<int>(tags.size()); }

    int id(const std::string& tag) const {
        auto it = index.find(tag);
        return it == index.end() ? -1 : it->second;
    }

    bool contains(const std::string& tag) const { return index.count(tag) != 0; }
};

/// One candidate interpretation of a word: diacritized form, lemma, and a
/// value for every feature (in schema order; "na" is an ordinary value).
struct Analysis {
    std::string diac;
    std::string lex;
    std::vector<std::string> tags;

    bool operator==(const Analysis& o) const {
        return diac == o.diac && lex == o.lex && tags == o.tags;
    }
};

struct Token {
    std::string raw;
    std::string norm;
    std::optional<Analysis> gold;
};

struct Sentence {
    std::vector<Token> tokens;
    std::string dialect;

    std::size_t size() const { return tokens.size(); }
};

struct Corpus {
    std::vector<Sentence> sentences;
    std::string dialect;
    bool labeled = false;

    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& s : sentences) n += s.size();
        return n;
    }
};

/// The feature list plus per-dialect and merged tag inventories.
/// `targets_merged` records an explicit merge_target_spaces call, which is
/// what shared output layers require.
struct FeatureSchema {
    std::vector<std::string> features;
    std::map<std::string, std::vector<TagVocab>> dialect_tags;
    std::vector<TagVocab> merged_tags;
    bool targets_merged = false;

    int feature_count() const { return static_cast<int>(features.size()); }

    int feature_index(const std::string& name) const {
        for (int i = 0; i < feature_count(); ++i)
            if (features[i] == name) return i;
        return -1;
    }

    std::vector<std::string> dialects() const {
        std::vector<std::string> d;
        for (const auto& [k, v] : dialect_tags) d.push_back(k);
        return d;
    }

    const std::vector<TagVocab>& tags_for(const std::string& dialect) const {
        auto it = dialect_tags.find(dialect);
        if (it == dialect_tags.end())
            throw ConfigError("unknown dialect id '" + dialect + "'");
        return it->second;
    }
};

/// Surface-form (or character) inventory with PAD/UNK at fixed slots.
struct WordVocab {
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    std::vector<std::string> items;  // includes the two specials
    std::unordered_map<std::string, int> index;

    static WordVocab from_set(const std::set<std::string>& s) {
        WordVocab v;
        v.items = {"<pad>", "<unk>"};
        for (const auto& w : s) v.items.push_back(w);
        for (int i = 0; i < static_cast<int>(v.items.size()); ++i)
            v.index.emplace(v.items[i], i);
        return v;
    }

    int size() const { return static_cast<int>(items.size()); }

    int id(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? kUnk : it->second;
    }
};

}  // namespace morphtag
