#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/normalize.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

/// TSV corpus layout. Columns: surface, diac, lex, then one column per
/// feature in `features` order. A line with only the surface column is an
/// unlabeled token. Blank line = sentence boundary. Header lines:
/// "#dialect:<id>" (required first) and "#features:f1,f2,..." (optional).
struct CorpusFormat {
    std::vector<std::string> features = default_features();
    NormalizationTable normalization = NormalizationTable::arabic_default();
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline Corpus parse_corpus(const std::string& path, const CorpusFormat& fmt = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);

    Corpus corpus;
    // column index (into the file's feature columns) for each schema feature
    std::vector<int> col_of(fmt.features.size());
    for (std::size_t i = 0; i < col_of.size(); ++i) col_of[i] = static_cast<int>(i);

    Sentence sent;
    std::string line;
    int lineno = 0;
    bool any_labeled = false, any_unlabeled = false;

    auto flush = [&]() {
        if (!sent.tokens.empty()) {
            sent.dialect = corpus.dialect;
            corpus.sentences.push_back(std::move(sent));
            sent = Sentence{};
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#dialect:", 0) == 0) {
            corpus.dialect = line.substr(9);
            continue;
        }
        if (line.rfind("#features:", 0) == 0) {
            auto names = detail::split(line.substr(10), ',');
            if (names.size() != fmt.features.size())
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": feature header has " + std::to_string(names.size()) +
                                " columns, expected " + std::to_string(fmt.features.size()));
            for (std::size_t i = 0; i < fmt.features.size(); ++i) {
                int found = -1;
                for (std::size_t j = 0; j < names.size(); ++j)
                    if (names[j] == fmt.features[i]) found = static_cast<int>(j);
                if (found < 0)
                    throw DataError(path + ":" + std::to_string(lineno) +
                                    ": missing feature column '" + fmt.features[i] + "'");
                col_of[i] = found;
            }
            for (const auto& n : names) {
                bool known = false;
                for (const auto& f : fmt.features) known |= (f == n);
                if (!known)
                    throw DataError(path + ":" + std::to_string(lineno) +
                                    ": unknown feature column '" + n + "'");
            }
            continue;
        }
        if (line.empty()) {
            flush();
            continue;
        }
        auto cols = detail::split(line, '\t');
        Token tok;
        tok.raw = cols[0];
        tok.norm = normalize_token(cols[0], fmt.normalization);
        if (cols.size() == 1) {
            any_unlabeled = true;
        } else if (cols.size() == 3 + fmt.features.size()) {
            Analysis a;
            a.diac = cols[1];
            a.lex = cols[2];
            a.tags.resize(fmt.features.size());
            for (std::size_t i = 0; i < fmt.features.size(); ++i)
                a.tags[i] = cols[3 + col_of[i]];
            tok.gold = std::move(a);
            any_labeled = true;
        } else {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 1 or " +
                            std::to_string(3 + fmt.features.size()) + " columns, got " +
                            std::to_string(cols.size()));
        }
        sent.tokens.push_back(std::move(tok));
    }
    flush();
    if (corpus.dialect.empty())
        throw DataError(path + ": missing '#dialect:<id>' header");
    corpus.labeled = any_labeled && !any_unlabeled;
    return corpus;
}

inline void write_corpus(const Corpus& corpus, const std::string& path,
                         const CorpusFormat& fmt = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open corpus file for writing: " + path);
    out << "#dialect:" << corpus.dialect << "\n";
    out << "#features:";
    for (std::size_t i = 0; i < fmt.features.size(); ++i)
        out << (i ? "," : "") << fmt.features[i];
    out << "\n";
    for (const Sentence& s : corpus.sentences) {
        for (const Token& t : s.tokens) {
            out << t.raw;
            if (t.gold) {
                out << '\t' << t.gold->diac << '\t' << t.gold->lex;
                for (const auto& tag : t.gold->tags) out << '\t' << tag;
            }
            out << "\n";
        }
        out << "\n";
    }
}

}  // namespace morphtag
