#pragma once

#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "morphtag/errors.hpp"
#include "morphtag/normalize.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

/// Analyzer lexicon: normalized surface form -> all known analyses.
struct AnalyzerLexicon {
    std::unordered_map<std::string, std::vector<Analysis>> entries;
    std::string dialect;

    void add(const std::string& surface, Analysis a,
             const NormalizationTable& table = NormalizationTable::arabic_default()) {
        entries[normalize_token(surface, table)].push_back(std::move(a));
    }

    bool empty() const { return entries.empty(); }
};

/// All analyses of a surface form; empty for out-of-vocabulary words.
/// Lookup always goes through normalization, so raw and normalized forms
/// of the same word agree.
inline const std::vector<Analysis>& analyze(
    const AnalyzerLexicon& lexicon, const std::string& surface,
    const NormalizationTable& table = NormalizationTable::arabic_default()) {
    static const std::vector<Analysis> kEmpty;
    auto it = lexicon.entries.find(normalize_token(surface, table));
    return it == lexicon.entries.end() ? kEmpty : it->second;
}

inline const std::vector<Analysis>& analyze(
    const AnalyzerLexicon& lexicon, const Token& token,
    const NormalizationTable& table = NormalizationTable::arabic_default()) {
    return analyze(lexicon, token.norm, table);
}

/// JSON-lines lexicon file. First record: {"dialect": "<id>"}; each further
/// record: {"surface": ..., "analyses": [{"diac":..,"lex":..,"tags":{f:v}}]}.
inline void save_lexicon(const AnalyzerLexicon& lexicon,
                         const std::vector<std::string>& features,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open lexicon file for writing: " + path);
    out << nlohmann::json{{"dialect", lexicon.dialect}}.dump() << "\n";
    std::vector<std::string> surfaces;
    surfaces.reserve(lexicon.entries.size());
    for (const auto& [k, v] : lexicon.entries) surfaces.push_back(k);
    std::sort(surfaces.begin(), surfaces.end());
    for (const auto& s : surfaces) {
        nlohmann::json rec;
        rec["surface"] = s;
        auto& arr = rec["analyses"] = nlohmann::json::array();
        for (const Analysis& a : lexicon.entries.at(s)) {
            nlohmann::json ja;
            ja["diac"] = a.diac;
            ja["lex"] = a.lex;
            nlohmann::json tags;
            for (std::size_t f = 0; f < features.size(); ++f) tags[features[f]] = a.tags[f];
            ja["tags"] = std::move(tags);
            arr.push_back(std::move(ja));
        }
        out << rec.dump() << "\n";
    }
}

inline AnalyzerLexicon load_lexicon(
    const std::string& path, const std::vector<std::string>& features,
    const NormalizationTable& table = NormalizationTable::arabic_default()) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    AnalyzerLexicon lex;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        if (rec.contains("dialect") && !rec.contains("surface")) {
            lex.dialect = rec["dialect"].get<std::string>();
            continue;
        }
        if (!rec.contains("surface") || !rec.contains("analyses"))
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": record needs 'surface' and 'analyses'");
        std::string surface = rec["surface"].get<std::string>();
        for (const auto& ja : rec["analyses"]) {
            Analysis a;
            a.diac = ja.value("diac", "");
            a.lex = ja.value("lex", "");
            a.tags.resize(features.size(), "na");
            if (ja.contains("tags"))
                for (auto& [k, v] : ja["tags"].items()) {
                    bool known = false;
                    for (std::size_t f = 0; f < features.size(); ++f)
                        if (features[f] == k) {
                            a.tags[f] = v.get<std::string>();
                            known = true;
                            break;
                        }
                    if (!known)
                        throw DataError(path + ":" + std::to_string(lineno) +
                                        ": unknown feature '" + k + "'");
                }
            lex.add(surface, std::move(a), table);
        }
    }
    return lex;
}

}  // namespace morphtag
