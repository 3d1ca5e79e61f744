#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphtag/errors.hpp"
#include "morphtag/schema.hpp"

namespace morphtag {

/// POS / FEATS / DIAC / LEX / FULL accuracies plus a per-feature breakdown.
struct MetricsReport {
    long long tokens = 0;
    double pos = 0, feats = 0, diac = 0, lex = 0, full = 0;
    std::vector<std::string> feature_names;
    std::vector<double> per_feature;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tokens"] = tokens;
        j["pos"] = pos;
        j["feats"] = feats;
        j["diac"] = diac;
        j["lex"] = lex;
        j["full"] = full;
        for (std::size_t f = 0; f < feature_names.size(); ++f)
            j["per_feature"][feature_names[f]] = per_feature[f];
        return j;
    }

    std::string table() const {
        std::ostringstream os;
        os << std::fixed << std::setprecision(2);
        os << "tokens: " << tokens << "\n";
        os << "  POS   " << 100 * pos << "\n";
        os << "  FEATS " << 100 * feats << "\n";
        os << "  DIAC  " << 100 * diac << "\n";
        os << "  LEX   " << 100 * lex << "\n";
        os << "  FULL  " << 100 * full << "\n";
        os << "per-feature:\n";
        for (std::size_t f = 0; f < feature_names.size(); ++f)
            os << "  " << std::left << std::setw(6) << feature_names[f] << std::right
               << std::setw(6) << 100 * per_feature[f] << "\n";
        return os.str();
    }
};

/// Token-aligned comparison of a predicted corpus against gold. DIAC and
/// LEX are exact string matches on the diacritized forms (no normalization);
/// FULL requires FEATS, DIAC and LEX simultaneously.
inline MetricsReport evaluate(const Corpus& predicted, const Corpus& gold,
                              const FeatureSchema& schema) {
    if (predicted.sentences.size() != gold.sentences.size())
        throw DataError("evaluate: sentence count mismatch (" +
                        std::to_string(predicted.sentences.size()) + " vs " +
                        std::to_string(gold.sentences.size()) + ")");
    const int nf = schema.feature_count();
    int pos_idx = schema.feature_index("pos");
    if (pos_idx < 0) pos_idx = 0;

    MetricsReport r;
    r.feature_names = schema.features;
    r.per_feature.assign(nf, 0);
    long long pos_ok = 0, feats_ok = 0, diac_ok = 0, lex_ok = 0, full_ok = 0;
    std::vector<long long> feat_ok(nf, 0);

    for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
        const Sentence& ps = predicted.sentences[s];
        const Sentence& gs = gold.sentences[s];
        if (ps.size() != gs.size())
            throw DataError("evaluate: sentence " + std::to_string(s + 1) +
                            " length mismatch");
        for (std::size_t t = 0; t < gs.size(); ++t) {
            if (!gs.tokens[t].gold) continue;
            if (!ps.tokens[t].gold)
                throw DataError("evaluate: prediction missing analysis at sentence " +
                                std::to_string(s + 1));
            const Analysis& pa = *ps.tokens[t].gold;
            const Analysis& ga = *gs.tokens[t].gold;
            if (static_cast<int>(pa.tags.size()) != nf ||
                static_cast<int>(ga.tags.size()) != nf)
                throw DataError("evaluate: analysis with wrong feature count");
            ++r.tokens;
            bool all_feats = true;
            for (int f = 0; f < nf; ++f) {
                bool ok = pa.tags[f] == ga.tags[f];
                feat_ok[f] += ok;
                all_feats &= ok;
            }
            bool pos_correct = pa.tags[pos_idx] == ga.tags[pos_idx];
            bool diac_correct = pa.diac == ga.diac;
            bool lex_correct = pa.lex == ga.lex;
            pos_ok += pos_correct;
            feats_ok += all_feats;
            diac_ok += diac_correct;
            lex_ok += lex_correct;
            full_ok += all_feats && diac_correct && lex_correct;
        }
    }

    if (r.tokens) {
        r.pos = double(pos_ok) / r.tokens;
        r.feats = double(feats_ok) / r.tokens;
        r.diac = double(diac_ok) / r.tokens;
        r.lex = double(lex_ok) / r.tokens;
        r.full = double(full_ok) / r.tokens;
        for (int f = 0; f < nf; ++f) r.per_feature[f] = double(feat_ok[f]) / r.tokens;
    }
    return r;
}

}  // namespace morphtag
