#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "morphtag/errors.hpp"
#include "morphtag/schema.hpp"
#include "morphtag/tagger.hpp"

namespace morphtag {

/// Feature-specific matching weights; features without an entry weigh 1.
struct MatchWeights {
    std::map<std::string, double> weights;

    double weight(const std::string& feature) const {
        auto it = weights.find(feature);
        return it == weights.end() ? 1.0 : it->second;
    }

    void set(const std::string& feature, double w) {
        if (w < 0) throw ConfigError("match weight for '" + feature + "' must be >= 0");
        weights[feature] = w;
    }

    /// Two-column TSV: feature <tab> weight.
    static MatchWeights load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open weight file: " + path);
        MatchWeights w;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": expected 'feature<TAB>weight'");
            try {
                w.set(line.substr(0, tab), std::stod(line.substr(tab + 1)));
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(lineno) + ": bad weight value");
            }
        }
        return w;
    }
};

/// Weighted count of feature agreements between one analysis and the
/// predicted tags.
inline double match_score(const Analysis& analysis,
                          const std::vector<std::string>& predicted,
                          const std::vector<std::string>& features,
                          const MatchWeights& weights = {}) {
    double score = 0;
    for (std::size_t f = 0; f < features.size(); ++f)
        if (f < analysis.tags.size() && f < predicted.size() &&
            analysis.tags[f] == predicted[f])
            score += weights.weight(features[f]);
    return score;
}

/// Pick the analysis with the highest weighted match. Ties break by the
/// summed predicted probability of the analysis tags (when distributions
/// are supplied), then by candidate order. An empty candidate list yields
/// a synthetic analysis carrying the predicted tags verbatim.
/// `extra_scores`, when given, adds a per-analysis bonus (the hook for
/// external lemma/diac scorers).
inline Analysis rank_analyses(const std::vector<Analysis>& analyses,
                              const std::vector<std::string>& predicted,
                              const std::vector<std::string>& features,
                              const MatchWeights& weights = {},
                              const PredictedToken* distributions = nullptr,
                              const std::vector<double>* extra_scores = nullptr) {
    if (analyses.empty()) {
        Analysis synthetic;
        synthetic.tags = predicted;
        return synthetic;
    }
    if (extra_scores && extra_scores->size() != analyses.size())
        throw ConfigError("rank_analyses: extra score list length mismatch");

    int best = 0;
    double best_score = -1, best_tie = -1;
    for (int i = 0; i < static_cast<int>(analyses.size()); ++i) {
        double score = match_score(analyses[i], predicted, features, weights);
        if (extra_scores) score += (*extra_scores)[i];
        double tie = 0;
        if (distributions)
            for (std::size_t f = 0; f < features.size(); ++f)
                tie += distributions->prob(static_cast<int>(f), analyses[i].tags[f]);
        if (score > best_score || (score == best_score && tie > best_tie)) {
            best = i;
            best_score = score;
            best_tie = tie;
        }
    }
    return analyses[best];
}

}  // namespace morphtag
