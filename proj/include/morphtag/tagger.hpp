#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphtag/batching.hpp"
#include "morphtag/embeddings.hpp"
#include "morphtag/errors.hpp"
#include "morphtag/graph.hpp"
#include "morphtag/layers.hpp"
#include "morphtag/mapping.hpp"
#include "morphtag/vocab.hpp"

namespace morphtag {

enum class WordEmbMode { Separate, Merged, Mapped };

inline std::string to_string(WordEmbMode m) {
    switch (m) {
        case WordEmbMode::Separate: return "separate";
        case WordEmbMode::Merged: return "merged";
        case WordEmbMode::Mapped: return "mapped";
    }
    return "separate";
}

inline WordEmbMode word_emb_mode_from(const std::string& s) {
    if (s == "separate") return WordEmbMode::Separate;
    if (s == "merged") return WordEmbMode::Merged;
    if (s == "mapped") return WordEmbMode::Mapped;
    throw ConfigError("unknown word embedding mode '" + s + "'");
}

struct ModelConfig {
    int hidden_size = 800;
    int lstm_layers = 2;
    int join_dim = 0;  // 0 -> hidden_size
    double dropout_keep = 0.7;
    double learning_rate = 0.0005;
    int epochs = 70;
    int batch_size = 32;
    int word_emb_dim = 250;
    int char_emb_dim = 50;
    int char_hidden = 100;
    int char_layers = 2;
    int tag_emb_dim = 10;
    double lambda = 1.0;
    std::string lambda_schedule = "constant";  // "constant" | "ramp"
    int disc_hidden = 128;
    std::string disc_granularity = "sentence";  // "sentence" | "token"
    int min_unlabeled_len = 14;
    WordEmbMode word_mode = WordEmbMode::Separate;
    bool share_char = false;
    bool share_heads = false;
    bool adversarial = false;
    bool merge_targets = false;
    bool use_analyzer = true;
    bool train_word_emb = true;
    bool disc_loss_unlabeled_only = false;
    std::uint64_t seed = 1;

    int effective_join_dim() const { return join_dim > 0 ? join_dim : hidden_size; }

    void validate() const {
        if (hidden_size <= 0 || lstm_layers <= 0 || word_emb_dim <= 0 ||
            char_emb_dim <= 0 || char_hidden <= 0 || char_layers <= 0 ||
            tag_emb_dim <= 0 || batch_size <= 0 || epochs < 0 || disc_hidden <= 0)
            throw ConfigError("model sizes must be positive");
        if (!(dropout_keep > 0) || dropout_keep > 1)
            throw ConfigError("dropout keep probability must be in (0, 1]");
        if (lambda < 0) throw ConfigError("lambda must be non-negative");
        if (lambda_schedule != "constant" && lambda_schedule != "ramp")
            throw ConfigError("lambda_schedule must be 'constant' or 'ramp'");
        if (disc_granularity != "sentence" && disc_granularity != "token")
            throw ConfigError("disc_granularity must be 'sentence' or 'token'");
        if (share_heads && !merge_targets)
            throw ConfigError("shared output heads require merged target spaces "
                              "(merge_targets=true)");
    }
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{{"hidden_size", c.hidden_size},
                       {"lstm_layers", c.lstm_layers},
                       {"join_dim", c.join_dim},
                       {"dropout_keep", c.dropout_keep},
                       {"learning_rate", c.learning_rate},
                       {"epochs", c.epochs},
                       {"batch_size", c.batch_size},
                       {"word_emb_dim", c.word_emb_dim},
                       {"char_emb_dim", c.char_emb_dim},
                       {"char_hidden", c.char_hidden},
                       {"char_layers", c.char_layers},
                       {"tag_emb_dim", c.tag_emb_dim},
                       {"lambda", c.lambda},
                       {"lambda_schedule", c.lambda_schedule},
                       {"disc_hidden", c.disc_hidden},
                       {"disc_granularity", c.disc_granularity},
                       {"min_unlabeled_len", c.min_unlabeled_len},
                       {"word_mode", to_string(c.word_mode)},
                       {"share_char", c.share_char},
                       {"share_heads", c.share_heads},
                       {"adversarial", c.adversarial},
                       {"merge_targets", c.merge_targets},
                       {"use_analyzer", c.use_analyzer},
                       {"train_word_emb", c.train_word_emb},
                       {"disc_loss_unlabeled_only", c.disc_loss_unlabeled_only},
                       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
    ModelConfig d;
    c.hidden_size = j.value("hidden_size", d.hidden_size);
    c.lstm_layers = j.value("lstm_layers", d.lstm_layers);
    c.join_dim = j.value("join_dim", d.join_dim);
    c.dropout_keep = j.value("dropout_keep", d.dropout_keep);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.epochs = j.value("epochs", d.epochs);
    c.batch_size = j.value("batch_size", d.batch_size);
    c.word_emb_dim = j.value("word_emb_dim", d.word_emb_dim);
    c.char_emb_dim = j.value("char_emb_dim", d.char_emb_dim);
    c.char_hidden = j.value("char_hidden", d.char_hidden);
    c.char_layers = j.value("char_layers", d.char_layers);
    c.tag_emb_dim = j.value("tag_emb_dim", d.tag_emb_dim);
    c.lambda = j.value("lambda", d.lambda);
    c.lambda_schedule = j.value("lambda_schedule", d.lambda_schedule);
    c.disc_hidden = j.value("disc_hidden", d.disc_hidden);
    c.disc_granularity = j.value("disc_granularity", d.disc_granularity);
    c.min_unlabeled_len = j.value("min_unlabeled_len", d.min_unlabeled_len);
    c.word_mode = word_emb_mode_from(j.value("word_mode", std::string("separate")));
    c.share_char = j.value("share_char", d.share_char);
    c.share_heads = j.value("share_heads", d.share_heads);
    c.adversarial = j.value("adversarial", d.adversarial);
    c.merge_targets = j.value("merge_targets", d.merge_targets);
    c.use_analyzer = j.value("use_analyzer", d.use_analyzer);
    c.train_word_emb = j.value("train_word_emb", d.train_word_emb);
    c.disc_loss_unlabeled_only = j.value("disc_loss_unlabeled_only", d.disc_loss_unlabeled_only);
    c.seed = j.value("seed", d.seed);
}

/// Feature-specific candidate-tag embedding over the merged tag space.
struct TagEmbedding {
    Parameter table;  // [n_tags, dim]

    TagEmbedding() = default;
    TagEmbedding(const std::string& name, int n_tags, int dim, Rng& rng)
        : table(name, Tensor::uniform({n_tags, dim}, -0.1, 0.1, rng)) {}

    NodeId lookup(Graph& g, int id) { return g.gather_row(g.param(table), id); }
    void collect(std::vector<Parameter*>& out) { out.push_back(&table); }
};

/// Character encoder: embedding plus a left-to-right LSTM stack; the word
/// representation is the final hidden state of the top layer.
struct CharEncoder {
    EmbeddingTable emb;
    std::vector<LstmParams> layers;

    CharEncoder() = default;

    CharEncoder(const std::string& prefix, int vocab, int emb_dim, int hidden,
                int depth, Rng& rng)
        : emb(prefix + ".emb", vocab, emb_dim, rng) {
        for (int l = 0; l < depth; ++l)
            layers.emplace_back(prefix + ".l" + std::to_string(l),
                                l == 0 ? emb_dim : hidden, hidden, rng);
    }

    int hidden() const { return layers.back().hidden_dim; }

    NodeId encode(Graph& g, const std::vector<int>& char_ids) {
        if (char_ids.empty()) throw DataError("cannot encode an empty token");
        std::vector<NodeId> level;
        for (int id : char_ids) level.push_back(emb.lookup(g, id));
        NodeId last = -1;
        for (auto& layer : layers) {
            LstmState state = lstm_zero_state(g, layer.hidden_dim);
            std::vector<NodeId> next;
            for (NodeId x : level) {
                state = lstm_cell_step(g, layer, x, state);
                next.push_back(state.h);
            }
            level = std::move(next);
            last = state.h;
        }
        return last;
    }

    void collect(std::vector<Parameter*>& out) {
        emb.collect(out);
        for (auto& l : layers) l.collect(out);
    }
};

/// Sentence-level dialect discriminator behind a gradient reversal layer.
struct Discriminator {
    Parameter hid_w, hid_b;
    SoftmaxHead out;

    Discriminator() = default;

    Discriminator(const std::string& prefix, int in_dim, int hidden, int n_dialects,
                  Rng& rng)
        : hid_w(prefix + ".hid_w", xavier_uniform({hidden, in_dim}, rng)),
          hid_b(prefix + ".hid_b", Tensor::zeros({hidden})),
          out(prefix + ".out", hidden, n_dialects, rng) {}

    NodeId probs(Graph& g, NodeId x) {
        NodeId h = g.tanh_(g.add(g.matmul(g.param(hid_w), x), g.param(hid_b)));
        return out.probs(g, h);
    }

    void collect(std::vector<Parameter*>& ps) {
        ps.push_back(&hid_w);
        ps.push_back(&hid_b);
        out.collect(ps);
    }
};

inline const std::string kSharedKey = "<shared>";
inline const std::string kMergedKey = "<merged>";

/// Pretrained word vectors handed to model construction.
struct PretrainedWordVectors {
    std::map<std::string, const EmbeddingSpace*> per_dialect;
    const EmbeddingSpace* merged = nullptr;
    const Tensor* map = nullptr;        // applied to map_source vectors
    std::string map_source;             // dialect whose space gets premultiplied
};

struct TaggerModel {
    ModelConfig cfg;
    DataVocabularies vocabs;
    std::vector<std::string> dialects;

    std::map<std::string, EmbeddingTable> word_tables;
    std::map<std::string, CharEncoder> char_encoders;
    std::vector<TagEmbedding> tag_tables;
    BiLstmStack encoder;
    std::map<std::string, std::vector<SoftmaxHead>> heads;
    std::optional<Discriminator> discriminator;

    int feature_count() const { return vocabs.schema.feature_count(); }

    int encoder_input_dim() const {
        return cfg.word_emb_dim + cfg.char_hidden +
               feature_count() * cfg.tag_emb_dim;
    }

    std::string word_key(const std::string& dialect) const {
        return cfg.word_mode == WordEmbMode::Merged ? kMergedKey : dialect;
    }
    std::string char_key(const std::string& dialect) const {
        return cfg.share_char ? kSharedKey : dialect;
    }
    std::string head_key(const std::string& dialect) const {
        return cfg.share_heads ? kSharedKey : dialect;
    }

    const TagVocab& target_vocab(const std::string& dialect, int f) const {
        return cfg.share_heads ? vocabs.schema.merged_tags[f]
                               : vocabs.schema.tags_for(dialect)[f];
    }

    EmbeddingTable& word_table(const std::string& dialect) {
        auto it = word_tables.find(word_key(dialect));
        if (it == word_tables.end())
            throw ConfigError("no word table for dialect '" + dialect + "'");
        return it->second;
    }

    CharEncoder& char_encoder(const std::string& dialect) {
        auto it = char_encoders.find(char_key(dialect));
        if (it == char_encoders.end())
            throw ConfigError("no char encoder for dialect '" + dialect + "'");
        return it->second;
    }

    std::vector<SoftmaxHead>& heads_for(const std::string& dialect) {
        auto it = heads.find(head_key(dialect));
        if (it == heads.end()) throw ConfigError("unknown dialect id '" + dialect + "'");
        return it->second;
    }

    /// Stable parameter order; checkpoints and optimizers rely on it.
    std::vector<Parameter*> all_params() {
        std::vector<Parameter*> ps;
        for (auto& [k, t] : word_tables) t.collect(ps);
        for (auto& [k, c] : char_encoders) c.collect(ps);
        for (auto& t : tag_tables) t.collect(ps);
        encoder.collect(ps);
        for (auto& [k, hs] : heads)
            for (auto& h : hs) h.collect(ps);
        if (discriminator) discriminator->collect(ps);
        return ps;
    }

    std::vector<Parameter*> discriminator_params() {
        std::vector<Parameter*> ps;
        if (discriminator) discriminator->collect(ps);
        return ps;
    }

    BatchBuilder batch_builder(
        const std::map<std::string, const AnalyzerLexicon*>& lexicons = {}) const {
        BatchBuilder b;
        b.vocabs = &vocabs;
        b.lexicons = lexicons;
        b.use_merged_words = cfg.word_mode == WordEmbMode::Merged;
        b.share_char = cfg.share_char;
        b.use_merged_targets = cfg.share_heads;
        b.use_analyzer = cfg.use_analyzer;
        b.dialect_order = dialects;
        return b;
    }
};

/// Build a model skeleton from vocabularies. Component init streams are
/// forked by name, so e.g. switching head sharing leaves encoder and
/// embedding initial values untouched.
inline TaggerModel build_model(const ModelConfig& cfg, DataVocabularies vocabs,
                               const PretrainedWordVectors& pretrained = {}) {
    cfg.validate();
    if (cfg.share_heads && !vocabs.schema.targets_merged)
        throw ConfigError("shared output heads require merge_target_spaces");

    TaggerModel m;
    m.cfg = cfg;
    m.vocabs = std::move(vocabs);
    m.dialects = m.vocabs.schema.dialects();
    Rng root(cfg.seed);

    auto init_from_space = [&](EmbeddingTable& table, const WordVocab& vocab,
                               const EmbeddingSpace* space, bool mapped) {
        if (!space) return;
        if (space->dim != cfg.word_emb_dim)
            throw ConfigError("pretrained vectors have dim " + std::to_string(space->dim) +
                              ", model expects " + std::to_string(cfg.word_emb_dim));
        std::vector<Real> mean = space->mean_vector();
        if (mapped && pretrained.map) {
            std::vector<Real> mm = apply_map(*pretrained.map, mean.data());
            mean = mm;
        }
        for (int i = WordVocab::kUnk; i < vocab.size(); ++i) {
            const Real* v = i == WordVocab::kUnk ? nullptr : space->vec(vocab.items[i]);
            std::vector<Real> row;
            if (v) {
                row.assign(v, v + space->dim);
                if (mapped && pretrained.map) row = apply_map(*pretrained.map, row.data());
            } else {
                row = mean;  // UNK and words missing from the vector file
            }
            table.set_row(i, row);
        }
    };

    // word embeddings
    if (cfg.word_mode == WordEmbMode::Merged) {
        Rng r = root.fork("word." + kMergedKey);
        EmbeddingTable t("word." + kMergedKey, m.vocabs.merged_words.size(),
                         cfg.word_emb_dim, r);
        init_from_space(t, m.vocabs.merged_words, pretrained.merged, false);
        m.word_tables.emplace(kMergedKey, std::move(t));
    } else {
        for (const auto& d : m.dialects) {
            Rng r = root.fork("word." + d);
            EmbeddingTable t("word." + d, m.vocabs.words.at(d).size(), cfg.word_emb_dim, r);
            auto it = pretrained.per_dialect.find(d);
            bool mapped = cfg.word_mode == WordEmbMode::Mapped &&
                          pretrained.map_source == d && pretrained.map;
            init_from_space(t, m.vocabs.words.at(d),
                            it == pretrained.per_dialect.end() ? nullptr : it->second,
                            mapped);
            m.word_tables.emplace(d, std::move(t));
        }
    }

    // character encoders
    if (cfg.share_char) {
        Rng r = root.fork("chars." + kSharedKey);
        m.char_encoders.emplace(
            kSharedKey, CharEncoder("chars." + kSharedKey, m.vocabs.merged_chars.size(),
                                    cfg.char_emb_dim, cfg.char_hidden, cfg.char_layers, r));
    } else {
        for (const auto& d : m.dialects) {
            Rng r = root.fork("chars." + d);
            m.char_encoders.emplace(
                d, CharEncoder("chars." + d, m.vocabs.chars.at(d).size(), cfg.char_emb_dim,
                               cfg.char_hidden, cfg.char_layers, r));
        }
    }

    // candidate-tag embeddings (merged space per feature)
    for (int f = 0; f < m.feature_count(); ++f) {
        Rng r = root.fork("tags." + m.vocabs.schema.features[f]);
        m.tag_tables.emplace_back("tags." + m.vocabs.schema.features[f],
                                  std::max(1, m.vocabs.schema.merged_tags[f].size()),
                                  cfg.tag_emb_dim, r);
    }

    {
        Rng r = root.fork("encoder");
        m.encoder = BiLstmStack("encoder", m.encoder_input_dim(), cfg.hidden_size,
                                cfg.lstm_layers, cfg.effective_join_dim(),
                                static_cast<Real>(cfg.dropout_keep), r);
    }

    // output heads
    if (cfg.share_heads) {
        Rng r = root.fork("heads." + kSharedKey);
        std::vector<SoftmaxHead> hs;
        for (int f = 0; f < m.feature_count(); ++f)
            hs.emplace_back("head." + kSharedKey + "." + m.vocabs.schema.features[f],
                            cfg.effective_join_dim(),
                            std::max(1, m.vocabs.schema.merged_tags[f].size()), r);
        m.heads.emplace(kSharedKey, std::move(hs));
    } else {
        for (const auto& d : m.dialects) {
            Rng r = root.fork("heads." + d);
            std::vector<SoftmaxHead> hs;
            for (int f = 0; f < m.feature_count(); ++f)
                hs.emplace_back("head." + d + "." + m.vocabs.schema.features[f],
                                cfg.effective_join_dim(),
                                std::max(1, m.vocabs.schema.tags_for(d)[f].size()), r);
            m.heads.emplace(d, std::move(hs));
        }
    }

    if (cfg.adversarial) {
        Rng r = root.fork("discriminator");
        m.discriminator = Discriminator("disc", cfg.effective_join_dim(), cfg.disc_hidden,
                                        static_cast<int>(m.dialects.size()), r);
    }
    return m;
}

// ---- forward pieces ----

/// s_j: run the dialect's char LSTM over the token's characters.
inline NodeId encode_chars(Graph& g, TaggerModel& m, const std::string& dialect,
                           const std::vector<int>& char_ids) {
    return m.char_encoder(dialect).encode(g, char_ids);
}

/// a_j^f: sum of the embeddings of the distinct candidate values of feature
/// f; zero vector when the analyzer offers nothing. Candidates are summed
/// in canonical (sorted) order, so the result is exactly invariant to the
/// order the analyzer lists them in.
inline NodeId embed_candidate_tags(Graph& g, TaggerModel& m, int f,
                                   const std::vector<int>& candidate_ids) {
    if (candidate_ids.empty()) return g.zeros({m.cfg.tag_emb_dim});
    std::vector<int> ids = candidate_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<NodeId> vecs;
    for (int id : ids) vecs.push_back(m.tag_tables[f].lookup(g, id));
    return vecs.size() == 1 ? vecs[0] : g.add_n(vecs);
}

/// v_j = [w_j ; s_j ; a_j], with a_j the feature-ordered concatenation of
/// the candidate-tag sums.
inline NodeId assemble_input(Graph& g, TaggerModel& m, const std::string& dialect,
                             int word_id, const std::vector<int>& char_ids,
                             const std::vector<std::vector<int>>& cand_ids_per_feature) {
    std::vector<NodeId> parts;
    NodeId w = m.word_table(dialect).lookup(g, word_id);
    if (!m.cfg.train_word_emb) w = g.leaf(g.value(w));  // frozen copy
    parts.push_back(w);
    parts.push_back(encode_chars(g, m, dialect, char_ids));
    for (int f = 0; f < m.feature_count(); ++f)
        parts.push_back(embed_candidate_tags(
            g, m, f, f < static_cast<int>(cand_ids_per_feature.size())
                         ? cand_ids_per_feature[f]
                         : std::vector<int>{}));
    return g.concat(parts);
}

struct SentenceForward {
    std::vector<NodeId> context;             // per real position
    std::vector<std::vector<NodeId>> probs;  // [feature][position]
};

/// Encode one batch row and apply the dialect's (or shared) heads.
inline SentenceForward forward_sentence(Graph& g, TaggerModel& m, const Batch& batch,
                                        int row, Rng* dropout_rng) {
    const std::string& dialect = batch.sentence_dialects[row];
    int len = batch.real_len(row);
    std::vector<NodeId> inputs;
    for (int t = 0; t < len; ++t) {
        std::vector<std::vector<int>> cands(m.feature_count());
        for (int f = 0; f < m.feature_count(); ++f) cands[f] = batch.cand_tag_ids[f][row][t];
        inputs.push_back(assemble_input(g, m, dialect, batch.word_ids[row][t],
                                        batch.char_ids[row][t], cands));
    }
    SentenceForward out;
    out.context = bilstm_encode(g, m.encoder, inputs, len, dropout_rng);
    auto& hs = m.heads_for(dialect);
    out.probs.resize(m.feature_count());
    for (int f = 0; f < m.feature_count(); ++f)
        for (int t = 0; t < len; ++t)
            out.probs[f].push_back(hs[f].probs(g, out.context[t]));
    return out;
}

/// Mean over features of the token-averaged cross-entropy. Positions with
/// gold id -1 (padding, unlabeled rows) are excluded.
inline NodeId multitask_loss(Graph& g, TaggerModel& m,
                             const std::vector<SentenceForward>& fwd, const Batch& batch,
                             int row_limit = -1) {
    const int nf = m.feature_count();
    int rows = row_limit >= 0 ? row_limit : batch.size();
    std::vector<NodeId> feature_losses;
    for (int f = 0; f < nf; ++f) {
        std::vector<NodeId> ces;
        for (int i = 0; i < rows; ++i)
            for (int t = 0; t < batch.real_len(i); ++t) {
                int gold = batch.gold_ids[f][i][t];
                if (gold < 0) continue;
                ces.push_back(g.cross_entropy(fwd[i].probs[f][t], gold));
            }
        if (ces.empty())
            throw DataError("multitask_loss: no gold labels for feature '" +
                            m.vocabs.schema.features[f] + "'");
        feature_losses.push_back(g.scale(g.add_n(ces), Real(1) / ces.size()));
    }
    return g.scale(g.add_n(feature_losses), Real(1) / nf);
}

/// Discriminator loss over mean-pooled encoder outputs, behind a GRL with
/// the given effective lambda. Returns the scalar loss node and appends
/// (prediction, label) pairs for accuracy bookkeeping.
inline NodeId dialect_loss(Graph& g, TaggerModel& m,
                           const std::vector<SentenceForward>& fwd, const Batch& batch,
                           Real lambda_eff,
                           std::vector<std::pair<int, int>>* decisions = nullptr,
                           bool* degenerate = nullptr) {
    if (!m.discriminator) throw ConfigError("adversarial mode is off");
    std::vector<NodeId> ces;
    int start = m.cfg.disc_loss_unlabeled_only ? batch.labeled_count : 0;
    if (degenerate) {
        // constant labels give the discriminator nothing to separate
        *degenerate = true;
        for (int i = start + 1; i < batch.size(); ++i)
            if (batch.dialect_labels[i] != batch.dialect_labels[start]) *degenerate = false;
    }
    bool token_level = m.cfg.disc_granularity == "token";
    for (int i = start; i < batch.size(); ++i) {
        int label = batch.dialect_labels[i];
        if (label < 0) throw DataError("dialect loss: sentence without dialect label");
        std::vector<NodeId> views;
        if (token_level) {
            views = fwd[i].context;
        } else {
            views.push_back(g.scale(g.add_n(fwd[i].context),
                                    Real(1) / static_cast<Real>(fwd[i].context.size())));
        }
        std::vector<NodeId> sent_ces;
        int votes = 0;
        for (NodeId view : views) {
            NodeId reversed = g.grl(view, lambda_eff);
            NodeId probs = m.discriminator->probs(g, reversed);
            sent_ces.push_back(g.cross_entropy(probs, label));
            if (decisions) {
                const Tensor& p = g.value(probs);
                int arg = 0;
                for (int k = 1; k < p.numel(); ++k)
                    if (p.v[k] > p.v[arg]) arg = k;
                votes += arg == label ? 1 : -1;
            }
        }
        // per-sentence average keeps long sentences from dominating
        ces.push_back(sent_ces.size() == 1
                          ? sent_ces[0]
                          : g.scale(g.add_n(sent_ces), Real(1) / sent_ces.size()));
        if (decisions) decisions->push_back({votes > 0 ? label : -1, label});
    }
    if (ces.empty()) throw DataError("dialect loss: empty batch");
    return g.scale(g.add_n(ces), Real(1) / ces.size());
}

// ---- prediction ----

struct PredictedToken {
    std::vector<std::string> tags;           // argmax per feature
    std::vector<std::vector<double>> probs;  // distribution per feature
    const std::vector<TagVocab>* vocab = nullptr;

    double prob(int f, const std::string& tag) const {
        if (!vocab) return 0.0;
        int id = (*vocab)[f].id(tag);
        return id < 0 ? 0.0 : probs[f][id];
    }
};

using SentencePrediction = std::vector<PredictedToken>;

/// Per-feature distributions for every token of one sentence (pure, no
/// dropout).
inline std::vector<std::vector<std::vector<double>>> forward_tag(
    TaggerModel& m, const Sentence& sentence, const std::string& dialect,
    const AnalyzerLexicon* lexicon = nullptr) {
    if (std::find(m.dialects.begin(), m.dialects.end(), dialect) == m.dialects.end())
        throw ConfigError("unknown dialect id '" + dialect + "'");
    std::map<std::string, const AnalyzerLexicon*> lex;
    if (lexicon) lex[dialect] = lexicon;
    BatchBuilder builder = m.batch_builder(lex);
    builder.want_gold = false;
    Sentence local = sentence;
    local.dialect = dialect;
    Batch batch = builder.build({&local}, true);
    Graph g;
    SentenceForward fwd = forward_sentence(g, m, batch, 0, nullptr);
    std::vector<std::vector<std::vector<double>>> out(m.feature_count());
    for (int f = 0; f < m.feature_count(); ++f)
        for (int t = 0; t < static_cast<int>(sentence.size()); ++t) {
            const Tensor& p = g.value(fwd.probs[f][t]);
            out[f].emplace_back(p.v.begin(), p.v.end());
        }
    return out;
}

/// Argmax tags (plus distributions) per token.
inline SentencePrediction predict(TaggerModel& m, const Sentence& sentence,
                                  const std::string& dialect,
                                  const AnalyzerLexicon* lexicon = nullptr) {
    auto dists = forward_tag(m, sentence, dialect, lexicon);
    const std::vector<TagVocab>& vocab =
        m.cfg.share_heads ? m.vocabs.schema.merged_tags
                          : m.vocabs.schema.tags_for(dialect);
    SentencePrediction out(sentence.size());
    for (int t = 0; t < static_cast<int>(sentence.size()); ++t) {
        PredictedToken& tok = out[t];
        tok.vocab = &vocab;
        tok.tags.resize(m.feature_count());
        tok.probs.resize(m.feature_count());
        for (int f = 0; f < m.feature_count(); ++f) {
            tok.probs[f] = dists[f][t];
            int arg = 0;
            for (int k = 1; k < static_cast<int>(dists[f][t].size()); ++k)
                if (dists[f][t][k] > dists[f][t][arg]) arg = k;
            tok.tags[f] = vocab[f].tags[arg];
        }
    }
    return out;
}

}  // namespace morphtag
