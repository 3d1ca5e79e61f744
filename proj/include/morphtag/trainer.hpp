#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphtag/adam.hpp"
#include "morphtag/checkpoint.hpp"
#include "morphtag/tagger.hpp"

namespace morphtag {

struct TrainDataset {
    std::map<std::string, const Corpus*> labeled;  // per dialect
    const Corpus* unlabeled = nullptr;             // required in adversarial mode
    std::map<std::string, const Corpus*> dev;      // optional per dialect
    std::map<std::string, const AnalyzerLexicon*> lexicons;
};

struct EpochStats {
    int epoch = 0;
    std::map<std::string, double> tag_loss;  // mean per dialect
    double disc_loss = 0;
    double disc_acc = -1;                    // on training batches; -1 when unused
    std::map<std::string, double> dev_feats;
    std::map<std::string, double> dev_pos;
};

struct TrainOptions {
    std::string log_path;         // JSONL, one record per epoch
    std::string checkpoint_path;  // written after the last epoch
    bool checkpoint_each_epoch = false;
    std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
    std::vector<EpochStats> epochs;
};

namespace detail {

/// Largest-remainder round-robin: repeatedly issue from the dialect whose
/// issued/total ratio is lowest, so batches interleave proportionally.
inline std::vector<int> interleave_schedule(const std::vector<int>& counts) {
    std::vector<int> issued(counts.size(), 0);
    std::vector<int> schedule;
    int total = 0;
    for (int c : counts) total += c;
    for (int step = 0; step < total; ++step) {
        int best = -1;
        double best_ratio = 2.0;
        for (std::size_t d = 0; d < counts.size(); ++d) {
            if (issued[d] >= counts[d]) continue;
            double ratio = double(issued[d] + 1) / counts[d];
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best = static_cast<int>(d);
            }
        }
        schedule.push_back(best);
        ++issued[best];
    }
    return schedule;
}

inline double dev_accuracy(TaggerModel& model, const Corpus& corpus,
                           const AnalyzerLexicon* lexicon, bool pos_only) {
    long long correct = 0, total = 0;
    int pos_idx = model.vocabs.schema.feature_index("pos");
    if (pos_idx < 0) pos_idx = 0;
    for (const Sentence& s : corpus.sentences) {
        SentencePrediction pred = predict(model, s, corpus.dialect, lexicon);
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (!s.tokens[t].gold) continue;
            ++total;
            if (pos_only) {
                correct += pred[t].tags[pos_idx] == s.tokens[t].gold->tags[pos_idx];
            } else {
                correct += pred[t].tags == s.tokens[t].gold->tags;
            }
        }
    }
    return total ? double(correct) / total : 0.0;
}

}  // namespace detail

inline double effective_lambda(const ModelConfig& cfg, double progress) {
    if (cfg.lambda_schedule == "ramp")
        return cfg.lambda * (2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0);
    return cfg.lambda;
}

/// Dialect-alternating training. In adversarial mode every batch is half
/// labeled (driving the tagging loss) and half unlabeled (joining the
/// labeled half in the dialect loss through the GRL).
inline TrainResult train(TaggerModel& model, const TrainDataset& data,
                         const TrainOptions& opts = {}) {
    const ModelConfig& cfg = model.cfg;
    cfg.validate();
    if (data.labeled.empty()) throw ConfigError("train: no labeled corpora");
    for (const auto& [d, corpus] : data.labeled) {
        if (!corpus->labeled) throw ConfigError("train: corpus for '" + d + "' is unlabeled");
        if (std::find(model.dialects.begin(), model.dialects.end(), d) ==
            model.dialects.end())
            throw ConfigError("train: model has no dialect '" + d + "'");
    }
    if (cfg.adversarial && !data.unlabeled)
        throw ConfigError("train: adversarial mode needs an unlabeled corpus");
    if (cfg.adversarial && !model.discriminator)
        throw ConfigError("train: model was built without a discriminator");

    BatchBuilder builder = model.batch_builder(data.lexicons);
    AdamOptimizer optimizer({static_cast<Real>(cfg.learning_rate)});
    Rng root(cfg.seed);
    Rng rng_drop = root.fork("dropout");
    Rng rng_adv = root.fork("adversarial");
    std::map<std::string, Rng> rng_shuffle;
    std::vector<std::string> train_dialects;
    for (const auto& [d, corpus] : data.labeled) {
        rng_shuffle.emplace(d, root.fork("shuffle." + d));
        train_dialects.push_back(d);
    }

    std::vector<const Sentence*> unlabeled_pool;
    if (data.unlabeled)
        for (const Sentence& s : data.unlabeled->sentences) unlabeled_pool.push_back(&s);

    std::ofstream log;
    if (!opts.log_path.empty()) {
        log.open(opts.log_path);
        if (!log) throw DataError("cannot open training log: " + opts.log_path);
    }

    // rough step total for the ramp schedule
    long long total_steps = 0;
    for (const auto& [d, corpus] : data.labeled) {
        int chunk = cfg.adversarial ? std::max(1, cfg.batch_size / 2) : cfg.batch_size;
        total_steps += (static_cast<long long>(corpus->sentences.size()) + chunk - 1) / chunk;
    }
    total_steps *= std::max(1, cfg.epochs);
    long long step_counter = 0;

    TrainResult result;
    bool warned_degenerate = false;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::map<std::string, std::vector<Batch>> queues;
        std::vector<int> counts;
        for (const auto& d : train_dialects) {
            int chunk = cfg.adversarial ? std::max(2, cfg.batch_size / 2) : cfg.batch_size;
            queues[d] = make_batches(*data.labeled.at(d), chunk, rng_shuffle.at(d), builder);
            counts.push_back(static_cast<int>(queues[d].size()));
        }
        std::vector<int> schedule = detail::interleave_schedule(counts);

        EpochStats stats;
        stats.epoch = epoch + 1;
        std::map<std::string, double> loss_sum;
        std::map<std::string, int> loss_n;
        double disc_sum = 0;
        int disc_n = 0;
        long long disc_correct = 0, disc_total = 0;
        std::vector<int> next_index(train_dialects.size(), 0);

        for (int d_idx : schedule) {
            const std::string& dialect = train_dialects[d_idx];
            Batch& labeled_batch = queues[dialect][next_index[d_idx]++];
            ++step_counter;

            // adversarial pairing crosses dialects: labeled sentences of one
            // variant against unlabeled sentences of the other; a chunk that
            // shares the unlabeled corpus's dialect trains as plain tagging
            bool adversarial_step =
                cfg.adversarial && data.unlabeled->dialect != dialect;

            Graph g;
            if (!adversarial_step) {
                std::vector<SentenceForward> fwd;
                for (int i = 0; i < labeled_batch.size(); ++i)
                    fwd.push_back(forward_sentence(g, model, labeled_batch, i, &rng_drop));
                NodeId loss = multitask_loss(g, model, fwd, labeled_batch);
                for (Parameter* p : g.bound_params()) p->zero_grad();
                g.backward(loss);
                optimizer.step(g.bound_params());
                loss_sum[dialect] += g.value(loss).v[0];
                ++loss_n[dialect];
            } else {
                Batch adv = make_adversarial_batch(
                    labeled_batch.sentences, unlabeled_pool,
                    2 * labeled_batch.size(), cfg.min_unlabeled_len, rng_adv, builder);
                std::vector<SentenceForward> fwd;
                for (int i = 0; i < adv.size(); ++i)
                    fwd.push_back(forward_sentence(g, model, adv, i, &rng_drop));
                NodeId tag = multitask_loss(g, model, fwd, adv, adv.labeled_count);
                double progress = double(step_counter) / double(total_steps);
                std::vector<std::pair<int, int>> decisions;
                bool degenerate = false;
                NodeId dial = dialect_loss(
                    g, model, fwd, adv,
                    static_cast<Real>(effective_lambda(cfg, progress)), &decisions,
                    &degenerate);
                if (degenerate && !warned_degenerate) {
                    std::cerr << "warning: adversarial batch with a single dialect label; "
                                 "the discriminator gets no training signal\n";
                    warned_degenerate = true;
                }
                NodeId loss = g.add(tag, dial);
                for (Parameter* p : g.bound_params()) p->zero_grad();
                g.backward(loss);
                optimizer.step(g.bound_params());
                loss_sum[dialect] += g.value(tag).v[0];
                ++loss_n[dialect];
                disc_sum += g.value(dial).v[0];
                ++disc_n;
                for (auto [pred, label] : decisions) {
                    disc_correct += pred == label;
                    ++disc_total;
                }
            }
        }

        for (const auto& d : train_dialects)
            if (loss_n[d]) stats.tag_loss[d] = loss_sum[d] / loss_n[d];
        if (disc_n) stats.disc_loss = disc_sum / disc_n;
        if (disc_total) stats.disc_acc = double(disc_correct) / disc_total;

        for (const auto& [d, corpus] : data.dev) {
            const AnalyzerLexicon* lex = nullptr;
            auto it = data.lexicons.find(d);
            if (it != data.lexicons.end()) lex = it->second;
            stats.dev_feats[d] = detail::dev_accuracy(model, *corpus, lex, false);
            stats.dev_pos[d] = detail::dev_accuracy(model, *corpus, lex, true);
        }

        if (log) {
            nlohmann::json rec;
            rec["epoch"] = stats.epoch;
            rec["tag_loss"] = stats.tag_loss;
            if (disc_n) {
                rec["disc_loss"] = stats.disc_loss;
                rec["disc_acc"] = stats.disc_acc;
            }
            if (!stats.dev_feats.empty()) {
                rec["dev_feats"] = stats.dev_feats;
                rec["dev_pos"] = stats.dev_pos;
            }
            log << rec.dump() << "\n";
            log.flush();
        }
        if (opts.checkpoint_each_epoch && !opts.checkpoint_path.empty())
            save_checkpoint(model, opts.checkpoint_path);
        if (opts.on_epoch) opts.on_epoch(stats);
        result.epochs.push_back(std::move(stats));
    }

    if (!opts.checkpoint_path.empty()) save_checkpoint(model, opts.checkpoint_path);
    return result;
}

/// Accuracy of a discriminator head on held-out sentences (argmax over the
/// dialect distribution from frozen features).
inline double discriminator_accuracy(TaggerModel& model, Discriminator& disc,
                                     const std::vector<const Sentence*>& sentences) {
    BatchBuilder builder = model.batch_builder();
    builder.want_gold = false;
    bool token_level = model.cfg.disc_granularity == "token";
    long long correct = 0;
    for (const Sentence* s : sentences) {
        Batch b = builder.build({s}, false, 0);
        if (b.dialect_labels[0] < 0)
            throw DataError("discriminator_accuracy: unknown dialect '" + s->dialect + "'");
        Graph g;
        SentenceForward fwd = forward_sentence(g, model, b, 0, nullptr);
        std::vector<NodeId> views;
        if (token_level) {
            views = fwd.context;
        } else {
            views.push_back(g.scale(g.add_n(fwd.context),
                                    Real(1) / static_cast<Real>(fwd.context.size())));
        }
        std::vector<double> mean_probs;
        for (NodeId view : views) {
            const Tensor& p = g.value(disc.probs(g, view));
            mean_probs.resize(p.numel(), 0.0);
            for (int k = 0; k < p.numel(); ++k) mean_probs[k] += p.v[k] / views.size();
        }
        int arg = 0;
        for (std::size_t k = 1; k < mean_probs.size(); ++k)
            if (mean_probs[k] > mean_probs[arg]) arg = static_cast<int>(k);
        correct += arg == b.dialect_labels[0];
    }
    return sentences.empty() ? 0.0 : double(correct) / sentences.size();
}

inline double discriminator_accuracy(TaggerModel& model,
                                     const std::vector<const Sentence*>& sentences) {
    if (!model.discriminator)
        throw ConfigError("model has no discriminator");
    return discriminator_accuracy(model, *model.discriminator, sentences);
}

/// Train a fresh discriminator on frozen encoder features (the GRL sits at
/// lambda 0, so nothing upstream moves). Used to probe how dialect-separable
/// the learned representation is.
inline Discriminator train_frozen_probe(TaggerModel& model,
                                        const std::vector<const Sentence*>& sentences,
                                        int epochs, int batch_size, std::uint64_t seed) {
    Rng rng(seed);
    Rng init = rng.fork("probe_init");
    Discriminator disc("probe", model.cfg.effective_join_dim(), model.cfg.disc_hidden,
                       static_cast<int>(model.dialects.size()), init);
    std::vector<Parameter*> disc_params{&disc.hid_w, &disc.hid_b};
    disc.out.collect(disc_params);

    BatchBuilder builder = model.batch_builder();
    builder.want_gold = false;
    AdamOptimizer optimizer({static_cast<Real>(model.cfg.learning_rate)});

    std::vector<const Sentence*> order = sentences;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t at = 0; at < order.size(); at += batch_size) {
            std::vector<const Sentence*> chunk(
                order.begin() + at,
                order.begin() + std::min(order.size(), at + batch_size));
            Batch b = builder.build(chunk, false, 0);
            Graph g;
            std::vector<NodeId> ces;
            for (int i = 0; i < b.size(); ++i) {
                if (b.dialect_labels[i] < 0)
                    throw DataError("probe: sentence with unknown dialect");
                SentenceForward fwd = forward_sentence(g, model, b, i, nullptr);
                NodeId pooled = g.scale(g.add_n(fwd.context),
                                        Real(1) / static_cast<Real>(fwd.context.size()));
                NodeId probs = disc.probs(g, g.grl(pooled, 0.0));
                ces.push_back(g.cross_entropy(probs, b.dialect_labels[i]));
            }
            NodeId loss = g.scale(g.add_n(ces), Real(1) / ces.size());
            for (Parameter* p : g.bound_params()) p->zero_grad();
            g.backward(loss);
            optimizer.step(disc_params);
        }
    }
    return disc;
}

}  // namespace morphtag
