#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "morphtag/checkpoint.hpp"
#include "morphtag/corpus_io.hpp"
#include "morphtag/disambiguator.hpp"
#include "morphtag/embeddings.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/mapping.hpp"
#include "morphtag/metrics.hpp"
#include "morphtag/synthetic.hpp"
#include "morphtag/tagger.hpp"
#include "morphtag/trainer.hpp"

namespace morphtag::cli {

/// Everything a run needs: file paths plus model settings. Populated from
/// a key=value config file and/or command-line overrides (overrides win).
struct ExperimentConfig {
    std::map<std::string, std::string> train_paths;    // dialect -> corpus
    std::map<std::string, std::string> dev_paths;      // dialect -> corpus
    std::map<std::string, std::string> lexicon_paths;  // dialect -> jsonl
    std::map<std::string, std::string> vector_paths;   // dialect|"merged" -> vectors
    std::string unlabeled_path;
    std::string map_path;
    std::string map_source;
    std::string out_dir = "run";
    std::string curve_low;  // low-resource dialect for cmd_curve
    std::vector<std::string> features = default_features();
    std::vector<double> fractions = {100, 50, 25, 12, 6, 1.5};
    int jobs = 1;
    ModelConfig model;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean for '" + key + "': " + v);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

}  // namespace detail

/// Apply one "key = value" setting.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value) {
    using detail::parse_bool;
    auto starts = [&](const char* prefix) { return key.rfind(prefix, 0) == 0; };
    try {
        if (starts("train.")) {
            cfg.train_paths[key.substr(6)] = value;
        } else if (starts("dev.")) {
            cfg.dev_paths[key.substr(4)] = value;
        } else if (starts("lexicon.")) {
            cfg.lexicon_paths[key.substr(8)] = value;
        } else if (starts("vectors.")) {
            cfg.vector_paths[key.substr(8)] = value;
        } else if (key == "unlabeled") {
            cfg.unlabeled_path = value;
        } else if (key == "map") {
            cfg.map_path = value;
        } else if (key == "map_source") {
            cfg.map_source = value;
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "curve_low") {
            cfg.curve_low = value;
        } else if (key == "features") {
            cfg.features = detail::split_list(value);
        } else if (key == "fractions") {
            cfg.fractions.clear();
            for (const auto& f : detail::split_list(value))
                cfg.fractions.push_back(std::stod(f));
        } else if (key == "jobs") {
            cfg.jobs = std::stoi(value);
        } else if (key == "hidden") {
            cfg.model.hidden_size = std::stoi(value);
        } else if (key == "layers") {
            cfg.model.lstm_layers = std::stoi(value);
        } else if (key == "join_dim") {
            cfg.model.join_dim = std::stoi(value);
        } else if (key == "dropout_keep") {
            cfg.model.dropout_keep = std::stod(value);
        } else if (key == "lr") {
            cfg.model.learning_rate = std::stod(value);
        } else if (key == "epochs") {
            cfg.model.epochs = std::stoi(value);
        } else if (key == "batch") {
            cfg.model.batch_size = std::stoi(value);
        } else if (key == "word_emb_dim") {
            cfg.model.word_emb_dim = std::stoi(value);
        } else if (key == "char_emb_dim") {
            cfg.model.char_emb_dim = std::stoi(value);
        } else if (key == "char_hidden") {
            cfg.model.char_hidden = std::stoi(value);
        } else if (key == "char_layers") {
            cfg.model.char_layers = std::stoi(value);
        } else if (key == "tag_emb_dim") {
            cfg.model.tag_emb_dim = std::stoi(value);
        } else if (key == "lambda") {
            cfg.model.lambda = std::stod(value);
        } else if (key == "lambda_schedule") {
            cfg.model.lambda_schedule = value;
        } else if (key == "disc_hidden") {
            cfg.model.disc_hidden = std::stoi(value);
        } else if (key == "disc_granularity") {
            cfg.model.disc_granularity = value;
        } else if (key == "min_unlabeled_len") {
            cfg.model.min_unlabeled_len = std::stoi(value);
        } else if (key == "word_mode") {
            cfg.model.word_mode = word_emb_mode_from(value);
        } else if (key == "share_char") {
            cfg.model.share_char = parse_bool(value, key);
        } else if (key == "share_heads") {
            cfg.model.share_heads = parse_bool(value, key);
        } else if (key == "adversarial") {
            cfg.model.adversarial = parse_bool(value, key);
        } else if (key == "merge_targets") {
            cfg.model.merge_targets = parse_bool(value, key);
        } else if (key == "use_analyzer") {
            cfg.model.use_analyzer = parse_bool(value, key);
        } else if (key == "train_word_emb") {
            cfg.model.train_word_emb = parse_bool(value, key);
        } else if (key == "disc_loss_unlabeled_only") {
            cfg.model.disc_loss_unlabeled_only = parse_bool(value, key);
        } else if (key == "seed") {
            cfg.model.seed = std::stoull(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for '" + key + "': " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("value out of range for '" + key + "': " + value);
    }
}

/// Key=value file, '#' comments, blank lines ignored.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        apply_setting(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["train"] = cfg.train_paths;
    j["dev"] = cfg.dev_paths;
    j["lexicon"] = cfg.lexicon_paths;
    j["vectors"] = cfg.vector_paths;
    j["unlabeled"] = cfg.unlabeled_path;
    j["map"] = cfg.map_path;
    j["map_source"] = cfg.map_source;
    j["out"] = cfg.out_dir;
    j["curve_low"] = cfg.curve_low;
    j["features"] = cfg.features;
    j["fractions"] = cfg.fractions;
    j["jobs"] = cfg.jobs;
    j["model"] = cfg.model;
    return j;
}

inline void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
    std::filesystem::create_directories(cfg.out_dir);
    nlohmann::json j = config_json(cfg);
    j["command"] = command;
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "manifest.json");
    out << j.dump(2) << "\n";
}

/// Read the #features header of a corpus file (falls back to the default
/// feature set).
inline std::vector<std::string> detect_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("#features:", 0) == 0) return detail::split_list(line.substr(10));
        if (!line.empty() && line[0] != '#') break;
    }
    return default_features();
}

// ---- loaded data bundle ----

struct LoadedData {
    std::map<std::string, Corpus> train;
    std::map<std::string, Corpus> dev;
    std::map<std::string, AnalyzerLexicon> lexicons;
    Corpus unlabeled;
    bool has_unlabeled = false;
};

inline LoadedData load_data(const ExperimentConfig& cfg) {
    LoadedData d;
    CorpusFormat fmt;
    fmt.features = cfg.features;
    for (const auto& [dialect, path] : cfg.train_paths) {
        Corpus c = parse_corpus(path, fmt);
        if (c.dialect != dialect)
            throw ConfigError("corpus " + path + " declares dialect '" + c.dialect +
                              "' but the config names it '" + dialect + "'");
        d.train.emplace(dialect, std::move(c));
    }
    for (const auto& [dialect, path] : cfg.dev_paths)
        d.dev.emplace(dialect, parse_corpus(path, fmt));
    for (const auto& [dialect, path] : cfg.lexicon_paths)
        d.lexicons.emplace(dialect, load_lexicon(path, cfg.features));
    if (!cfg.unlabeled_path.empty()) {
        d.unlabeled = parse_corpus(cfg.unlabeled_path, fmt);
        d.has_unlabeled = true;
    }
    return d;
}

// ---- commands ----

inline int cmd_train(const ExperimentConfig& cfg) {
    cfg.model.validate();  // fail fast, before any data loading
    if (cfg.train_paths.empty())
        throw ConfigError("train: at least one train.<dialect> path is required");

    LoadedData data = load_data(cfg);
    std::vector<const Corpus*> corpora;
    for (const auto& [d, c] : data.train) corpora.push_back(&c);
    std::vector<const Corpus*> char_only;
    if (data.has_unlabeled) char_only.push_back(&data.unlabeled);
    std::vector<const AnalyzerLexicon*> lexes;
    for (const auto& [d, l] : data.lexicons) lexes.push_back(&l);

    DataVocabularies vocabs = build_vocabularies(corpora, lexes, cfg.features, char_only);
    if (cfg.model.merge_targets) merge_target_spaces(vocabs.schema);

    // pretrained vectors
    std::map<std::string, EmbeddingSpace> spaces;
    PretrainedWordVectors pre;
    for (const auto& [key, path] : cfg.vector_paths)
        spaces.emplace(key, load_vectors(path));
    for (const auto& [key, space] : spaces) {
        if (key == "merged")
            pre.merged = &space;
        else
            pre.per_dialect[key] = &space;
    }
    Tensor map;
    if (!cfg.map_path.empty()) {
        map = load_map(cfg.map_path);
        pre.map = &map;
        pre.map_source = cfg.map_source;
        if (cfg.map_source.empty())
            throw ConfigError("map given without map_source dialect");
    }

    TaggerModel model = build_model(cfg.model, std::move(vocabs), pre);

    TrainDataset ds;
    for (const auto& [d, c] : data.train) ds.labeled[d] = &c;
    for (const auto& [d, c] : data.dev) ds.dev[d] = &c;
    for (const auto& [d, l] : data.lexicons) ds.lexicons[d] = &l;
    if (data.has_unlabeled) ds.unlabeled = &data.unlabeled;

    std::filesystem::create_directories(cfg.out_dir);
    write_manifest(cfg, "train");
    TrainOptions opts;
    opts.log_path = (std::filesystem::path(cfg.out_dir) / "train_log.jsonl").string();
    opts.checkpoint_path = (std::filesystem::path(cfg.out_dir) / "model.ckpt").string();
    train(model, ds, opts);
    return 0;
}

struct TagArgs {
    std::string model_path;
    std::string input_path;
    std::string dialect;
    std::string lexicon_path;
    std::string weights_path;
    std::string out_path;
};

inline int cmd_tag(const TagArgs& args) {
    TaggerModel model = load_checkpoint(args.model_path);
    CorpusFormat fmt;
    fmt.features = model.vocabs.schema.features;
    Corpus input = parse_corpus(args.input_path, fmt);
    std::string dialect = args.dialect.empty() ? input.dialect : args.dialect;

    AnalyzerLexicon lexicon;
    const AnalyzerLexicon* lex = nullptr;
    if (!args.lexicon_path.empty()) {
        lexicon = load_lexicon(args.lexicon_path, fmt.features);
        lex = &lexicon;
    }
    MatchWeights weights;
    if (!args.weights_path.empty()) weights = MatchWeights::load(args.weights_path);

    Corpus output;
    output.dialect = dialect;
    output.labeled = true;
    for (const Sentence& s : input.sentences) {
        SentencePrediction pred = predict(model, s, dialect, lex);
        Sentence out_sent;
        out_sent.dialect = dialect;
        for (std::size_t t = 0; t < s.size(); ++t) {
            Token tok;
            tok.raw = s.tokens[t].raw;
            tok.norm = s.tokens[t].norm;
            if (lex) {
                const auto& analyses = analyze(*lex, tok.norm);
                tok.gold = rank_analyses(analyses, pred[t].tags, fmt.features, weights,
                                         &pred[t]);
            } else {
                Analysis a;
                a.tags = pred[t].tags;
                tok.gold = std::move(a);
            }
            out_sent.tokens.push_back(std::move(tok));
        }
        output.sentences.push_back(std::move(out_sent));
    }
    write_corpus(output, args.out_path, fmt);
    return 0;
}

struct EvalArgs {
    std::string pred_path;
    std::string gold_path;
    std::string report_path;  // optional JSON output
};

inline int cmd_eval(const EvalArgs& args, std::ostream& out) {
    CorpusFormat fmt;
    fmt.features = detect_features(args.gold_path);
    Corpus gold = parse_corpus(args.gold_path, fmt);
    Corpus pred = parse_corpus(args.pred_path, fmt);
    FeatureSchema schema;
    schema.features = fmt.features;
    MetricsReport report = evaluate(pred, gold, schema);
    out << report.table();
    if (!args.report_path.empty()) {
        std::ofstream jf(args.report_path);
        if (!jf) throw DataError("cannot open report file: " + args.report_path);
        jf << report.to_json().dump(2) << "\n";
    }
    return 0;
}

struct EmbedArgs {
    std::string corpus_path;
    std::string corpus2_path;  // optional: merged-corpus training
    std::string out_path;
    SkipgramConfig sg;
};

inline int cmd_embed(const EmbedArgs& args, std::ostream& out) {
    CorpusFormat fmt;
    fmt.features = detect_features(args.corpus_path);
    Corpus c1 = parse_corpus(args.corpus_path, fmt);
    SkipgramResult res;
    if (!args.corpus2_path.empty()) {
        CorpusFormat fmt2;
        fmt2.features = detect_features(args.corpus2_path);
        Corpus c2 = parse_corpus(args.corpus2_path, fmt2);
        res = merge_corpora_and_train(tokenized(c1), tokenized(c2), args.sg);
    } else {
        res = train_skipgram(tokenized(c1), args.sg);
        res.space.dialect = c1.dialect;
    }
    save_vectors(res.space, args.out_path);
    out << "vocab " << res.space.size() << ", dim " << res.space.dim << "\n";
    for (std::size_t e = 0; e < res.epoch_losses.size(); ++e)
        out << "epoch " << (e + 1) << " loss " << res.epoch_losses[e] << "\n";
    return 0;
}

struct MapArgs {
    std::string src_path;
    std::string tgt_path;
    std::string dict_path;
    std::string mode = "orthogonal";  // or "lsq"
    std::string out_path;
};

inline int cmd_map(const MapArgs& args, std::ostream& out) {
    EmbeddingSpace src = load_vectors(args.src_path);
    EmbeddingSpace tgt = load_vectors(args.tgt_path);
    SeedDictionary dict = SeedDictionary::load(args.dict_path);
    MapMode mode;
    if (args.mode == "orthogonal")
        mode = MapMode::Orthogonal;
    else if (args.mode == "lsq" || args.mode == "least-squares")
        mode = MapMode::LeastSquares;
    else
        throw ConfigError("map mode must be 'orthogonal' or 'lsq'");
    if (src.dim >= static_cast<int>(dict.pairs.size()))
        out << "warning: fewer seed pairs than dimensions; the map may be loose\n";
    MappingResult res = map_spaces(src, tgt, dict, mode);
    save_map(res.w, args.out_path);
    out << "pairs used " << res.used_pairs << ", skipped " << res.skipped_pairs << "\n";
    out << "mean seed distance " << res.mean_dist_before << " -> " << res.mean_dist_after
        << "\n";
    if (res.rank_deficient) out << "warning: rank-deficient system, pseudo-inverse used\n";
    return 0;
}

struct GenArgs {
    SyntheticConfig synth;
    std::uint64_t seed = 1;
    std::string out_dir = "synthetic";
};

/// Write a synthetic dialect pair to disk in the standard formats.
inline int cmd_gen(const GenArgs& args, std::ostream& out) {
    SyntheticPair pair = generate_synthetic_dialect_pair(args.synth, args.seed);
    std::filesystem::create_directories(args.out_dir);
    std::filesystem::path dir(args.out_dir);
    CorpusFormat fmt;
    fmt.features = pair.features;
    write_corpus(pair.labeled_a, (dir / ("train_" + args.synth.dialect_a + ".tsv")).string(), fmt);
    write_corpus(pair.labeled_b, (dir / ("train_" + args.synth.dialect_b + ".tsv")).string(), fmt);
    write_corpus(pair.unlabeled_b,
                 (dir / ("unlabeled_" + args.synth.dialect_b + ".tsv")).string(), fmt);
    if (!pair.dev_a.sentences.empty())
        write_corpus(pair.dev_a, (dir / ("dev_" + args.synth.dialect_a + ".tsv")).string(), fmt);
    if (!pair.dev_b.sentences.empty())
        write_corpus(pair.dev_b, (dir / ("dev_" + args.synth.dialect_b + ".tsv")).string(), fmt);
    save_lexicon(pair.lexicon_a, pair.features,
                 (dir / ("lexicon_" + args.synth.dialect_a + ".jsonl")).string());
    save_lexicon(pair.lexicon_b, pair.features,
                 (dir / ("lexicon_" + args.synth.dialect_b + ".jsonl")).string());
    out << "wrote synthetic pair to " << args.out_dir << "\n";
    return 0;
}

// ---- learning curve ----

struct CurveCell {
    double fraction = 0;   // percent
    std::string mode;      // "low" | "mtl" | "adv"
    double feats = 0;      // dev FEATS accuracy of the low-resource dialect
    int train_sentences = 0;
};

struct CurveData {
    const Corpus* high = nullptr;
    const Corpus* low = nullptr;
    const Corpus* unlabeled = nullptr;
    const Corpus* dev_low = nullptr;
    std::vector<std::string> features = default_features();
};

/// Nested per-seed subsets: one shuffle, then prefixes.
inline std::vector<const Sentence*> curve_subset(const Corpus& corpus, double percent,
                                                 std::uint64_t seed) {
    std::vector<const Sentence*> order;
    for (const Sentence& s : corpus.sentences) order.push_back(&s);
    Rng rng(Rng(seed).fork("curve_subset").next_u64());
    rng.shuffle(order);
    std::size_t keep = static_cast<std::size_t>(
        std::max(1.0, std::ceil(order.size() * percent / 100.0)));
    keep = std::min(keep, order.size());
    order.resize(keep);
    return order;
}

/// Train one cell and measure dev FEATS, analyzer-free.
inline CurveCell curve_cell(const CurveData& data, const ModelConfig& base,
                            double fraction, const std::string& mode,
                            std::uint64_t subset_seed) {
    std::vector<const Sentence*> low_subset =
        curve_subset(*data.low, fraction, subset_seed);
    Corpus low_frac;
    low_frac.dialect = data.low->dialect;
    low_frac.labeled = true;
    for (const Sentence* s : low_subset) low_frac.sentences.push_back(*s);

    ModelConfig cfg = base;
    cfg.use_analyzer = false;
    std::vector<const Corpus*> corpora{&low_frac};
    std::vector<const Corpus*> char_only;
    if (mode != "low") {
        corpora.push_back(data.high);
        cfg.share_heads = true;
        cfg.merge_targets = true;
        cfg.word_mode = WordEmbMode::Merged;
        cfg.share_char = true;
    } else {
        cfg.share_heads = false;
        cfg.merge_targets = false;
        cfg.word_mode = WordEmbMode::Separate;
        cfg.share_char = false;
        cfg.adversarial = false;
    }
    if (mode == "adv") {
        cfg.adversarial = true;
        // the unlabeled corpus contributes full vocabulary: adversarial
        // alignment acts on the word rows it introduces
        corpora.push_back(data.unlabeled);
    } else {
        cfg.adversarial = false;
    }

    DataVocabularies vocabs =
        build_vocabularies(corpora, {}, data.features, char_only);
    if (cfg.merge_targets) merge_target_spaces(vocabs.schema);
    TaggerModel model = build_model(cfg, std::move(vocabs));

    TrainDataset ds;
    ds.labeled[low_frac.dialect] = &low_frac;
    if (mode != "low") ds.labeled[data.high->dialect] = data.high;
    if (mode == "adv") ds.unlabeled = data.unlabeled;
    train(model, ds);

    CurveCell cell;
    cell.fraction = fraction;
    cell.mode = mode;
    cell.train_sentences = static_cast<int>(low_frac.sentences.size());
    long long correct = 0, total = 0;
    for (const Sentence& s : data.dev_low->sentences) {
        SentencePrediction pred = predict(model, s, data.low->dialect, nullptr);
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (!s.tokens[t].gold) continue;
            ++total;
            correct += pred[t].tags == s.tokens[t].gold->tags;
        }
    }
    cell.feats = total ? double(correct) / total : 0.0;
    return cell;
}

struct CurveResult {
    std::vector<CurveCell> cells;  // ordered fraction-major: low, mtl, adv
    std::vector<double> fractions;

    const CurveCell& at(double fraction, const std::string& mode) const {
        for (const CurveCell& c : cells)
            if (c.fraction == fraction && c.mode == mode) return c;
        throw ConfigError("curve: no such cell");
    }

    std::string csv() const {
        std::ostringstream os;
        os << "fraction_percent,train_sentences,low,mtl,adv\n";
        for (double f : fractions) {
            os << f << ',' << at(f, "low").train_sentences << ',' << at(f, "low").feats
               << ',' << at(f, "mtl").feats << ',' << at(f, "adv").feats << "\n";
        }
        return os.str();
    }

    std::string markdown() const {
        std::ostringstream os;
        os << "| low-resource train size | low only | MTL | MTL+adversarial |\n";
        os << "|---|---|---|---|\n";
        os << std::fixed << std::setprecision(1);
        for (double f : fractions) {
            os << "| " << at(f, "low").train_sentences << " (" << f << "%) | "
               << 100 * at(f, "low").feats << " | " << 100 * at(f, "mtl").feats << " | "
               << 100 * at(f, "adv").feats << " |\n";
        }
        return os.str();
    }
};

/// The full grid: three modes per fraction, optionally with parallel cells.
inline CurveResult curve_run(const CurveData& data, const ModelConfig& base,
                             std::vector<double> fractions, std::uint64_t subset_seed,
                             int jobs = 1) {
    if (!data.high || !data.low || !data.dev_low)
        throw ConfigError("curve: high, low and dev_low corpora are required");
    if (!data.unlabeled) throw ConfigError("curve: adversarial mode needs unlabeled data");
    std::sort(fractions.begin(), fractions.end(), std::greater<>());
    fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

    struct Job {
        double fraction;
        std::string mode;
    };
    std::vector<Job> jobs_list;
    for (double f : fractions)
        for (const char* mode : {"low", "mtl", "adv"}) jobs_list.push_back({f, mode});

    CurveResult result;
    result.fractions = fractions;
    result.cells.resize(jobs_list.size());

    if (jobs <= 1) {
        for (std::size_t i = 0; i < jobs_list.size(); ++i)
            result.cells[i] = curve_cell(data, base, jobs_list[i].fraction,
                                         jobs_list[i].mode, subset_seed);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs_list.size()) return;
                result.cells[i] = curve_cell(data, base, jobs_list[i].fraction,
                                             jobs_list[i].mode, subset_seed);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

inline int cmd_curve(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.curve_low.empty())
        throw ConfigError("curve: set curve_low to the low-resource dialect id");
    LoadedData data = load_data(cfg);
    if (data.train.size() != 2)
        throw ConfigError("curve: exactly two train.<dialect> corpora are required");
    if (!data.has_unlabeled) throw ConfigError("curve: an unlabeled corpus is required");
    auto low_it = data.train.find(cfg.curve_low);
    if (low_it == data.train.end())
        throw ConfigError("curve: no train corpus for low dialect '" + cfg.curve_low + "'");
    const Corpus* low = &low_it->second;
    const Corpus* high = nullptr;
    for (const auto& [d, c] : data.train)
        if (d != cfg.curve_low) high = &c;
    auto dev_it = data.dev.find(cfg.curve_low);
    if (dev_it == data.dev.end())
        throw ConfigError("curve: a dev corpus for the low dialect is required");

    CurveData cd;
    cd.high = high;
    cd.low = low;
    cd.unlabeled = &data.unlabeled;
    cd.dev_low = &dev_it->second;
    cd.features = cfg.features;
    CurveResult res =
        curve_run(cd, cfg.model, cfg.fractions, cfg.model.seed, cfg.jobs);

    std::filesystem::create_directories(cfg.out_dir);
    write_manifest(cfg, "curve");
    {
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / "curve.csv");
        csv << res.csv();
        std::ofstream md(std::filesystem::path(cfg.out_dir) / "curve.md");
        md << res.markdown();
    }
    out << res.markdown();
    return 0;
}

}  // namespace morphtag::cli
