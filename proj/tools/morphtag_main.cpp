#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "morphtag/commands.hpp"

using namespace morphtag;
using namespace morphtag::cli;

namespace {

/// --config file first, then flag overrides, so flags win.
struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;  // raw key=value overrides
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        for (const std::string& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            apply_setting(cfg, cli::detail::trim(kv.substr(0, eq)),
                          cli::detail::trim(kv.substr(eq + 1)));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_given) cfg.model.seed = seed;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--set", opts.sets, "override a config key (key=value)")
        ->take_all();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"morphological tagging and disambiguation toolkit"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    CLI::App* train_cmd = app.add_subcommand("train", "train a tagger");
    add_common(train_cmd, train_opts);

    CommonOpts curve_opts;
    CLI::App* curve_cmd =
        app.add_subcommand("curve", "learning-curve experiment over training fractions");
    add_common(curve_cmd, curve_opts);
    std::string curve_fractions, curve_low;
    int curve_jobs = 0;
    curve_cmd->add_option("--fractions", curve_fractions,
                          "comma list of training percentages");
    curve_cmd->add_option("--low", curve_low, "low-resource dialect id");
    curve_cmd->add_option("--jobs", curve_jobs, "parallel curve cells");

    TagArgs tag_args;
    CLI::App* tag_cmd = app.add_subcommand("tag", "tag a corpus with a trained model");
    tag_cmd->add_option("--model", tag_args.model_path, "checkpoint file")->required();
    tag_cmd->add_option("--input", tag_args.input_path, "input corpus (TSV)")->required();
    tag_cmd->add_option("--dialect", tag_args.dialect, "dialect id (default: from file)");
    tag_cmd->add_option("--lexicon", tag_args.lexicon_path, "analyzer lexicon (JSONL)");
    tag_cmd->add_option("--weights", tag_args.weights_path, "feature weight file (TSV)");
    tag_cmd->add_option("--out", tag_args.out_path, "output corpus path")->required();

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
    eval_cmd->add_option("--pred", eval_args.pred_path, "predicted corpus")->required();
    eval_cmd->add_option("--gold", eval_args.gold_path, "gold corpus")->required();
    eval_cmd->add_option("--out", eval_args.report_path, "JSON report path");

    EmbedArgs embed_args;
    CLI::App* embed_cmd = app.add_subcommand("embed", "train word vectors");
    embed_cmd->add_option("--corpus", embed_args.corpus_path, "corpus (TSV)")->required();
    embed_cmd->add_option("--corpus2", embed_args.corpus2_path,
                          "second corpus for merged training");
    embed_cmd->add_option("--dim", embed_args.sg.dim, "vector dimension");
    embed_cmd->add_option("--window", embed_args.sg.window, "context window");
    embed_cmd->add_option("--negatives", embed_args.sg.negatives, "negative samples");
    embed_cmd->add_option("--epochs", embed_args.sg.epochs, "training epochs");
    embed_cmd->add_option("--min-count", embed_args.sg.min_count, "frequency cutoff");
    embed_cmd->add_option("--seed", embed_args.sg.seed, "random seed");
    embed_cmd->add_option("--out", embed_args.out_path, "vector file path")->required();

    MapArgs map_args;
    CLI::App* map_cmd = app.add_subcommand("map", "fit a cross-dialect embedding map");
    map_cmd->add_option("--src", map_args.src_path, "source vectors")->required();
    map_cmd->add_option("--tgt", map_args.tgt_path, "target vectors")->required();
    map_cmd->add_option("--dict", map_args.dict_path, "seed dictionary (TSV)")->required();
    map_cmd->add_option("--mode", map_args.mode, "orthogonal | lsq");
    map_cmd->add_option("--out", map_args.out_path, "map file path")->required();

    GenArgs gen_args;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "generate a synthetic dialect pair for experiments");
    gen_cmd->add_option("--features", gen_args.synth.n_features, "feature count");
    gen_cmd->add_option("--vocab", gen_args.synth.vocab_size, "word types per dialect");
    gen_cmd->add_option("--tags", gen_args.synth.tags_per_feature, "tags per feature");
    gen_cmd->add_option("--divergence", gen_args.synth.divergence, "dialect divergence");
    gen_cmd->add_option("--sentences-a", gen_args.synth.sentences_a, "dialect A sentences");
    gen_cmd->add_option("--sentences-b", gen_args.synth.sentences_b, "dialect B sentences");
    gen_cmd->add_option("--unlabeled-b", gen_args.synth.sentences_b_unlabeled,
                        "unlabeled B sentences");
    gen_cmd->add_option("--dev-a", gen_args.synth.dev_sentences_a, "dev A sentences");
    gen_cmd->add_option("--dev-b", gen_args.synth.dev_sentences_b, "dev B sentences");
    gen_cmd->add_option("--min-len", gen_args.synth.min_len, "minimum sentence length");
    gen_cmd->add_option("--max-len", gen_args.synth.max_len, "maximum sentence length");
    gen_cmd->add_option("--dialect-a", gen_args.synth.dialect_a, "dialect A id");
    gen_cmd->add_option("--dialect-b", gen_args.synth.dialect_b, "dialect B id");
    gen_cmd->add_option("--seed", gen_args.seed, "random seed");
    gen_cmd->add_option("--out", gen_args.out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return cmd_train(train_opts.resolve());
        if (*curve_cmd) {
            ExperimentConfig cfg = curve_opts.resolve();
            if (!curve_fractions.empty()) apply_setting(cfg, "fractions", curve_fractions);
            if (!curve_low.empty()) cfg.curve_low = curve_low;
            if (curve_jobs > 0) cfg.jobs = curve_jobs;
            return cmd_curve(cfg, std::cout);
        }
        if (*tag_cmd) return cmd_tag(tag_args);
        if (*eval_cmd) return cmd_eval(eval_args, std::cout);
        if (*embed_cmd) return cmd_embed(embed_args, std::cout);
        if (*map_cmd) return cmd_map(map_args, std::cout);
        if (*gen_cmd) return cmd_gen(gen_args, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
