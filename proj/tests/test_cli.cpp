#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "morphtag/commands.hpp"

using namespace morphtag;
using namespace morphtag::cli;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Self-cleaning scratch dir with a generated dialect pair on disk.
struct Workspace {
    fs::path dir;
    std::vector<std::string> features;

    Workspace() {
        dir = fs::temp_directory_path() /
              ("mt_cli_" + std::to_string(Catch::rngSeed()) + "_" +
               std::to_string(counter()++));
        fs::create_directories(dir);
        GenArgs gen;
        gen.synth.n_features = 3;
        gen.synth.vocab_size = 40;
        gen.synth.sentences_a = 16;
        gen.synth.sentences_b = 8;
        gen.synth.sentences_b_unlabeled = 8;
        gen.synth.dev_sentences_b = 5;
        gen.synth.min_len = 3;
        gen.synth.max_len = 6;
        gen.seed = 9;
        gen.out_dir = (dir / "data").string();
        std::ostringstream sink;
        cmd_gen(gen, sink);
        SyntheticPair pair = generate_synthetic_dialect_pair(gen.synth, gen.seed);
        features = pair.features;
    }

    ~Workspace() { fs::remove_all(dir); }

    static int& counter() {
        static int c = 0;
        return c;
    }

    std::string data(const std::string& name) const { return (dir / "data" / name).string(); }

    ExperimentConfig small_train_config(const std::string& out_name) const {
        ExperimentConfig cfg;
        cfg.train_paths["da"] = data("train_da.tsv");
        cfg.train_paths["db"] = data("train_db.tsv");
        cfg.lexicon_paths["da"] = data("lexicon_da.jsonl");
        cfg.lexicon_paths["db"] = data("lexicon_db.jsonl");
        cfg.features = {"pos", "asp", "cas"};
        cfg.out_dir = (dir / out_name).string();
        cfg.model.hidden_size = 8;
        cfg.model.lstm_layers = 1;
        cfg.model.join_dim = 8;
        cfg.model.word_emb_dim = 6;
        cfg.model.char_emb_dim = 4;
        cfg.model.char_hidden = 5;
        cfg.model.char_layers = 1;
        cfg.model.tag_emb_dim = 3;
        cfg.model.dropout_keep = 1.0;
        cfg.model.epochs = 2;
        cfg.model.batch_size = 8;
        cfg.model.learning_rate = 0.01;
        cfg.model.seed = 11;
        return cfg;
    }
};

}  // namespace

TEST_CASE("config file parsing and overrides") {
    Workspace ws;

    SECTION("key = value file with comments") {
        fs::path cfg_path = ws.dir / "exp.cfg";
        {
            std::ofstream out(cfg_path);
            out << "# experiment\n";
            out << "train.da = a.tsv\n";
            out << "hidden = 32\n";
            out << "word_mode = merged\n";
            out << "share_heads = true\n";
            out << "fractions = 100,25,6\n";
        }
        ExperimentConfig cfg;
        load_config_file(cfg, cfg_path.string());
        CHECK(cfg.train_paths.at("da") == "a.tsv");
        CHECK(cfg.model.hidden_size == 32);
        CHECK(cfg.model.word_mode == WordEmbMode::Merged);
        CHECK(cfg.model.share_heads);
        CHECK(cfg.fractions == std::vector<double>{100, 25, 6});
    }

    SECTION("later settings win, so flags override the file") {
        ExperimentConfig cfg;
        apply_setting(cfg, "hidden", "16");
        apply_setting(cfg, "hidden", "64");
        CHECK(cfg.model.hidden_size == 64);
    }

    SECTION("unknown keys and bad values are rejected") {
        ExperimentConfig cfg;
        CHECK_THROWS_AS(apply_setting(cfg, "hiden", "16"), ConfigError);
        CHECK_THROWS_AS(apply_setting(cfg, "hidden", "lots"), ConfigError);
        CHECK_THROWS_AS(apply_setting(cfg, "share_heads", "maybe"), ConfigError);
    }
}

TEST_CASE("train command validation") {
    Workspace ws;

    SECTION("shared heads without merged targets fails before training") {
        ExperimentConfig cfg = ws.small_train_config("run_bad");
        cfg.model.share_heads = true;
        cfg.model.merge_targets = false;
        CHECK_THROWS_AS(cmd_train(cfg), ConfigError);
        CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "model.ckpt"));
    }

    SECTION("missing corpora are reported") {
        ExperimentConfig cfg;
        CHECK_THROWS_AS(cmd_train(cfg), ConfigError);
    }
}

TEST_CASE("pipeline: train, tag, eval") {
    Workspace ws;
    ExperimentConfig cfg = ws.small_train_config("run");
    cfg.model.epochs = 3;
    REQUIRE(cmd_train(cfg) == 0);
    REQUIRE(fs::exists(fs::path(cfg.out_dir) / "model.ckpt"));
    REQUIRE(fs::exists(fs::path(cfg.out_dir) / "train_log.jsonl"));
    REQUIRE(fs::exists(fs::path(cfg.out_dir) / "manifest.json"));

    TagArgs tag;
    tag.model_path = (fs::path(cfg.out_dir) / "model.ckpt").string();
    tag.input_path = ws.data("dev_db.tsv");
    tag.dialect = "db";
    tag.lexicon_path = ws.data("lexicon_db.jsonl");
    tag.out_path = (ws.dir / "pred_db.tsv").string();
    REQUIRE(cmd_tag(tag) == 0);

    EvalArgs ev;
    ev.pred_path = tag.out_path;
    ev.gold_path = ws.data("dev_db.tsv");
    ev.report_path = (ws.dir / "report.json").string();
    std::ostringstream out;
    REQUIRE(cmd_eval(ev, out) == 0);
    CHECK(out.str().find("FULL") != std::string::npos);
    nlohmann::json report = nlohmann::json::parse(slurp(ev.report_path));
    CHECK(report["tokens"].get<int>() > 0);

    SECTION("self comparison gives perfect scores") {
        EvalArgs self;
        self.pred_path = ws.data("dev_db.tsv");
        self.gold_path = ws.data("dev_db.tsv");
        std::ostringstream so;
        REQUIRE(cmd_eval(self, so) == 0);
        CHECK(so.str().find("FULL  100.00") != std::string::npos);
    }

    SECTION("tagging without a lexicon emits bare predicted tags") {
        TagArgs bare = tag;
        bare.lexicon_path.clear();
        bare.out_path = (ws.dir / "pred_bare.tsv").string();
        REQUIRE(cmd_tag(bare) == 0);
        CorpusFormat fmt;
        fmt.features = ws.features;
        Corpus pred = parse_corpus(bare.out_path, fmt);
        CHECK(pred.sentences.size() > 0);
        CHECK(pred.sentences[0].tokens[0].gold->diac.empty());
    }
}

TEST_CASE("idempotent outputs for a fixed seed") {
    Workspace ws;
    ExperimentConfig cfg1 = ws.small_train_config("runA");
    ExperimentConfig cfg2 = ws.small_train_config("runB");
    REQUIRE(cmd_train(cfg1) == 0);
    REQUIRE(cmd_train(cfg2) == 0);
    CHECK(slurp(fs::path(cfg1.out_dir) / "model.ckpt") ==
          slurp(fs::path(cfg2.out_dir) / "model.ckpt"));
    CHECK(slurp(fs::path(cfg1.out_dir) / "train_log.jsonl") ==
          slurp(fs::path(cfg2.out_dir) / "train_log.jsonl"));

    ExperimentConfig cfg3 = ws.small_train_config("runC");
    cfg3.model.seed = 12;
    REQUIRE(cmd_train(cfg3) == 0);
    CHECK(slurp(fs::path(cfg1.out_dir) / "model.ckpt") !=
          slurp(fs::path(cfg3.out_dir) / "model.ckpt"));
}

TEST_CASE("embed and map commands") {
    Workspace ws;

    EmbedArgs embed;
    embed.corpus_path = ws.data("train_da.tsv");
    embed.out_path = (ws.dir / "vec_da.txt").string();
    embed.sg.dim = 8;
    embed.sg.epochs = 2;
    embed.sg.min_count = 1;
    embed.sg.seed = 5;
    std::ostringstream out1;
    REQUIRE(cmd_embed(embed, out1) == 0);
    EmbeddingSpace da = load_vectors(embed.out_path);
    CHECK(da.dim == 8);
    CHECK(da.size() > 0);

    EmbedArgs merged = embed;
    merged.corpus2_path = ws.data("train_db.tsv");
    merged.out_path = (ws.dir / "vec_merged.txt").string();
    std::ostringstream out2;
    REQUIRE(cmd_embed(merged, out2) == 0);
    EmbeddingSpace ms = load_vectors(merged.out_path);
    CHECK(ms.size() >= da.size());

    EmbedArgs embed_b = embed;
    embed_b.corpus_path = ws.data("train_db.tsv");
    embed_b.out_path = (ws.dir / "vec_db.txt").string();
    std::ostringstream out3;
    REQUIRE(cmd_embed(embed_b, out3) == 0);

    // identity seed dictionary over shared surface forms
    EmbeddingSpace db = load_vectors(embed_b.out_path);
    SeedDictionary dict;
    for (const auto& w : da.words)
        if (db.id(w) >= 0) dict.pairs.emplace_back(w, w);
    REQUIRE(dict.pairs.size() >= 2);
    std::string dict_path = (ws.dir / "seed.tsv").string();
    dict.save(dict_path);

    MapArgs map;
    map.src_path = embed_b.out_path;
    map.tgt_path = embed.out_path;
    map.dict_path = dict_path;
    map.mode = "orthogonal";
    map.out_path = (ws.dir / "map.txt").string();
    std::ostringstream out4;
    REQUIRE(cmd_map(map, out4) == 0);
    Tensor w = load_map(map.out_path);
    CHECK(w.shape == std::vector<int>{8, 8});
    CHECK(out4.str().find("pairs used") != std::string::npos);

    SECTION("mapped-mode training consumes the map file") {
        ExperimentConfig cfg = ws.small_train_config("run_mapped");
        cfg.model.word_emb_dim = 8;
        cfg.model.word_mode = WordEmbMode::Mapped;
        cfg.vector_paths["da"] = (ws.dir / "vec_da.txt").string();
        cfg.vector_paths["db"] = (ws.dir / "vec_db.txt").string();
        cfg.map_path = map.out_path;
        cfg.map_source = "db";
        cfg.model.epochs = 1;
        REQUIRE(cmd_train(cfg) == 0);
    }
}

TEST_CASE("curve subsets nest and the table has the right shape") {
    Workspace ws;

    SECTION("subset nesting") {
        CorpusFormat fmt;
        fmt.features = ws.features;
        Corpus low = parse_corpus(ws.data("train_db.tsv"), fmt);
        auto s6 = curve_subset(low, 25, 77);
        auto s12 = curve_subset(low, 50, 77);
        auto s100 = curve_subset(low, 100, 77);
        CHECK(s100.size() == low.sentences.size());
        CHECK(s6.size() <= s12.size());
        for (std::size_t i = 0; i < s6.size(); ++i) CHECK(s6[i] == s12[i]);
        auto again = curve_subset(low, 25, 77);
        CHECK(s6 == again);
    }

    SECTION("tiny curve run emits all cells") {
        ExperimentConfig cfg = ws.small_train_config("curve_run");
        cfg.curve_low = "db";
        cfg.unlabeled_path = ws.data("unlabeled_db.tsv");
        cfg.dev_paths["db"] = ws.data("dev_db.tsv");
        cfg.fractions = {100, 50};
        cfg.model.epochs = 1;
        cfg.model.min_unlabeled_len = 3;
        cfg.model.batch_size = 4;
        std::ostringstream out;
        REQUIRE(cmd_curve(cfg, out) == 0);
        CHECK(fs::exists(fs::path(cfg.out_dir) / "curve.csv"));
        CHECK(fs::exists(fs::path(cfg.out_dir) / "curve.md"));
        std::string csv = slurp(fs::path(cfg.out_dir) / "curve.csv");
        // header + one row per fraction
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        std::string md = out.str();
        CHECK(md.find("MTL+adversarial") != std::string::npos);
    }

    SECTION("fraction 100 uses the whole corpus once") {
        CorpusFormat fmt;
        fmt.features = ws.features;
        Corpus low = parse_corpus(ws.data("train_db.tsv"), fmt);
        auto all = curve_subset(low, 100, 3);
        std::set<const Sentence*> uniq(all.begin(), all.end());
        CHECK(uniq.size() == low.sentences.size());
    }
}

TEST_CASE("feature header detection") {
    Workspace ws;
    CHECK(detect_features(ws.data("train_da.tsv")) ==
          std::vector<std::string>{"pos", "asp", "cas"});
}
