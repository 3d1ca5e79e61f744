#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "morphtag/batching.hpp"
#include "morphtag/corpus_io.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/normalize.hpp"
#include "morphtag/synthetic.hpp"
#include "morphtag/vocab.hpp"

using namespace morphtag;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("normalization") {
    SECTION("alif and ya mapping") {
        CHECK(normalize_token("إلى") == "الي");  // إلى -> الي
    }

    SECTION("diacritics stripped") {
        // درسنا with fatha/sukun marks
        std::string diacritized =
            "دَرَسْنَا";
        CHECK(normalize_token(diacritized) == "درسنا");
    }

    SECTION("hamza carriers") {
        CHECK(normalize_token("ؤ") == "ء");
        CHECK(normalize_token("ئ") == "ء");
    }

    SECTION("idempotent on random strings") {
        Rng rng(21);
        std::vector<char32_t> pool = {0x0622, 0x0623, 0x0625, 0x0649, 0x0624, 0x0626,
                                      0x064B, 0x064F, 0x0652, 0x0670, 0x0627, 0x0644,
                                      0x064A, 0x0621, 'a',    'z',    ' ',    0x4E2D};
        for (int trial = 0; trial < 200; ++trial) {
            std::string s;
            int len = rng.uniform_int(12);
            for (int i = 0; i < len; ++i)
                utf8::append(s, pool[rng.uniform_int(static_cast<int>(pool.size()))]);
            std::string once = normalize_token(s);
            CHECK(normalize_token(once) == once);
            // normalized output carries no diacritics
            for (char32_t cp : utf8::decode(once)) {
                CHECK_FALSE((cp >= 0x064B && cp <= 0x0652));
                CHECK(cp != 0x0670);
            }
        }
    }

    SECTION("unknown characters pass through") {
        CHECK(normalize_token("hello") == "hello");
        CHECK(normalize_token("中文") == "中文");
    }

    SECTION("configurable table") {
        NormalizationTable t;
        t.replace['x'] = 'y';
        t.strip.insert('-');
        CHECK(normalize_token("x-x", t) == "yy");
    }
}

TEST_CASE("corpus io") {
    CorpusFormat fmt;
    fmt.features = {"pos", "gen", "num"};

    SECTION("two sentences with blank separators") {
        std::string path = temp_path("mt_corpus1.tsv");
        {
            std::ofstream out(path);
            out << "#dialect:da\n";
            out << "kitab\tkitAba\tkitAb\tnoun\tm\ts\n";
            out << "kabir\tkabiyr\tkabiyr\tadj\tm\ts\n";
            out << "\n";
            out << "darasna\tdarasonA\tdaras\tverb\tm\tp\n";
            out << "\n";
        }
        Corpus c = parse_corpus(path, fmt);
        CHECK(c.dialect == "da");
        CHECK(c.labeled);
        REQUIRE(c.sentences.size() == 2);
        CHECK(c.sentences[0].size() == 2);
        CHECK(c.sentences[1].size() == 1);
        REQUIRE(c.sentences[0].tokens[0].gold.has_value());
        CHECK(c.sentences[0].tokens[0].gold->tags == std::vector<std::string>{"noun", "m", "s"});
        CHECK(c.sentences[1].tokens[0].gold->lex == "daras");
    }

    SECTION("missing feature column is an error with the line number") {
        std::string path = temp_path("mt_corpus2.tsv");
        {
            std::ofstream out(path);
            out << "#dialect:da\n";
            out << "kitab\tkitAba\tkitAb\tnoun\tm\n";  // one column short
        }
        CHECK_THROWS_WITH(parse_corpus(path, fmt),
                          Catch::Matchers::ContainsSubstring(":2:"));
    }

    SECTION("unknown feature column rejected") {
        std::string path = temp_path("mt_corpus3.tsv");
        {
            std::ofstream out(path);
            out << "#dialect:da\n";
            out << "#features:pos,gen,case\n";
        }
        CHECK_THROWS_AS(parse_corpus(path, fmt), DataError);
    }

    SECTION("unlabeled corpus: surface-only lines") {
        std::string path = temp_path("mt_corpus4.tsv");
        {
            std::ofstream out(path);
            out << "#dialect:db\n";
            out << "kitab\nkabir\n\n";
        }
        Corpus c = parse_corpus(path, fmt);
        CHECK_FALSE(c.labeled);
        CHECK_FALSE(c.sentences[0].tokens[0].gold.has_value());
    }

    SECTION("write then parse round-trips generated corpora") {
        SyntheticConfig cfg;
        cfg.n_features = 3;
        cfg.vocab_size = 30;
        cfg.sentences_a = 12;
        cfg.sentences_b = 4;
        cfg.sentences_b_unlabeled = 2;
        SyntheticPair pair = generate_synthetic_dialect_pair(cfg, 77);
        CorpusFormat sfmt;
        sfmt.features = pair.features;

        std::string p1 = temp_path("mt_rt1.tsv");
        std::string p2 = temp_path("mt_rt2.tsv");
        write_corpus(pair.labeled_a, p1, sfmt);
        Corpus again = parse_corpus(p1, sfmt);
        write_corpus(again, p2, sfmt);
        CHECK(slurp(p1) == slurp(p2));
        REQUIRE(again.sentences.size() == pair.labeled_a.sentences.size());
        for (std::size_t s = 0; s < again.sentences.size(); ++s)
            for (std::size_t t = 0; t < again.sentences[s].size(); ++t) {
                CHECK(again.sentences[s].tokens[t].raw ==
                      pair.labeled_a.sentences[s].tokens[t].raw);
                CHECK(*again.sentences[s].tokens[t].gold ==
                      *pair.labeled_a.sentences[s].tokens[t].gold);
            }
    }
}

TEST_CASE("analyzer lexicon") {
    std::vector<std::string> feats = {"pos", "per", "num", "asp", "enc0"};
    AnalyzerLexicon lex;
    lex.dialect = "egy";
    // the three readings of drsnA: "we studied", "he taught us", "our lesson"
    Analysis verb_subj{"darasonA", "daras", {"verb", "1", "p", "p", "0"}};
    Analysis verb_obj{"darrasnA", "darras", {"verb", "3", "s", "p", "1p_dobj"}};
    Analysis noun_poss{"darsunA", "dars", {"noun", "na", "s", "na", "1p_poss"}};
    std::string drsnA = "درسنا";
    lex.add(drsnA, verb_subj);
    lex.add(drsnA, verb_obj);
    lex.add(drsnA, noun_poss);

    SECTION("all analyses returned") {
        const auto& as = analyze(lex, drsnA);
        REQUIRE(as.size() == 3);
        CHECK(as[0] == verb_subj);
        CHECK(as[2] == noun_poss);
    }

    SECTION("oov gives the empty list") {
        CHECK(analyze(lex, "qqq").empty());
    }

    SECTION("raw and normalized lookups agree") {
        // diacritized variant of the same surface form
        std::string raw = "دَرَسْنَا";
        CHECK(analyze(lex, raw).size() == 3);
        CHECK(analyze(lex, normalize_token(raw)).size() == 3);
    }

    SECTION("jsonl round trip") {
        std::string path = temp_path("mt_lex.jsonl");
        save_lexicon(lex, feats, path);
        AnalyzerLexicon back = load_lexicon(path, feats);
        CHECK(back.dialect == "egy");
        REQUIRE(back.entries.size() == 1);
        CHECK(analyze(back, drsnA).size() == 3);
        CHECK(analyze(back, drsnA)[0].tags == verb_subj.tags);
    }

    SECTION("unknown feature in lexicon file rejected") {
        std::string path = temp_path("mt_lex_bad.jsonl");
        {
            std::ofstream out(path);
            out << R"({"dialect":"egy"})" << "\n";
            out << R"({"surface":"x","analyses":[{"diac":"x","lex":"x","tags":{"bogus":"v"}}]})"
                << "\n";
        }
        CHECK_THROWS_AS(load_lexicon(path, feats), DataError);
    }
}

TEST_CASE("vocabularies") {
    std::vector<std::string> feats = {"pos"};

    auto make_corpus = [&](const std::string& dialect,
                           std::vector<std::pair<std::string, std::string>> toks) {
        Corpus c;
        c.dialect = dialect;
        c.labeled = true;
        Sentence s;
        s.dialect = dialect;
        for (auto& [w, pos] : toks) {
            Token t;
            t.raw = w;
            t.norm = normalize_token(w);
            t.gold = Analysis{w, w, {pos}};
            s.tokens.push_back(t);
        }
        c.sentences.push_back(s);
        return c;
    };

    SECTION("union of gold and lexicon tags") {
        Corpus c = make_corpus("da", {{"kitab", "noun"}, {"daras", "verb"}});
        AnalyzerLexicon lex;
        lex.dialect = "da";
        lex.add("kabir", Analysis{"kabiyr", "kabiyr", {"adj"}});
        DataVocabularies v = build_vocabularies({&c}, {&lex}, feats);
        const TagVocab& pos = v.schema.tags_for("da")[0];
        CHECK(pos.size() == 3);
        CHECK(pos.contains("noun"));
        CHECK(pos.contains("verb"));
        CHECK(pos.contains("adj"));
    }

    SECTION("two dialects keep distinct inventories") {
        Corpus a = make_corpus("da", {{"kitab", "noun"}});
        Corpus b = make_corpus("db", {{"ketab", "noun_b"}});
        DataVocabularies v = build_vocabularies({&a, &b}, {}, feats);
        CHECK(v.schema.tags_for("da")[0].contains("noun"));
        CHECK_FALSE(v.schema.tags_for("da")[0].contains("noun_b"));
        CHECK(v.schema.tags_for("db")[0].contains("noun_b"));
        CHECK(v.schema.merged_tags[0].contains("noun"));
        CHECK(v.schema.merged_tags[0].contains("noun_b"));
    }

    SECTION("character vocabulary") {
        Corpus c = make_corpus("da", {{"ab", "x"}, {"ba", "x"}});
        DataVocabularies v = build_vocabularies({&c}, {}, feats);
        CHECK(v.chars.at("da").size() == 4);  // pad, unk, a, b
        CHECK(v.chars.at("da").id("a") >= 2);
        CHECK(v.chars.at("da").id("c") == WordVocab::kUnk);
    }

    SECTION("empty corpus rejected") {
        Corpus c;
        c.dialect = "da";
        c.labeled = true;
        CHECK_THROWS_AS(build_vocabularies({&c}, {}, feats), DataError);
    }

    SECTION("merge_target_spaces unions and sorts") {
        Corpus a = make_corpus("da", {{"w1", "Al"}, {"w2", "bi"}});
        Corpus b = make_corpus("db", {{"w3", "Al"}, {"w4", "Ha"}});
        DataVocabularies v = build_vocabularies({&a, &b}, {}, feats);
        CHECK_FALSE(v.schema.targets_merged);
        merge_target_spaces(v.schema);
        CHECK(v.schema.targets_merged);
        CHECK(v.schema.merged_tags[0].tags == std::vector<std::string>{"Al", "Ha", "bi"});

        // per-dialect ids map into the merged space and back losslessly
        for (const auto& dialect : {"da", "db"})
            for (const auto& tag : v.schema.tags_for(dialect)[0].tags) {
                int mid = v.schema.merged_tags[0].id(tag);
                REQUIRE(mid >= 0);
                CHECK(v.schema.merged_tags[0].tags[mid] == tag);
            }
    }

    SECTION("merge of identical vocabularies is idempotent") {
        Corpus a = make_corpus("da", {{"w1", "x"}, {"w2", "y"}});
        Corpus b = make_corpus("db", {{"w3", "x"}, {"w4", "y"}});
        DataVocabularies v = build_vocabularies({&a, &b}, {}, feats);
        merge_target_spaces(v.schema);
        CHECK(v.schema.merged_tags[0].tags == v.schema.tags_for("da")[0].tags);
    }

    SECTION("merge requires two dialects") {
        Corpus a = make_corpus("da", {{"w1", "x"}});
        DataVocabularies v = build_vocabularies({&a}, {}, feats);
        CHECK_THROWS_AS(merge_target_spaces(v.schema), ConfigError);
    }
}

TEST_CASE("batching") {
    SyntheticConfig cfg;
    cfg.n_features = 3;
    cfg.vocab_size = 40;
    cfg.sentences_a = 10;
    cfg.sentences_b = 6;
    cfg.sentences_b_unlabeled = 8;
    cfg.min_len = 3;
    cfg.max_len = 9;
    SyntheticPair pair = generate_synthetic_dialect_pair(cfg, 99);
    DataVocabularies vocabs = build_vocabularies(
        {&pair.labeled_a, &pair.labeled_b, &pair.unlabeled_b},
        {&pair.lexicon_a, &pair.lexicon_b}, pair.features);
    BatchBuilder builder;
    builder.vocabs = &vocabs;
    builder.lexicons = {{"da", &pair.lexicon_a}, {"db", &pair.lexicon_b}};
    builder.dialect_order = {"da", "db"};

    SECTION("10 sentences at batch 4 partition into 4+4+2") {
        Rng rng(1);
        auto batches = make_batches(pair.labeled_a, 4, rng, builder);
        REQUIRE(batches.size() == 3);
        CHECK(batches[0].size() == 4);
        CHECK(batches[1].size() == 4);
        CHECK(batches[2].size() == 2);
        for (const Batch& b : batches) CHECK(b.dialect == "da");

        std::set<const Sentence*> seen;
        for (const Batch& b : batches)
            for (const Sentence* s : b.sentences) CHECK(seen.insert(s).second);
        CHECK(seen.size() == 10);
    }

    SECTION("fixed seed fixes the shuffle") {
        Rng r1(7), r2(7), r3(8);
        auto b1 = make_batches(pair.labeled_a, 4, r1, builder);
        auto b2 = make_batches(pair.labeled_a, 4, r2, builder);
        auto b3 = make_batches(pair.labeled_a, 4, r3, builder);
        CHECK(b1[0].sentences == b2[0].sentences);
        bool same = true;
        for (std::size_t i = 0; i < b1.size(); ++i)
            same &= b1[i].sentences == b3[i].sentences;
        CHECK_FALSE(same);
    }

    SECTION("padding and mask") {
        Rng rng(2);
        auto batches = make_batches(pair.labeled_a, 4, rng, builder);
        const Batch& b = batches[0];
        for (int i = 0; i < b.size(); ++i) {
            int len = b.real_len(i);
            for (int t = 0; t < b.max_len; ++t) {
                CHECK(b.mask[i][t] == (t < len ? 1 : 0));
                if (t >= len) CHECK(b.word_ids[i][t] == WordVocab::kPad);
            }
        }
    }

    SECTION("gold ids round-trip through the tag vocab") {
        Rng rng(3);
        auto batches = make_batches(pair.labeled_b, 3, rng, builder);
        for (const Batch& b : batches)
            for (int i = 0; i < b.size(); ++i)
                for (int t = 0; t < b.real_len(i); ++t)
                    for (int f = 0; f < 3; ++f) {
                        int id = b.gold_ids[f][i][t];
                        REQUIRE(id >= 0);
                        CHECK(vocabs.schema.tags_for("db")[f].tags[id] ==
                              b.sentences[i]->tokens[t].gold->tags[f]);
                    }
    }

    SECTION("adversarial batch is exactly half labeled") {
        std::vector<const Sentence*> labeled, unlabeled;
        for (const Sentence& s : pair.labeled_a.sentences) labeled.push_back(&s);
        for (const Sentence& s : pair.unlabeled_b.sentences) unlabeled.push_back(&s);
        Rng rng(4);
        Batch b = make_adversarial_batch(labeled, unlabeled, 8, 3, rng, builder);
        CHECK(b.adversarial);
        CHECK(b.size() == 8);
        CHECK(b.labeled_count == 4);
        for (int i = 0; i < 4; ++i) CHECK(b.sentence_dialects[i] == "da");
        for (int i = 4; i < 8; ++i) CHECK(b.sentence_dialects[i] == "db");
        for (int lbl : b.dialect_labels) CHECK(lbl >= 0);
        // gold ids populated only on the labeled half
        for (int i = 0; i < 8; ++i)
            for (int t = 0; t < b.real_len(i); ++t)
                CHECK((b.gold_ids[0][i][t] >= 0) == (i < 4));
    }

    SECTION("minimum unlabeled length filter") {
        Sentence shorty;
        shorty.dialect = "db";
        for (int i = 0; i < 5; ++i) shorty.tokens.push_back(Token{"kitab", "kitab", {}});
        std::vector<const Sentence*> labeled, unlabeled{&shorty};
        for (const Sentence& s : pair.labeled_a.sentences) labeled.push_back(&s);
        Rng rng(5);
        CHECK_THROWS_AS(make_adversarial_batch(labeled, unlabeled, 8, 14, rng, builder),
                        DataError);
        Batch ok = make_adversarial_batch(labeled, unlabeled, 8, 5, rng, builder);
        CHECK(ok.size() == 8);
    }

    SECTION("odd batch size rejected") {
        std::vector<const Sentence*> labeled, unlabeled;
        for (const Sentence& s : pair.labeled_a.sentences) labeled.push_back(&s);
        for (const Sentence& s : pair.unlabeled_b.sentences) unlabeled.push_back(&s);
        Rng rng(6);
        CHECK_THROWS_AS(make_adversarial_batch(labeled, unlabeled, 7, 3, rng, builder),
                        ConfigError);
    }

    SECTION("mixed dialects rejected in standard batches") {
        std::vector<const Sentence*> mixed{&pair.labeled_a.sentences[0],
                                           &pair.labeled_b.sentences[0]};
        CHECK_THROWS_AS(builder.build(mixed, true), DataError);
    }
}

TEST_CASE("synthetic dialect pair") {
    SECTION("divergence outside [0,1] rejected") {
        SyntheticConfig cfg;
        cfg.divergence = 1.5;
        CHECK_THROWS_AS(generate_synthetic_dialect_pair(cfg, 1), ConfigError);
    }

    SECTION("gold analyses always come from the lexicon") {
        SyntheticConfig cfg;
        cfg.n_features = 4;
        cfg.vocab_size = 60;
        cfg.sentences_a = 40;
        cfg.sentences_b = 30;
        SyntheticPair pair = generate_synthetic_dialect_pair(cfg, 31);
        auto check_corpus = [&](const Corpus& c, const AnalyzerLexicon& lex) {
            for (const Sentence& s : c.sentences)
                for (const Token& t : s.tokens) {
                    const auto& as = analyze(lex, t.norm);
                    REQUIRE_FALSE(as.empty());
                    bool found = false;
                    for (const Analysis& a : as) found |= (a == *t.gold);
                    CHECK(found);
                }
        };
        check_corpus(pair.labeled_a, pair.lexicon_a);
        check_corpus(pair.labeled_b, pair.lexicon_b);
    }

    SECTION("zero divergence gives identical lexicons") {
        SyntheticConfig cfg;
        cfg.divergence = 0;
        cfg.vocab_size = 50;
        cfg.sentences_a = 5;
        cfg.sentences_b = 5;
        SyntheticPair pair = generate_synthetic_dialect_pair(cfg, 13);
        REQUIRE(pair.lexicon_a.entries.size() == pair.lexicon_b.entries.size());
        for (const auto& [surface, analyses] : pair.lexicon_a.entries) {
            auto it = pair.lexicon_b.entries.find(surface);
            REQUIRE(it != pair.lexicon_b.entries.end());
            CHECK(it->second == analyses);
        }
    }

    SECTION("positive divergence introduces dialect-specific words") {
        SyntheticConfig cfg;
        cfg.divergence = 0.3;
        cfg.vocab_size = 100;
        cfg.sentences_a = 5;
        cfg.sentences_b = 5;
        SyntheticPair pair = generate_synthetic_dialect_pair(cfg, 13);
        int b_specific = 0;
        for (const auto& [surface, analyses] : pair.lexicon_b.entries)
            if (!pair.lexicon_a.entries.count(surface)) ++b_specific;
        CHECK(b_specific > 10);
        CHECK(b_specific < 60);
    }

    SECTION("same seed is byte-identical, different seed differs") {
        SyntheticConfig cfg;
        cfg.vocab_size = 30;
        cfg.sentences_a = 8;
        cfg.sentences_b = 8;
        auto p1 = generate_synthetic_dialect_pair(cfg, 5);
        auto p2 = generate_synthetic_dialect_pair(cfg, 5);
        auto p3 = generate_synthetic_dialect_pair(cfg, 6);
        auto flat = [](const Corpus& c) {
            std::string s;
            for (const auto& sent : c.sentences)
                for (const auto& t : sent.tokens) {
                    s += t.raw + "|";
                    if (t.gold)
                        for (const auto& tag : t.gold->tags) s += tag + ",";
                }
            return s;
        };
        CHECK(flat(p1.labeled_a) == flat(p2.labeled_a));
        CHECK(flat(p1.labeled_b) == flat(p2.labeled_b));
        CHECK(flat(p1.labeled_a) != flat(p3.labeled_a));
    }
}
