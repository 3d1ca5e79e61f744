#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphtag/errors.hpp"
#include "morphtag/tagger.hpp"

namespace morphtag {

namespace detail {

inline std::uint64_t fnv1a_bytes(const std::string& s, std::uint64_t h) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t vocab_hash(const DataVocabularies& v) {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& f : v.schema.features) h = fnv1a_bytes(f + ";", h);
    for (const auto& [d, vocabs] : v.schema.dialect_tags) {
        h = fnv1a_bytes(d + "|", h);
        for (const auto& tv : vocabs)
            for (const auto& t : tv.tags) h = fnv1a_bytes(t + ",", h);
    }
    for (const auto& [d, wv] : v.words) {
        h = fnv1a_bytes(d + "#", h);
        for (const auto& w : wv.items) h = fnv1a_bytes(w + ",", h);
    }
    return h;
}

inline nlohmann::json word_vocab_json(const WordVocab& v) {
    return nlohmann::json(v.items);
}

inline WordVocab word_vocab_from_json(const nlohmann::json& j) {
    WordVocab v;
    v.items = j.get<std::vector<std::string>>();
    for (int i = 0; i < static_cast<int>(v.items.size()); ++i) v.index.emplace(v.items[i], i);
    return v;
}

inline nlohmann::json tag_vocab_json(const TagVocab& v) { return nlohmann::json(v.tags); }

inline TagVocab tag_vocab_from_json(const nlohmann::json& j) {
    TagVocab v;
    v.tags = j.get<std::vector<std::string>>();
    for (int i = 0; i < static_cast<int>(v.tags.size()); ++i) v.index.emplace(v.tags[i], i);
    return v;
}

inline void write_doubles_le(std::ofstream& out, const std::vector<Real>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(Real)));
    } else {
        for (Real x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof(bits));
            for (int b = 0; b < 8; ++b)
                out.put(static_cast<char>((bits >> (8 * b)) & 0xFF));
        }
    }
}

inline void read_doubles_le(std::ifstream& in, std::vector<Real>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(Real)));
    } else {
        for (Real& x : v) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(
                            static_cast<unsigned char>(in.get()))
                        << (8 * b);
            std::memcpy(&x, &bits, sizeof(x));
        }
    }
}

}  // namespace detail

/// Single-file checkpoint: magic, version, JSON header (config, schema,
/// vocabularies, parameter manifest, vocab hash), then raw little-endian
/// 64-bit parameter blocks in all_params() order.
inline void save_checkpoint(TaggerModel& model, const std::string& path) {
    nlohmann::json header;
    header["format"] = "morphtag-checkpoint";
    header["version"] = 1;
    header["config"] = model.cfg;
    header["dialects"] = model.dialects;

    nlohmann::json schema;
    schema["features"] = model.vocabs.schema.features;
    schema["targets_merged"] = model.vocabs.schema.targets_merged;
    for (const auto& [d, vocabs] : model.vocabs.schema.dialect_tags) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& tv : vocabs) arr.push_back(detail::tag_vocab_json(tv));
        schema["dialect_tags"][d] = std::move(arr);
    }
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& tv : model.vocabs.schema.merged_tags)
            arr.push_back(detail::tag_vocab_json(tv));
        schema["merged_tags"] = std::move(arr);
    }
    header["schema"] = std::move(schema);

    nlohmann::json vocabs;
    for (const auto& [d, wv] : model.vocabs.words)
        vocabs["words"][d] = detail::word_vocab_json(wv);
    for (const auto& [d, cv] : model.vocabs.chars)
        vocabs["chars"][d] = detail::word_vocab_json(cv);
    vocabs["merged_words"] = detail::word_vocab_json(model.vocabs.merged_words);
    vocabs["merged_chars"] = detail::word_vocab_json(model.vocabs.merged_chars);
    header["vocabs"] = std::move(vocabs);
    header["vocab_hash"] = detail::vocab_hash(model.vocabs);

    nlohmann::json manifest = nlohmann::json::array();
    std::vector<Parameter*> params = model.all_params();
    for (Parameter* p : params)
        manifest.push_back({{"name", p->name}, {"shape", p->value.shape}});
    header["params"] = std::move(manifest);

    std::string json_text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out.write("MTCK", 4);
    std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    std::uint64_t len = json_text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(json_text.data(), static_cast<std::streamsize>(json_text.size()));
    for (Parameter* p : params) detail::write_doubles_le(out, p->value.v);
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

inline TaggerModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "MTCK")
        throw DataError(path + ": not a checkpoint file");
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1)
        throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string json_text(len, '\0');
    in.read(json_text.data(), static_cast<std::streamsize>(len));
    if (!in) throw DataError(path + ": truncated checkpoint header");

    nlohmann::json header = nlohmann::json::parse(json_text);
    DataVocabularies vocabs;
    vocabs.schema.features = header["schema"]["features"].get<std::vector<std::string>>();
    vocabs.schema.targets_merged = header["schema"]["targets_merged"].get<bool>();
    for (auto& [d, arr] : header["schema"]["dialect_tags"].items()) {
        std::vector<TagVocab> tvs;
        for (const auto& j : arr) tvs.push_back(detail::tag_vocab_from_json(j));
        vocabs.schema.dialect_tags.emplace(d, std::move(tvs));
    }
    for (const auto& j : header["schema"]["merged_tags"])
        vocabs.schema.merged_tags.push_back(detail::tag_vocab_from_json(j));
    if (header["vocabs"].contains("words"))
        for (auto& [d, j] : header["vocabs"]["words"].items())
            vocabs.words.emplace(d, detail::word_vocab_from_json(j));
    if (header["vocabs"].contains("chars"))
        for (auto& [d, j] : header["vocabs"]["chars"].items())
            vocabs.chars.emplace(d, detail::word_vocab_from_json(j));
    vocabs.merged_words = detail::word_vocab_from_json(header["vocabs"]["merged_words"]);
    vocabs.merged_chars = detail::word_vocab_from_json(header["vocabs"]["merged_chars"]);

    std::uint64_t expect_hash = header["vocab_hash"].get<std::uint64_t>();
    if (detail::vocab_hash(vocabs) != expect_hash)
        throw DataError(path + ": vocabulary hash mismatch");

    ModelConfig cfg = header["config"].get<ModelConfig>();
    TaggerModel model = build_model(cfg, std::move(vocabs));

    std::vector<Parameter*> params = model.all_params();
    const auto& manifest = header["params"];
    if (manifest.size() != params.size())
        throw DataError(path + ": parameter manifest size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (manifest[i]["name"].get<std::string>() != params[i]->name)
            throw DataError(path + ": parameter order mismatch at '" + params[i]->name + "'");
        auto shape = manifest[i]["shape"].get<std::vector<int>>();
        if (shape != params[i]->value.shape)
            throw DataError(path + ": parameter shape mismatch at '" + params[i]->name + "'");
        detail::read_doubles_le(in, params[i]->value.v);
    }
    if (!in) throw DataError(path + ": truncated parameter blocks");
    return model;
}

}  // namespace morphtag
