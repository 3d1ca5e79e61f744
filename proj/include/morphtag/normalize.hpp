#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace morphtag {

namespace utf8 {

/// Decode a UTF-8 string into codepoints. Invalid bytes are passed through
/// as their own codepoints so normalization never rejects input.
inline std::vector<char32_t> decode(const std::string& s) {
    std::vector<char32_t> out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = c;
        int extra = 0;
        if (c >= 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else if (c >= 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if (c >= 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        }
        if (extra > 0 && i + extra >= s.size()) {
            out.push_back(c);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok || (extra == 0 && c >= 0x80)) {
            out.push_back(c);
            ++i;
        } else {
            out.push_back(cp);
            i += extra + 1;
        }
    }
    return out;
}

inline void append(std::string& s, char32_t cp) {
    if (cp < 0x80) {
        s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        s.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string s;
    for (char32_t cp : cps) append(s, cp);
    return s;
}

/// Split a UTF-8 string into per-character strings.
inline std::vector<std::string> chars(const std::string& s) {
    std::vector<std::string> out;
    for (char32_t cp : decode(s)) {
        std::string c;
        append(c, cp);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace utf8

/// Orthographic normalization: codepoint replacements plus a strip set.
/// Defaults cover Alif/Ya/Hamza normalization and diacritic removal.
struct NormalizationTable {
    std::unordered_map<char32_t, char32_t> replace;
    std::unordered_set<char32_t> strip;

    static const NormalizationTable& arabic_default() {
        static const NormalizationTable t = [] {
            NormalizationTable n;
            // Alif variants -> bare Alif
            for (char32_t c : {0x0622, 0x0623, 0x0625, 0x0671}) n.replace[c] = 0x0627;
            // Alif Maqsura -> Ya
            n.replace[0x0649] = 0x064A;
            // Hamza carriers -> bare Hamza
            n.replace[0x0624] = 0x0621;
            n.replace[0x0626] = 0x0621;
            // harakat, tanween, shadda, sukun, dagger alif
            for (char32_t c = 0x064B; c <= 0x0652; ++c) n.strip.insert(c);
            n.strip.insert(0x0670);
            return n;
        }();
        return t;
    }
};

/// Single-pass application of the table. Unknown characters pass through.
/// The default table is idempotent: replacement targets are never
/// themselves mapped or stripped.
inline std::string normalize_token(const std::string& raw,
                                   const NormalizationTable& table =
                                       NormalizationTable::arabic_default()) {
    std::vector<char32_t> cps = utf8::decode(raw);
    std::string out;
    for (char32_t cp : cps) {
        if (table.strip.count(cp)) continue;
        auto it = table.replace.find(cp);
        utf8::append(out, it == table.replace.end() ? cp : it->second);
    }
    return out;
}

}  // namespace morphtag
