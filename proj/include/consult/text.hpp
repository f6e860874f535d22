#pragma once

// Tokenization and sentence utilities for mixed Chinese/Latin consultation
// text. The token rule: every CJK character is its own token; maximal runs
// of non-CJK alphanumeric characters form one token; punctuation and
// whitespace never produce tokens. "吃aspirin吧" -> ["吃","aspirin","吧"].

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace consult {

namespace detail {

/// Decode one UTF-8 codepoint starting at `i`; advances `i` past it.
/// Malformed bytes decode as U+FFFD one byte at a time, so tokenization is
/// total on arbitrary input.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
        i += 1;
        return b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07u;
    } else {
        i += 1;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        i += 1;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            i += 1;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3Fu);
    }
    i += len;
    return cp;
}

inline bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // unified ideographs
           (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
           (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
           (cp >= 0x20000 && cp <= 0x2FFFF);    // extensions B..F
}

/// Non-CJK "word" codepoints: ASCII alphanumerics, Latin letters with
/// diacritics, and their fullwidth forms.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;
    if (cp >= 0xFF10 && cp <= 0xFF19) return true;  // fullwidth digits
    if (cp >= 0xFF21 && cp <= 0xFF3A) return true;  // fullwidth A-Z
    if (cp >= 0xFF41 && cp <= 0xFF5A) return true;  // fullwidth a-z
    return false;
}

inline void append_codepoint(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string run;
    auto flush = [&] {
        if (!run.empty()) {
            tokens.push_back(run);
            run.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = detail::decode_utf8(text, i);
        if (detail::is_cjk(cp)) {
            flush();
            std::string one;
            detail::append_codepoint(one, cp);
            tokens.push_back(std::move(one));
        } else if (detail::is_word_char(cp)) {
            detail::append_codepoint(run, cp);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

/// One sentence plus whether its terminator run contained a question mark.
struct Sentence {
    std::string text;
    bool is_question = false;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Split on the terminators 。！？.!? (halfwidth and fullwidth). A maximal
/// run of terminators closes one sentence; the sentence is a question when
/// the run contains ? or ？. Trailing text without a terminator counts as a
/// non-question sentence. Blank segments are not sentences.
inline std::vector<Sentence> split_sentences(std::string_view text) {
    auto is_terminator = [](char32_t cp) {
        return cp == '.' || cp == '!' || cp == '?' || cp == 0x3002 /*。*/ ||
               cp == 0xFF01 /*！*/ || cp == 0xFF1F /*？*/;
    };
    auto is_question_mark = [](char32_t cp) { return cp == '?' || cp == 0xFF1F; };

    std::vector<Sentence> out;
    std::string current;
    bool has_content = false;
    auto close = [&](bool question) {
        if (has_content) out.push_back({current, question});
        current.clear();
        has_content = false;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = detail::decode_utf8(text, i);
        if (is_terminator(cp)) {
            bool question = is_question_mark(cp);
            // consume the whole terminator run
            while (i < text.size()) {
                std::size_t j = i;
                const char32_t next = detail::decode_utf8(text, j);
                if (!is_terminator(next)) break;
                question = question || is_question_mark(next);
                i = j;
            }
            close(question);
        } else {
            current.append(text.substr(start, i - start));
            const bool whitespace = cp <= 0x20 || cp == 0x3000;  // incl. ideographic space
            if (!whitespace) has_content = true;
        }
    }
    close(false);
    return out;
}

/// Distinct n-grams over a token sequence. A gram is the n-tuple joined with
/// '\x1f' so multi-byte tokens cannot collide.
inline std::set<std::string> ngram_set(const std::vector<std::string>& tokens, std::size_t n) {
    std::set<std::string> grams;
    if (n == 0 || tokens.size() < n) return grams;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
            g.push_back('\x1f');
            g += tokens[i + k];
        }
        grams.insert(std::move(g));
    }
    return grams;
}

/// True when the text contains a halfwidth or fullwidth question mark.
inline bool contains_question_mark(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = detail::decode_utf8(text, i);
        if (cp == '?' || cp == 0xFF1F) return true;
    }
    return false;
}

}  // namespace consult
