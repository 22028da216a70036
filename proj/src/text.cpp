#include "sentinel/text.hpp"

#include <cstdint>

namespace sentinel::text {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Decodes one code point starting at text[pos]; advances pos. Malformed
// sequences decode byte-by-byte as U+FFFD.
char32_t decode(std::string_view text, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + extra >= text.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (std::size_t i = 1; i <= extra; ++i) {
        const auto byte = static_cast<unsigned char>(text[pos + i]);
        if ((byte & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (byte & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

bool is_unicode_space(char32_t cp) {
    return cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
           cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_separator(char32_t cp) {
    if (cp < 0x80) {
        const auto c = static_cast<unsigned char>(cp);
        if (is_ascii_space(c)) {
            return true;
        }
        // ASCII punctuation and symbols.
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
               (c >= 0x7B && c <= 0x7E) || c < 0x20 || c == 0x7F;
    }
    if (is_unicode_space(cp)) {
        return true;
    }
    // Latin-1 punctuation, general punctuation, CJK punctuation.
    return (cp >= 0xA1 && cp <= 0xBF && cp != 0xAA && cp != 0xB5 && cp != 0xBA) || cp == 0xD7 ||
           cp == 0xF7 || (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x80 && cp <= 0x9F);
}

bool is_control(std::string_view s, std::size_t pos, std::size_t& width) {
    const auto c = static_cast<unsigned char>(s[pos]);
    width = 1;
    if (c < 0x20 || c == 0x7F) {
        return true;
    }
    // C1 controls U+0080..U+009F are encoded as C2 80..C2 9F.
    if (c == 0xC2 && pos + 1 < s.size()) {
        const auto next = static_cast<unsigned char>(s[pos + 1]);
        if (next >= 0x80 && next <= 0x9F) {
            width = 2;
            return true;
        }
    }
    return false;
}

}  // namespace

std::string normalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (std::size_t pos = 0; pos < raw.size();) {
        std::size_t width = 1;
        const auto c = static_cast<unsigned char>(raw[pos]);
        if (is_ascii_space(c) || is_control(raw, pos, width)) {
            pending_space = true;
            pos += width;
            continue;
        }
        if (pending_space && !out.empty()) {
            out.push_back(' ');
        }
        pending_space = false;
        out.push_back(raw[pos]);
        ++pos;
    }
    return out;
}

std::vector<std::string> split_composite(std::string_view raw) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= raw.size(); ++i) {
        if (i == raw.size() || raw[i] == ';' || raw[i] == '|' || raw[i] == '\n') {
            auto piece = normalize(raw.substr(start, i - start));
            if (!piece.empty()) {
                pieces.push_back(std::move(piece));
            }
            start = i + 1;
        }
    }
    return pieces;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t begin = pos;
        const char32_t cp = decode(text, pos);
        if (is_separator(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        if (cp >= 'A' && cp <= 'Z') {
            current.push_back(static_cast<char>(cp - 'A' + 'a'));
        } else {
            current.append(text.substr(begin, pos - begin));
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (const char ch : text) {
        if (is_ascii_space(static_cast<unsigned char>(ch))) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::size_t codepoint_count(std::string_view text) {
    std::size_t count = 0;
    for (const char ch : text) {
        if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) {
            ++count;
        }
    }
    return count;
}

}  // namespace sentinel::text
