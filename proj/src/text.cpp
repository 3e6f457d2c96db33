#include "skeetrl/text.hpp"

#include <algorithm>
#include <cctype>

namespace skeetrl {

std::vector<char32_t> utf8_scalars(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        char32_t cp = 0xFFFD;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + len > text.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::size_t scalar_count(std::string_view text) {
    return utf8_scalars(text).size();
}

std::vector<std::size_t> utf8_offsets(std::string_view text) {
    std::vector<std::size_t> offs;
    offs.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        offs.push_back(i);
        const unsigned char b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if ((b0 & 0xE0) == 0xC0) len = 2;
        else if ((b0 & 0xF0) == 0xE0) len = 3;
        else if ((b0 & 0xF8) == 0xF0) len = 4;
        if (i + len > text.size()) len = 1;
        i += len;
    }
    offs.push_back(text.size());
    return offs;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](char c) { return is_ascii_space(c); });
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_ascii_space(text[j])) ++j;
        if (j > i) toks.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return toks;
}

std::string strip_urls(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const std::string_view rest = text.substr(i);
        if (rest.rfind("http://", 0) == 0 || rest.rfind("https://", 0) == 0) {
            while (i < text.size() && !is_ascii_space(text[i])) ++i;
            continue;
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    const std::string h = ascii_lower(haystack);
    const std::string n = ascii_lower(needle);
    return h.find(n) != std::string::npos;
}

std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) {
    // FNV-1a, offset basis perturbed by the seed so distinct seeds give
    // unrelated bucketings.
    std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string truncate_words(std::string_view text, std::size_t max_scalars, bool* truncated) {
    if (truncated) *truncated = false;
    const std::vector<std::size_t> offs = utf8_offsets(text);
    const std::size_t n = offs.size() - 1;
    if (n <= max_scalars) return std::string(text);
    if (truncated) *truncated = true;
    // Hard cap at max_scalars scalars, then back up to the last whitespace.
    std::size_t cut = max_scalars;
    std::size_t ws = 0;
    bool found = false;
    for (std::size_t k = 0; k < cut; ++k) {
        if (is_ascii_space(text[offs[k]])) {
            ws = k;
            found = true;
        }
    }
    if (found) cut = ws;
    std::string out(text.substr(0, offs[cut]));
    while (!out.empty() && is_ascii_space(out.back())) out.pop_back();
    return out;
}

}  // namespace skeetrl
