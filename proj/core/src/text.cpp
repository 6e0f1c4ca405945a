#include "counterfair/text.hpp"

#include <cctype>

namespace counterfair {

namespace {

bool ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool ascii_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<std::string> normalize_and_tokenize(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\'' && i > 0 && i + 1 < text.size() && ascii_letter(text[i - 1]) &&
            ascii_letter(text[i + 1])) {
            cleaned.push_back('\'');
        } else if (ascii_punct(c)) {
            cleaned.push_back(' ');
        } else {
            cleaned.push_back(ascii_lower(c));
        }
    }

    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < cleaned.size()) {
        while (i < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
        std::size_t start = i;
        while (i < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
        if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
    }
    return tokens;
}

std::size_t word_count(std::string_view text) {
    return normalize_and_tokenize(text).size();
}

std::vector<std::string> raw_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) break;
        std::string_view word = text.substr(start, i - start);
        // Trim punctuation from both ends; inner characters stay.
        std::size_t b = 0, e = word.size();
        while (b < e && ascii_punct(word[b])) ++b;
        while (e > b && ascii_punct(word[e - 1])) --e;
        if (e > b) {
            std::string t;
            t.reserve(e - b);
            for (std::size_t k = b; k < e; ++k) t.push_back(ascii_lower(word[k]));
            tokens.push_back(std::move(t));
        }
    }
    return tokens;
}

bool is_blank(std::string_view text) {
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace counterfair
