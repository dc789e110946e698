#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace queryrec {

/// Lowercases and splits on any run of non-alphanumeric characters.
/// Byte-wise ASCII classification, independent of the global locale, so the
/// same input tokenizes identically on every machine.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

} // namespace queryrec
