#pragma once

#include <string>

namespace tti {

/// Quotes a CSV cell when it contains a comma, quote or newline.
inline std::string csv_cell(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace tti
