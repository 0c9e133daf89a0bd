#include "citegraph/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <stdexcept>

namespace citegraph {

namespace {

// Latin-1 Supplement and Latin Extended-A codepoints folded to ASCII.
// Returns empty string for codepoints with no sensible ASCII equivalent.
std::string fold_codepoint(uint32_t cp) {
    if (cp < 0x80) return std::string(1, static_cast<char>(cp));
    struct Range {
        uint32_t lo, hi;
        const char* repl;
    };
    static const Range kRanges[] = {
        {0xC0, 0xC5, "a"}, {0xC6, 0xC6, "ae"}, {0xC7, 0xC7, "c"},  {0xC8, 0xCB, "e"},
        {0xCC, 0xCF, "i"}, {0xD0, 0xD0, "d"},  {0xD1, 0xD1, "n"},  {0xD2, 0xD6, "o"},
        {0xD8, 0xD8, "o"}, {0xD9, 0xDC, "u"},  {0xDD, 0xDD, "y"},  {0xDE, 0xDE, "th"},
        {0xDF, 0xDF, "ss"},
        {0xE0, 0xE5, "a"}, {0xE6, 0xE6, "ae"}, {0xE7, 0xE7, "c"},  {0xE8, 0xEB, "e"},
        {0xEC, 0xEF, "i"}, {0xF0, 0xF0, "d"},  {0xF1, 0xF1, "n"},  {0xF2, 0xF6, "o"},
        {0xF8, 0xF8, "o"}, {0xF9, 0xFC, "u"},  {0xFD, 0xFF, "y"},
        {0x100, 0x105, "a"}, {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"}, {0x112, 0x11B, "e"},
        {0x11C, 0x123, "g"}, {0x124, 0x127, "h"}, {0x128, 0x131, "i"}, {0x132, 0x133, "ij"},
        {0x134, 0x135, "j"}, {0x136, 0x138, "k"}, {0x139, 0x142, "l"}, {0x143, 0x14B, "n"},
        {0x14C, 0x151, "o"}, {0x152, 0x153, "oe"}, {0x154, 0x159, "r"}, {0x15A, 0x161, "s"},
        {0x162, 0x167, "t"}, {0x168, 0x173, "u"}, {0x174, 0x175, "w"}, {0x176, 0x178, "y"},
        {0x179, 0x17E, "z"},
    };
    for (const auto& r : kRanges) {
        if (cp >= r.lo && cp <= r.hi) return r.repl;
    }
    return {};
}

// Decodes one UTF-8 codepoint starting at i; advances i. Invalid bytes are
// consumed one at a time and reported as U+FFFD.
uint32_t next_codepoint(const std::string& s, size_t& i) {
    const auto byte = [&](size_t k) { return static_cast<uint8_t>(s[k]); };
    uint8_t b0 = byte(i);
    size_t len = 1;
    uint32_t cp = 0xFFFD;
    if (b0 < 0x80) {
        cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < s.size()) {
        cp = (b0 & 0x1F) << 6 | (byte(i + 1) & 0x3F);
        len = 2;
    } else if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
        cp = (b0 & 0x0F) << 12 | (byte(i + 1) & 0x3F) << 6 | (byte(i + 2) & 0x3F);
        len = 3;
    } else if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
        cp = (b0 & 0x07) << 18 | (byte(i + 1) & 0x3F) << 12 | (byte(i + 2) & 0x3F) << 6 |
             (byte(i + 3) & 0x3F);
        len = 4;
    }
    i += len;
    return cp;
}

}  // namespace

std::string normalize_title(const std::string& title) {
    std::string folded;
    folded.reserve(title.size());
    size_t i = 0;
    while (i < title.size()) {
        uint32_t cp = next_codepoint(title, i);
        folded += fold_codepoint(cp);
    }
    std::string out;
    out.reserve(folded.size());
    bool pending_space = false;
    for (char c : folded) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(u));
        } else {
            pending_space = true;  // punctuation and whitespace both separate words
        }
    }
    return out;
}

std::string title_key(const std::string& title, std::optional<int> year) {
    std::string norm = normalize_title(title);
    if (norm.empty()) return {};
    for (char& c : norm) {
        if (c == ' ') c = '_';
    }
    norm += '_';
    norm += year ? std::to_string(*year) : "noyear";
    return norm;
}

std::string sanitize_for_filename(const std::string& id) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '.' || c == '_' || c == '-') {
            out += c;
        } else {
            out += '%';
            out += hex[u >> 4];
            out += hex[u & 0xF];
        }
    }
    return out;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf.data(), res.ptr);
}

std::string csv_escape(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace citegraph
