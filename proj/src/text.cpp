#include "coordnet/text.hpp"

#include <algorithm>
#include <iterator>

namespace coordnet {

namespace {

#include "unicode_data.inc"

constexpr char32_t kReplacement = 0xFFFD;

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Whitespace (mapped to a plain space): ASCII whitespace plus the Unicode
// space separators, NEL, and line/paragraph separators.
bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
        case 0x0085: case 0x00A0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Dropped entirely: zero-width and invisible format characters.
bool is_ignorable_cp(char32_t cp) {
    switch (cp) {
        case 0x00AD:                                        // soft hyphen
        case 0x200B: case 0x200C: case 0x200D: case 0x200E: case 0x200F:
        case 0x2060: case 0x2061: case 0x2062: case 0x2063: case 0x2064:
        case 0xFEFF:
            return true;
        default:
            return false;
    }
}

bool is_control_cp(char32_t cp) {
    return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F);
}

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

char32_t fold_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp < 0x80) return cp;
    for (const auto& e : kFoldTable) {
        if (e.cp == cp) return e.folded;
    }
    return cp;
}

const DecompEntry* find_decomposition(char32_t cp) {
    for (const auto& e : kDecompTable) {
        if (e.cp == cp) return &e;
    }
    return nullptr;
}

// Non-decomposable Latin letters mapped to unaccented bases for keyword
// matching only; normalize_text leaves them alone.
void append_match_base(char32_t cp, std::u32string& out) {
    switch (cp) {
        case 0x00DF: out += U"ss"; return;  // ß
        case 0x00E6: out += U"ae"; return;  // æ
        case 0x00F0: out += U"d"; return;   // ð
        case 0x00F8: out += U"o"; return;   // ø
        case 0x0111: out += U"d"; return;   // đ
        case 0x0127: out += U"h"; return;   // ħ
        case 0x0131: out += U"i"; return;   // ı
        case 0x0142: out += U"l"; return;   // ł
        case 0x0153: out += U"oe"; return;  // œ
        case 0x0167: out += U"t"; return;   // ŧ
        default: out.push_back(cp); return;
    }
}

// Compatibility subset: fullwidth ASCII and Latin ligatures. Returns false
// when cp has no mapping.
bool compat_expand(char32_t cp, std::u32string& out) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) {
        out.push_back(cp - 0xFEE0);
        return true;
    }
    for (const auto& e : kLigatureTable) {
        if (e.cp == cp) {
            out.push_back(e.a);
            if (e.b != 0) out.push_back(e.b);
            if (e.c != 0) out.push_back(e.c);
            return true;
        }
    }
    return false;
}

// Shared pipeline: decode, compat subset, decompose, fold, drop ignorables,
// collapse whitespace. With strip_marks, combining marks are dropped and a
// few unaccentable letters mapped to bases.
std::u32string canonical_pipeline(std::string_view raw, bool strip_marks) {
    std::u32string decoded = utf8_decode(raw);

    std::u32string expanded;
    expanded.reserve(decoded.size());
    for (char32_t cp : decoded) {
        if (!compat_expand(cp, expanded)) expanded.push_back(cp);
    }

    std::u32string out;
    out.reserve(expanded.size());
    bool pending_space = false;
    auto emit = [&](char32_t cp) {
        if (pending_space && !out.empty()) out.push_back(U' ');
        pending_space = false;
        if (strip_marks) {
            append_match_base(cp, out);
        } else {
            out.push_back(cp);
        }
    };

    for (char32_t cp : expanded) {
        if (is_ignorable_cp(cp)) continue;
        if (is_space_cp(cp)) {
            pending_space = true;
            continue;
        }
        if (is_control_cp(cp)) continue;
        if (const DecompEntry* d = find_decomposition(cp)) {
            emit(fold_cp(d->base));
            if (!strip_marks) {
                if (d->mark1 != 0) out.push_back(d->mark1);
                if (d->mark2 != 0) out.push_back(d->mark2);
            }
            continue;
        }
        if (strip_marks && is_combining_mark(cp)) continue;
        emit(fold_cp(cp));
    }
    return out;
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            i += 1;
            continue;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min_cp = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2; cp = b0 & 0x1F; min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3; cp = b0 & 0x0F; min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4; cp = b0 & 0x07; min_cp = 0x10000;
        } else {
            out.push_back(kReplacement);
            i += 1;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            i += 1;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(s[i + k]);
            if (!is_continuation(b)) { ok = false; break; }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            i += 1;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void utf8_append(char32_t cp, std::string& out) {
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

std::string utf8_encode(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) utf8_append(cp, out);
    return out;
}

std::optional<std::string> normalize_text(std::string_view raw, std::size_t min_length) {
    std::u32string canon = canonical_pipeline(raw, /*strip_marks=*/false);
    if (canon.size() < min_length) return std::nullopt;
    return utf8_encode(canon);
}

std::string fold_for_match(std::string_view raw) {
    return utf8_encode(canonical_pipeline(raw, /*strip_marks=*/true));
}

}  // namespace coordnet
