#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace coordnet {

/// Decodes UTF-8 leniently; malformed byte sequences become U+FFFD.
std::u32string utf8_decode(std::string_view s);

/// Appends one code point as UTF-8.
void utf8_append(char32_t cp, std::string& out);

std::string utf8_encode(const std::u32string& s);

/// Canonicalizes free text for exact-match comparison: compatibility subset
/// (fullwidth forms, ligatures, Unicode spaces), canonical decomposition of
/// precomposed Latin letters, case folding, removal of control and zero-width
/// characters, whitespace runs collapsed, ends trimmed. Punctuation and
/// combining marks are retained, so accented words stay distinct.
/// Returns nullopt when the result is shorter than `min_length` code points.
std::optional<std::string> normalize_text(std::string_view raw, std::size_t min_length);

/// Like normalize_text but additionally strips diacritics (combining marks
/// and a few non-decomposable letters), with no length cutoff. Used for
/// keyword matching where "vacina" must match "Vacinação".
std::string fold_for_match(std::string_view raw);

}  // namespace coordnet
