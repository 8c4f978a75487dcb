#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coordnet/post.hpp"

namespace coordnet {

// A normalized piece of content that can recur across posts. Two posts share
// a key when normalization maps the relevant field to the same value.
struct ContentKey {
    enum class Kind { message, description, image_text, url };

    Kind kind = Kind::message;
    std::string value;

    friend bool operator==(const ContentKey&, const ContentKey&) = default;
    friend bool operator<(const ContentKey& a, const ContentKey& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.value < b.value;
    }
};

std::string_view key_kind_name(ContentKey::Kind kind);
std::optional<ContentKey::Kind> key_kind_from_name(std::string_view name);

struct NormalizationConfig {
    // Text fields normalizing to fewer code points than this yield no key.
    std::size_t min_text_length = 15;

    // Query parameters dropped during URL canonicalization. A trailing '*'
    // matches any parameter with that prefix. Comparison is case-insensitive.
    std::vector<std::string> tracking_params = {"utm_*", "fbclid", "gclid"};

    bool strip_fragment = true;
};

// Canonical form of a URL, or nullopt when the input does not look like an
// absolute http(s)-style URL. Idempotent: canonicalizing a canonical URL
// returns it unchanged.
std::optional<std::string> canonicalize_url(std::string_view raw,
                                            const NormalizationConfig& config);

// All content keys for one post: at most one key per text kind, plus one url
// key per distinct canonical link. Result is sorted and duplicate-free.
std::vector<ContentKey> extract_keys(const Post& post, const NormalizationConfig& config);

}  // namespace coordnet
