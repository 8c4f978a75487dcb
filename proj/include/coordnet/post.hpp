#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coordnet {

enum class MediaType { status, link, photo, video, other };

std::string_view media_type_name(MediaType t);
std::optional<MediaType> media_type_from_name(std::string_view name);

/// One social-media post inside a group.
struct Post {
    std::string post_id;
    std::string group_id;
    std::string group_name;
    std::int64_t timestamp = 0;  // seconds since Unix epoch, UTC
    std::optional<std::string> message;
    std::optional<std::string> description;  // text accompanying a shared URL/image thumbnail
    std::optional<std::string> image_text;   // pre-extracted OCR text
    std::vector<std::string> links;
    MediaType media_type = MediaType::other;
    std::optional<std::int64_t> engagement;

    bool operator==(const Post&) const = default;
};

struct ParseError {
    std::size_t line = 0;
    std::string reason;

    bool operator==(const ParseError&) const = default;
};

/// Ingestion counters. Invariant: records_read = parse_failures +
/// duplicates_removed + unique_posts.
struct CorpusStats {
    std::uint64_t records_read = 0;
    std::uint64_t parse_failures = 0;
    std::uint64_t duplicates_removed = 0;
    std::uint64_t unique_posts = 0;
    std::uint64_t groups = 0;

    bool operator==(const CorpusStats&) const = default;
};

}  // namespace coordnet
