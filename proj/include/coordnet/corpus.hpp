#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coordnet/post.hpp"

namespace coordnet {

enum class InputFormat { jsonl, csv };

/// Text fields keyword filtering may select.
enum class TextField { message, description, image_text, group_name };

struct ParseResult {
    std::vector<Post> posts;
    std::vector<ParseError> errors;
    CorpusStats stats;
};

/// Parses a post dataset. Well-formed records become Posts in input order;
/// malformed records are collected as ParseErrors with line number and
/// reason. Duplicates are NOT removed here (stats.duplicates_removed = 0).
ParseResult parse_posts(std::istream& source, InputFormat format);

struct DedupResult {
    std::vector<Post> posts;
    std::uint64_t removed = 0;
};

/// Keeps one Post per post_id: the earliest-timestamp occurrence, ties broken
/// by input order. Relative order of survivors is preserved.
DedupResult deduplicate(std::vector<Post> posts);

/// Keeps posts where at least one keyword occurs as a substring of at least
/// one selected field, comparing case-insensitively and diacritic-
/// insensitively ("vacina" matches "Vacinação"). Order preserved.
/// Throws ConfigError when keywords is empty.
std::vector<Post> filter_by_keywords(const std::vector<Post>& posts,
                                     const std::vector<std::string>& keywords,
                                     const std::set<TextField>& fields);

/// Parse + deduplicate, with full CorpusStats (including group count).
ParseResult ingest(std::istream& source, InputFormat format);

// Canonical serialization. JSONL is lossless for every Post field; the CSV
// variant cannot distinguish empty strings from absent fields.
void write_posts_jsonl(std::ostream& out, const std::vector<Post>& posts);
void write_posts_csv(std::ostream& out, const std::vector<Post>& posts);

std::string_view text_field_name(TextField f);
std::optional<TextField> text_field_from_name(std::string_view name);

}  // namespace coordnet
