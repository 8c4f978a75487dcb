#include "coordnet/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "coordnet/csv.hpp"
#include "coordnet/errors.hpp"
#include "coordnet/text.hpp"

namespace coordnet {

using json = nlohmann::json;

std::string_view media_type_name(MediaType t) {
    switch (t) {
        case MediaType::status: return "status";
        case MediaType::link: return "link";
        case MediaType::photo: return "photo";
        case MediaType::video: return "video";
        case MediaType::other: return "other";
    }
    return "other";
}

std::optional<MediaType> media_type_from_name(std::string_view name) {
    if (name == "status") return MediaType::status;
    if (name == "link") return MediaType::link;
    if (name == "photo") return MediaType::photo;
    if (name == "video") return MediaType::video;
    if (name == "other") return MediaType::other;
    return std::nullopt;
}

std::string_view text_field_name(TextField f) {
    switch (f) {
        case TextField::message: return "message";
        case TextField::description: return "description";
        case TextField::image_text: return "image_text";
        case TextField::group_name: return "group_name";
    }
    return "message";
}

std::optional<TextField> text_field_from_name(std::string_view name) {
    if (name == "message") return TextField::message;
    if (name == "description") return TextField::description;
    if (name == "image_text") return TextField::image_text;
    if (name == "group_name") return TextField::group_name;
    return std::nullopt;
}

namespace {

std::optional<std::string> opt_string(const json& rec, const char* field) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw std::runtime_error(std::string(field) + " must be a string or null");
    return it->get<std::string>();
}

Post post_from_json(const json& rec) {
    if (!rec.is_object()) throw std::runtime_error("record is not a JSON object");
    Post p;

    auto id = opt_string(rec, "post_id");
    if (!id || id->empty()) throw std::runtime_error("missing post_id");
    p.post_id = std::move(*id);

    auto gid = opt_string(rec, "group_id");
    if (!gid || gid->empty()) throw std::runtime_error("missing group_id");
    p.group_id = std::move(*gid);

    p.group_name = opt_string(rec, "group_name").value_or("");

    auto ts = rec.find("timestamp");
    if (ts == rec.end() || ts->is_null()) throw std::runtime_error("missing timestamp");
    if (!ts->is_number_integer() && !ts->is_number_unsigned())
        throw std::runtime_error("timestamp must be an integer");
    p.timestamp = ts->get<std::int64_t>();
    if (p.timestamp < 0) throw std::runtime_error("timestamp must be >= 0");

    p.message = opt_string(rec, "message");
    p.description = opt_string(rec, "description");
    p.image_text = opt_string(rec, "image_text");

    if (auto it = rec.find("links"); it != rec.end() && !it->is_null()) {
        if (!it->is_array()) throw std::runtime_error("links must be an array");
        for (const auto& entry : *it) {
            if (!entry.is_string()) throw std::runtime_error("links entries must be strings");
            std::string url = entry.get<std::string>();
            if (url.empty()) throw std::runtime_error("empty link");
            p.links.push_back(std::move(url));
        }
    }

    auto mt = opt_string(rec, "media_type");
    if (!mt) throw std::runtime_error("missing media_type");
    auto media = media_type_from_name(*mt);
    if (!media) throw std::runtime_error("invalid media_type \"" + *mt + "\"");
    p.media_type = *media;

    if (auto it = rec.find("engagement"); it != rec.end() && !it->is_null()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw std::runtime_error("engagement must be an integer or null");
        std::int64_t e = it->get<std::int64_t>();
        if (e < 0) throw std::runtime_error("engagement must be >= 0");
        p.engagement = e;
    }
    return p;
}

void parse_jsonl(std::istream& source, ParseResult& result) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++result.stats.records_read;
        try {
            json rec = json::parse(line);
            result.posts.push_back(post_from_json(rec));
        } catch (const json::parse_error& ex) {
            result.errors.push_back({line_no, std::string("invalid JSON: ") + ex.what()});
        } catch (const std::exception& ex) {
            result.errors.push_back({line_no, ex.what()});
        }
    }
}

// ---- CSV ingestion -------------------------------------------------------

// What a CSV column means once the header is resolved. The *_ct roles come
// from the CrowdTangle export mapping and parse more leniently.
enum class ColumnRole {
    post_id, group_id, group_name, timestamp, message, description, image_text,
    links, media_type, engagement,
    link_ct, media_type_ct, engagement_ct,
    ignored,
};

ColumnRole resolve_header(const std::string& name) {
    static const std::unordered_map<std::string, ColumnRole> table = {
        // canonical names
        {"post_id", ColumnRole::post_id},
        {"group_id", ColumnRole::group_id},
        {"group_name", ColumnRole::group_name},
        {"timestamp", ColumnRole::timestamp},
        {"message", ColumnRole::message},
        {"description", ColumnRole::description},
        {"image_text", ColumnRole::image_text},
        {"links", ColumnRole::links},
        {"media_type", ColumnRole::media_type},
        {"engagement", ColumnRole::engagement},
        // CrowdTangle export headers
        {"URL", ColumnRole::post_id},
        {"Facebook Id", ColumnRole::group_id},
        {"Group Name", ColumnRole::group_name},
        {"Page Name", ColumnRole::group_name},
        {"Post Created", ColumnRole::timestamp},
        {"Message", ColumnRole::message},
        {"Description", ColumnRole::description},
        {"Image Text", ColumnRole::image_text},
        {"Link", ColumnRole::link_ct},
        {"Final Link", ColumnRole::link_ct},
        {"Type", ColumnRole::media_type_ct},
        {"Total Interactions", ColumnRole::engagement_ct},
    };
    auto it = table.find(name);
    return it == table.end() ? ColumnRole::ignored : it->second;
}

MediaType media_type_from_crowdtangle(std::string value) {
    std::transform(value.begin(), value.end(), value.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (value == "status") return MediaType::status;
    if (value == "link") return MediaType::link;
    if (value == "photo" || value == "album") return MediaType::photo;
    if (value.find("video") != std::string::npos || value == "youtube" || value == "vine" ||
        value == "igtv")
        return MediaType::video;
    return MediaType::other;
}

// Accepts integer epoch seconds or "YYYY-MM-DD HH:MM:SS" (optionally with a
// trailing zone token, interpreted as UTC).
std::int64_t parse_timestamp_cell(const std::string& cell) {
    if (cell.empty()) throw std::runtime_error("missing timestamp");
    if (cell.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoll(cell);
    }
    std::tm tm = {};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (std::sscanf(cell.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
        throw std::runtime_error("unparseable timestamp \"" + cell + "\"");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    std::time_t t = timegm(&tm);
    if (t < 0) throw std::runtime_error("timestamp before the epoch");
    return static_cast<std::int64_t>(t);
}

std::int64_t parse_engagement_cell(std::string cell) {
    // CrowdTangle writes thousands separators.
    cell.erase(std::remove(cell.begin(), cell.end(), ','), cell.end());
    if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos)
        throw std::runtime_error("engagement must be a non-negative integer");
    return std::stoll(cell);
}

Post post_from_csv_row(const std::vector<ColumnRole>& roles,
                       const std::vector<std::string>& row) {
    Post p;
    bool have_post_id = false, have_group_id = false, have_timestamp = false,
         have_media = false;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const std::string& cell = row[i];
        switch (roles[i]) {
            case ColumnRole::post_id:
                if (!cell.empty()) { p.post_id = cell; have_post_id = true; }
                break;
            case ColumnRole::group_id:
                if (!cell.empty()) { p.group_id = cell; have_group_id = true; }
                break;
            case ColumnRole::group_name:
                if (p.group_name.empty()) p.group_name = cell;
                break;
            case ColumnRole::timestamp:
                p.timestamp = parse_timestamp_cell(cell);
                have_timestamp = true;
                break;
            case ColumnRole::message:
                if (!cell.empty()) p.message = cell;
                break;
            case ColumnRole::description:
                if (!cell.empty()) p.description = cell;
                break;
            case ColumnRole::image_text:
                if (!cell.empty()) p.image_text = cell;
                break;
            case ColumnRole::links: {
                if (cell.empty()) break;
                std::size_t start = 0;
                while (start <= cell.size()) {
                    std::size_t bar = cell.find('|', start);
                    std::string url = cell.substr(start, bar == std::string::npos
                                                             ? std::string::npos
                                                             : bar - start);
                    if (url.empty()) throw std::runtime_error("empty link");
                    p.links.push_back(std::move(url));
                    if (bar == std::string::npos) break;
                    start = bar + 1;
                }
                break;
            }
            case ColumnRole::link_ct:
                if (!cell.empty() &&
                    std::find(p.links.begin(), p.links.end(), cell) == p.links.end())
                    p.links.push_back(cell);
                break;
            case ColumnRole::media_type: {
                if (cell.empty()) throw std::runtime_error("missing media_type");
                auto m = media_type_from_name(cell);
                if (!m) throw std::runtime_error("invalid media_type \"" + cell + "\"");
                p.media_type = *m;
                have_media = true;
                break;
            }
            case ColumnRole::media_type_ct:
                if (cell.empty()) throw std::runtime_error("missing media_type");
                p.media_type = media_type_from_crowdtangle(cell);
                have_media = true;
                break;
            case ColumnRole::engagement:
                if (!cell.empty()) p.engagement = parse_engagement_cell(cell);
                break;
            case ColumnRole::engagement_ct:
                if (!cell.empty()) p.engagement = parse_engagement_cell(cell);
                break;
            case ColumnRole::ignored:
                break;
        }
    }
    if (!have_post_id) throw std::runtime_error("missing post_id");
    if (!have_group_id) throw std::runtime_error("missing group_id");
    if (!have_timestamp) throw std::runtime_error("missing timestamp");
    if (!have_media) throw std::runtime_error("missing media_type");
    if (p.timestamp < 0) throw std::runtime_error("timestamp must be >= 0");
    return p;
}

void parse_csv(std::istream& source, ParseResult& result) {
    CsvReader reader(source);
    std::size_t consumed = 0;
    std::size_t line_no = 0;

    auto header = reader.next(consumed);
    line_no += consumed;
    if (!header) return;  // empty input: no header, no records

    std::vector<ColumnRole> roles;
    roles.reserve(header->size());
    for (const auto& name : *header) roles.push_back(resolve_header(name));

    for (;;) {
        auto row = reader.next(consumed);
        if (!row) break;
        std::size_t row_line = line_no + 1;
        line_no += consumed;
        if (row->size() == 1 && (*row)[0].empty()) continue;  // blank line
        ++result.stats.records_read;
        if (row->size() != roles.size()) {
            result.errors.push_back(
                {row_line, "expected " + std::to_string(roles.size()) + " columns, got " +
                               std::to_string(row->size())});
            continue;
        }
        try {
            result.posts.push_back(post_from_csv_row(roles, *row));
        } catch (const std::exception& ex) {
            result.errors.push_back({row_line, ex.what()});
        }
    }
}

std::uint64_t count_groups(const std::vector<Post>& posts) {
    std::unordered_set<std::string> groups;
    for (const auto& p : posts) groups.insert(p.group_id);
    return groups.size();
}

}  // namespace

ParseResult parse_posts(std::istream& source, InputFormat format) {
    if (!source.good() && !source.eof()) throw IoError("input stream is not readable");
    ParseResult result;
    switch (format) {
        case InputFormat::jsonl: parse_jsonl(source, result); break;
        case InputFormat::csv: parse_csv(source, result); break;
    }
    result.stats.parse_failures = result.errors.size();
    result.stats.unique_posts = result.posts.size();
    result.stats.groups = count_groups(result.posts);
    return result;
}

DedupResult deduplicate(std::vector<Post> posts) {
    // Winner per id = (min timestamp, then min input index).
    std::unordered_map<std::string, std::size_t> winner;
    winner.reserve(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        auto [it, inserted] = winner.emplace(posts[i].post_id, i);
        if (!inserted && posts[i].timestamp < posts[it->second].timestamp) {
            it->second = i;
        }
    }
    DedupResult out;
    out.posts.reserve(winner.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (winner[posts[i].post_id] == i) out.posts.push_back(std::move(posts[i]));
    }
    out.removed = posts.size() - out.posts.size();
    return out;
}

std::vector<Post> filter_by_keywords(const std::vector<Post>& posts,
                                     const std::vector<std::string>& keywords,
                                     const std::set<TextField>& fields) {
    if (keywords.empty()) throw ConfigError("keyword filter requires at least one keyword");
    std::vector<std::string> folded_keywords;
    folded_keywords.reserve(keywords.size());
    for (const auto& k : keywords) folded_keywords.push_back(fold_for_match(k));

    auto field_value = [](const Post& p, TextField f) -> const std::string* {
        switch (f) {
            case TextField::message: return p.message ? &*p.message : nullptr;
            case TextField::description: return p.description ? &*p.description : nullptr;
            case TextField::image_text: return p.image_text ? &*p.image_text : nullptr;
            case TextField::group_name: return &p.group_name;
        }
        return nullptr;
    };

    std::vector<Post> kept;
    for (const auto& p : posts) {
        bool match = false;
        for (TextField f : fields) {
            const std::string* raw = field_value(p, f);
            if (raw == nullptr || raw->empty()) continue;
            std::string folded = fold_for_match(*raw);
            for (const auto& kw : folded_keywords) {
                if (!kw.empty() && folded.find(kw) != std::string::npos) {
                    match = true;
                    break;
                }
            }
            if (match) break;
        }
        if (match) kept.push_back(p);
    }
    return kept;
}

ParseResult ingest(std::istream& source, InputFormat format) {
    ParseResult result = parse_posts(source, format);
    DedupResult dedup = deduplicate(std::move(result.posts));
    result.posts = std::move(dedup.posts);
    result.stats.duplicates_removed = dedup.removed;
    result.stats.unique_posts = result.posts.size();
    result.stats.groups = count_groups(result.posts);
    return result;
}

void write_posts_jsonl(std::ostream& out, const std::vector<Post>& posts) {
    for (const auto& p : posts) {
        json rec;
        rec["post_id"] = p.post_id;
        rec["group_id"] = p.group_id;
        rec["group_name"] = p.group_name;
        rec["timestamp"] = p.timestamp;
        rec["message"] = p.message ? json(*p.message) : json(nullptr);
        rec["description"] = p.description ? json(*p.description) : json(nullptr);
        rec["image_text"] = p.image_text ? json(*p.image_text) : json(nullptr);
        rec["links"] = p.links;
        rec["media_type"] = std::string(media_type_name(p.media_type));
        rec["engagement"] = p.engagement ? json(*p.engagement) : json(nullptr);
        out << rec.dump() << '\n';
    }
}

void write_posts_csv(std::ostream& out, const std::vector<Post>& posts) {
    write_csv_row(out, {"post_id", "group_id", "group_name", "timestamp", "message",
                        "description", "image_text", "links", "media_type", "engagement"});
    for (const auto& p : posts) {
        std::string links;
        for (std::size_t i = 0; i < p.links.size(); ++i) {
            if (i > 0) links += '|';
            links += p.links[i];
        }
        write_csv_row(out, {p.post_id, p.group_id, p.group_name, std::to_string(p.timestamp),
                            p.message.value_or(""), p.description.value_or(""),
                            p.image_text.value_or(""), links,
                            std::string(media_type_name(p.media_type)),
                            p.engagement ? std::to_string(*p.engagement) : ""});
    }
}

}  // namespace coordnet
