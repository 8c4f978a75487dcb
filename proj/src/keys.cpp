#include "coordnet/keys.hpp"

#include <algorithm>
#include <cctype>

#include "coordnet/text.hpp"

namespace coordnet {

std::string_view key_kind_name(ContentKey::Kind kind) {
    switch (kind) {
        case ContentKey::Kind::message: return "message";
        case ContentKey::Kind::description: return "description";
        case ContentKey::Kind::image_text: return "image_text";
        case ContentKey::Kind::url: return "url";
    }
    return "message";
}

std::optional<ContentKey::Kind> key_kind_from_name(std::string_view name) {
    if (name == "message") return ContentKey::Kind::message;
    if (name == "description") return ContentKey::Kind::description;
    if (name == "image_text") return ContentKey::Kind::image_text;
    if (name == "url") return ContentKey::Kind::url;
    return std::nullopt;
}

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '-' || c == '.';
    });
}

// name matches a tracking entry; entries ending '*' are prefixes, comparison
// is case-insensitive. Entries are pre-lowercased by the caller.
bool is_tracking_param(const std::string& lower_name,
                       const std::vector<std::string>& lower_entries) {
    for (const auto& entry : lower_entries) {
        if (!entry.empty() && entry.back() == '*') {
            if (lower_name.compare(0, entry.size() - 1, entry, 0, entry.size() - 1) == 0)
                return true;
        } else if (lower_name == entry) {
            return true;
        }
    }
    return false;
}

std::string filter_query(std::string_view query, const std::vector<std::string>& lower_entries) {
    std::string out;
    std::size_t start = 0;
    while (start <= query.size()) {
        std::size_t amp = query.find('&', start);
        std::string_view param = query.substr(
            start, amp == std::string_view::npos ? std::string_view::npos : amp - start);
        if (!param.empty()) {
            std::size_t eq = param.find('=');
            std::string name = ascii_lower(eq == std::string_view::npos ? param : param.substr(0, eq));
            if (!is_tracking_param(name, lower_entries)) {
                if (!out.empty()) out += '&';
                out += param;
            }
        }
        if (amp == std::string_view::npos) break;
        start = amp + 1;
    }
    return out;
}

}  // namespace

std::optional<std::string> canonicalize_url(std::string_view raw,
                                            const NormalizationConfig& config) {
    std::size_t scheme_end = raw.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    std::string scheme = ascii_lower(raw.substr(0, scheme_end));
    if (!valid_scheme(scheme)) return std::nullopt;

    std::string_view rest = raw.substr(scheme_end + 3);
    std::size_t authority_end = rest.find_first_of("/?#");
    std::string_view authority =
        authority_end == std::string_view::npos ? rest : rest.substr(0, authority_end);
    std::string_view tail =
        authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    // userinfo@ is preserved as written; only host and port are normalized
    std::string_view userinfo;
    if (std::size_t at = authority.rfind('@'); at != std::string_view::npos) {
        userinfo = authority.substr(0, at + 1);
        authority = authority.substr(at + 1);
    }
    std::string host;
    std::string port;
    if (std::size_t colon = authority.rfind(':'); colon != std::string_view::npos) {
        host = ascii_lower(authority.substr(0, colon));
        port = std::string(authority.substr(colon + 1));
        if (!port.empty() &&
            port.find_first_not_of("0123456789") != std::string::npos)
            return std::nullopt;
    } else {
        host = ascii_lower(authority);
    }
    if (host.empty() || host.find_first_of(" \t\r\n") != std::string::npos) return std::nullopt;

    if ((scheme == "http" && port == "80") || (scheme == "https" && port == "443")) port.clear();

    std::string_view path = tail;
    std::string_view query;
    std::string_view fragment;
    if (std::size_t hash = path.find('#'); hash != std::string_view::npos) {
        fragment = path.substr(hash + 1);
        path = path.substr(0, hash);
    }
    if (std::size_t q = path.find('?'); q != std::string_view::npos) {
        query = path.substr(q + 1);
        path = path.substr(0, q);
    }
    if (path.find_first_of(" \t\r\n") != std::string_view::npos ||
        query.find_first_of(" \t\r\n") != std::string_view::npos ||
        fragment.find_first_of(" \t\r\n") != std::string_view::npos)
        return std::nullopt;

    std::string canon_path(path.empty() ? "/" : path);
    while (canon_path.size() > 1 && canon_path.back() == '/') canon_path.pop_back();

    std::vector<std::string> lower_entries;
    lower_entries.reserve(config.tracking_params.size());
    for (const auto& e : config.tracking_params) lower_entries.push_back(ascii_lower(e));
    std::string canon_query = filter_query(query, lower_entries);

    std::string out = scheme + "://";
    out += userinfo;
    out += host;
    if (!port.empty()) {
        out += ':';
        out += port;
    }
    out += canon_path;
    if (!canon_query.empty()) {
        out += '?';
        out += canon_query;
    }
    if (!config.strip_fragment && !fragment.empty()) {
        out += '#';
        out += fragment;
    }
    return out;
}

std::vector<ContentKey> extract_keys(const Post& post, const NormalizationConfig& config) {
    std::vector<ContentKey> keys;

    auto add_text = [&](ContentKey::Kind kind, const std::optional<std::string>& raw) {
        if (!raw) return;
        if (auto value = normalize_text(*raw, config.min_text_length))
            keys.push_back({kind, std::move(*value)});
    };
    add_text(ContentKey::Kind::message, post.message);
    add_text(ContentKey::Kind::description, post.description);
    add_text(ContentKey::Kind::image_text, post.image_text);

    for (const auto& link : post.links) {
        if (auto value = canonicalize_url(link, config))
            keys.push_back({ContentKey::Kind::url, std::move(*value)});
    }

    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

}  // namespace coordnet
