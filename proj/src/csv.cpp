#include "coordnet/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace coordnet {

std::optional<std::vector<std::string>> CsvReader::next(std::size_t& lines_consumed) {
    lines_consumed = 0;
    int first = in_.peek();
    if (first == std::istream::traits_type::eof()) return std::nullopt;

    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    lines_consumed = 1;

    for (;;) {
        int ci = in_.get();
        if (ci == std::istream::traits_type::eof()) {
            fields.push_back(std::move(field));
            return fields;
        }
        char c = static_cast<char>(ci);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++lines_consumed;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty()) {
                    in_quotes = true;
                } else {
                    field.push_back(c);  // stray quote mid-field, keep literally
                }
                break;
            case ',':
                fields.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                if (in_.peek() == '\n') in_.get();
                fields.push_back(std::move(field));
                return fields;
            case '\n':
                fields.push_back(std::move(field));
                return fields;
            default:
                field.push_back(c);
        }
    }
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out << ',';
        const std::string& f = fields[i];
        bool needs_quotes = f.find_first_of(",\"\r\n") != std::string::npos;
        if (!needs_quotes) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"') out << "\"\"";
            else out << c;
        }
        out << '"';
    }
    out << '\n';
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_weight(double value) {
    if (std::floor(value) == value && std::abs(value) < 1e15) {
        return std::to_string(static_cast<long long>(value));
    }
    return format_double(value);
}

}  // namespace coordnet
