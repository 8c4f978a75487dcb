#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coordnet {

/// RFC 4180 style CSV reader: quoted fields, escaped quotes, embedded commas
/// and newlines. Rows are returned raw; interpretation is the caller's job.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    /// Reads one record. Returns nullopt at end of input. `lines_consumed`
    /// reports how many physical lines the record spanned.
    std::optional<std::vector<std::string>> next(std::size_t& lines_consumed);

private:
    std::istream& in_;
};

/// Writes one CSV record, quoting fields that need it.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal string that round-trips the value exactly.
std::string format_double(double value);

/// Like format_double, but integral values print without a decimal point.
std::string format_weight(double value);

}  // namespace coordnet
