#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hgchain::io {

namespace fs = std::filesystem;

/// File name -> contents.
using FileSet = std::map<std::string, std::string>;

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view contents);

std::string sha256_hex(std::string_view data);

std::string_view trim(std::string_view text) noexcept;
std::vector<std::string> split(std::string_view text, char separator);
std::vector<std::string> split_whitespace(std::string_view text);

/// Whole-string parse; rejects trailing characters, empty input and non-finite results.
std::optional<double> parse_double(std::string_view text) noexcept;
std::optional<long long> parse_integer(std::string_view text) noexcept;

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

struct ParseIssue
{
    int line = 0;
    std::string message;
};

/// CSV with a leading "# schema: <name> v<version>" line, a header row and comma separated
/// rows. Other lines starting with '#' and blank lines are ignored. Fields are not quoted.
struct CsvTable
{
    std::string schema;
    int version = 0;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines; // 1-based source line of each row
    std::vector<ParseIssue> issues;

    std::optional<std::size_t> column(std::string_view name) const noexcept;
};

CsvTable parse_csv(std::string_view text);

/// Splits a column header such as "capacity[MW]" into name and unit ("" when absent).
std::pair<std::string, std::string> split_unit(std::string_view header);

struct KeyValue
{
    int line = 0;
    std::string key;
    std::string value;
};

/// Lines of the form "key <separator> value"; '#' starts a comment, blank lines are skipped.
/// Lines without the separator are reported as issues.
std::vector<KeyValue> parse_key_values(std::string_view text, char separator, std::vector<ParseIssue>& issues);

}
