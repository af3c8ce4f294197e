#include "hgchain/io.h"
#include "hgchain/error.h"

#include <array>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <openssl/evp.h>
#include <sstream>

namespace hgchain::io {

std::string read_text_file(const fs::path& path)
{
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw RuntimeError("Failed to open '{}'", path.string());
    }
    std::ostringstream contents;
    contents << stream.rdbuf();
    return contents.str();
}

void write_text_file(const fs::path& path, std::string_view contents)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) {
        throw RuntimeError("Failed to create '{}'", path.string());
    }
    stream.write(contents.data(), std::streamsize(contents.size()));
    if (!stream) {
        throw RuntimeError("Failed to write '{}'", path.string());
    }
}

std::string sha256_hex(std::string_view data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;

    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw RuntimeError("SHA-256 computation failed");
    }

    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string_view trim(std::string_view text) noexcept
{
    constexpr std::string_view whitespace = " \t\r\n";
    const auto first                      = text.find_first_not_of(whitespace);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(whitespace);
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char separator)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(separator, start);
        parts.emplace_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::vector<std::string> split_whitespace(std::string_view text)
{
    std::vector<std::string> parts;
    std::istringstream stream{std::string(text)};
    std::string token;
    while (stream >> token) {
        parts.push_back(token);
    }
    return parts;
}

std::optional<double> parse_double(std::string_view text) noexcept
{
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }

    double value     = 0.0;
    const auto* last = text.data() + text.size();
    auto [ptr, ec]   = std::from_chars(text.data(), last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view text) noexcept
{
    text = trim(text);
    long long value  = 0;
    const auto* last = text.data() + text.size();
    auto [ptr, ec]   = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
        return std::nullopt;
    }
    return value;
}

std::string format_number(double value)
{
    if (value == 0.0) {
        return "0"; // also folds -0
    }
    return fmt::format("{}", value);
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const noexcept
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::istringstream stream{std::string(text)};
    std::string line;
    int lineNumber     = 0;
    bool sawSchema     = false;
    bool sawHeader     = false;

    while (std::getline(stream, line)) {
        ++lineNumber;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }

        if (content.front() == '#') {
            if (!sawSchema && !sawHeader) {
                auto body = trim(content.substr(1));
                if (body.starts_with("schema:")) {
                    auto parts = split_whitespace(body.substr(7));
                    if (parts.size() == 2 && parts[1].size() > 1 && parts[1][0] == 'v') {
                        table.schema = parts[0];
                        if (auto version = parse_integer(std::string_view(parts[1]).substr(1)); version.has_value()) {
                            table.version = int(*version);
                            sawSchema     = true;
                            continue;
                        }
                    }
                    table.issues.push_back({lineNumber, fmt::format("malformed schema line '{}'", content)});
                    sawSchema = true;
                }
            }
            continue;
        }

        if (!sawSchema) {
            table.issues.push_back({lineNumber, "missing '# schema: <name> v<version>' line before the header"});
            sawSchema = true;
        }

        auto fields = split(content, ',');
        if (!sawHeader) {
            table.header = std::move(fields);
            sawHeader    = true;
            continue;
        }

        if (fields.size() != table.header.size()) {
            table.issues.push_back({lineNumber, fmt::format("expected {} fields, found {}", table.header.size(), fields.size())});
            continue;
        }
        table.rows.push_back(std::move(fields));
        table.row_lines.push_back(lineNumber);
    }

    if (!sawHeader) {
        table.issues.push_back({lineNumber, "no header row"});
    }
    return table;
}

std::pair<std::string, std::string> split_unit(std::string_view header)
{
    const auto open = header.find('[');
    if (open == std::string_view::npos || header.back() != ']') {
        return {std::string(header), ""};
    }
    return {std::string(header.substr(0, open)), std::string(header.substr(open + 1, header.size() - open - 2))};
}

std::vector<KeyValue> parse_key_values(std::string_view text, char separator, std::vector<ParseIssue>& issues)
{
    std::vector<KeyValue> result;
    std::istringstream stream{std::string(text)};
    std::string line;
    int lineNumber = 0;
    while (std::getline(stream, line)) {
        ++lineNumber;
        std::string_view content = line;
        if (auto hash = content.find('#'); hash != std::string_view::npos) {
            content = content.substr(0, hash);
        }
        content = trim(content);
        if (content.empty()) {
            continue;
        }

        const auto pos = content.find(separator);
        if (pos == std::string_view::npos) {
            issues.push_back({lineNumber, fmt::format("expected 'key {} value', got '{}'", separator, content)});
            continue;
        }
        result.push_back({lineNumber, std::string(trim(content.substr(0, pos))), std::string(trim(content.substr(pos + 1)))});
    }
    return result;
}

}
