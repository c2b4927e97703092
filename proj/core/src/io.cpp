#include <ccl/io.hpp>

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <system_error>
#include <utility>
#include <vector>

#include <unistd.h>

#include <ccl/errors.hpp>

static_assert(std::endian::native == std::endian::little,
              "CCFS loading assumes a little-endian host");

namespace ccl {
namespace {

constexpr char kMagic[4] = {'C', 'C', 'F', 'S'};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(begin)));
            return fields;
        }
        fields.push_back(trim(line.substr(begin, comma - begin)));
        begin = comma + 1;
    }
}

bool parse_float(std::string_view token, float &out) {
    const char *end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end && !token.empty();
}

bool parse_id(std::string_view token, std::int64_t &out) {
    const char *end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end && !token.empty();
}

std::string loc(const std::filesystem::path &path) { return path.string() + ": "; }

FeatureSet load_csv(const std::filesystem::path &path) {
    const std::string text = read_file(path);

    // Collect non-empty lines with their 1-based numbers for diagnostics.
    std::vector<std::pair<std::string_view, std::size_t>> lines;
    std::size_t line_no = 0;
    for (std::size_t begin = 0; begin < text.size();) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        const std::string_view line = trim(std::string_view(text).substr(begin, end - begin));
        if (!line.empty()) lines.emplace_back(line, line_no);
        begin = end + 1;
    }
    if (lines.empty()) throw IoError(loc(path) + "no CSV rows");

    // A first line with any non-numeric field is a header; a leading `id`
    // header column makes the first field of each row the point id.
    const auto first_fields = split_csv(lines.front().first);
    bool has_header = false;
    for (const auto &field : first_fields) {
        float ignored;
        if (!parse_float(field, ignored)) {
            has_header = true;
            break;
        }
    }
    bool has_id = false;
    if (has_header && !first_fields.empty()) {
        std::string name(first_fields.front());
        for (char &c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        has_id = (name == "id");
    }

    const std::size_t columns = first_fields.size();
    const std::size_t feature_cols = columns - (has_id ? 1 : 0);
    if (feature_cols == 0) throw IoError(loc(path) + "no feature columns");
    const std::size_t data_rows = lines.size() - (has_header ? 1 : 0);
    if (data_rows == 0) throw IoError(loc(path) + "no data rows");

    RowMatrixF points(static_cast<Eigen::Index>(data_rows),
                      static_cast<Eigen::Index>(feature_cols));
    std::vector<std::int64_t> ids(data_rows);

    for (std::size_t r = 0; r < data_rows; ++r) {
        const auto &[line, number] = lines[r + (has_header ? 1 : 0)];
        const auto fields = split_csv(line);
        if (fields.size() != columns)
            throw IoError(loc(path) + "row " + std::to_string(number) + ": expected " +
                          std::to_string(columns) + " fields, got " +
                          std::to_string(fields.size()));
        std::size_t col = 0;
        if (has_id) {
            if (!parse_id(fields[0], ids[r]))
                throw IoError(loc(path) + "row " + std::to_string(number) +
                              ": cannot parse id '" + std::string(fields[0]) + "'");
            col = 1;
        } else {
            ids[r] = static_cast<std::int64_t>(r);
        }
        for (std::size_t f = 0; f < feature_cols; ++f, ++col) {
            float value;
            if (!parse_float(fields[col], value))
                throw IoError(loc(path) + "row " + std::to_string(number) + ", column " +
                              std::to_string(col + 1) + ": cannot parse '" +
                              std::string(fields[col]) + "'");
            points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = value;
        }
    }
    return {std::move(points), std::move(ids)};
}

FeatureSet load_binary(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(loc(path) + "cannot open file");

    unsigned char header[12];
    if (!in.read(reinterpret_cast<char *>(header), sizeof header))
        throw IoError(loc(path) + "truncated header at byte 0 (need 12 bytes)");
    if (std::memcmp(header, kMagic, 4) != 0)
        throw IoError(loc(path) + "bad magic at byte 0 (expected \"CCFS\")");

    const auto read_u32 = [&](int offset) {
        return static_cast<std::uint32_t>(header[offset]) |
               static_cast<std::uint32_t>(header[offset + 1]) << 8 |
               static_cast<std::uint32_t>(header[offset + 2]) << 16 |
               static_cast<std::uint32_t>(header[offset + 3]) << 24;
    };
    const std::uint64_t m = read_u32(4);
    const std::uint64_t d = read_u32(8);

    std::error_code ec;
    const std::uint64_t actual_size = std::filesystem::file_size(path, ec);
    const std::uint64_t expected_size = 12 + m * d * 4;
    if (!ec && actual_size != expected_size)
        throw IoError(loc(path) + "size mismatch: header (m=" + std::to_string(m) +
                      ", d=" + std::to_string(d) + ") implies " +
                      std::to_string(expected_size) + " bytes, file has " +
                      std::to_string(actual_size));

    RowMatrixF points(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    const std::streamsize payload = static_cast<std::streamsize>(m * d * 4);
    if (payload > 0 && !in.read(reinterpret_cast<char *>(points.data()), payload))
        throw IoError(loc(path) + "truncated payload at byte " +
                      std::to_string(12 + in.gcount()));
    return FeatureSet(std::move(points));
}

} // namespace

FeatureSet load_features(const std::filesystem::path &path, FeatureFormat format) {
    if (format == FeatureFormat::auto_detect) {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError(loc(path) + "cannot open file");
        char magic[4] = {};
        probe.read(magic, sizeof magic);
        format = (probe.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0)
                     ? FeatureFormat::binary
                     : FeatureFormat::csv;
    }
    return format == FeatureFormat::binary ? load_binary(path) : load_csv(path);
}

void save_features_csv(const std::filesystem::path &path, const FeatureSet &features) {
    std::string out = "id";
    for (Eigen::Index j = 0; j < features.dim(); ++j) out += ",x" + std::to_string(j);
    out += '\n';
    char buffer[64];
    for (Eigen::Index i = 0; i < features.size(); ++i) {
        out += std::to_string(features.id_of(i));
        for (Eigen::Index j = 0; j < features.dim(); ++j) {
            out += ',';
            const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer,
                                                 features.points()(i, j));
            out.append(buffer, ptr);
            (void)ec;
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void save_features_binary(const std::filesystem::path &path, const FeatureSet &features) {
    const std::filesystem::path tmp =
        path.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(loc(tmp) + "cannot open for writing");
        out.write(kMagic, 4);
        const auto put_u32 = [&](std::uint32_t v) {
            const unsigned char bytes[4] = {
                static_cast<unsigned char>(v & 0xff),
                static_cast<unsigned char>((v >> 8) & 0xff),
                static_cast<unsigned char>((v >> 16) & 0xff),
                static_cast<unsigned char>((v >> 24) & 0xff),
            };
            out.write(reinterpret_cast<const char *>(bytes), 4);
        };
        put_u32(static_cast<std::uint32_t>(features.size()));
        put_u32(static_cast<std::uint32_t>(features.dim()));
        out.write(reinterpret_cast<const char *>(features.points().data()),
                  static_cast<std::streamsize>(features.points().size() * sizeof(float)));
        if (!out) throw IoError(loc(tmp) + "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(loc(path) + "rename failed: " + ec.message());
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(loc(path) + "cannot open file");
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(loc(path) + "read failed");
    return content;
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
    const std::filesystem::path tmp =
        path.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(loc(tmp) + "cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError(loc(tmp) + "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(loc(path) + "rename failed: " + ec.message());
}

} // namespace ccl
