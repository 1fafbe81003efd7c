#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "logsentinel/value.hpp"

namespace logsentinel {

using ordered_json = nlohmann::ordered_json;

// ISO-8601 instant with millisecond precision and an explicit UTC offset,
// as found in mongod's t.$date. parse/format round-trip exactly.
struct Timestamp {
    std::int64_t epoch_ms = 0;   // UTC
    int offset_minutes = 0;      // original zone offset, kept for formatting

    static Timestamp parse(std::string_view iso);
    std::string format() const;
    bool operator==(const Timestamp&) const = default;
};

// One mongod structured-log line.
struct LogEntry {
    Timestamp timestamp;
    char severity = 'I';
    std::string component;
    std::int64_t id = 0;
    std::string context;
    std::string message;
    ordered_json attributes;  // scalar leaves only after parsing

    bool operator==(const LogEntry&) const = default;
};

// Dotted-path flattening of a LogEntry. Keys are unique and values scalar;
// the command filter sub-tree is kept as one serialized-text value.
struct FlatRecord {
    std::vector<std::pair<std::string, Scalar>> values;

    const Scalar* find(std::string_view key) const;
};

struct IngestStats {
    std::size_t total_lines = 0;
    std::size_t query_lines = 0;
    std::size_t malformed_lines = 0;
};

struct IngestOptions {
    std::string message = "Slow query";  // which log message marks a query entry
    bool strict = false;                 // abort on malformed lines instead of skipping
};

// Throws MalformedLine on invalid JSON or a missing/ill-typed required key.
LogEntry parse_line(std::string_view line);

// Inverse of parse_line on the preserved fields.
std::string format_line(const LogEntry& entry);

bool is_query_entry(const LogEntry& entry, std::string_view message = "Slow query");

FlatRecord flatten(const LogEntry& entry);

struct IngestResult {
    std::vector<FlatRecord> records;
    IngestStats stats;
};

// Flattens every line of a mongod structured log that is a query entry.
// Throws IoFailure if the file cannot be read; MalformedLine in strict mode.
IngestResult ingest_file(const std::string& path, const IngestOptions& opts = {});

// Same, over an already-read buffer (one JSON document per line).
IngestResult ingest_lines(std::string_view body, const IngestOptions& opts = {});

}  // namespace logsentinel
