#include "logsentinel/log_ingest.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "logsentinel/errors.hpp"

namespace logsentinel {

namespace {

// Days from civil date (Howard Hinnant's algorithm), and its inverse.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

int parse_digits(std::string_view s, std::size_t pos, std::size_t count) {
    int v = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw MalformedLine("bad timestamp: " + std::string(s));
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

Timestamp Timestamp::parse(std::string_view iso) {
    // YYYY-MM-DDTHH:MM:SS(.mmm)?(Z|±HH:MM)
    if (iso.size() < 19) throw MalformedLine("bad timestamp: " + std::string(iso));
    int year = parse_digits(iso, 0, 4);
    int mon = parse_digits(iso, 5, 2);
    int day = parse_digits(iso, 8, 2);
    int hh = parse_digits(iso, 11, 2);
    int mi = parse_digits(iso, 14, 2);
    int ss = parse_digits(iso, 17, 2);
    if (iso[4] != '-' || iso[7] != '-' || (iso[10] != 'T' && iso[10] != ' ') || iso[13] != ':' ||
        iso[16] != ':')
        throw MalformedLine("bad timestamp: " + std::string(iso));
    std::size_t pos = 19;
    int ms = 0;
    if (pos < iso.size() && iso[pos] == '.') {
        ms = parse_digits(iso, pos + 1, 3);
        pos += 4;
    }
    int offset = 0;
    if (pos < iso.size()) {
        char sign = iso[pos];
        if (sign == 'Z') {
            pos += 1;
        } else if (sign == '+' || sign == '-') {
            int oh = parse_digits(iso, pos + 1, 2);
            if (pos + 3 >= iso.size() || iso[pos + 3] != ':')
                throw MalformedLine("bad timestamp: " + std::string(iso));
            int om = parse_digits(iso, pos + 4, 2);
            offset = (oh * 60 + om) * (sign == '-' ? -1 : 1);
            pos += 6;
        }
    }
    if (pos != iso.size()) throw MalformedLine("bad timestamp: " + std::string(iso));
    std::int64_t days = days_from_civil(year, mon, day);
    std::int64_t local_ms = ((days * 24 + hh) * 60 + mi) * 60000 + ss * 1000 + ms;
    Timestamp t;
    t.offset_minutes = offset;
    t.epoch_ms = local_ms - static_cast<std::int64_t>(offset) * 60000;
    return t;
}

std::string Timestamp::format() const {
    std::int64_t local_ms = epoch_ms + static_cast<std::int64_t>(offset_minutes) * 60000;
    std::int64_t days = local_ms / 86400000;
    std::int64_t rem = local_ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    int hh = static_cast<int>(rem / 3600000);
    int mi = static_cast<int>((rem / 60000) % 60);
    int ss = static_cast<int>((rem / 1000) % 60);
    int ms = static_cast<int>(rem % 1000);
    int off = offset_minutes;
    char sign = off < 0 ? '-' : '+';
    if (off < 0) off = -off;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03d%c%02d:%02d", y, m, d, hh, mi,
                  ss, ms, sign, off / 60, off % 60);
    return buf;
}

namespace {

void check_scalar_leaves(const ordered_json& node) {
    if (node.is_object()) {
        for (const auto& [k, v] : node.items()) {
            (void)k;
            check_scalar_leaves(v);
        }
    } else if (node.is_array()) {
        for (const auto& v : node) check_scalar_leaves(v);
    } else if (node.is_binary() || node.is_discarded()) {
        throw MalformedLine("attributes contain a non-scalar leaf");
    }
}

Scalar json_to_scalar(const ordered_json& v) {
    if (v.is_null()) return nullptr;
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_unsigned()) return static_cast<std::int64_t>(v.get<std::uint64_t>());
    if (v.is_number_float()) return v.get<double>();
    return v.get<std::string>();
}

void flatten_attr(const ordered_json& node, const std::string& path, FlatRecord& out) {
    // The filter sub-tree stays textual under the fixed key "filter".
    if (path == "attr.command.filter") {
        out.values.emplace_back("filter", node.dump());
        return;
    }
    if (node.is_object()) {
        for (const auto& [k, v] : node.items()) flatten_attr(v, path + "." + k, out);
    } else if (node.is_array()) {
        std::size_t i = 0;
        for (const auto& v : node) {
            flatten_attr(v, path + "." + std::to_string(i), out);
            ++i;
        }
    } else {
        out.values.emplace_back(path, json_to_scalar(node));
    }
}

}  // namespace

const Scalar* FlatRecord::find(std::string_view key) const {
    for (const auto& [k, v] : values)
        if (k == key) return &v;
    return nullptr;
}

LogEntry parse_line(std::string_view line) {
    ordered_json doc = ordered_json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw MalformedLine("not a JSON object");
    for (const char* key : {"t", "s", "c", "id", "ctx", "msg", "attr"})
        if (!doc.contains(key)) throw MalformedLine(std::string("missing key: ") + key);

    LogEntry e;
    const auto& t = doc["t"];
    if (!t.is_object() || !t.contains("$date") || !t["$date"].is_string())
        throw MalformedLine("t.$date missing");
    e.timestamp = Timestamp::parse(t["$date"].get<std::string>());
    if (!doc["s"].is_string() || doc["s"].get<std::string>().size() != 1)
        throw MalformedLine("s is not a single-character code");
    e.severity = doc["s"].get<std::string>()[0];
    if (!doc["c"].is_string()) throw MalformedLine("c is not a string");
    e.component = doc["c"].get<std::string>();
    if (!doc["id"].is_number_integer() && !doc["id"].is_number_unsigned())
        throw MalformedLine("id is not an integer");
    e.id = doc["id"].get<std::int64_t>();
    if (e.id < 0) throw MalformedLine("id is negative");
    if (!doc["ctx"].is_string()) throw MalformedLine("ctx is not a string");
    e.context = doc["ctx"].get<std::string>();
    if (!doc["msg"].is_string()) throw MalformedLine("msg is not a string");
    e.message = doc["msg"].get<std::string>();
    if (!doc["attr"].is_object()) throw MalformedLine("attr is not an object");
    e.attributes = doc["attr"];
    check_scalar_leaves(e.attributes);
    return e;
}

std::string format_line(const LogEntry& e) {
    ordered_json doc;
    doc["t"] = ordered_json{{"$date", e.timestamp.format()}};
    doc["s"] = std::string(1, e.severity);
    doc["c"] = e.component;
    doc["id"] = e.id;
    doc["ctx"] = e.context;
    doc["msg"] = e.message;
    doc["attr"] = e.attributes;
    return doc.dump();
}

bool is_query_entry(const LogEntry& e, std::string_view message) {
    if (e.message != message) return false;
    auto cmd = e.attributes.find("command");
    if (cmd == e.attributes.end() || !cmd->is_object()) return false;
    auto filt = cmd->find("filter");
    return filt != cmd->end() && filt->is_object();
}

FlatRecord flatten(const LogEntry& e) {
    FlatRecord rec;
    rec.values.emplace_back("t", e.timestamp.format());
    rec.values.emplace_back("s", std::string(1, e.severity));
    rec.values.emplace_back("c", e.component);
    rec.values.emplace_back("id", e.id);
    rec.values.emplace_back("ctx", e.context);
    rec.values.emplace_back("msg", e.message);
    for (const auto& [k, v] : e.attributes.items()) flatten_attr(v, "attr." + k, rec.values.empty() ? rec : rec);
    return rec;
}

IngestResult ingest_lines(std::string_view body, const IngestOptions& opts) {
    IngestResult out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t nl = body.find('\n', pos);
        std::string_view line = body.substr(pos, nl == std::string_view::npos ? body.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? body.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() && pos >= body.size()) break;  // trailing newline
        out.stats.total_lines++;
        try {
            LogEntry e = parse_line(line);
            if (is_query_entry(e, opts.message)) {
                out.stats.query_lines++;
                out.records.push_back(flatten(e));
            }
        } catch (const MalformedLine&) {
            if (opts.strict) throw;
            out.stats.malformed_lines++;
        }
    }
    return out;
}

IngestResult ingest_file(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open log file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("cannot read log file: " + path);
    return ingest_lines(ss.str(), opts);
}

}  // namespace logsentinel
