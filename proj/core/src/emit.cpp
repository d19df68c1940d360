#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xpm/errors.hpp"
#include "xpm/sweep.hpp"

namespace xpm {

namespace {

std::string number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ValidationError("csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return cells;
}

} // namespace

void emit_csv(const SweepResult& r, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& row : r.rows) {
        os << number(row.axis_mhz) << ',' << to_string(row.field) << ',' << to_string(row.method) << ','
           << row.branch << ',';
        if (row.value) os << number(row.value->real()) << ',' << number(row.value->imag());
        else os << ',';
        os << '\n';
    }
}

void emit_json(const SweepResult& r, std::ostream& os) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j = {{"axis_mhz", row.axis_mhz},
                  {"field", to_string(row.field)},
                  {"method", to_string(row.method)},
                  {"branch", row.branch}};
        j["re"] = row.value ? json(row.value->real()) : json(nullptr);
        j["im"] = row.value ? json(row.value->imag()) : json(nullptr);
        rows.push_back(std::move(j));
    }
    json meta = {{"version", r.version}, {"log", r.log}};
    meta["params"] = r.params_json.empty() ? json(nullptr) : json::parse(r.params_json);
    os << json{{"metadata", meta}, {"rows", rows}}.dump(2) << '\n';
}

void emit(const SweepResult& r, Format format, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path.string() + "' for writing");
    if (format == Format::Csv) emit_csv(r, os);
    else emit_json(r, os);
    os.flush();
    if (!os) throw Error("write to '" + path.string() + "' failed");
}

std::vector<SweepRow> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ValidationError("csv: unexpected header '" + line + "'");
    std::vector<SweepRow> rows;
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 6) throw ValidationError("csv line " + std::to_string(n) + ": expected 6 cells");
        SweepRow row;
        row.axis_mhz = parse_number(cells[0], n);
        const auto field = parse_field_id(cells[1]);
        const auto method = parse_method(cells[2]);
        if (!field || !method) throw ValidationError("csv line " + std::to_string(n) + ": unknown field or method");
        row.field = *field;
        row.method = *method;
        row.branch = static_cast<int>(parse_number(cells[3], n));
        if (cells[4].empty() != cells[5].empty())
            throw ValidationError("csv line " + std::to_string(n) + ": half-empty value");
        if (!cells[4].empty()) row.value = cplx(parse_number(cells[4], n), parse_number(cells[5], n));
        rows.push_back(row);
    }
    return rows;
}

} // namespace xpm
