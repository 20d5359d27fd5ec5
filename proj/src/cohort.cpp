#include "srm/cohort.hpp"

#include "srm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace srm {

namespace {

using ojson = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double parse_number(std::string_view text, std::size_t line) {
    text = trim(text);
    if (text == "inf" || text == "+inf") {
        return kInfinity;
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || std::isnan(v)) {
        throw ParseError("not a number: '" + std::string(text) + "'", line);
    }
    return v;
}

// Yields the non-blank lines of a stream with their 1-based numbers.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            line.erase(0, 3);
        }
        const auto view = trim(line);
        if (!view.empty()) {
            fn(view, number);
        }
    }
}

CitationCurve curve_from(std::vector<double> values, double tail, std::size_t line,
                         const std::string& id) {
    for (double v : values) {
        if (v < 0.0) {
            throw ParseError("author '" + id + "': negative citation count " + format_value(v),
                             line);
        }
    }
    try {
        return CitationCurve::from_values(std::move(values), tail);
    } catch (const ValidationError& e) {
        throw ParseError("author '" + id + "': " + e.what(), line);
    }
}

void check_unique(std::set<std::string>& seen, const std::string& id, std::size_t line) {
    if (id.empty()) {
        throw ParseError("empty author id", line);
    }
    if (!seen.insert(id).second) {
        throw ParseError("duplicate author id '" + id + "'", line);
    }
}

void check_csv_field(const std::string& field) {
    if (field.find_first_of(",;\n\r") != std::string::npos) {
        throw ValidationError("'" + field + "' cannot be written to CSV (contains a separator)");
    }
}

ojson value_json(double v) {
    if (std::isinf(v)) {
        return "inf";
    }
    return ojson::parse(format_value(v));
}

double value_from_json(const nlohmann::json& v) {
    if (v.is_string()) {
        return parse_value(v.get<std::string>());
    }
    return v.get<double>();
}

nlohmann::json parse_json(std::istream& in, const char* what) {
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

} // namespace

DataFormat format_for_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == "json") {
            return DataFormat::json;
        }
    }
    return DataFormat::csv;
}

std::string format_value(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_value(const std::string& text) {
    if (trim(text) == "-inf") {
        return -kInfinity;
    }
    return parse_number(text, 0);
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

std::vector<AuthorRecord> ingest(std::istream& in, DataFormat format) {
    std::vector<AuthorRecord> out;
    std::set<std::string> seen;

    if (format == DataFormat::csv) {
        bool header = false;
        for_each_line(in, [&](std::string_view line, std::size_t number) {
            if (!header) {
                if (line != "author_id,citations") {
                    throw ParseError("expected header 'author_id,citations'", number);
                }
                header = true;
                return;
            }
            const auto comma = line.find(',');
            if (comma == std::string_view::npos || line.find(',', comma + 1) != line.npos) {
                throw ParseError("expected 2 fields 'author_id,citations'", number);
            }
            AuthorRecord rec;
            rec.id = std::string(trim(line.substr(0, comma)));
            check_unique(seen, rec.id, number);
            std::vector<double> values;
            const auto cell = trim(line.substr(comma + 1));
            if (!cell.empty()) {
                for (auto piece : split(cell, ';')) {
                    values.push_back(parse_number(piece, number));
                }
            }
            rec.curve = curve_from(std::move(values), 0.0, number, rec.id);
            out.push_back(std::move(rec));
        });
        if (!header) {
            throw ParseError("empty input: missing header 'author_id,citations'");
        }
        return out;
    }

    const auto doc = parse_json(in, "cohort");
    try {
        std::size_t index = 0;
        for (const auto& a : doc.at("authors")) {
            ++index;
            AuthorRecord rec;
            rec.id = a.at("id").get<std::string>();
            check_unique(seen, rec.id, 0);
            std::vector<double> values;
            for (const auto& c : a.at("citations")) {
                values.push_back(c.get<double>());
            }
            const double tail = a.contains("tail") ? value_from_json(a.at("tail")) : 0.0;
            rec.curve = curve_from(std::move(values), tail, 0, rec.id);
            if (a.contains("annotations")) {
                for (const auto& [k, v] : a.at("annotations").items()) {
                    rec.annotations[k] = v.is_string() ? v.get<std::string>() : v.dump();
                }
            }
            out.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("cohort: ") + e.what());
    }
    return out;
}

std::vector<AuthorRecord> ingest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return ingest(in, format_for_path(path));
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

IndexTable::IndexTable(std::vector<std::string> authors, std::vector<std::string> columns)
    : authors_(std::move(authors)), columns_(std::move(columns)),
      cells_(authors_.size() * columns_.size()) {}

SrmValue& IndexTable::at(std::size_t row, std::size_t column) {
    return cells_.at(row * columns_.size() + column);
}

const SrmValue& IndexTable::at(std::size_t row, std::size_t column) const {
    return cells_.at(row * columns_.size() + column);
}

std::size_t IndexTable::column_index(const std::string& column) const {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) {
        throw LookupError("table has no column '" + column + "'");
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

const SrmValue& IndexTable::at(const std::string& author, const std::string& column) const {
    const auto it = std::find(authors_.begin(), authors_.end(), author);
    if (it == authors_.end()) {
        throw LookupError("table has no author '" + author + "'");
    }
    return at(static_cast<std::size_t>(it - authors_.begin()), column_index(column));
}

IndexTable compute_table(const std::vector<AuthorRecord>& cohort,
                         const std::vector<IndexSpec>& indices) {
    if (indices.empty()) {
        throw LookupError("no indices requested");
    }
    std::vector<std::string> authors;
    for (const auto& r : cohort) {
        authors.push_back(r.id);
    }
    std::vector<std::string> columns;
    for (const auto& spec : indices) {
        columns.push_back(spec.name());
    }
    IndexTable table(std::move(authors), std::move(columns));
    for (std::size_t r = 0; r < cohort.size(); ++r) {
        for (std::size_t c = 0; c < indices.size(); ++c) {
            table.at(r, c) = srm_closed_form(cohort[r].curve, indices[c]);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Ranking and merit classes
// ---------------------------------------------------------------------------

std::vector<RankEntry> rank_authors(const IndexTable& table, const std::string& column) {
    const std::size_t c = table.column_index(column);
    std::vector<RankEntry> out;
    out.reserve(table.authors().size());
    for (std::size_t r = 0; r < table.authors().size(); ++r) {
        out.push_back({table.authors()[r], table.at(r, c).level, 0});
    }
    std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.value != b.value) {
            return a.value > b.value;
        }
        return a.author < b.author;
    });
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].rank = (k > 0 && out[k].value == out[k - 1].value) ? out[k - 1].rank : k + 1;
    }
    return out;
}

const std::string& MeritClassification::label_of(const std::string& author) const {
    for (const auto& [id, label] : assignment) {
        if (id == author) {
            return label;
        }
    }
    throw LookupError("author '" + author + "' is not classified");
}

MeritClassification classify_merit(const std::vector<RankEntry>& ranking,
                                   const std::vector<double>& cutoffs) {
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        if (!(cutoffs[k] > 0.0 && cutoffs[k] < 1.0) || (k > 0 && !(cutoffs[k] > cutoffs[k - 1]))) {
            throw ValidationError("cutoffs must be strictly increasing fractions in (0, 1)");
        }
    }
    MeritClassification out;
    out.cutoffs = cutoffs;
    for (std::size_t k = 0; k <= cutoffs.size(); ++k) {
        out.labels.push_back("class-" + std::to_string(k + 1));
    }
    const double n = static_cast<double>(ranking.size());
    for (const auto& entry : ranking) {
        std::size_t cls = cutoffs.size();
        for (std::size_t k = 0; k < cutoffs.size(); ++k) {
            if (static_cast<double>(entry.rank) <= cutoffs[k] * n + 1e-9) {
                cls = k;
                break;
            }
        }
        out.assignment.emplace_back(entry.author, out.labels[cls]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void export_records(const std::vector<AuthorRecord>& records, std::ostream& out,
                    DataFormat format) {
    if (format == DataFormat::csv) {
        out << "author_id,citations\n";
        for (const auto& r : records) {
            check_csv_field(r.id);
            if (r.curve.tail() > 0.0) {
                throw ValidationError("author '" + r.id + "' has a tail; CSV cannot carry it");
            }
            out << r.id << ',';
            const auto v = r.curve.values();
            for (std::size_t i = 0; i < v.size(); ++i) {
                out << (i ? ";" : "") << format_value(v[i]);
            }
            out << '\n';
        }
        return;
    }
    ojson doc;
    auto& authors = doc["authors"] = ojson::array();
    for (const auto& r : records) {
        ojson a;
        a["id"] = r.id;
        a["citations"] = ojson::array();
        for (double v : r.curve.values()) {
            a["citations"].push_back(value_json(v));
        }
        if (r.curve.tail() > 0.0) {
            a["tail"] = value_json(r.curve.tail());
        }
        if (!r.annotations.empty()) {
            a["annotations"] = r.annotations;
        }
        authors.push_back(std::move(a));
    }
    out << doc.dump(2) << '\n';
}

void export_table(const IndexTable& table, std::ostream& out, DataFormat format) {
    if (format == DataFormat::csv) {
        out << "author_id";
        for (const auto& c : table.columns()) {
            check_csv_field(c);
            out << ',' << c;
        }
        out << '\n';
        for (std::size_t r = 0; r < table.authors().size(); ++r) {
            check_csv_field(table.authors()[r]);
            out << table.authors()[r];
            for (std::size_t c = 0; c < table.columns().size(); ++c) {
                out << ',' << format_value(table.at(r, c).level);
            }
            out << '\n';
        }
        return;
    }
    ojson doc;
    doc["columns"] = table.columns();
    auto& rows = doc["rows"] = ojson::array();
    for (std::size_t r = 0; r < table.authors().size(); ++r) {
        ojson row;
        row["author_id"] = table.authors()[r];
        ojson values = ojson::object();
        std::vector<std::string> unattained;
        for (std::size_t c = 0; c < table.columns().size(); ++c) {
            const auto& cell = table.at(r, c);
            values[table.columns()[c]] = value_json(cell.level);
            if (!cell.attained && !std::isinf(cell.level)) {
                unattained.push_back(table.columns()[c]);
            }
        }
        row["values"] = std::move(values);
        if (!unattained.empty()) {
            row["unattained"] = unattained;
        }
        rows.push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

void export_ranking(const std::vector<RankEntry>& ranking, std::ostream& out, DataFormat format) {
    if (format == DataFormat::csv) {
        out << "author_id,value,rank\n";
        for (const auto& e : ranking) {
            check_csv_field(e.author);
            out << e.author << ',' << format_value(e.value) << ',' << e.rank << '\n';
        }
        return;
    }
    ojson doc;
    auto& rows = doc["ranking"] = ojson::array();
    for (const auto& e : ranking) {
        rows.push_back({{"author_id", e.author}, {"value", value_json(e.value)}, {"rank", e.rank}});
    }
    out << doc.dump(2) << '\n';
}

void export_classification(const MeritClassification& classes, std::ostream& out,
                           DataFormat format) {
    if (format == DataFormat::csv) {
        out << "# cutoffs: ";
        for (std::size_t k = 0; k < classes.cutoffs.size(); ++k) {
            out << (k ? ";" : "") << format_value(classes.cutoffs[k]);
        }
        out << "\nauthor_id,class\n";
        for (const auto& [id, label] : classes.assignment) {
            check_csv_field(id);
            out << id << ',' << label << '\n';
        }
        return;
    }
    ojson doc;
    doc["cutoffs"] = ojson::array();
    for (double c : classes.cutoffs) {
        doc["cutoffs"].push_back(value_json(c));
    }
    doc["labels"] = classes.labels;
    auto& rows = doc["assignment"] = ojson::array();
    for (const auto& [id, label] : classes.assignment) {
        rows.push_back({{"author_id", id}, {"class", label}});
    }
    out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Parsing exported documents
// ---------------------------------------------------------------------------

IndexTable parse_table(std::istream& in, DataFormat format) {
    if (format == DataFormat::csv) {
        std::vector<std::string> columns;
        std::vector<std::string> authors;
        std::vector<std::vector<double>> rows;
        bool header = false;
        for_each_line(in, [&](std::string_view line, std::size_t number) {
            const auto fields = split(line, ',');
            if (!header) {
                if (fields.empty() || fields[0] != "author_id") {
                    throw ParseError("expected header starting with 'author_id'", number);
                }
                for (std::size_t k = 1; k < fields.size(); ++k) {
                    columns.emplace_back(trim(fields[k]));
                }
                header = true;
                return;
            }
            if (fields.size() != columns.size() + 1) {
                throw ParseError("expected " + std::to_string(columns.size() + 1) + " fields",
                                 number);
            }
            authors.emplace_back(trim(fields[0]));
            std::vector<double> row;
            for (std::size_t k = 1; k < fields.size(); ++k) {
                row.push_back(parse_number(fields[k], number));
            }
            rows.push_back(std::move(row));
        });
        if (!header) {
            throw ParseError("empty table");
        }
        IndexTable table(std::move(authors), std::move(columns));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                table.at(r, c) = {rows[r][c], !std::isinf(rows[r][c])};
            }
        }
        return table;
    }

    const auto doc = parse_json(in, "table");
    try {
        auto columns = doc.at("columns").get<std::vector<std::string>>();
        std::vector<std::string> authors;
        for (const auto& row : doc.at("rows")) {
            authors.push_back(row.at("author_id").get<std::string>());
        }
        IndexTable table(std::move(authors), columns);
        std::size_t r = 0;
        for (const auto& row : doc.at("rows")) {
            std::set<std::string> unattained;
            if (row.contains("unattained")) {
                for (const auto& c : row.at("unattained")) {
                    unattained.insert(c.get<std::string>());
                }
            }
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const double v = value_from_json(row.at("values").at(columns[c]));
                table.at(r, c) = {v, !std::isinf(v) && !unattained.count(columns[c])};
            }
            ++r;
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("table: ") + e.what());
    }
}

std::vector<RankEntry> parse_ranking(std::istream& in, DataFormat format) {
    std::vector<RankEntry> out;
    if (format == DataFormat::csv) {
        bool header = false;
        for_each_line(in, [&](std::string_view line, std::size_t number) {
            if (!header) {
                if (line != "author_id,value,rank") {
                    throw ParseError("expected header 'author_id,value,rank'", number);
                }
                header = true;
                return;
            }
            const auto fields = split(line, ',');
            if (fields.size() != 3) {
                throw ParseError("expected 3 fields", number);
            }
            const double rank = parse_number(fields[2], number);
            out.push_back({std::string(trim(fields[0])), parse_number(fields[1], number),
                           static_cast<std::size_t>(rank)});
        });
        return out;
    }
    const auto doc = parse_json(in, "ranking");
    try {
        for (const auto& e : doc.at("ranking")) {
            out.push_back({e.at("author_id").get<std::string>(), value_from_json(e.at("value")),
                           e.at("rank").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("ranking: ") + e.what());
    }
    return out;
}

MeritClassification parse_classification(std::istream& in, DataFormat format) {
    MeritClassification out;
    if (format == DataFormat::csv) {
        bool header = false;
        bool cutoffs = false;
        for_each_line(in, [&](std::string_view line, std::size_t number) {
            if (!cutoffs) {
                constexpr std::string_view prefix = "# cutoffs:";
                if (line.substr(0, prefix.size()) != prefix) {
                    throw ParseError("expected '# cutoffs:' line", number);
                }
                const auto list = trim(line.substr(prefix.size()));
                if (!list.empty()) {
                    for (auto piece : split(list, ';')) {
                        out.cutoffs.push_back(parse_number(piece, number));
                    }
                }
                cutoffs = true;
                return;
            }
            if (!header) {
                if (line != "author_id,class") {
                    throw ParseError("expected header 'author_id,class'", number);
                }
                header = true;
                return;
            }
            const auto fields = split(line, ',');
            if (fields.size() != 2) {
                throw ParseError("expected 2 fields", number);
            }
            out.assignment.emplace_back(std::string(trim(fields[0])),
                                        std::string(trim(fields[1])));
        });
        for (std::size_t k = 0; k <= out.cutoffs.size(); ++k) {
            out.labels.push_back("class-" + std::to_string(k + 1));
        }
        return out;
    }
    const auto doc = parse_json(in, "classification");
    try {
        for (const auto& c : doc.at("cutoffs")) {
            out.cutoffs.push_back(value_from_json(c));
        }
        out.labels = doc.at("labels").get<std::vector<std::string>>();
        for (const auto& a : doc.at("assignment")) {
            out.assignment.emplace_back(a.at("author_id").get<std::string>(),
                                        a.at("class").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("classification: ") + e.what());
    }
    return out;
}

} // namespace srm
