#pragma once

#include "srm/curves.hpp"
#include "srm/engine.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace srm {

struct AuthorRecord {
    std::string id;
    CitationCurve curve;
    std::map<std::string, std::string> annotations;

    bool operator==(const AuthorRecord&) const = default;
};

enum class DataFormat { csv, json };

/// `json` for a .json extension, `csv` otherwise.
DataFormat format_for_path(const std::string& path);

/// Reads author records.
///
/// CSV: header `author_id,citations`, one author per line, citations as
/// semicolon-separated nonnegative numbers in any order.
/// JSON: {"authors":[{"id": str, "citations": [num...], "annotations": {...}}]}.
/// Throws ParseError (with the line for CSV) on malformed input, negative
/// citations or duplicate ids.
std::vector<AuthorRecord> ingest(std::istream& in, DataFormat format);
std::vector<AuthorRecord> ingest_file(const std::string& path);

/// Author x index matrix of SRM values.
class IndexTable {
public:
    IndexTable() = default;
    IndexTable(std::vector<std::string> authors, std::vector<std::string> columns);

    const std::vector<std::string>& authors() const noexcept { return authors_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }

    SrmValue& at(std::size_t row, std::size_t column);
    const SrmValue& at(std::size_t row, std::size_t column) const;
    /// Throws LookupError for an unknown author or column.
    const SrmValue& at(const std::string& author, const std::string& column) const;
    std::size_t column_index(const std::string& column) const;

    bool operator==(const IndexTable&) const = default;

private:
    std::vector<std::string> authors_;
    std::vector<std::string> columns_;
    std::vector<SrmValue> cells_;
};

/// Closed form where available, srm_generic otherwise (positive tails).
IndexTable compute_table(const std::vector<AuthorRecord>& cohort,
                         const std::vector<IndexSpec>& indices);

struct RankEntry {
    std::string author;
    double value = 0.0;
    std::size_t rank = 0;

    bool operator==(const RankEntry&) const = default;
};

/// Descending by value with competition ranking (1, 1, 3); ties are listed
/// by author id.
std::vector<RankEntry> rank_authors(const IndexTable& table, const std::string& column);

struct MeritClassification {
    std::vector<double> cutoffs;
    std::vector<std::string> labels;
    /// (author, label) in ranking order.
    std::vector<std::pair<std::string, std::string>> assignment;

    const std::string& label_of(const std::string& author) const;
    bool operator==(const MeritClassification&) const = default;
};

inline const std::vector<double> kDefaultCutoffs{0.1, 0.3};

/// Author at rank r of n joins the first class whose cutoff * n >= r. Tied
/// authors share their block's best rank, so a tie block is never split and
/// is placed in the better class. Labels are class-1 .. class-(k+1).
MeritClassification classify_merit(const std::vector<RankEntry>& ranking,
                                   const std::vector<double>& cutoffs = kDefaultCutoffs);

/// Shortest text that reads back to the same double, +inf as `inf`.
std::string format_value(double v);
double parse_value(const std::string& text);

void export_records(const std::vector<AuthorRecord>& records, std::ostream& out,
                    DataFormat format);
void export_table(const IndexTable& table, std::ostream& out, DataFormat format);
void export_ranking(const std::vector<RankEntry>& ranking, std::ostream& out, DataFormat format);
void export_classification(const MeritClassification& classes, std::ostream& out,
                           DataFormat format);

IndexTable parse_table(std::istream& in, DataFormat format);
std::vector<RankEntry> parse_ranking(std::istream& in, DataFormat format);
MeritClassification parse_classification(std::istream& in, DataFormat format);

} // namespace srm
