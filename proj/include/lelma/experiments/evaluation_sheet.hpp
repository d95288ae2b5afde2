#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lelma/experiments/stats.hpp"

namespace lelma::experiments {

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::size_t column, const std::string& msg)
      : std::runtime_error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + msg),
        row_(row),
        column_(column) {}
  // Both 1-based; row 1 is the header.
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_, column_;
};

namespace csv {

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
  out << "\r\n";
}

// Quoted fields may span lines. Returns false at end of input.
inline bool read_row(std::istream& in, std::vector<std::string>& cells, std::size_t& row) {
  cells.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  ++row;
  std::string cell;
  bool quoted = false, was_quoted = false;
  for (int ch; (ch = in.get()) != std::char_traits<char>::eof();) {
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cell += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      if (!cell.empty() || was_quoted) throw CsvError(row, cells.size() + 1, "stray quote inside an unquoted field");
      quoted = was_quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      was_quoted = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get();
      cells.push_back(std::move(cell));
      return true;
    } else {
      if (was_quoted) throw CsvError(row, cells.size() + 1, "text after a closing quote");
      cell += c;
    }
  }
  if (quoted) throw CsvError(row, cells.size() + 1, "unterminated quoted field");
  cells.push_back(std::move(cell));
  return true;
}

}  // namespace csv

inline const std::vector<std::string>& sheet_columns() {
  static const std::vector<std::string> cols{"sample_id", "game", "model", "attempt", "reasoning"};
  return cols;
}

/// One row per attempt with a blank verdict column per evaluator. The
/// verifier's own verdict is left out so the sheet can be filled in blind.
inline void export_evaluation_sheet(const std::vector<SessionTranscript>& ts, std::ostream& out,
                                    const std::vector<std::string>& evaluators = {"eval_1", "eval_2", "eval_3"}) {
  if (evaluators.empty()) throw std::invalid_argument("at least one evaluator column is needed");
  auto header = sheet_columns();
  for (const auto& e : evaluators) {
    if (std::find(header.begin(), header.end(), e) != header.end())
      throw std::invalid_argument("evaluator name clashes with column " + e);
    header.push_back(e);
  }
  csv::write_row(out, header);
  for (const auto& t : ts)
    for (const auto& a : t.attempts) {
      std::vector<std::string> row{sample_id(t, a), t.game, t.reasoner_model, std::to_string(a.index), a.reasoning};
      row.resize(header.size());
      csv::write_row(out, row);
    }
}

namespace detail {

inline std::string lower(std::string s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Reads a filled-in sheet. Blank verdict cells are skipped, so an
/// incomplete sheet surfaces later as MissingLabels.
inline std::vector<EvaluationLabel> import_labels(std::istream& in) {
  std::vector<std::string> header, cells;
  std::size_t row = 0;
  if (!csv::read_row(in, header, row)) throw CsvError(1, 1, "empty sheet");
  std::size_t id_col = header.size();
  std::vector<std::size_t> eval_cols;
  const auto& fixed = sheet_columns();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "sample_id") id_col = i;
    else if (std::find(fixed.begin(), fixed.end(), header[i]) == fixed.end()) {
      if (header[i].empty()) throw CsvError(1, i + 1, "empty column name");
      eval_cols.push_back(i);
    }
  }
  if (id_col == header.size()) throw CsvError(1, 1, "no sample_id column");
  if (eval_cols.empty()) throw CsvError(1, header.size(), "no evaluator columns");

  std::vector<EvaluationLabel> out;
  while (csv::read_row(in, cells, row)) {
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (cells.size() != header.size())
      throw CsvError(row, std::min(cells.size(), header.size()) + 1,
                     "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    if (cells[id_col].empty()) throw CsvError(row, id_col + 1, "empty sample_id");
    for (auto c : eval_cols) {
      const auto v = detail::lower(cells[c]);
      if (v.empty()) continue;
      bool correct;
      if (v == "1" || v == "true" || v == "t" || v == "yes" || v == "y" || v == "correct") correct = true;
      else if (v == "0" || v == "false" || v == "f" || v == "no" || v == "n" || v == "incorrect") correct = false;
      else throw CsvError(row, c + 1, "cannot read '" + cells[c] + "' as a verdict (use 1/0, true/false or yes/no)");
      out.push_back({cells[id_col], header[c], correct});
    }
  }
  return out;
}

}  // namespace lelma::experiments
