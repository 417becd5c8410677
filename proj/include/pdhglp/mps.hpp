#pragma once

// Reader and writer for linear programs in free-format MPS files.
//
// Supported sections: NAME, OBJSENSE, ROWS, COLUMNS, RHS, RANGES, BOUNDS,
// ENDATA.  Integer markers, SOS sections, and integer/semicontinuous bound
// types are rejected with a line-numbered error.  The reader produces a
// minimization-form problem; files declaring OBJSENSE MAX have their
// objective negated and the flag recorded so callers can undo the sign when
// reporting.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdhglp/problem.hpp"

namespace pdhglp {

class MpsParseError : public std::runtime_error {
 public:
  MpsParseError(size_t line, const std::string& msg)
      : std::runtime_error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg),
        line_number(line) {}
  size_t line_number;
};

struct MpsModel {
  LpProblem problem;  // always minimization form
  bool maximize = false;
  std::string name;
  std::string objective_name;
  std::vector<std::string> row_names;  // constraint rows only
  std::vector<std::string> col_names;
};

namespace mps_detail {

inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

inline Scalar parse_number(const std::string& tok, size_t line) {
  if (tok.empty()) throw MpsParseError(line, "expected a number");
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size()) {
    throw MpsParseError(line, "malformed number '" + tok + "'");
  }
  return v;
}

enum class Section { None, Name, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, End };

struct PendingEntry {
  Index row = 0;
  Scalar value = 0.0;
  size_t line = 0;
};

}  // namespace mps_detail

inline MpsModel parse_mps(std::string_view text) {
  using namespace mps_detail;

  MpsModel model;
  LpProblem& p = model.problem;

  std::unordered_map<std::string, Index> row_index;   // constraint rows
  std::unordered_map<std::string, Index> col_index;   // columns, by first use
  std::vector<char> row_type;                          // 'L','G','E','N' per row
  bool saw_objective = false;
  bool saw_rows = false;

  std::vector<Triplet> triplets;
  std::vector<PendingEntry> rhs_entries;
  std::vector<PendingEntry> range_entries;
  std::vector<bool> explicit_lower;  // per column, for the negative-UP rule

  Section section = Section::None;
  bool objsense_pending = false;  // OBJSENSE keyword seen, value expected below

  const auto find_row = [&](const std::string& name, size_t line) -> Index {
    auto it = row_index.find(name);
    if (it == row_index.end()) throw MpsParseError(line, "unknown row '" + name + "'");
    return it->second;
  };

  const auto apply_objsense = [&](const std::string& word, size_t line) {
    const std::string w = upper(word);
    if (w == "MAX" || w == "MAXIMIZE") {
      model.maximize = true;
    } else if (w == "MIN" || w == "MINIMIZE") {
      model.maximize = false;
    } else {
      throw MpsParseError(line, "unknown objective sense '" + word + "'");
    }
  };

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size() && section != Section::End) {
    const size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '*') continue;

    const bool is_header = line[0] != ' ' && line[0] != '\t';
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;

    if (is_header) {
      const std::string kw = upper(tok[0]);
      if (kw == "NAME") {
        section = Section::Name;
        if (tok.size() >= 2) model.name = tok[1];
      } else if (kw == "OBJSENSE") {
        section = Section::ObjSense;
        if (tok.size() >= 2) {
          apply_objsense(tok[1], line_no);
        } else {
          objsense_pending = true;
        }
      } else if (kw == "ROWS") {
        section = Section::Rows;
        saw_rows = true;
      } else if (kw == "COLUMNS") {
        section = Section::Columns;
        if (!saw_rows) throw MpsParseError(line_no, "COLUMNS before ROWS");
      } else if (kw == "RHS") {
        section = Section::Rhs;
      } else if (kw == "RANGES") {
        section = Section::Ranges;
      } else if (kw == "BOUNDS") {
        section = Section::Bounds;
      } else if (kw == "ENDATA") {
        section = Section::End;
      } else if (kw == "SOS") {
        throw MpsParseError(line_no, "SOS sections are not supported");
      } else {
        throw MpsParseError(line_no, "unknown section '" + tok[0] + "'");
      }
      continue;
    }

    switch (section) {
      case Section::None:
        throw MpsParseError(line_no, "data before any section header");
      case Section::Name:
      case Section::End:
        throw MpsParseError(line_no, "unexpected data line");
      case Section::ObjSense: {
        if (!objsense_pending) throw MpsParseError(line_no, "unexpected data line");
        apply_objsense(tok[0], line_no);
        objsense_pending = false;
        break;
      }
      case Section::Rows: {
        if (tok.size() != 2) throw MpsParseError(line_no, "expected 'TYPE NAME'");
        const std::string type = upper(tok[0]);
        const std::string& name = tok[1];
        if (row_index.count(name) || name == model.objective_name) {
          throw MpsParseError(line_no, "duplicate row '" + name + "'");
        }
        if (type == "N") {
          if (!saw_objective) {
            // The first free row is the objective.
            model.objective_name = name;
            saw_objective = true;
            break;
          }
          // Later free rows are kept as unconstrained rows.
          row_index.emplace(name, static_cast<Index>(row_type.size()));
          model.row_names.push_back(name);
          row_type.push_back('N');
          p.con_lower.push_back(-kInf);
          p.con_upper.push_back(kInf);
        } else if (type == "L") {
          row_index.emplace(name, static_cast<Index>(row_type.size()));
          model.row_names.push_back(name);
          row_type.push_back('L');
          p.con_lower.push_back(-kInf);
          p.con_upper.push_back(0.0);
        } else if (type == "G") {
          row_index.emplace(name, static_cast<Index>(row_type.size()));
          model.row_names.push_back(name);
          row_type.push_back('G');
          p.con_lower.push_back(0.0);
          p.con_upper.push_back(kInf);
        } else if (type == "E") {
          row_index.emplace(name, static_cast<Index>(row_type.size()));
          model.row_names.push_back(name);
          row_type.push_back('E');
          p.con_lower.push_back(0.0);
          p.con_upper.push_back(0.0);
        } else {
          throw MpsParseError(line_no, "unknown row type '" + tok[0] + "'");
        }
        break;
      }
      case Section::Columns: {
        if (tok.size() >= 3 && upper(tok[1]) == "'MARKER'") {
          const std::string marker = upper(tok[2]);
          if (marker == "'INTORG'") {
            throw MpsParseError(line_no, "integer variables are not supported");
          }
          if (marker == "'INTEND'") break;
          throw MpsParseError(line_no, "unknown marker '" + tok[2] + "'");
        }
        if (tok.size() != 3 && tok.size() != 5) {
          throw MpsParseError(line_no, "expected 'COLUMN ROW VALUE [ROW VALUE]'");
        }
        const std::string& col_name = tok[0];
        auto it = col_index.find(col_name);
        Index col;
        if (it == col_index.end()) {
          col = static_cast<Index>(model.col_names.size());
          col_index.emplace(col_name, col);
          model.col_names.push_back(col_name);
          p.objective.push_back(0.0);
          p.var_lower.push_back(0.0);
          p.var_upper.push_back(kInf);
          explicit_lower.push_back(false);
        } else {
          col = it->second;
        }
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const Scalar value = parse_number(tok[k + 1], line_no);
          if (saw_objective && tok[k] == model.objective_name) {
            p.objective[static_cast<size_t>(col)] += value;
          } else {
            const Index row = find_row(tok[k], line_no);
            triplets.push_back({row, col, value});
          }
        }
        break;
      }
      case Section::Rhs:
      case Section::Ranges: {
        // The set name in the first field is optional; detect it by arity.
        size_t first = 1;
        if (tok.size() % 2 == 0 &&
            (row_index.count(tok[0]) || tok[0] == model.objective_name)) {
          first = 0;
        }
        if ((tok.size() - first) % 2 != 0 || tok.size() - first < 2) {
          throw MpsParseError(line_no, "expected '[SET] ROW VALUE [ROW VALUE]'");
        }
        for (size_t k = first; k + 1 < tok.size(); k += 2) {
          const Scalar value = parse_number(tok[k + 1], line_no);
          if (saw_objective && tok[k] == model.objective_name) {
            if (section == Section::Ranges) {
              throw MpsParseError(line_no, "range on the objective row");
            }
            continue;  // objective-row offsets are ignored
          }
          const Index row = find_row(tok[k], line_no);
          if (section == Section::Rhs) {
            rhs_entries.push_back({row, value, line_no});
          } else {
            range_entries.push_back({row, value, line_no});
          }
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 2) throw MpsParseError(line_no, "malformed bound line");
        const std::string type = upper(tok[0]);
        const bool needs_value = (type == "LO" || type == "UP" || type == "FX");
        if (type == "BV" || type == "LI" || type == "UI" || type == "SC") {
          throw MpsParseError(line_no, "bound type '" + tok[0] + "' is not supported");
        }
        if (!needs_value && type != "FR" && type != "MI" && type != "PL") {
          throw MpsParseError(line_no, "unknown bound type '" + tok[0] + "'");
        }
        std::string col_name;
        Scalar value = 0.0;
        if (needs_value) {
          if (tok.size() == 3) {
            col_name = tok[1];
            value = parse_number(tok[2], line_no);
          } else if (tok.size() == 4) {
            col_name = tok[2];
            value = parse_number(tok[3], line_no);
          } else {
            throw MpsParseError(line_no, "expected 'TYPE [SET] COLUMN VALUE'");
          }
        } else {
          if (tok.size() == 2) {
            col_name = tok[1];
          } else if (tok.size() == 3) {
            // Either 'TYPE SET COLUMN' or 'TYPE COLUMN dummy-value'.
            col_name = col_index.count(tok[2]) ? tok[2] : tok[1];
          } else if (tok.size() == 4) {
            col_name = tok[2];
          } else {
            throw MpsParseError(line_no, "malformed bound line");
          }
        }
        auto it = col_index.find(col_name);
        if (it == col_index.end()) {
          throw MpsParseError(line_no, "unknown column '" + col_name + "'");
        }
        const size_t c = static_cast<size_t>(it->second);
        if (type == "LO") {
          p.var_lower[c] = value;
          explicit_lower[c] = true;
        } else if (type == "UP") {
          p.var_upper[c] = value;
          // Classic rule: a negative upper bound with no stated lower bound
          // frees the lower side instead of leaving the box empty.
          if (value < 0.0 && !explicit_lower[c]) p.var_lower[c] = -kInf;
        } else if (type == "FX") {
          p.var_lower[c] = value;
          p.var_upper[c] = value;
          explicit_lower[c] = true;
        } else if (type == "FR") {
          p.var_lower[c] = -kInf;
          p.var_upper[c] = kInf;
          explicit_lower[c] = true;
        } else if (type == "MI") {
          p.var_lower[c] = -kInf;
          explicit_lower[c] = true;
        } else {  // PL
          p.var_upper[c] = kInf;
        }
        break;
      }
    }
  }

  if (objsense_pending) throw MpsParseError(line_no, "OBJSENSE without a value");
  if (!saw_rows) throw MpsParseError(line_no, "missing ROWS section");
  if (!saw_objective) throw MpsParseError(line_no, "no objective row declared");

  for (const PendingEntry& e : rhs_entries) {
    const size_t j = static_cast<size_t>(e.row);
    switch (row_type[j]) {
      case 'L': p.con_upper[j] = e.value; break;
      case 'G': p.con_lower[j] = e.value; break;
      case 'E': p.con_lower[j] = p.con_upper[j] = e.value; break;
      default: break;  // free row: right-hand side has no effect
    }
  }
  for (const PendingEntry& e : range_entries) {
    const size_t j = static_cast<size_t>(e.row);
    const Scalar rho = e.value;
    switch (row_type[j]) {
      case 'L': p.con_lower[j] = p.con_upper[j] - std::abs(rho); break;
      case 'G': p.con_upper[j] = p.con_lower[j] + std::abs(rho); break;
      case 'E':
        if (rho >= 0.0) {
          p.con_upper[j] = p.con_lower[j] + rho;
        } else {
          p.con_lower[j] = p.con_upper[j] + rho;
        }
        break;
      default:
        throw MpsParseError(e.line, "range on a free row");
    }
  }

  const Index m = static_cast<Index>(row_type.size());
  const Index n = static_cast<Index>(model.col_names.size());
  p.a = SparseMatrix::from_triplets(m, n, triplets);
  if (model.maximize) {
    for (Scalar& c : p.objective) c = -c;
  }
  if (const auto issue = validate(p)) {
    throw MpsParseError(0, "invalid model: " + issue->message);
  }
  return model;
}

inline MpsModel read_mps_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MpsParseError(0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mps(buf.str());
}

namespace mps_detail {

inline std::string format_value(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace mps_detail

// Writes a minimization-form problem with generated names (OBJ, R#, C#).
// Two-sided rows become L rows plus a RANGES entry; lower bounds are always
// written before upper bounds so the negative-UP reading rule never fires.
inline std::string write_mps(const LpProblem& p, const std::string& name,
                             bool maximize = false) {
  using mps_detail::format_value;
  const Index m = p.rows();
  const Index n = p.cols();
  std::ostringstream out;
  out << "NAME " << (name.empty() ? "LP" : name) << "\n";
  if (maximize) out << "OBJSENSE MAX\n";

  out << "ROWS\n N OBJ\n";
  for (Index j = 0; j < m; ++j) {
    const size_t jj = static_cast<size_t>(j);
    const Scalar lo = p.con_lower[jj];
    const Scalar hi = p.con_upper[jj];
    char type;
    if (lo == hi) {
      type = 'E';
    } else if (is_finite(hi)) {
      type = 'L';  // covers both one-sided and ranged rows
    } else if (is_finite(lo)) {
      type = 'G';
    } else {
      type = 'N';
    }
    out << ' ' << type << " R" << j << "\n";
  }

  out << "COLUMNS\n";
  for (Index i = 0; i < n; ++i) {
    const size_t ii = static_cast<size_t>(i);
    const Scalar c = maximize ? -p.objective[ii] : p.objective[ii];
    const bool empty_column = p.a.by_col.start[ii] == p.a.by_col.start[ii + 1];
    // A column must appear at least once or it would vanish on re-read, so an
    // otherwise empty column gets an explicit zero objective entry.
    if (c != 0.0 || empty_column) out << " C" << i << " OBJ " << format_value(c) << "\n";
    for (Index k = p.a.by_col.start[ii]; k < p.a.by_col.start[ii + 1]; ++k) {
      out << " C" << i << " R" << p.a.by_col.index[static_cast<size_t>(k)] << ' '
          << format_value(p.a.by_col.value[static_cast<size_t>(k)]) << "\n";
    }
  }

  out << "RHS\n";
  for (Index j = 0; j < m; ++j) {
    const size_t jj = static_cast<size_t>(j);
    const Scalar lo = p.con_lower[jj];
    const Scalar hi = p.con_upper[jj];
    if (lo == hi) {
      out << " RHS R" << j << ' ' << format_value(lo) << "\n";
    } else if (is_finite(hi)) {
      out << " RHS R" << j << ' ' << format_value(hi) << "\n";
    } else if (is_finite(lo)) {
      out << " RHS R" << j << ' ' << format_value(lo) << "\n";
    }
  }

  bool have_ranges = false;
  for (Index j = 0; j < m; ++j) {
    const size_t jj = static_cast<size_t>(j);
    if (p.con_lower[jj] != p.con_upper[jj] && is_finite(p.con_lower[jj]) &&
        is_finite(p.con_upper[jj])) {
      if (!have_ranges) {
        out << "RANGES\n";
        have_ranges = true;
      }
      out << " RNG R" << j << ' ' << format_value(p.con_upper[jj] - p.con_lower[jj]) << "\n";
    }
  }

  bool have_bounds = false;
  const auto bounds_header = [&] {
    if (!have_bounds) {
      out << "BOUNDS\n";
      have_bounds = true;
    }
  };
  for (Index i = 0; i < n; ++i) {
    const size_t ii = static_cast<size_t>(i);
    const Scalar lo = p.var_lower[ii];
    const Scalar hi = p.var_upper[ii];
    if (lo == 0.0 && !is_finite(hi) && hi > 0.0) continue;  // the default box
    if (lo == hi) {
      bounds_header();
      out << " FX BND C" << i << ' ' << format_value(lo) << "\n";
      continue;
    }
    if (!is_finite(lo) && !is_finite(hi)) {
      bounds_header();
      out << " FR BND C" << i << "\n";
      continue;
    }
    if (!is_finite(lo)) {
      bounds_header();
      out << " MI BND C" << i << "\n";
    } else if (lo != 0.0) {
      bounds_header();
      out << " LO BND C" << i << ' ' << format_value(lo) << "\n";
    }
    if (is_finite(hi)) {
      bounds_header();
      out << " UP BND C" << i << ' ' << format_value(hi) << "\n";
    }
  }

  out << "ENDATA\n";
  return out.str();
}

inline void write_mps_file(const std::string& path, const LpProblem& p,
                           const std::string& name, bool maximize = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << write_mps(p, name, maximize);
}

}  // namespace pdhglp
