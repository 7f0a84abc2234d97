#include "cpip/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cpip/errors.hpp"
#include "cpip/io.hpp"

namespace cpip {

void Dataset::validate() const {
  if (rows.empty()) throw DataError("dataset: no rows");
  action_space.validate();
  const int k = action_space.size();
  const int dim = p();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Observation& o = rows[i];
    if (static_cast<int>(o.w.size()) != dim)
      throw DataError("dataset: inconsistent covariate count at row " + std::to_string(i + 1));
    if (o.a < 0 || o.a >= k)
      throw DataError("dataset: action index out of range at row " + std::to_string(i + 1));
    if (!std::isfinite(o.y))
      throw DataError("dataset: non-finite outcome at row " + std::to_string(i + 1));
    for (double v : o.w)
      if (!std::isfinite(v))
        throw DataError("dataset: non-finite covariate at row " + std::to_string(i + 1));
  }
  for (int idx : adjust_idx)
    if (idx < 0 || idx >= dim) throw DataError("dataset: adjustment index out of range");
}

std::vector<int> all_indices(int p) {
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, int line_no, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + s +
                    "' in column '" + col + "' as a number");
  }
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const std::vector<std::string>& adjust_cols) {
  std::string line;
  int line_no = 0;

  // Header (skipping metadata comments).
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw DataError("data file: missing header row");

  int a_col = -1, y_col = -1;
  std::vector<int> w_cols;
  std::vector<std::string> w_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "a" || name == "action")
      a_col = static_cast<int>(c);
    else if (name == "y" || name == "outcome")
      y_col = static_cast<int>(c);
    else {
      w_cols.push_back(static_cast<int>(c));
      w_names.push_back(name);
    }
  }
  if (a_col < 0) throw DataError("data file: no action column ('a')");
  if (y_col < 0) throw DataError("data file: no outcome column ('y')");
  if (w_cols.empty()) throw DataError("data file: no covariate columns");

  Dataset data;
  std::vector<std::string> seen_labels;
  std::vector<std::string> raw_actions;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    Observation o;
    o.w.reserve(w_cols.size());
    for (std::size_t j = 0; j < w_cols.size(); ++j)
      o.w.push_back(parse_double(fields[static_cast<std::size_t>(w_cols[j])], line_no, w_names[j]));
    o.y = parse_double(fields[static_cast<std::size_t>(y_col)], line_no, header[static_cast<std::size_t>(y_col)]);
    raw_actions.push_back(fields[static_cast<std::size_t>(a_col)]);
    data.rows.push_back(std::move(o));
  }
  if (data.rows.empty()) throw DataError("data file: no data rows");

  // Actions: integer indices 0..K-1, or labels collected in encounter order.
  bool all_int = true;
  int max_idx = -1;
  std::vector<int> int_actions(raw_actions.size(), 0);
  for (std::size_t i = 0; i < raw_actions.size(); ++i) {
    const std::string& s = raw_actions[i];
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
      all_int = false;
      break;
    }
    int_actions[i] = v;
    max_idx = std::max(max_idx, v);
  }

  if (all_int) {
    const int k = std::max(max_idx + 1, 2);
    data.action_space = ActionSpace::indexed(k);
    for (std::size_t i = 0; i < data.rows.size(); ++i) data.rows[i].a = int_actions[i];
  } else {
    for (const std::string& s : raw_actions)
      if (std::find(seen_labels.begin(), seen_labels.end(), s) == seen_labels.end())
        seen_labels.push_back(s);
    std::sort(seen_labels.begin(), seen_labels.end());
    data.action_space.labels = seen_labels;
    for (std::size_t i = 0; i < data.rows.size(); ++i)
      data.rows[i].a = data.action_space.index_of(raw_actions[i]);
  }

  if (adjust_cols.empty()) {
    data.adjust_idx = all_indices(static_cast<int>(w_cols.size()));
  } else {
    for (const std::string& name : adjust_cols) {
      const auto it = std::find(w_names.begin(), w_names.end(), name);
      if (it == w_names.end())
        throw DataError("adjustment column '" + name + "' not found in data header");
      data.adjust_idx.push_back(static_cast<int>(it - w_names.begin()));
    }
  }

  data.validate();
  return data;
}

Dataset read_dataset_csv_file(const std::string& path,
                              const std::vector<std::string>& adjust_cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  return read_dataset_csv(in, adjust_cols);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const int p = data.p();
  for (int j = 0; j < p; ++j) out << "w" << (j + 1) << ",";
  out << "a,y\n";
  for (const Observation& o : data.rows) {
    for (double v : o.w) out << fmt_double(v) << ",";
    out << o.a << "," << fmt_double(o.y) << "\n";
  }
}

}  // namespace cpip
