#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpip/types.hpp"

namespace cpip {

struct Observation {
  std::vector<double> w;
  int a = 0;
  double y = 0.0;
};

struct Dataset {
  std::vector<Observation> rows;
  ActionSpace action_space;
  std::vector<int> adjust_idx;  // adjustment subset Z of W; default: all of W

  int n() const { return static_cast<int>(rows.size()); }
  int p() const { return rows.empty() ? 0 : static_cast<int>(rows.front().w.size()); }
  void validate() const;
};

std::vector<int> all_indices(int p);

// CSV with header: covariate columns, one action column ("a", integer index
// or label), one outcome column ("y"). Lines starting with '#' are metadata.
Dataset read_dataset_csv(std::istream& in, const std::vector<std::string>& adjust_cols = {});
Dataset read_dataset_csv_file(const std::string& path,
                              const std::vector<std::string>& adjust_cols = {});
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace cpip
