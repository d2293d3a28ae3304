#pragma once

#include <string>
#include <vector>

#include "family.hpp"
#include "types.hpp"

namespace klproj {

/// Design, response and per-observation weights for one GLM.  Immutable in
/// spirit: build it once via make_dataset and treat it as read-only after.
/// The intercept, when present, is an ordinary column flagged unpenalized.
struct Dataset {
  Matrix X;
  Vector y;
  Family family;
  Vector weights;                    // observation weights A_i, all positive
  std::vector<std::string> names;    // one per column
  std::vector<char> penalized;       // 0 marks columns excluded from penalties
  bool standardized = false;
  Vector center, scale;              // transform applied by standardize()

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  std::vector<Index> penalized_cols() const {
    std::vector<Index> out;
    for (Index j = 0; j < p(); ++j)
      if (penalized[static_cast<size_t>(j)]) out.push_back(j);
    return out;
  }
};

/// Validates shapes, finiteness and the binomial response range, then
/// assembles a Dataset.  Missing names/weights/flags get defaults.
Dataset make_dataset(Matrix X, Vector y, Family family, Vector weights = Vector(),
                     std::vector<std::string> names = {}, std::vector<char> penalized = {});

/// Header + numeric matrix read from a comma/tab separated file.
struct Table {
  std::vector<std::string> names;
  Matrix values;
};

/// Reads a delimited text file with a header row.  The delimiter is detected
/// from the header (tab wins over comma).  Empty or non-numeric cells are
/// rejected: the bundled analyses are complete-case.
Table read_delimited(const std::string& path);

/// True when every entry of the column is 0 or 1.
bool is_binary_column(const Matrix& X, Index j);

/// Centers and scales non-binary penalized columns to mean 0, sample
/// variance 1 (binary columns and unpenalized columns stay untouched).
void standardize(Dataset& ds);

/// Prepends an all-ones column named "(intercept)" flagged unpenalized.
void add_intercept(Dataset& ds);

}  // namespace klproj
