#include "klproj/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace klproj {

Dataset make_dataset(Matrix X, Vector y, Family family, Vector weights,
                     std::vector<std::string> names, std::vector<char> penalized) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("empty design matrix");
  if (y.size() != X.rows()) throw std::invalid_argument("response length does not match design rows");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("non-finite entries in data");
  if (weights.size() == 0) weights = Vector::Ones(X.rows());
  if (weights.size() != X.rows()) throw std::invalid_argument("weight length does not match design rows");
  if (!(weights.array() > 0).all()) throw std::invalid_argument("observation weights must be positive");
  if (family.kind == FamilyKind::binomial && !((y.array() >= 0).all() && (y.array() <= 1).all()))
    throw std::invalid_argument("binomial responses must be proportions in [0,1]");
  if (names.empty())
    for (Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  if (names.size() != static_cast<size_t>(X.cols()))
    throw std::invalid_argument("column name count does not match design");
  if (penalized.empty()) penalized.assign(static_cast<size_t>(X.cols()), 1);
  if (penalized.size() != static_cast<size_t>(X.cols()))
    throw std::invalid_argument("penalized flag count does not match design");

  Dataset ds;
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.family = family;
  ds.weights = std::move(weights);
  ds.names = std::move(names);
  ds.penalized = std::move(penalized);
  ds.center = Vector::Zero(ds.p());
  ds.scale = Vector::Ones(ds.p());
  return ds;
}

Table read_delimited(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  char delim = line.find('\t') != std::string::npos ? '\t' : ',';

  Table t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, delim)) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      t.names.push_back(cell);
    }
  }
  if (t.names.empty()) throw std::runtime_error(path + ": no header columns");

  std::vector<std::vector<double>> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, delim)) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (cell.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing value");
      size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell + "'");
      }
      if (used != cell.size())
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.names.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong field count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

bool is_binary_column(const Matrix& X, Index j) {
  for (Index i = 0; i < X.rows(); ++i)
    if (X(i, j) != 0.0 && X(i, j) != 1.0) return false;
  return true;
}

void standardize(Dataset& ds) {
  if (ds.standardized) return;
  Index n = ds.n();
  for (Index j = 0; j < ds.p(); ++j) {
    if (!ds.penalized[static_cast<size_t>(j)]) continue;
    if (is_binary_column(ds.X, j)) continue;
    double m = ds.X.col(j).mean();
    double ss = (ds.X.col(j).array() - m).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd <= 0) throw std::invalid_argument("constant column cannot be standardized: " +
                                             ds.names[static_cast<size_t>(j)]);
    ds.X.col(j) = (ds.X.col(j).array() - m) / sd;
    ds.center(j) = m;
    ds.scale(j) = sd;
  }
  ds.standardized = true;
}

void add_intercept(Dataset& ds) {
  Matrix X(ds.n(), ds.p() + 1);
  X.col(0) = Vector::Ones(ds.n());
  X.rightCols(ds.p()) = ds.X;
  ds.X = std::move(X);
  ds.names.insert(ds.names.begin(), "(intercept)");
  ds.penalized.insert(ds.penalized.begin(), 0);
  Vector c(ds.p()), s(ds.p());
  c << 0.0, ds.center;
  s << 1.0, ds.scale;
  ds.center = c;
  ds.scale = s;
}

}  // namespace klproj
