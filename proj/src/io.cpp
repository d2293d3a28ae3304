#include "klproj/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "klproj/model_id.hpp"

namespace klproj {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void write_table(const std::string& path, const OutTable& table) {
  if (table.values.cols() != static_cast<Index>(table.columns.size()))
    throw std::invalid_argument("write_table: " + std::to_string(table.columns.size()) +
                                " column names for " + std::to_string(table.values.cols()) +
                                " value columns");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char head[96];
  std::snprintf(head, sizeof(head), "# schema=klproj/1 seed=%llu config=%016llx",
                static_cast<unsigned long long>(table.seed),
                static_cast<unsigned long long>(table.config_hash));
  out << head << "\n";
  for (const auto& note : table.notes) out << "# " << note << "\n";
  for (size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out << '\t';
    out << table.columns[j];
  }
  out << "\n";
  for (Index i = 0; i < table.values.rows(); ++i) {
    for (Index j = 0; j < table.values.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(table.values(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

OutTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  OutTable t;
  unsigned long long seed = 0, config = 0;
  if (std::sscanf(line.c_str(), "# schema=klproj/1 seed=%llu config=%llx", &seed, &config) != 2)
    throw std::runtime_error(path + ": missing or incompatible schema header");
  t.seed = seed;
  t.config_hash = config;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      t.notes.push_back(line.substr(2));
      continue;
    }
    break;
  }
  if (line.empty()) throw std::runtime_error(path + ": missing column header");
  t.columns = split_tabs(line);
  std::vector<std::vector<double>> rows;
  size_t lineno = 1 + t.notes.size() + 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != t.columns.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.columns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (size_t j = 0; j < fields.size(); ++j) {
      // strtod, not stod: stod raises on subnormals, which %.16e can emit
      char* end = nullptr;
      row[j] = std::strtod(fields[j].c_str(), &end);
      if (fields[j].empty() || end != fields[j].c_str() + fields[j].size())
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" +
                                 fields[j] + "'");
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.columns.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::uint64_t hash_config(const std::map<std::string, std::string>& kv) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [key, value] : kv) {
    h = fnv1a64(key.data(), key.size(), h);
    h = fnv1a64("=", 1, h);
    h = fnv1a64(value.data(), value.size(), h);
    h = fnv1a64("\n", 1, h);
  }
  return h;
}

void write_error_record(const std::string& dir, const std::string& command,
                        const std::string& message) {
  try {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / "error.tsv");
    out << "command\tmessage\n";
    std::string clean = message;
    for (char& c : clean)
      if (c == '\t' || c == '\n') c = ' ';
    out << command << '\t' << clean << "\n";
  } catch (...) {
  }
}

}  // namespace klproj
