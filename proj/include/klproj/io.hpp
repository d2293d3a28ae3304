#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace klproj {

/// Numeric table with provenance carried in a comment header:
///   # schema=klproj/1 seed=<u64> config=<hex u64>
/// followed by a tab separated name row and %.16e formatted values, so a
/// write/read cycle reproduces every double bit for bit.
struct OutTable {
  std::vector<std::string> columns;
  Matrix values;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<std::string> notes;  // extra "# ..." lines after the schema line
};

/// %.16e rendering used for all persisted doubles.
std::string format_double(double v);

void write_table(const std::string& path, const OutTable& table);

/// Rejects files whose schema line is missing or from a different major
/// version.
OutTable read_table(const std::string& path);

/// Flat key=value file, one pair per line, '#' starts a comment, whitespace
/// around either side is trimmed.  Keys use dotted sections (sampler.draws).
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Order independent digest of a key=value map, stamped into table headers so
/// artifacts can be matched to the configuration that produced them.
std::uint64_t hash_config(const std::map<std::string, std::string>& kv);

/// Writes <dir>/error.tsv with a single machine readable record.  Best
/// effort: failures to write the record itself are swallowed.
void write_error_record(const std::string& dir, const std::string& command,
                        const std::string& message);

}  // namespace klproj
