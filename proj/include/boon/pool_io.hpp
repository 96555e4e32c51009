#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "boon/pool.hpp"

namespace boon {

enum class PoolFormat { csv, jsonl };

struct PoolFileSpec {
  std::filesystem::path path;
  PoolFormat format = PoolFormat::csv;
  std::string validation_column = "validation";
  std::string test_column = "test";
  Direction direction = Direction::maximize;
};

struct RowRejection {
  std::size_t row = 0;  // 1-based line number in the file
  std::string reason;
};

struct LoadedPool {
  ResultPool pool;
  std::vector<RowRejection> rejected;
};

/// .jsonl / .ndjson select JSON lines; everything else is read as CSV.
PoolFormat format_for_path(const std::filesystem::path& path);

/// Reads a pool. Every data row either becomes a record or a rejection; with
/// allow_rejects false any rejection fails the load (malformed_rows) with the
/// offending row numbers. Scores are taken verbatim, never rescaled.
LoadedPool load_pool(const PoolFileSpec& spec, bool allow_rejects = false);
LoadedPool parse_pool(std::istream& in, const PoolFileSpec& spec, bool allow_rejects = false);

}  // namespace boon
