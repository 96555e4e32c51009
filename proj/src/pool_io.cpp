#include "boon/pool_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "boon/error.hpp"

namespace boon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_score(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool blank(std::string_view line) { return trim(line).empty(); }

struct Accumulator {
  std::vector<RunRecord> records;
  std::vector<RowRejection> rejected;
};

LoadedPool finish(Accumulator acc, const PoolFileSpec& spec, bool allow_rejects) {
  if (!acc.rejected.empty() && !allow_rejects) {
    std::ostringstream msg;
    msg << "rejected " << acc.rejected.size() << " malformed row(s) in " << spec.path.string();
    const std::size_t shown = std::min<std::size_t>(acc.rejected.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      msg << "\n  row " << acc.rejected[i].row << ": " << acc.rejected[i].reason;
    }
    if (shown < acc.rejected.size()) msg << "\n  ...";
    throw Error(ErrorCode::malformed_rows, msg.str());
  }
  if (acc.records.empty()) {
    throw Error(ErrorCode::no_valid_rows, "no valid rows in " + spec.path.string());
  }
  return LoadedPool{ResultPool(std::move(acc.records), spec.direction, spec.test_column),
                    std::move(acc.rejected)};
}

LoadedPool parse_csv(std::istream& in, const PoolFileSpec& spec, bool allow_rejects) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) {
      header_line = line;
      header = split_csv(header_line);
      break;
    }
  }
  if (header.empty()) {
    throw Error(ErrorCode::no_valid_rows, "no header row in " + spec.path.string());
  }
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::unknown_columns,
                  "column '" + name + "' not found in header of " + spec.path.string());
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t val_col = column(spec.validation_column);
  const std::size_t test_col = column(spec.test_column);

  Accumulator acc;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      acc.rejected.push_back({line_no, "expected " + std::to_string(header.size()) +
                                           " fields, found " + std::to_string(fields.size())});
      continue;
    }
    const auto v = parse_score(fields[val_col]);
    const auto t = parse_score(fields[test_col]);
    if (!v || !t) {
      const auto bad = !v ? fields[val_col] : fields[test_col];
      acc.rejected.push_back({line_no, "non-numeric or non-finite score '" + std::string(bad) + "'"});
      continue;
    }
    acc.records.push_back({*v, *t});
  }
  return finish(std::move(acc), spec, allow_rejects);
}

LoadedPool parse_jsonl(std::istream& in, const PoolFileSpec& spec, bool allow_rejects) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t objects = 0;
  bool saw_val = false;
  bool saw_test = false;
  Accumulator acc;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      acc.rejected.push_back({line_no, "not a JSON object"});
      continue;
    }
    ++objects;
    auto score = [&](const std::string& key, bool& seen) -> std::optional<double> {
      const auto it = doc.find(key);
      if (it == doc.end()) return std::nullopt;
      seen = true;
      if (!it->is_number()) return std::nullopt;
      const double x = it->get<double>();
      return std::isfinite(x) ? std::optional<double>(x) : std::nullopt;
    };
    const auto v = score(spec.validation_column, saw_val);
    const auto t = score(spec.test_column, saw_test);
    if (!v || !t) {
      acc.rejected.push_back({line_no, "missing or non-numeric '" +
                                           (!v ? spec.validation_column : spec.test_column) + "'"});
      continue;
    }
    acc.records.push_back({*v, *t});
  }
  if (objects > 0 && (!saw_val || !saw_test)) {
    throw Error(ErrorCode::unknown_columns,
                "field '" + (!saw_val ? spec.validation_column : spec.test_column) +
                    "' not present in any row of " + spec.path.string());
  }
  return finish(std::move(acc), spec, allow_rejects);
}

}  // namespace

PoolFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? PoolFormat::jsonl : PoolFormat::csv;
}

LoadedPool parse_pool(std::istream& in, const PoolFileSpec& spec, bool allow_rejects) {
  return spec.format == PoolFormat::csv ? parse_csv(in, spec, allow_rejects)
                                        : parse_jsonl(in, spec, allow_rejects);
}

LoadedPool load_pool(const PoolFileSpec& spec, bool allow_rejects) {
  std::error_code ec;
  const bool regular = std::filesystem::is_regular_file(spec.path, ec);
  std::ifstream in(spec.path);
  if (!regular || !in) {
    throw Error(ErrorCode::unreadable_file, "cannot open '" + spec.path.string() + "'");
  }
  return parse_pool(in, spec, allow_rejects);
}

}  // namespace boon
