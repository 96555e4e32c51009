#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace boon {

enum class Direction { maximize, minimize };

std::string_view to_string(Direction d);

struct RunRecord {
  double validation = 0.0;
  double test = 0.0;

  bool operator==(const RunRecord&) const = default;
};

/// The m (validation, test) results of repeatedly training one architecture.
/// Always non-empty with finite scores. Record order carries no meaning.
class ResultPool {
 public:
  /// Throws invalid_argument when empty and invalid_data on non-finite scores.
  explicit ResultPool(std::vector<RunRecord> records,
                      Direction direction = Direction::maximize,
                      std::string metric_name = "score");

  std::span<const RunRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  Direction direction() const noexcept { return direction_; }
  const std::string& metric_name() const noexcept { return metric_name_; }

  std::vector<double> validation_scores() const;
  std::vector<double> test_scores() const;

  /// Records with both scores negated when minimizing, so that larger is
  /// always better. Estimators work on this view and negate back on exit.
  std::vector<RunRecord> oriented_records() const;

  /// Same direction and metric, different records.
  ResultPool with_records(std::vector<RunRecord> records) const;

 private:
  std::vector<RunRecord> records_;
  Direction direction_;
  std::string metric_name_;
};

}  // namespace boon
