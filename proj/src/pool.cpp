#include "boon/pool.hpp"

#include <cmath>
#include <string>

#include "boon/error.hpp"

namespace boon {

std::string_view to_string(Direction d) {
  return d == Direction::maximize ? "maximize" : "minimize";
}

ResultPool::ResultPool(std::vector<RunRecord> records, Direction direction,
                       std::string metric_name)
    : records_(std::move(records)),
      direction_(direction),
      metric_name_(std::move(metric_name)) {
  if (records_.empty()) {
    throw Error(ErrorCode::invalid_argument, "result pool is empty");
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!std::isfinite(records_[i].validation) || !std::isfinite(records_[i].test)) {
      throw Error(ErrorCode::invalid_data,
                  "record " + std::to_string(i) + " has a non-finite score");
    }
  }
}

std::vector<double> ResultPool::validation_scores() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const RunRecord& r : records_) out.push_back(r.validation);
  return out;
}

std::vector<double> ResultPool::test_scores() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const RunRecord& r : records_) out.push_back(r.test);
  return out;
}

std::vector<RunRecord> ResultPool::oriented_records() const {
  if (direction_ == Direction::maximize) return records_;
  std::vector<RunRecord> out;
  out.reserve(records_.size());
  for (const RunRecord& r : records_) out.push_back({-r.validation, -r.test});
  return out;
}

ResultPool ResultPool::with_records(std::vector<RunRecord> records) const {
  return ResultPool(std::move(records), direction_, metric_name_);
}

}  // namespace boon
