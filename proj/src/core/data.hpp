#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plpfrail::data {

/// Common observation window (0, T] for m systems exposed to K causes.
struct ObservationDesign {
  double T = 0.0;
  std::size_t m = 0;
  std::size_t K = 0;

  void validate() const;
};

/// One failure. `system_id` and `cause` are 1-based as in the file format.
struct FailureRecord {
  std::size_t system_id = 0;
  std::size_t cause = 0;
  double time = 0.0;

  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

struct CountSummary {
  std::size_t m = 0;
  std::size_t K = 0;
  std::vector<long> n_jq;            // row-major m x K
  std::vector<long> n_j;             // per system
  std::vector<long> n_q;             // per cause
  std::vector<double> log_ratio_sums;  // per cause: sum of log(T / t) over its records
  long total = 0;

  long count(std::size_t system, std::size_t cause) const { return n_jq[system * K + cause]; }
};

/// Validated, immutable failure history. Records are stored sorted by
/// (system_id, time); within a system times are strictly increasing.
class FailureDataset {
public:
  FailureDataset(ObservationDesign design, std::vector<FailureRecord> records);

  const ObservationDesign& design() const noexcept { return design_; }
  std::span<const FailureRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Records of one system (0-based index), in time order.
  std::span<const FailureRecord> system(std::size_t j) const;

private:
  ObservationDesign design_;
  std::vector<FailureRecord> records_;
  std::vector<std::size_t> offsets_;  // m + 1 entries
};

CountSummary summarize(const FailureDataset& data);

/// Partial design read from `# key=value` header lines; unset entries are
/// filled from overrides or inferred from the records.
struct DesignOverrides {
  std::optional<double> T;
  std::optional<std::size_t> m;
  std::optional<std::size_t> K;
};

/// Reads the canonical CSV (`system_id,cause,time`). Overrides win over
/// header metadata. Without an m or K anywhere the maximum observed id is
/// used; T is mandatory.
FailureDataset read_csv(std::istream& in, const DesignOverrides& overrides = {});
FailureDataset ingest(const std::string& path, const DesignOverrides& overrides = {});

void write_csv(std::ostream& out, const FailureDataset& data);
void write_csv_file(const std::string& path, const FailureDataset& data);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace plpfrail::data
