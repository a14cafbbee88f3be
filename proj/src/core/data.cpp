#include "core/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/errors.hpp"

namespace plpfrail::data {

void ObservationDesign::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("truncation time T must be positive");
  if (m < 1) throw DomainError("number of systems m must be at least 1");
  if (K < 1) throw DomainError("number of causes K must be at least 1");
}

FailureDataset::FailureDataset(ObservationDesign design, std::vector<FailureRecord> records)
    : design_(design), records_(std::move(records)) {
  design_.validate();
  for (const auto& r : records_) {
    if (r.system_id < 1 || r.system_id > design_.m)
      throw DomainError("system_id " + std::to_string(r.system_id) + " outside 1.." +
                        std::to_string(design_.m));
    if (r.cause < 1 || r.cause > design_.K)
      throw DomainError("cause " + std::to_string(r.cause) + " outside 1.." +
                        std::to_string(design_.K));
    if (!(r.time > 0.0) || !(r.time < design_.T))
      throw DomainError("failure time " + format_double(r.time) + " outside (0, " +
                        format_double(design_.T) + ")");
  }
  std::stable_sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) {
    return a.system_id != b.system_id ? a.system_id < b.system_id : a.time < b.time;
  });
  offsets_.assign(design_.m + 1, 0);
  for (const auto& r : records_) ++offsets_[r.system_id];
  for (std::size_t j = 1; j <= design_.m; ++j) offsets_[j] += offsets_[j - 1];
  for (std::size_t i = 1; i < records_.size(); ++i) {
    const auto& a = records_[i - 1];
    const auto& b = records_[i];
    if (a.system_id == b.system_id && a.time == b.time)
      throw DomainError("tied failure times " + format_double(a.time) + " in system " +
                        std::to_string(a.system_id));
  }
}

std::span<const FailureRecord> FailureDataset::system(std::size_t j) const {
  if (j >= design_.m) throw DomainError("system index out of range");
  return std::span<const FailureRecord>(records_).subspan(offsets_[j], offsets_[j + 1] - offsets_[j]);
}

CountSummary summarize(const FailureDataset& data) {
  const auto& d = data.design();
  CountSummary s;
  s.m = d.m;
  s.K = d.K;
  s.n_jq.assign(d.m * d.K, 0);
  s.n_j.assign(d.m, 0);
  s.n_q.assign(d.K, 0);
  s.log_ratio_sums.assign(d.K, 0.0);
  for (const auto& r : data.records()) {
    const std::size_t j = r.system_id - 1;
    const std::size_t q = r.cause - 1;
    ++s.n_jq[j * d.K + q];
    ++s.n_j[j];
    ++s.n_q[q];
    s.log_ratio_sums[q] += std::log(d.T / r.time);
  }
  s.total = static_cast<long>(data.size());
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

FailureDataset read_csv(std::istream& in, const DesignOverrides& overrides) {
  DesignOverrides header;
  std::vector<FailureRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t col_sys = 0, col_cause = 1, col_time = 2;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      const std::string key = trim(std::string_view(body).substr(0, eq));
      const std::string val = trim(std::string_view(body).substr(eq + 1));
      if (key == "T") {
        double t;
        if (!parse_number(val, t)) throw ParseError(line_no, "bad T value '" + val + "'");
        header.T = t;
      } else if (key == "m" || key == "K") {
        std::size_t n;
        if (!parse_number(val, n)) throw ParseError(line_no, "bad " + key + " value '" + val + "'");
        (key == "m" ? header.m : header.K) = n;
      }
      continue;
    }
    const auto cells = split(line);
    if (!saw_header) {
      saw_header = true;
      auto find = [&](const char* name) -> std::size_t {
        auto it = std::find(cells.begin(), cells.end(), name);
        if (it == cells.end())
          throw ParseError(line_no, std::string("header is missing column '") + name + "'");
        return static_cast<std::size_t>(it - cells.begin());
      };
      col_sys = find("system_id");
      col_cause = find("cause");
      col_time = find("time");
      continue;
    }
    const std::size_t need = std::max({col_sys, col_cause, col_time}) + 1;
    if (cells.size() < need)
      throw ParseError(line_no, "expected " + std::to_string(need) + " columns, got " +
                                    std::to_string(cells.size()));
    FailureRecord r;
    if (!parse_number(cells[col_sys], r.system_id))
      throw ParseError(line_no, "bad system_id '" + cells[col_sys] + "'");
    if (!parse_number(cells[col_cause], r.cause))
      throw ParseError(line_no, "bad cause '" + cells[col_cause] + "'");
    if (!parse_number(cells[col_time], r.time) || !std::isfinite(r.time))
      throw ParseError(line_no, "bad time '" + cells[col_time] + "'");
    records.push_back(r);
  }
  if (!saw_header) throw ParseError(line_no, "missing header row system_id,cause,time");

  ObservationDesign design;
  const auto T = overrides.T ? overrides.T : header.T;
  if (!T) throw ConfigError("truncation time T not given (use '# T=<value>' or an override)");
  design.T = *T;
  std::size_t max_sys = 0, max_cause = 0;
  for (const auto& r : records) {
    max_sys = std::max(max_sys, r.system_id);
    max_cause = std::max(max_cause, r.cause);
  }
  design.m = overrides.m ? *overrides.m : header.m ? *header.m : max_sys;
  if (design.m == 0 && records.empty())
    throw DomainError("dataset has no failures and no m in its header");
  design.K = overrides.K ? *overrides.K : header.K ? *header.K : max_cause;
  return FailureDataset(design, std::move(records));
}

FailureDataset ingest(const std::string& path, const DesignOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in, overrides);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const FailureDataset& data) {
  const auto& d = data.design();
  out << "# T=" << format_double(d.T) << "\n# m=" << d.m << "\n# K=" << d.K << "\n";
  out << "system_id,cause,time\n";
  for (const auto& r : data.records())
    out << r.system_id << ',' << r.cause << ',' << format_double(r.time) << '\n';
}

void write_csv_file(const std::string& path, const FailureDataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, data);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace plpfrail::data
