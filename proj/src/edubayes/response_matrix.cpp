#include "edubayes/response_matrix.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "edubayes/errors.hpp"

namespace edubayes {

ResponseMatrix::ResponseMatrix(std::vector<std::string> examinees,
                               std::vector<std::string> tasks)
    : examinees_(std::move(examinees)), tasks_(std::move(tasks)) {
  std::unordered_set<std::string> seen;
  for (const auto& e : examinees_) {
    require(!e.empty(), "empty examinee id");
    require(seen.insert(e).second, "duplicate examinee id '" + e + "'");
  }
  seen.clear();
  for (const auto& t : tasks_) {
    require(!t.empty(), "empty task id");
    require(seen.insert(t).second, "duplicate task id '" + t + "'");
  }
  cells_.assign(examinees_.size() * tasks_.size(), kMissing);
}

int ResponseMatrix::task_index(const std::string& id) const {
  for (int j = 0; j < static_cast<int>(tasks_.size()); ++j)
    if (tasks_[j] == id) return j;
  throw_invalid("unknown task '" + id + "' in response matrix");
}

void ResponseMatrix::set(std::size_t examinee, std::size_t task, std::int8_t value) {
  require(examinee < examinees_.size() && task < tasks_.size(), "cell index out of range");
  require(value == 0 || value == 1 || value == kMissing, "cell value must be 0, 1, or missing");
  cells_[examinee * tasks_.size() + task] = value;
}

ResponseMatrix ResponseMatrix::slice_examinees(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= examinees_.size(), "examinee slice out of range");
  ResponseMatrix out(
      std::vector<std::string>(examinees_.begin() + static_cast<std::ptrdiff_t>(begin),
                               examinees_.begin() + static_cast<std::ptrdiff_t>(end)),
      tasks_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < tasks_.size(); ++j) out.set(i - begin, j, cell(i, j));
  return out;
}

ResponseMatrix ResponseMatrix::select_tasks(const std::vector<std::string>& task_ids) const {
  std::vector<std::size_t> cols;
  cols.reserve(task_ids.size());
  for (const auto& id : task_ids) cols.push_back(static_cast<std::size_t>(task_index(id)));
  ResponseMatrix out(examinees_, task_ids);
  for (std::size_t i = 0; i < examinees_.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.set(i, j, cell(i, cols[j]));
  return out;
}

ResponseMatrix ResponseMatrix::drop_tasks(const std::vector<std::string>& task_ids) const {
  std::unordered_set<std::string> dropped;
  for (const auto& id : task_ids) {
    task_index(id);  // validate
    dropped.insert(id);
  }
  std::vector<std::string> kept;
  for (const auto& t : tasks_)
    if (dropped.count(t) == 0) kept.push_back(t);
  require(!kept.empty(), "dropping these tasks would leave an empty matrix");
  return select_tasks(kept);
}

std::string responses_to_csv(const ResponseMatrix& m) {
  std::ostringstream out;
  out << "examinee";
  for (const auto& t : m.tasks()) out << ',' << t;
  out << '\n';
  for (std::size_t i = 0; i < m.num_examinees(); ++i) {
    out << m.examinees()[i];
    for (std::size_t j = 0; j < m.num_tasks(); ++j) {
      const auto v = m.cell(i, j);
      out << ',';
      if (v == ResponseMatrix::kMissing)
        out << "NA";
      else
        out << static_cast<int>(v);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

ResponseMatrix responses_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), origin + ": empty file");
  auto header = split_csv_line(line);
  if (!header.empty() && header.front() == "examinee") header.erase(header.begin());
  if (!header.empty()) {
    throw_parse_if(header.back().empty(), origin + ":1: trailing comma in header");
  }
  throw_parse_if(header.empty(), origin + ":1: header must list task ids");

  std::vector<std::string> examinees;
  std::vector<std::vector<std::int8_t>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    throw_parse_if(fields.size() != header.size() + 1,
                   origin + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size() + 1) + " fields, got " +
                       std::to_string(fields.size()));
    throw_parse_if(fields[0].empty(),
                   origin + ":" + std::to_string(lineno) + ": empty examinee id");
    examinees.push_back(fields[0]);
    std::vector<std::int8_t> row;
    row.reserve(header.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const auto& f = fields[j];
      if (f == "0")
        row.push_back(0);
      else if (f == "1")
        row.push_back(1);
      else if (f == "NA" || f == "na" || f.empty())
        row.push_back(ResponseMatrix::kMissing);
      else
        throw_parse(origin + ":" + std::to_string(lineno) + ": cell '" + f +
                    "' is not 0, 1, or NA");
    }
    rows.push_back(std::move(row));
  }
  throw_parse_if(rows.empty(), origin + ": no examinee rows");

  ResponseMatrix m(std::move(examinees), header);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < header.size(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

ResponseMatrix load_responses_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  throw_io_if(!in, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return responses_from_csv(buf.str(), path);
}

void save_responses_csv(const ResponseMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  throw_io_if(!out, "cannot open '" + path + "' for writing");
  out << responses_to_csv(m);
  throw_io_if(!out.good(), "failed writing '" + path + "'");
}

}  // namespace edubayes
