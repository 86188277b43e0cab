#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edubayes {

// Rectangular examinee-by-task response table. Cells are 0, 1, or missing;
// missing cells stay out of every likelihood and count.
class ResponseMatrix {
 public:
  static constexpr std::int8_t kMissing = -1;

  ResponseMatrix() = default;
  ResponseMatrix(std::vector<std::string> examinees, std::vector<std::string> tasks);

  std::size_t num_examinees() const { return examinees_.size(); }
  std::size_t num_tasks() const { return tasks_.size(); }
  const std::vector<std::string>& examinees() const { return examinees_; }
  const std::vector<std::string>& tasks() const { return tasks_; }

  int task_index(const std::string& id) const;  // throws on unknown id

  std::int8_t cell(std::size_t examinee, std::size_t task) const {
    return cells_[examinee * tasks_.size() + task];
  }
  bool missing(std::size_t examinee, std::size_t task) const {
    return cell(examinee, task) == kMissing;
  }
  void set(std::size_t examinee, std::size_t task, std::int8_t value);

  // Row slice [begin, end).
  ResponseMatrix slice_examinees(std::size_t begin, std::size_t end) const;
  // Column subset in the listed order.
  ResponseMatrix select_tasks(const std::vector<std::string>& task_ids) const;
  // Columns not named survive, original order.
  ResponseMatrix drop_tasks(const std::vector<std::string>& task_ids) const;

 private:
  std::vector<std::string> examinees_;
  std::vector<std::string> tasks_;
  std::vector<std::int8_t> cells_;
};

// CSV layout: header "examinee,<task ids...>", one row per examinee,
// cells 0/1/NA. Parse errors cite the line number.
ResponseMatrix load_responses_csv(const std::string& path);
void save_responses_csv(const ResponseMatrix& m, const std::string& path);

std::string responses_to_csv(const ResponseMatrix& m);
ResponseMatrix responses_from_csv(const std::string& text, const std::string& origin);

}  // namespace edubayes
