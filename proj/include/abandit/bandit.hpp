#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abandit {

namespace ini {
struct Document;
}

using Arm = std::size_t;
using ClassIndex = std::size_t;

struct RewardClass {
  ClassIndex index = 0;
  std::string label;
  double value = 0.0;
};

// Row-major N x M matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// N arms sharing M reward classes. Classes are kept sorted ascending by value
// and re-indexed 0..M-1; probability columns follow the same order.
class BanditInstance {
 public:
  static constexpr double kRowTolerance = 1e-12;

  // Throws ValidationError unless N >= 2, M >= 2, labels are unique and every
  // row is a probability vector within `row_tolerance`. Rows are renormalized
  // exactly after validation.
  BanditInstance(std::string name, std::vector<RewardClass> classes, Matrix arm_probs,
                 double row_tolerance = kRowTolerance);

  const std::string& name() const noexcept { return name_; }
  BanditInstance with_name(std::string name) const {
    BanditInstance copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }
  std::size_t num_arms() const noexcept { return probs_.rows(); }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  const std::vector<RewardClass>& classes() const noexcept { return classes_; }
  const Matrix& arm_probs() const noexcept { return probs_; }
  std::span<const double> probs(Arm arm) const { return probs_.row(arm); }

  std::vector<double> class_values() const;
  double mean_reward(Arm arm) const;
  std::vector<double> mean_rewards() const;
  Arm best_arm() const;

 private:
  std::string name_;
  std::vector<RewardClass> classes_;
  Matrix probs_;
};

// draws[arm][k] is the class delivered on the (k+1)-th pull of `arm`.
class RewardStream {
 public:
  RewardStream(std::vector<std::vector<ClassIndex>> draws, std::vector<double> class_values,
               std::uint64_t seed, std::size_t horizon);

  std::size_t horizon() const noexcept { return horizon_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t num_arms() const noexcept { return draws_.size(); }
  const std::vector<ClassIndex>& draws(Arm arm) const { return draws_.at(arm); }

  // Throws ExhaustedStreamError when pull_index >= horizon.
  std::pair<ClassIndex, double> pull(Arm arm, std::size_t pull_index) const;

  bool operator==(const RewardStream&) const = default;

 private:
  std::vector<std::vector<ClassIndex>> draws_;
  std::vector<double> class_values_;
  std::uint64_t seed_;
  std::size_t horizon_;
};

RewardStream sample_stream(const BanditInstance& instance, std::size_t horizon,
                           std::uint64_t seed);

// "risky-better" (D1) and "safe-better" (D2), both over classes (-1, 0.5, 2).
std::pair<BanditInstance, BanditInstance> make_reference_instances();

// INI text: [classes] with `label = value` lines, [arm.<i>] with `p<k> = prob`.
// p<k> refers to the k-th class in file order. Rows must sum to 1 within 1e-9.
BanditInstance parse_instance(const std::string& text, std::string name = "instance");
// Reads [classes] and [arm.<i>] from an already parsed document; other
// sections are ignored.
BanditInstance instance_from_ini(const ini::Document& doc, std::string name);
BanditInstance load_instance(const std::filesystem::path& path);
std::string format_instance(const BanditInstance& instance);

}  // namespace abandit
