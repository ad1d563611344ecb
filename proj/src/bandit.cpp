#include "abandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "abandit/error.hpp"
#include "abandit/ini.hpp"
#include "abandit/rng.hpp"

namespace abandit {

BanditInstance::BanditInstance(std::string name, std::vector<RewardClass> classes,
                               Matrix arm_probs, double row_tolerance)
    : name_(std::move(name)) {
  const std::size_t m = classes.size();
  if (m < 2) throw ValidationError("instance needs at least 2 reward classes");
  if (arm_probs.rows() < 2) throw ValidationError("instance needs at least 2 arms");
  if (arm_probs.cols() != m) {
    throw ValidationError("probability matrix has " + std::to_string(arm_probs.cols()) +
                          " columns for " + std::to_string(m) + " classes");
  }

  std::set<std::string> labels;
  for (const auto& c : classes) {
    if (!std::isfinite(c.value)) throw ValidationError("class '" + c.label + "' has a non-finite value");
    if (!labels.insert(c.label).second) throw ValidationError("duplicate class label '" + c.label + "'");
  }

  for (std::size_t a = 0; a < arm_probs.rows(); ++a) {
    double sum = 0.0;
    for (double p : arm_probs.row(a)) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ValidationError("arm " + std::to_string(a) + " has a negative or non-finite probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > row_tolerance) {
      throw ValidationError("arm " + std::to_string(a) + " probabilities sum to " +
                            ini::exact(sum) + ", not 1");
    }
    for (double& p : arm_probs.row(a)) p /= sum;
  }

  // Sort classes ascending by value and permute the columns to match.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return classes[i].value < classes[j].value; });

  classes_.reserve(m);
  probs_ = Matrix(arm_probs.rows(), m);
  for (std::size_t k = 0; k < m; ++k) {
    RewardClass c = classes[order[k]];
    c.index = k;
    classes_.push_back(std::move(c));
    for (std::size_t a = 0; a < arm_probs.rows(); ++a) probs_(a, k) = arm_probs(a, order[k]);
  }
}

std::vector<double> BanditInstance::class_values() const {
  std::vector<double> values;
  values.reserve(classes_.size());
  for (const auto& c : classes_) values.push_back(c.value);
  return values;
}

double BanditInstance::mean_reward(Arm arm) const {
  double mean = 0.0;
  for (std::size_t k = 0; k < classes_.size(); ++k) mean += probs_(arm, k) * classes_[k].value;
  return mean;
}

std::vector<double> BanditInstance::mean_rewards() const {
  std::vector<double> means(num_arms());
  for (Arm a = 0; a < num_arms(); ++a) means[a] = mean_reward(a);
  return means;
}

Arm BanditInstance::best_arm() const {
  const auto means = mean_rewards();
  return static_cast<Arm>(std::max_element(means.begin(), means.end()) - means.begin());
}

RewardStream::RewardStream(std::vector<std::vector<ClassIndex>> draws,
                           std::vector<double> class_values, std::uint64_t seed,
                           std::size_t horizon)
    : draws_(std::move(draws)),
      class_values_(std::move(class_values)),
      seed_(seed),
      horizon_(horizon) {}

std::pair<ClassIndex, double> RewardStream::pull(Arm arm, std::size_t pull_index) const {
  if (pull_index >= horizon_) {
    throw ExhaustedStreamError("pull " + std::to_string(pull_index) + " of arm " +
                               std::to_string(arm) + " exceeds horizon " +
                               std::to_string(horizon_));
  }
  const ClassIndex c = draws_.at(arm)[pull_index];
  return {c, class_values_[c]};
}

namespace {

ClassIndex sample_categorical(std::span<const double> probs, Xoshiro256& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  return last_positive;
}

}  // namespace

RewardStream sample_stream(const BanditInstance& instance, std::size_t horizon,
                           std::uint64_t seed) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  std::vector<std::vector<ClassIndex>> draws(instance.num_arms());
  // One independent generator per arm so that arm a's sequence does not
  // depend on how many arms precede it.
  for (Arm a = 0; a < instance.num_arms(); ++a) {
    Xoshiro256 rng(mix_seed(seed, a));
    draws[a].reserve(horizon);
    for (std::size_t j = 0; j < horizon; ++j) {
      draws[a].push_back(sample_categorical(instance.probs(a), rng));
    }
  }
  return RewardStream(std::move(draws), instance.class_values(), seed, horizon);
}

std::pair<BanditInstance, BanditInstance> make_reference_instances() {
  const std::vector<RewardClass> classes{{0, "loss", -1.0}, {1, "small", 0.5}, {2, "big", 2.0}};

  Matrix d1(2, 3);
  d1(0, 1) = 1.0;
  d1(1, 0) = 0.3;
  d1(1, 2) = 0.7;

  Matrix d2(2, 3);
  d2(0, 1) = 1.0;
  d2(1, 0) = 0.55;
  d2(1, 2) = 0.45;

  return {BanditInstance("risky-better", classes, d1),
          BanditInstance("safe-better", classes, d2)};
}

BanditInstance parse_instance(const std::string& text, std::string name) {
  return instance_from_ini(ini::parse(text), std::move(name));
}

BanditInstance instance_from_ini(const ini::Document& doc, std::string name) {
  const ini::Section* cls = doc.find("classes");
  if (cls == nullptr) throw ValidationError("instance: missing [classes] section");
  std::vector<RewardClass> classes;
  for (const auto& [label, value] : cls->entries) {
    classes.push_back({classes.size(), label, ini::to_double(value, "classes." + label)});
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t a = 0;; ++a) {
    const ini::Section* arm = doc.find("arm." + std::to_string(a));
    if (arm == nullptr) break;
    std::vector<double> row(classes.size(), 0.0);
    for (const auto& [key, value] : arm->entries) {
      const std::string where = "arm." + std::to_string(a) + "." + key;
      if (key.size() < 2 || key[0] != 'p') throw ValidationError(where + ": expected key p<k>");
      const auto k = ini::to_unsigned(key.substr(1), where);
      if (k >= classes.size()) throw ValidationError(where + ": class index out of range");
      row[k] = ini::to_double(value, where);
    }
    rows.push_back(std::move(row));
  }
  for (const auto& s : doc.sections) {
    if (s.name.rfind("arm.", 0) == 0) {
      const auto idx = ini::to_unsigned(s.name.substr(4), "section [" + s.name + "]");
      if (idx >= rows.size()) throw ValidationError("instance: arm sections must be numbered 0..N-1 without gaps");
    }
  }

  Matrix probs(rows.size(), classes.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    std::copy(rows[a].begin(), rows[a].end(), probs.row(a).begin());
  }
  return BanditInstance(std::move(name), std::move(classes), std::move(probs), 1e-9);
}

BanditInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_instance(text.str(), path.stem().string());
}

std::string format_instance(const BanditInstance& instance) {
  std::ostringstream out;
  out << "[classes]\n";
  for (const auto& c : instance.classes()) out << c.label << " = " << ini::exact(c.value) << "\n";
  for (Arm a = 0; a < instance.num_arms(); ++a) {
    out << "\n[arm." << a << "]\n";
    for (std::size_t k = 0; k < instance.num_classes(); ++k) {
      out << "p" << k << " = " << ini::exact(instance.arm_probs()(a, k)) << "\n";
    }
  }
  return out.str();
}

}  // namespace abandit
