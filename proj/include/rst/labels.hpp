#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rst/rational.hpp"
#include "rst/scaling.hpp"

namespace rst {

enum class LabelKind { Kernel, Noise };

using LabelId = int;

// Edge type: integration kernel (positive degree) or driving noise.  Noise
// labels carry the reg value that fixes the Cameron-Martin type norm used by
// the probabilistic suites.
struct Label {
  std::string name;
  LabelKind kind = LabelKind::Kernel;
  Rational degree;  // |l|_s
  Rational reg;     // noise only
};

class LabelSet {
 public:
  LabelSet() = default;

  LabelId add(Label l) {
    if (by_name_.count(l.name)) throw std::invalid_argument("LabelSet: duplicate label " + l.name);
    if (l.kind == LabelKind::Kernel && !l.degree.is_positive())
      throw std::invalid_argument("LabelSet: kernel label '" + l.name + "' must have degree > 0");
    LabelId id = LabelId(labels_.size());
    by_name_[l.name] = id;
    labels_.push_back(std::move(l));
    return id;
  }

  const Label& operator[](LabelId id) const { return labels_.at(std::size_t(id)); }
  std::size_t size() const { return labels_.size(); }

  LabelId find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::invalid_argument("LabelSet: unknown label '" + name + "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }

  std::vector<LabelId> noise_labels() const {
    std::vector<LabelId> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].kind == LabelKind::Noise) out.push_back(LabelId(i));
    return out;
  }
  std::vector<LabelId> kernel_labels() const {
    std::vector<LabelId> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].kind == LabelKind::Kernel) out.push_back(LabelId(i));
    return out;
  }

 private:
  std::vector<Label> labels_;
  std::map<std::string, LabelId> by_name_;
};

}  // namespace rst
