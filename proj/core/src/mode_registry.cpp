#include "qcfb/mode_registry.hpp"

#include <set>

#include "qcfb/errors.hpp"

namespace qcfb {

std::shared_ptr<const ModeRegistry> ModeRegistry::create(std::vector<Mode> modes) {
  std::set<std::string> seen;
  for (const auto& m : modes) {
    if (m.label.empty()) throw ValidationError("mode label must not be empty");
    if (!seen.insert(m.label).second)
      throw ValidationError("duplicate mode label '" + m.label + "'");
    if (m.truncation < 2)
      throw ValidationError("mode '" + m.label + "' needs truncation >= 2, got " +
                            std::to_string(m.truncation));
  }
  return std::shared_ptr<const ModeRegistry>(new ModeRegistry(std::move(modes)));
}

std::optional<std::size_t> ModeRegistry::find(std::string_view label) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].label == label) return i;
  return std::nullopt;
}

std::size_t ModeRegistry::index(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw ValidationError("unknown mode '" + std::string(label) + "'");
}

std::size_t ModeRegistry::hilbert_dim() const {
  std::size_t dim = 1;
  for (const auto& m : modes_) dim *= static_cast<std::size_t>(m.truncation);
  return dim;
}

std::shared_ptr<const ModeRegistry> ModeRegistry::with_truncation(std::string_view label,
                                                                  int truncation) const {
  auto modes = modes_;
  modes.at(index(label)).truncation = truncation;
  return create(std::move(modes));
}

bool ModeRegistry::same_modes(const ModeRegistry& other) const {
  if (this == &other) return true;
  if (modes_.size() != other.modes_.size()) return false;
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].label != other.modes_[i].label) return false;
  return true;
}

bool ModeRegistry::operator==(const ModeRegistry& other) const {
  if (!same_modes(other)) return false;
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].truncation != other.modes_[i].truncation) return false;
  return true;
}

}  // namespace qcfb
