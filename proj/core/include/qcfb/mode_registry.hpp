#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcfb {

/// Ordered set of bosonic modes. The order fixes the tensor-product layout of
/// every matrix built downstream (first mode is the most significant index).
class ModeRegistry {
 public:
  struct Mode {
    std::string label;
    int truncation = 2;
  };

  /// Throws ValidationError on duplicate labels or truncation < 2.
  static std::shared_ptr<const ModeRegistry> create(std::vector<Mode> modes);

  std::size_t size() const noexcept { return modes_.size(); }
  const Mode& mode(std::size_t index) const { return modes_.at(index); }
  const std::vector<Mode>& modes() const noexcept { return modes_; }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Like find() but throws ValidationError for unknown labels.
  std::size_t index(std::string_view label) const;

  /// Product of truncations.
  std::size_t hilbert_dim() const;

  /// Same registry with some truncations replaced; labels and order are kept.
  std::shared_ptr<const ModeRegistry> with_truncation(std::string_view label,
                                                      int truncation) const;

  /// Algebraic compatibility: identical labels in identical order.
  bool same_modes(const ModeRegistry& other) const;

  bool operator==(const ModeRegistry& other) const;

 private:
  explicit ModeRegistry(std::vector<Mode> modes) : modes_(std::move(modes)) {}

  std::vector<Mode> modes_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

}  // namespace qcfb
