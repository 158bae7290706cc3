#pragma once

#include <string>
#include <vector>

namespace spiderweb {

/// Ring mass presets as accepted on the command line:
///   "1,0.5,2"     explicit list, innermost first
///   "equal:v"     every ring v; "equal:1/ell" means 1/ell
///   "inv"         m_i = 1/i
///   "kappa"       m_i = kappa(i), which vanishes at i = 25
class MassSpec {
 public:
  enum class Kind { List, Equal, EqualInverseEll, Inverse, Kappa };

  /// Throws ValidationError on malformed text. Values are checked later by
  /// SpiderwebParams::validate.
  static MassSpec parse(const std::string& text);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  /// Entries of a list, or the single value of equal:v.
  const std::vector<double>& values() const { return values_; }

  /// Masses for n rings of ell bodies. A list must have at least n entries
  /// and contributes its first n.
  std::vector<double> masses(int n, int ell) const;

  /// Only the kappa preset produces a massless ring by design.
  bool allows_massless() const { return kind_ == Kind::Kappa; }

 private:
  Kind kind_ = Kind::Equal;
  std::string text_;
  std::vector<double> values_;
};

/// |sin(21 pi (x-25)) / (42 sin(pi (x-25)/2)) + cos(pi x/25)| at integer x,
/// with removable singularities replaced by their limits.
double kappa(int x);

}  // namespace spiderweb
