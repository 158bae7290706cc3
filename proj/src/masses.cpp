#include "spiderweb/masses.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "spiderweb/errors.hpp"

namespace spiderweb {

namespace {

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw ValidationError("not a number in mass list: '" + s + "'");
  return v;
}

}  // namespace

MassSpec MassSpec::parse(const std::string& text) {
  MassSpec spec;
  spec.text_ = text;
  if (text == "inv") {
    spec.kind_ = Kind::Inverse;
  } else if (text == "kappa") {
    spec.kind_ = Kind::Kappa;
  } else if (text.rfind("equal:", 0) == 0) {
    const std::string v = text.substr(6);
    if (v == "1/ell") {
      spec.kind_ = Kind::EqualInverseEll;
    } else {
      spec.kind_ = Kind::Equal;
      spec.values_ = {parse_number(v)};
    }
  } else {
    spec.kind_ = Kind::List;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) spec.values_.push_back(parse_number(item));
    if (spec.values_.empty()) throw ValidationError("empty mass list");
  }
  return spec;
}

std::vector<double> MassSpec::masses(int n, int ell) const {
  if (n < 1) throw ValidationError("ring count n must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    double m = 0.0;
    switch (kind_) {
      case Kind::List:
        if (static_cast<std::size_t>(i) > values_.size()) {
          throw ValidationError("mass list has " + std::to_string(values_.size()) + " entries, need " + std::to_string(n));
        }
        m = values_[static_cast<std::size_t>(i - 1)];
        break;
      case Kind::Equal: m = values_[0]; break;
      case Kind::EqualInverseEll: m = 1.0 / ell; break;
      case Kind::Inverse: m = 1.0 / i; break;
      case Kind::Kappa: m = kappa(i); break;
    }
    out[static_cast<std::size_t>(i - 1)] = m;
  }
  return out;
}

double kappa(int x) {
  const int u = x - 25;
  // sin(21 pi u) = 0 at every integer; the quotient survives only where the
  // denominator vanishes too (u even), with limit (-1)^(u/2).
  double quotient = 0.0;
  if (u % 2 == 0) quotient = (u / 2) % 2 == 0 ? 1.0 : -1.0;
  return std::abs(quotient + std::cos(M_PI * x / 25.0));
}

}  // namespace spiderweb
