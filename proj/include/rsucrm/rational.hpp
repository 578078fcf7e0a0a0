#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rsucrm {

// Exact fraction for group-rule branch weights. Kept reduced with a positive
// denominator so equality is plain member comparison.
struct Rational {
  std::int64_t num{0};
  std::int64_t den{1};

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
  }
  Rational operator+(const Rational& o) const {
    const std::int64_t g = std::gcd(den, o.den);
    const std::int64_t scale = o.den / g;
    return Rational(num * scale + o.num * (den / g), den * scale);
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

}  // namespace rsucrm
