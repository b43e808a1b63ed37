#include "roml/params.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <sstream>

namespace roml {

using boost::multiprecision::cpp_int;

namespace {

cpp_int ipow(cpp_int base, unsigned exp) {
  cpp_int out = 1;
  while (exp) {
    if (exp & 1) out *= base;
    base *= base;
    exp >>= 1;
  }
  return out;
}

}  // namespace

std::uint64_t ceil_ratio_pow(Ratio f, std::uint64_t n, unsigned p, unsigned q) {
  // Least m >= f * n^(p/q), i.e. least m with (m * f.den)^q >= f.num^q * n^p.
  const cpp_int rhs = ipow(cpp_int(f.num), q) * ipow(cpp_int(n), p);
  auto ok = [&](std::uint64_t m) { return ipow(cpp_int(m) * f.den, q) >= rhs; };

  // Float guess, then correct; the exact predicate settles boundary cases.
  double guess = f.value() * std::pow(static_cast<double>(n),
                                      static_cast<double>(p) / q);
  auto m = static_cast<std::uint64_t>(std::ceil(guess));
  if (m < 1) m = 1;
  while (m > 1 && ok(m - 1)) --m;
  while (!ok(m)) ++m;
  return m;
}

std::uint64_t floor_root_pow(std::uint64_t n, unsigned p, unsigned q) {
  const cpp_int rhs = ipow(cpp_int(n), p);
  auto ok = [&](std::uint64_t m) { return ipow(cpp_int(m), q) <= rhs; };

  double guess = std::pow(static_cast<double>(n), static_cast<double>(p) / q);
  auto m = static_cast<std::uint64_t>(guess);
  if (m < 1) m = 1;
  while (!ok(m)) --m;
  while (ok(m + 1)) ++m;
  return m;
}

Ratio Ratio::parse(std::string_view text) {
  const std::string s(text);
  auto fail = [&] { throw InvalidScaleError("cannot parse ratio '" + s + "'"); };

  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    try {
      const std::uint64_t n = std::stoull(s.substr(0, slash));
      const std::uint64_t d = std::stoull(s.substr(slash + 1));
      return reduced(n, d);
    } catch (const std::exception&) {
      fail();
    }
  }

  // Decimal, optionally with exponent: mantissa digits over a power of ten.
  std::size_t i = 0;
  std::uint64_t num = 0;
  int frac_digits = 0;
  bool saw_digit = false, saw_dot = false;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      if (num > (UINT64_MAX - 9) / 10) fail();
      num = num * 10 + static_cast<std::uint64_t>(ch - '0');
      saw_digit = true;
      if (saw_dot) ++frac_digits;
    } else if (ch == '.' && !saw_dot) {
      saw_dot = true;
    } else if ((ch == 'e' || ch == 'E') && saw_digit) {
      break;
    } else {
      fail();
    }
  }
  if (!saw_digit) fail();

  int exp10 = 0;
  if (i < s.size()) {  // exponent part
    try {
      std::size_t used = 0;
      exp10 = std::stoi(s.substr(i + 1), &used);
      if (used != s.size() - i - 1) fail();
    } catch (const std::exception&) {
      fail();
    }
  }

  std::int64_t shift = exp10 - frac_digits;
  std::uint64_t den = 1;
  for (; shift < 0; ++shift) {
    if (den > UINT64_MAX / 10) fail();
    den *= 10;
  }
  for (; shift > 0; --shift) {
    if (num > UINT64_MAX / 10) fail();
    num *= 10;
  }
  return reduced(num, den);
}

Params derive_params(std::uint64_t n, int k, Ratio c, Ratio c1, Ratio c2,
                     std::uint64_t t_factor) {
  auto reject = [](const std::string& what) {
    throw InvalidScaleError("infeasible parameters: " + what);
  };

  if (n < 16) reject("n >= 16 required");
  if (n > (1ULL << 31)) reject("n <= 2^31 required (element ids are 32-bit)");
  if (k < 2) reject("k >= 2 required");
  if (!c.positive() || c.num > c.den) reject("c in (0,1] required");
  if (!c1.positive() || c1.num >= c1.den) reject("c1 in (0,1) required");
  if (!c2.positive() || c2.num >= c2.den) reject("c2 in (0,1) required");
  if (t_factor == 0) reject("t_factor >= 1 required");

  Params p;
  p.n = n;
  p.k = k;
  p.c = c;
  p.c1 = c1;
  p.c2 = c2;
  p.t_factor = t_factor;

  const auto uk = static_cast<unsigned>(k);
  p.t = ceil_ratio_pow(Ratio{t_factor, 1}, n, 1, uk);
  p.w = ceil_ratio_pow(c1, n, 2 * uk - 3, 2 * uk);
  p.w2 = ceil_ratio_pow(c2, n, uk - 2, uk);  // n^0 = 1 when k = 2

  if (p.t > n) reject("t <= n violated (t = " + std::to_string(p.t) + ")");
  if (p.w > n) reject("w <= n violated");

  // N = ceil(t*w/c) with c = num/den: ceil(t*w*den / num).
  const cpp_int tw = cpp_int(p.t) * p.w;
  const cpp_int Nbig = (tw * c.den + c.num - 1) / c.num;
  if (Nbig > n) {
    std::ostringstream os;
    os << "N <= n violated (N = " << Nbig << " > n = " << n << ")";
    reject(os.str());
  }
  p.N = static_cast<std::uint64_t>(Nbig);
  if (tw > p.N) reject("t*w <= N violated");

  if (p.w2 > n) reject("w2 <= n violated");
  p.num_blocks = (n + p.w2 - 1) / p.w2;

  return p;
}

std::string Params::describe() const {
  std::ostringstream os;
  os << "n=" << n << " k=" << k << " c=" << c.str() << " c1=" << c1.str()
     << " c2=" << c2.str() << " t_factor=" << t_factor << " t=" << t
     << " w=" << w << " N=" << N << " w2=" << w2
     << " num_blocks=" << num_blocks;
  return os.str();
}

}  // namespace roml
