#include "exact_cg.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int fact(int n) {
  cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double exact_cg(int tj1, int tm1, int tj2, int tm2, int tj, int tm) {
  if (tm1 + tm2 != tm) return 0.0;
  if (tj < std::abs(tj1 - tj2) || tj > tj1 + tj2) return 0.0;
  // All half-sums below are integers for valid input.
  const int a = (tj1 + tj2 - tj) / 2;
  const int j1m1 = (tj1 - tm1) / 2, j1p1 = (tj1 + tm1) / 2;
  const int j2m2 = (tj2 - tm2) / 2, j2p2 = (tj2 + tm2) / 2;
  const int jm = (tj - tm) / 2, jp = (tj + tm) / 2;
  const int b = (tj - tj2 + tm1) / 2;   // J - j2 + m1
  const int c = (tj - tj1 - tm2) / 2;   // J - j1 - m2

  // Square of the prefactor as an exact rational.
  const cpp_rational pref2 = cpp_rational((tj + 1) * fact(a) * fact((tj1 - tj2 + tj) / 2) * fact((-tj1 + tj2 + tj) / 2),
                                          fact((tj1 + tj2 + tj) / 2 + 1)) *
                             cpp_rational(fact(j1p1) * fact(j1m1) * fact(j2p2) * fact(j2m2) * fact(jp) * fact(jm));
  cpp_rational sum = 0;
  for (int k = 0; k <= a; ++k) {
    if (j1m1 - k < 0 || j2p2 - k < 0 || b + k < 0 || c + k < 0) continue;
    const cpp_int den = fact(k) * fact(a - k) * fact(j1m1 - k) * fact(j2p2 - k) * fact(b + k) * fact(c + k);
    sum += cpp_rational((k % 2 == 0) ? 1 : -1, den);
  }
  // value = sign(sum) * sqrt(pref2 * sum^2), evaluated once in double.
  const cpp_rational sq = pref2 * sum * sum;
  const double mag = std::sqrt(static_cast<double>(sq));
  return sum < 0 ? -mag : mag;
}
