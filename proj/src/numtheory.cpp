#include "tracelab/numtheory.hpp"

#include "tracelab/errors.hpp"

namespace tracelab {

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % d == 0) return n == d;
  }
  u64 odd = n - 1;
  int twos = 0;
  while (odd % 2 == 0) {
    odd /= 2;
    ++twos;
  }
  // These witnesses make Miller-Rabin deterministic below 2^64.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, odd, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < twos; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

u64 gcd(u64 a, u64 b) {
  while (b != 0) {
    u64 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

u64 euler_phi(u64 n) {
  u64 result = n;
  for (u64 prime : prime_factors(n)) result = result / prime * (prime - 1);
  return result;
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::optional<u64> multiplicative_order(u64 a, u64 n) {
  if (n == 1) return 1;
  if (gcd(a % n, n) != 1) return std::nullopt;
  u64 order = euler_phi(n);
  for (u64 prime : prime_factors(order)) {
    while (order % prime == 0 && powmod(a, order / prime, n) == 1) order /= prime;
  }
  return order;
}

u64 checked_pow(u64 base, unsigned exp, u64 limit) {
  u64 result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && result > limit / base) throw BudgetError("integer power exceeds limit");
    result *= base;
  }
  return result;
}

}  // namespace tracelab
