#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace tracelab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
__extension__ using u128 = unsigned __int128;

bool is_prime(u64 n);

/// Distinct prime factors in increasing order.
std::vector<u64> prime_factors(u64 n);

u64 gcd(u64 a, u64 b);
u64 euler_phi(u64 n);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

/// Least k >= 1 with a^k = 1 mod n; nullopt when gcd(a, n) != 1.
std::optional<u64> multiplicative_order(u64 a, u64 n);

/// base^exp, throwing BudgetError when the result exceeds `limit`.
u64 checked_pow(u64 base, unsigned exp, u64 limit = UINT64_MAX);

}  // namespace tracelab
