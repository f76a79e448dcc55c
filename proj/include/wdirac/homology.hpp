#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wdirac/mesh.hpp"

namespace wdirac {

// Cohomology dimensions certified over the rationals.  Rank of an integer
// matrix over any prime field bounds the rational rank from below, so Betti
// numbers computed mod p bound the rational ones from above; explicit integer
// cycles independent of the image (checked by an augmented mod-p rank) bound
// them from below.  When the two bounds meet, the result is exact.

using SparseIntColumn = std::vector<std::pair<int, std::int64_t>>;

long long rank_mod_p(const SparseIntMatrix& a, long long p);
long long rank_mod_p_augmented(const SparseIntMatrix& a, const std::vector<SparseIntColumn>& extra,
                               long long p);

// betti_k = count(k) - rank d_k - rank d_{k+1}, ranks over GF(p)
std::vector<long long> betti_mod_p(const PeriodicMesh& mesh, long long p);

// top-degree cycle: every cell with its orientation sign
SparseIntColumn fundamental_cycle(const PeriodicMesh& mesh);

// one k-cycle per ascending axis subset: the fundamental cycle of the
// coordinate sub-torus through the origin
std::vector<SparseIntColumn> axis_cycles(const PeriodicMesh& mesh, int k);

bool is_cycle(const PeriodicMesh& mesh, int k, const SparseIntColumn& z);

struct BettiCertificate {
  std::vector<long long> betti;   // from the large-prime elimination
  std::array<long long, 2> primes;
  bool betti_match_across_primes = false;
  bool cycles_verified = false;        // exhibited cycles satisfy boundary = 0
  bool independence_verified = false;  // augmented rank grows by the cycle count
  bool exact() const {
    return betti_match_across_primes && cycles_verified && independence_verified;
  }
};

BettiCertificate certified_betti(const PeriodicMesh& mesh);

}  // namespace wdirac
