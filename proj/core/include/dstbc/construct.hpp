#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dstbc/constellation.hpp"
#include "dstbc/design.hpp"
#include "dstbc/rational.hpp"

namespace dstbc {

/// Partition of the symbol indices {0..K-1} into jointly decoded groups.
/// Indices are 0-based internally; external formats use 1-based indices.
struct GroupingScheme {
  std::vector<std::vector<int>> groups;

  int group_count() const { return static_cast<int>(groups.size()); }
  int max_group_size() const;
  int symbol_count() const;

  /// Throws ParameterError unless the groups are sorted, disjoint, nonempty and cover 0..K-1.
  void validate(int total_symbols) const;

  static GroupingScheme singletons(int total_symbols);
};

/// Source/relay processing that realizes a conjugate-linear design:
/// z = V x is broadcast, relay j sends B_j z (or conj(B_j) conj(z) when j is in S).
struct ConjugateLinearForm {
  int T1 = 0;
  CMatrix V;                    // T1 x K
  std::vector<CMatrix> B;       // N matrices, each T2 x T1
  std::vector<bool> conjugated; // membership in S, per relay

  std::vector<int> S() const;
  /// B_j or its conjugate, whichever multiplies the relay's actual input.
  CMatrix effective_relay_matrix(int relay) const;
};

/// Construction parameters of a code built from a COD by diagonal layering.
struct CodeParams {
  int N = 0;
  int L = 0;
  int lambda = 0;
  int n = 0;
  CodProfile cod;

  int N_prime() const { return cod.cols(); }
  int T_prime() const { return cod.rows(); }
  int K_prime() const { return cod.symbols(); }
};

struct DstbcCode {
  LinearDesign design;
  GroupingScheme grouping;
  std::vector<SignalSet> group_sets;
  std::optional<ConjugateLinearForm> relay_form;
  std::optional<CodeParams> params;

  int N() const { return design.N(); }
  int K() const { return design.K(); }
  int T2() const { return design.T(); }
  int T1() const;
};

/// Consecutive groups of `lambda` symbols: I_k = {(k-1)lambda+1, ..., k lambda}, g = n K'.
GroupingScheme grouping_eq5(int lambda, int cod_symbols, int n);

/// Diagonally layered code over N = L N' relays. Attaches the default signal
/// sets (see attach_signal_sets with pam_order 2) and the relay form.
DstbcCode build(int N, const CodProfile& cod, int lambda, int n);

/// Replaces every group's signal set with a `pam_order`-PAM lattice of the
/// group's dimension, rotated by `rotation` (default: RotationMatrix::default_for).
void attach_signal_sets(DstbcCode& code, int pam_order,
                        const std::optional<RotationMatrix>& rotation = std::nullopt);

/// Finds super-symbols z_p = x_a ± i x_b and a per-column conjugation pattern
/// realizing the design. Throws StructuralError if the design is not conjugate linear.
ConjugateLinearForm extract_relay_form(const LinearDesign& design);

/// Complex symbols per channel use, K / (2 (T1 + T2)).
Rational rate_cspcu(const DstbcCode& code);

/// Bits per channel use, sum of bits per group over T1 + T2.
Rational bits_per_channel_use(const DstbcCode& code);

/// Removes the given (0-based) relay columns from every weight and from the relay form.
DstbcCode drop_relays(const DstbcCode& code, std::span<const int> relays);

struct PresetParams {
  int N = 0;
  int lambda = 0;
  int n = 1;
};

/// Named members of the family:
///   example1       Alamouti COD, (N, lambda, n)
///   example2       trivial COD, (N, lambda, n)
///   toeplitz       trivial COD, lambda = 1, (N, n)
///   example2_full  trivial COD, lambda = N, (N, n)
///   alamouti_half  Alamouti COD, lambda = N/2, (N, n)
///   single_complex N = 2 (trivial COD) or N = 4 (Alamouti), lambda = n = 2
///   alamouti       plain 2x2 Alamouti code
DstbcCode preset(const std::string& name, const PresetParams& params);

std::vector<std::string> preset_names();

/// For codes with construction params: every nonzero block (r, c) sits on a
/// layer 1 <= r - c + 1 <= n, group k's symbols appear only on its own layer,
/// and every block column of that layer carries at least one of them.
bool layer_structure_holds(const DstbcCode& code);

}  // namespace dstbc
