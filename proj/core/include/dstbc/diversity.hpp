#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dstbc/channel.hpp"
#include "dstbc/construct.hpp"
#include "dstbc/types.hpp"

namespace dstbc {

enum class Criterion { pic, pic_sic, zf };

std::string to_string(Criterion criterion);

/// A rank-deficient instance: group k (0-based), a nonzero difference a_k and
/// interference coefficients u. For ZF, k is -1, a_k is empty and u spans all K symbols.
struct Witness {
  int k = -1;
  RVector a_k;
  RVector u;
};

struct CriterionReport {
  Criterion criterion = Criterion::pic_sic;
  bool passed = true;
  long samples_tested = 0;
  /// Smallest observed sigma_min / sigma_max ratio.
  double min_singular_value = 0.0;
  int target_rank = 0;
  std::optional<Witness> witness;
  /// Set by cod_certificate: true when granted, false when refused.
  std::optional<bool> analytic_certificate;
  std::string certificate_note;
  /// Differences checked out of the available nonzero differences, summed over groups.
  long differences_checked = 0;
  long differences_available = 0;
};

struct CheckOptions {
  int trials = 1000;
  std::size_t difference_cap = 256;
  double relative_threshold = 1e-8;
};

/// Rank test behind every criterion: sigma_min(X) > threshold * sigma_max(X)
/// and X has at least target_rank columns. Returns the ratio sigma_min / sigma_max.
double singular_value_ratio(const CMatrix& X);

CriterionReport check_pic(const DstbcCode& code, Rng& rng, const CheckOptions& options = {});
CriterionReport check_pic_sic(const DstbcCode& code, Rng& rng, const CheckOptions& options = {});
CriterionReport check_zf(const DstbcCode& code, Rng& rng, const CheckOptions& options = {});
CriterionReport check_criterion(Criterion criterion, const DstbcCode& code, Rng& rng,
                                const CheckOptions& options = {});

/// X_{I_k}(a_k) + X_{interference}(u) for a witness of the given criterion.
CMatrix witness_matrix(const DstbcCode& code, Criterion criterion, const Witness& witness);

/// Whether the witness, reinterpreted under `as`, is still rank deficient.
/// PIC-SIC witnesses embed into PIC (zero-padding u), PIC witnesses into ZF.
bool witness_rank_deficient(const DstbcCode& code, Criterion found_under, const Witness& witness,
                            Criterion as, double relative_threshold = 1e-8);

/// Deterministic certificate for layered COD codes: the COD identity, the
/// rotation's full-diversity property over its component set, the exact
/// layering of the design, and the layer-placement invariant.
/// Throws CertificateRefused naming the failing hypothesis.
class CertificateRefused : public Error {
 public:
  using Error::Error;
};
bool cod_certificate(const DstbcCode& code);

/// Runs check_pic_sic and records the certificate outcome in the report.
CriterionReport check_with_certificate(const DstbcCode& code, Criterion criterion, Rng& rng,
                                       const CheckOptions& options = {});

struct RelayFailureReport {
  std::vector<int> dropped;  // 0-based relay indices
  CriterionReport report;
};

/// For each drop count a = 0..max_drop and each subset of that size (all of
/// them when there are at most 64, otherwise 64 sampled), checks PIC-SIC on
/// the reduced code against rank N - a.
std::vector<RelayFailureReport> relay_failure_sweep(const DstbcCode& code, int max_drop, Rng& rng,
                                                    const CheckOptions& options = {});

/// Checks that the projector onto (A V')^perp equals the projector onto
/// span(A^{-1} basis(V'^perp)) for random symmetric full-rank A and subspaces V'.
bool projector_transform_selftest(int dim, int trials, Rng& rng);

/// Trace / largest-eigenvalue bound of the noise covariance over `trials` random channels.
bool noise_bound_selftest(const DstbcCode& code, int receive_antennas, double P, int trials, Rng& rng);

}  // namespace dstbc
