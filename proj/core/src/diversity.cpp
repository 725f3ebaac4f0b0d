#include "dstbc/diversity.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dstbc/constellation.hpp"
#include "dstbc/decode.hpp"

namespace dstbc {
namespace {

// Nonzero differences of a group's signal set, capped by sampling without replacement.
RMatrix nonzero_differences(const SignalSet& set, std::size_t cap, Rng& rng, long& available) {
  const RMatrix all = difference_set(set);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < all.cols(); ++c)
    if (all.col(c).cwiseAbs().maxCoeff() > 1e-12) keep.push_back(c);
  available = static_cast<long>(keep.size());
  if (keep.size() > cap) {
    std::shuffle(keep.begin(), keep.end(), rng);
    keep.resize(cap);
    std::sort(keep.begin(), keep.end());
  }
  return all(Eigen::all, keep);
}

std::vector<int> interference_for(const GroupingScheme& grouping, int k, Criterion criterion) {
  std::vector<int> out;
  for (int l = 0; l < grouping.group_count(); ++l) {
    const bool take = criterion == Criterion::pic_sic ? l > k : l != k;
    if (take) {
      const auto& g = grouping.groups[static_cast<std::size_t>(l)];
      out.insert(out.end(), g.begin(), g.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CMatrix combine(const DstbcCode& code, std::span<const int> indices, const RVector& coeffs) {
  CMatrix out = CMatrix::Zero(code.T2(), code.N());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out += coeffs[static_cast<Eigen::Index>(i)] * code.design.weight(indices[i]);
  return out;
}

void record(CriterionReport& report, double ratio, double threshold, Witness witness) {
  ++report.samples_tested;
  report.min_singular_value = std::min(report.min_singular_value, ratio);
  if (ratio <= threshold && report.passed) {
    report.passed = false;
    report.witness = std::move(witness);
  }
}

CriterionReport check_grouped(Criterion criterion, const DstbcCode& code, Rng& rng, const CheckOptions& options) {
  if (code.group_sets.size() != code.grouping.groups.size())
    throw ParameterError("criteria check needs one signal set per group");
  CriterionReport report;
  report.criterion = criterion;
  report.target_rank = code.N();
  report.min_singular_value = std::numeric_limits<double>::infinity();

  for (int k = 0; k < code.grouping.group_count() && report.passed; ++k) {
    const auto& group = code.grouping.groups[static_cast<std::size_t>(k)];
    long available = 0;
    const RMatrix diffs =
        nonzero_differences(code.group_sets[static_cast<std::size_t>(k)], options.difference_cap, rng, available);
    report.differences_available += available;
    report.differences_checked += diffs.cols();
    const auto interference = interference_for(code.grouping, k, criterion);
    const int draws = interference.empty() ? 1 : options.trials;

    for (Eigen::Index c = 0; c < diffs.cols() && report.passed; ++c) {
      const RVector a_k = diffs.col(c);
      const CMatrix own = combine(code, group, a_k);
      for (int t = 0; t < draws && report.passed; ++t) {
        const RVector u = real_gaussian(static_cast<Eigen::Index>(interference.size()), rng);
        const CMatrix X = own + combine(code, interference, u);
        record(report, singular_value_ratio(X), options.relative_threshold, Witness{k, a_k, u});
      }
    }
  }
  if (report.samples_tested == 0) report.min_singular_value = 0.0;
  return report;
}

// Reexpresses a witness as a full coefficient vector over all K symbols.
RVector full_coefficients(const DstbcCode& code, Criterion criterion, const Witness& w) {
  if (criterion == Criterion::zf) return w.u;
  RVector x = RVector::Zero(code.K());
  const auto& group = code.grouping.groups.at(static_cast<std::size_t>(w.k));
  for (std::size_t d = 0; d < group.size(); ++d) x[group[d]] = w.a_k[static_cast<Eigen::Index>(d)];
  const auto interference = interference_for(code.grouping, w.k, criterion);
  for (std::size_t i = 0; i < interference.size(); ++i) x[interference[i]] = w.u[static_cast<Eigen::Index>(i)];
  return x;
}

bool same_design(const LinearDesign& a, const LinearDesign& b) {
  if (a.T() != b.T() || a.N() != b.N() || a.K() != b.K()) return false;
  for (int i = 0; i < a.K(); ++i)
    if ((a.weight(i) - b.weight(i)).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

}  // namespace

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::pic: return "PIC";
    case Criterion::pic_sic: return "PIC-SIC";
    case Criterion::zf: return "ZF";
  }
  return "?";
}

double singular_value_ratio(const CMatrix& X) {
  if (X.rows() < X.cols()) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(X);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0.0;
  return s[s.size() - 1] / s[0];
}

CriterionReport check_pic(const DstbcCode& code, Rng& rng, const CheckOptions& options) {
  return check_grouped(Criterion::pic, code, rng, options);
}

CriterionReport check_pic_sic(const DstbcCode& code, Rng& rng, const CheckOptions& options) {
  return check_grouped(Criterion::pic_sic, code, rng, options);
}

CriterionReport check_zf(const DstbcCode& code, Rng& rng, const CheckOptions& options) {
  CriterionReport report;
  report.criterion = Criterion::zf;
  report.target_rank = code.N();
  report.min_singular_value = std::numeric_limits<double>::infinity();
  const int K = code.K();
  std::vector<int> all(static_cast<std::size_t>(K));
  std::iota(all.begin(), all.end(), 0);

  for (int i = 0; i < K && report.passed; ++i) {
    for (double sign : {1.0, -1.0}) {
      RVector u = RVector::Zero(K);
      u[i] = sign;
      record(report, singular_value_ratio(code.design.weight(i) * sign), options.relative_threshold,
             Witness{-1, RVector(), u});
    }
  }
  for (int t = 0; t < options.trials && report.passed; ++t) {
    const RVector u = real_gaussian(K, rng);
    record(report, singular_value_ratio(combine(code, all, u)), options.relative_threshold,
           Witness{-1, RVector(), u});
  }
  return report;
}

CriterionReport check_criterion(Criterion criterion, const DstbcCode& code, Rng& rng, const CheckOptions& options) {
  return criterion == Criterion::zf ? check_zf(code, rng, options) : check_grouped(criterion, code, rng, options);
}

CMatrix witness_matrix(const DstbcCode& code, Criterion criterion, const Witness& witness) {
  const RVector x = full_coefficients(code, criterion, witness);
  return evaluate(code.design, x);
}

bool witness_rank_deficient(const DstbcCode& code, Criterion found_under, const Witness& witness, Criterion as,
                            double relative_threshold) {
  const RVector x = full_coefficients(code, found_under, witness);
  if (as == Criterion::zf && x.cwiseAbs().maxCoeff() == 0.0) return false;
  // Under the nesting PIC-SIC interference c PIC interference c everything,
  // the same full coefficient vector is a legal instance of the looser criterion.
  return singular_value_ratio(evaluate(code.design, x)) <= relative_threshold;
}

bool cod_certificate(const DstbcCode& code) {
  if (!code.params) throw CertificateRefused("code was not built by diagonal layering of a COD");
  const CodeParams& p = *code.params;
  if (!verify_cod(p.cod)) throw CertificateRefused("the layered design is not a complex orthogonal design");
  if (code.group_sets.size() != code.grouping.groups.size())
    throw CertificateRefused("signal sets are not attached");
  for (std::size_t k = 0; k < code.group_sets.size(); ++k) {
    const SignalSet& set = code.group_sets[k];
    const RotationMatrix* q = set.rotation();
    if (q == nullptr || q->dim() != set.dim())
      throw CertificateRefused("group " + std::to_string(k + 1) + " signal set is not a rotated lattice");
    if (!q->is_orthogonal())
      throw CertificateRefused("group " + std::to_string(k + 1) + " rotation is not orthogonal");
    if (!verify_rotation(*q, set.components()))
      throw CertificateRefused("group " + std::to_string(k + 1) +
                               " rotation is not full-diversity over its component set");
  }
  const DstbcCode reference = build(p.N, p.cod, p.lambda, p.n);
  if (!same_design(code.design, reference.design) || code.grouping.groups != reference.grouping.groups)
    throw CertificateRefused("design or grouping differs from the layered construction");
  if (!layer_structure_holds(code)) throw CertificateRefused("layer placement invariant violated");
  return true;
}

CriterionReport check_with_certificate(const DstbcCode& code, Criterion criterion, Rng& rng,
                                       const CheckOptions& options) {
  CriterionReport report = check_criterion(criterion, code, rng, options);
  bool applicable = true;
  if (code.params) {
    if (criterion == Criterion::zf && code.params->lambda != 1) {
      applicable = false;
      report.certificate_note = "certificate covers ZF only for single-symbol groups";
    } else if (criterion == Criterion::pic && code.params->n > 2) {
      applicable = false;
      report.certificate_note = "certificate covers PIC only for one or two layers";
    }
  }
  if (!applicable) return report;
  try {
    report.analytic_certificate = cod_certificate(code);
    report.certificate_note = "COD layering certificate granted";
  } catch (const CertificateRefused& refused) {
    report.analytic_certificate = false;
    report.certificate_note = std::string("certificate refused: ") + refused.what();
  }
  if (report.analytic_certificate.value_or(false) && !report.passed)
    throw NumericalError("sampled witness contradicts the analytic certificate");
  return report;
}

std::vector<RelayFailureReport> relay_failure_sweep(const DstbcCode& code, int max_drop, Rng& rng,
                                                    const CheckOptions& options) {
  const int N = code.N();
  if (max_drop < 0 || max_drop >= N)
    throw ParameterError("max_drop must satisfy 0 <= max_drop < N = " + std::to_string(N));
  constexpr std::size_t kSubsetCap = 64;

  std::vector<RelayFailureReport> out;
  for (int a = 0; a <= max_drop; ++a) {
    std::vector<std::vector<int>> subsets;
    std::vector<bool> mask(static_cast<std::size_t>(N), false);
    std::fill(mask.begin(), mask.begin() + a, true);
    do {
      std::vector<int> subset;
      for (int j = 0; j < N; ++j)
        if (mask[static_cast<std::size_t>(j)]) subset.push_back(j);
      subsets.push_back(std::move(subset));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    if (subsets.size() > kSubsetCap) {
      std::shuffle(subsets.begin(), subsets.end(), rng);
      subsets.resize(kSubsetCap);
      std::sort(subsets.begin(), subsets.end());
    }
    for (auto& subset : subsets) {
      const DstbcCode reduced = drop_relays(code, subset);
      out.push_back({std::move(subset), check_pic_sic(reduced, rng, options)});
    }
  }
  return out;
}

bool projector_transform_selftest(int dim, int trials, Rng& rng) {
  if (dim < 2) throw ParameterError("projector self-test needs dim >= 2");
  std::uniform_int_distribution<int> rank_dist(1, dim - 1);
  const RMatrix eye = RMatrix::Identity(dim, dim);
  for (int t = 0; t < trials; ++t) {
    RMatrix A;
    while (true) {
      RMatrix B(dim, dim);
      for (int c = 0; c < dim; ++c) B.col(c) = real_gaussian(dim, rng);
      A = B + B.transpose();
      Eigen::JacobiSVD<RMatrix> svd(A);
      const RVector& s = svd.singularValues();
      if (s[dim - 1] > 1e-3 * s[0]) break;
    }
    const int rank = rank_dist(rng);
    RMatrix sub(dim, rank);
    for (int c = 0; c < rank; ++c) sub.col(c) = real_gaussian(dim, rng);

    const RMatrix lhs = projector_complement(A * sub);
    Eigen::JacobiSVD<RMatrix> full(sub, Eigen::ComputeFullU);
    const RMatrix perp = full.matrixU().rightCols(dim - rank);
    const RMatrix rhs = eye - projector_complement(A.inverse() * perp);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-8) return false;
  }
  return true;
}

bool noise_bound_selftest(const DstbcCode& code, int receive_antennas, double P, int trials, Rng& rng) {
  const PowerConfig power = PowerConfig::standard(code, P);
  for (int t = 0; t < trials; ++t) {
    const auto channel = ChannelRealization::draw(code.N(), receive_antennas, rng);
    if (!noise_bound(code, channel, power).holds()) return false;
  }
  return true;
}

}  // namespace dstbc
